"""Steady-state optomechanical entanglement with dispersive and reactive coupling."""

__version__ = "0.1.0"

from .params import DerivedRates, ParameterError, PhysicalParams, derive_rates, default_params
from .pipeline import PointResult, StageError, entanglement_at

__all__ = [
    "DerivedRates",
    "ParameterError",
    "PhysicalParams",
    "PointResult",
    "StageError",
    "derive_rates",
    "entanglement_at",
    "default_params",
]
