"""Physical inputs of the microdisk-nanostring system and the rates derived from them.

All quantities are SI. Frequencies are angular (rad/s). The cavity decay
constants are amplitude decay rates, so the energy decay rate is ``2 * kappa``
and ``kappa0 = omega_c / (2 * Q_o)``.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Literal

from scipy import constants

HBAR = constants.hbar
K_B = constants.k
C_LIGHT = constants.c

TWO_PI = 2.0 * math.pi


class ParameterError(ValueError):
    """A physical parameter is outside its allowed domain."""

    def __init__(self, field: str, value, reason: str):
        self.field = field
        self.value = value
        super().__init__(f"{field}={value!r}: {reason}")


@dataclass(frozen=True)
class PhysicalParams:
    """Laboratory inputs.

    ``detuning_s`` is the effective detuning at the displaced steady state,
    which is the quantity held fixed when sweeping.
    """

    wavelength_lambda: float = 850e-9
    optical_Q: float = 4e6
    mech_freq_omega_m: float = TWO_PI * 15e6
    mech_Q: float = 1e6
    eff_mass_m: float = 2e-15
    input_power_P: float = 0.1
    coupling_ratio: float = 0.3
    disp_coupling_d: float = TWO_PI * 50e6 / 1e-9
    decay_length_l0: float = 100e-9
    detuning_s: float = 1.8 * TWO_PI * 15e6
    temperature_T: float = 0.05
    rc_scale: float = 1.0
    dc_scale: float = 1.0
    drop_gamma_in_drift: bool = False
    diffusion_xs_power: Literal["linear", "squared"] = "linear"

    def __post_init__(self):
        validate(self)

    def replace(self, **changes) -> PhysicalParams:
        return dataclasses.replace(self, **changes)

    @property
    def detuning_ratio(self) -> float:
        """Detuning in units of the mechanical frequency."""
        return self.detuning_s / self.mech_freq_omega_m

    def with_detuning_ratio(self, ratio: float) -> PhysicalParams:
        return self.replace(detuning_s=ratio * self.mech_freq_omega_m)


_POSITIVE = (
    "wavelength_lambda",
    "optical_Q",
    "mech_freq_omega_m",
    "mech_Q",
    "eff_mass_m",
    "input_power_P",
    "coupling_ratio",
    "disp_coupling_d",
    "decay_length_l0",
)
_NON_NEGATIVE = ("temperature_T", "rc_scale", "dc_scale")


def validate(p: PhysicalParams) -> None:
    for name in _POSITIVE:
        v = getattr(p, name)
        if not _finite(v) or v <= 0:
            raise ParameterError(name, v, "must be finite and > 0")
    for name in _NON_NEGATIVE:
        v = getattr(p, name)
        if not _finite(v) or v < 0:
            raise ParameterError(name, v, "must be finite and >= 0")
    if not _finite(p.detuning_s):
        raise ParameterError("detuning_s", p.detuning_s, "must be finite")
    if p.diffusion_xs_power not in ("linear", "squared"):
        raise ParameterError(
            "diffusion_xs_power", p.diffusion_xs_power, "must be 'linear' or 'squared'"
        )
    if not isinstance(p.drop_gamma_in_drift, bool):
        raise ParameterError("drop_gamma_in_drift", p.drop_gamma_in_drift, "must be a bool")


def _finite(v) -> bool:
    try:
        return math.isfinite(v)
    except TypeError:
        return False


def default_params(angular_quotes: bool = False) -> PhysicalParams:
    """Operating point used throughout the figures.

    Frequencies quoted in MHz (15 MHz mechanical, 50 MHz/nm dispersive) are
    read as ordinary frequencies and multiplied by 2*pi. ``angular_quotes=True``
    takes them as rad/s instead.
    """
    f = 1.0 if angular_quotes else TWO_PI
    omega_m = f * 15e6
    return PhysicalParams(
        mech_freq_omega_m=omega_m,
        disp_coupling_d=f * 50e6 / 1e-9,
        detuning_s=1.8 * omega_m,
    )


@dataclass(frozen=True)
class DerivedRates:
    """Rates and dimensionless couplings at the operating point."""

    omega_c: float
    omega_m: float
    kappa0: float
    kappa1: float
    kappa: float
    gamma_m: float
    r_reactive: float
    x_zpf_norm: float
    D_norm: float
    R_norm: float
    drive_E: float
    nbar: float
    drop_gamma_in_drift: bool = False
    diffusion_xs_power: str = "linear"

    def replace(self, **changes) -> DerivedRates:
        return dataclasses.replace(self, **changes)


def thermal_occupation(omega: float, temperature: float, *, hbar: float = HBAR,
                       k_b: float = K_B) -> float:
    """Bose-Einstein occupation 1/(exp(hbar*omega/kT) - 1); zero at T = 0."""
    if temperature == 0:
        return 0.0
    x = hbar * omega / (k_b * temperature)
    if x > 1.0:
        return math.exp(-x) / -math.expm1(-x)
    return 1.0 / math.expm1(x)


def derive_rates(p: PhysicalParams, *, hbar: float = HBAR, k_b: float = K_B,
                 c: float = C_LIGHT) -> DerivedRates:
    """Derive every rate the linearized dynamics needs.

    The physical constants are keyword arguments only so the same formulas
    can be evaluated in a rescaled unit system.
    """
    validate(p)
    omega_c = TWO_PI * c / p.wavelength_lambda
    kappa0 = omega_c / (2.0 * p.optical_Q)
    kappa1 = p.coupling_ratio * kappa0
    omega_m = p.mech_freq_omega_m
    x_zpf = math.sqrt(hbar / (p.eff_mass_m * omega_m))
    r = 2.0 * kappa1 / p.decay_length_l0
    return DerivedRates(
        omega_c=omega_c,
        omega_m=omega_m,
        kappa0=kappa0,
        kappa1=kappa1,
        kappa=kappa0 + kappa1,
        gamma_m=omega_m / p.mech_Q,
        r_reactive=r,
        x_zpf_norm=x_zpf,
        D_norm=p.disp_coupling_d * x_zpf * p.dc_scale,
        R_norm=r * x_zpf * p.rc_scale,
        # laser taken on cavity resonance for the photon flux; |Delta|/omega_c < 1e-6
        drive_E=math.sqrt(p.input_power_P / (hbar * omega_c)),
        nbar=thermal_occupation(omega_m, p.temperature_T, hbar=hbar, k_b=k_b),
        drop_gamma_in_drift=p.drop_gamma_in_drift,
        diffusion_xs_power=p.diffusion_xs_power,
    )


def evanescent_profile(gap_x: float, kappa1_at_contact: float, l0: float,
                       delta_omega_at_contact: float | None = None):
    """Frequency shift and waveguide coupling at gap ``gap_x``.

    Both follow the intensity of an evanescent field with amplitude decay
    length ``l0``, i.e. they fall off as ``exp(-2 x / l0)``. If
    ``delta_omega_at_contact`` is omitted it defaults to ``kappa1_at_contact``
    so the function can be used for the decay profile alone.

    Returns
    -------
    (delta_omega, kappa1)
    """
    if not _finite(gap_x) or gap_x < 0:
        raise ParameterError("gap_x", gap_x, "gap must be finite and >= 0")
    if not _finite(l0) or l0 <= 0:
        raise ParameterError("l0", l0, "decay length must be finite and > 0")
    if delta_omega_at_contact is None:
        delta_omega_at_contact = kappa1_at_contact
    factor = math.exp(-2.0 * gap_x / l0)
    return delta_omega_at_contact * factor, kappa1_at_contact * factor


def evanescent_slope(value: float, l0: float) -> float:
    """d/dx of an ``exp(-2x/l0)`` profile expressed through its local value."""
    return -2.0 * value / l0
