"""Linearized fluctuation dynamics in the basis f = (q, p, X, Y)."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .params import DerivedRates
from .steady_state import SteadyState

MARGINAL_BAND = 1e-9


def build_drift(rates: DerivedRates, ss: SteadyState) -> np.ndarray:
    wm = rates.omega_m
    gamma = 0.0 if rates.drop_gamma_in_drift else rates.gamma_m
    D, R = rates.D_norm, rates.R_norm
    Xs = ss.X_s
    eta = R * rates.drive_E / math.sqrt(rates.kappa1)
    M = np.zeros((4, 4))
    M[0, 1] = wm
    M[1, 0] = -wm
    M[1, 1] = -gamma
    M[1, 2] = D * Xs
    M[1, 3] = -eta
    M[2, 0] = eta - R * Xs
    M[2, 2] = -ss.kappa_s
    M[2, 3] = ss.delta_s
    M[3, 0] = D * Xs
    M[3, 2] = -ss.delta_s
    M[3, 3] = -ss.kappa_s
    return M


def build_diffusion(rates: DerivedRates, ss: SteadyState) -> np.ndarray:
    """Diagonal noise correlator N in M V + V M^T = -N.

    The reactive back-action entry uses X_s or X_s**2 depending on
    ``rates.diffusion_xs_power``.
    """
    power = 2 if rates.diffusion_xs_power == "squared" else 1
    backaction = rates.R_norm**2 / (2.0 * rates.kappa1) * ss.X_s**power / 2.0
    momentum = rates.gamma_m * (2.0 * rates.nbar + 1.0) + backaction
    return np.diag([0.0, momentum, rates.kappa, rates.kappa])


@dataclass(frozen=True)
class StabilityReport:
    char_poly: tuple[float, float, float, float]
    hurwitz_pass: bool
    failed_conditions: tuple[str, ...]
    eig_real_parts: tuple[float, ...]
    marginal: bool
    agreement: bool

    @property
    def stable(self) -> bool:
        return self.hurwitz_pass and not self.marginal

    @property
    def max_real_part(self) -> float:
        return max(self.eig_real_parts)

    def to_dict(self) -> dict:
        return {
            "char_poly": list(self.char_poly),
            "hurwitz_pass": self.hurwitz_pass,
            "failed_conditions": list(self.failed_conditions),
            "eig_real_parts": list(self.eig_real_parts),
            "marginal": self.marginal,
            "agreement": self.agreement,
        }


def characteristic_coefficients(M: np.ndarray) -> tuple[float, float, float, float]:
    """a1..a4 of det(sI - M) = s^4 + a1 s^3 + a2 s^2 + a3 s + a4.

    Built from sums of principal minors so the coefficients never pass through
    an eigendecomposition.
    """
    n = M.shape[0]
    coeffs = []
    for k in range(1, n + 1):
        total = 0.0
        for idx in itertools.combinations(range(n), k):
            total += np.linalg.det(M[np.ix_(idx, idx)])
        coeffs.append((-1) ** k * total)
    return tuple(float(c) for c in coeffs)


def hurwitz_conditions(a1, a2, a3, a4) -> dict[str, float]:
    """Quartic Hurwitz determinants; all must be positive for stability."""
    h3 = a1 * a2 - a3
    return {
        "a1 > 0": a1,
        "a4 > 0": a4,
        "a1*a2 - a3 > 0": h3,
        "(a1*a2 - a3)*a3 - a1^2*a4 > 0": h3 * a3 - a1 * a1 * a4,
    }


def routh_hurwitz(M: np.ndarray, scale: float = 1.0) -> StabilityReport:
    """Stability verdict for a 4x4 drift matrix with an eigenvalue cross-check.

    ``scale`` sets the marginal band: a spectrum whose largest real part lies
    within ``1e-9 * scale`` of zero is flagged marginal and never counted as
    stable. Pass omega_m for physical drift matrices.
    """
    M = np.asarray(M, dtype=float)
    if M.shape != (4, 4) or not np.all(np.isfinite(M)):
        raise ValueError("routh_hurwitz expects a finite 4x4 matrix")
    a = characteristic_coefficients(M)
    conds = hurwitz_conditions(*a)
    failed = tuple(name for name, value in conds.items() if not value > 0)
    passed = not failed
    re = np.linalg.eigvals(M).real
    max_re = float(re.max())
    marginal = abs(max_re) < MARGINAL_BAND * scale
    agreement = marginal or (passed == (max_re < 0))
    return StabilityReport(
        char_poly=a,
        hurwitz_pass=passed,
        failed_conditions=failed,
        eig_real_parts=tuple(float(x) for x in np.sort(re)),
        marginal=marginal,
        agreement=agreement,
    )
