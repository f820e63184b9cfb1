"""Classical steady state of the driven cavity + nanostring.

With the drive phase chosen so that the intracavity amplitude is real, the
stationary Langevin equations reduce to a scalar fixed point in the
dimensionless displacement ``q``::

    q = D a(q)^2 / omega_m
    a(q) = (sqrt(2 k1) + R q / sqrt(2 k1)) E / sqrt((k + R q)^2 + Delta_s^2)

``Delta_s`` is held fixed during the solve.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .params import DerivedRates


class SteadyStateError(RuntimeError):
    """No admissible fixed point (kappa_s > 0) could be bracketed."""

    def __init__(self, message: str, bracket=None):
        self.bracket = bracket
        super().__init__(message)


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, residual: float):
        self.residual = residual
        super().__init__(message)


class MultistabilityWarning(UserWarning):
    pass


@dataclass(frozen=True)
class SteadyState:
    q_s: float
    a_s: float
    kappa_s: float
    delta_s: float
    residual: float
    p_s: float = 0.0
    n_roots: int = 1
    warnings: tuple[str, ...] = field(default=())

    @property
    def X_s(self) -> float:
        return math.sqrt(2.0) * self.a_s

    @property
    def Y_s(self) -> float:
        return 0.0

    @property
    def photon_number(self) -> float:
        return self.a_s * self.a_s

    def bare_detuning(self, rates: DerivedRates) -> float:
        """Laser detuning omega_c - omega_l before the optical-spring shift."""
        return self.delta_s + rates.D_norm * self.q_s


def cavity_amplitude(q, rates: DerivedRates, delta_s: float):
    """Real intracavity amplitude for a given displacement (vectorized in q)."""
    k1 = rates.kappa1
    s2k1 = math.sqrt(2.0 * k1)
    kappa_s = rates.kappa + rates.R_norm * q
    drive = (s2k1 + rates.R_norm * q / s2k1) * rates.drive_E
    return drive / np.hypot(kappa_s, delta_s)


def _residual(q, rates: DerivedRates, delta_s: float):
    a = cavity_amplitude(q, rates, delta_s)
    return q - rates.D_norm * a * a / rates.omega_m


def _fixed_point(rates, delta_s, rtol, max_iter, damping=0.5):
    q = 0.0
    for _ in range(max_iter):
        a = cavity_amplitude(q, rates, delta_s)
        q_new = rates.D_norm * a * a / rates.omega_m
        if not math.isfinite(q_new):
            return None
        if abs(q_new - q) <= rtol * max(abs(q_new), 1e-300):
            return q_new
        q = (1.0 - damping) * q + damping * q_new
    return None


def _bracket(rates, delta_s, max_expand=200):
    q0 = rates.D_norm * rates.drive_E**2 * 2.0 * rates.kappa1 / rates.kappa**2 / rates.omega_m
    hi = 4.0 * q0
    for _ in range(max_expand):
        if _residual(hi, rates, delta_s) > 0:
            return 0.0, hi
        hi *= 2.0
    raise SteadyStateError(
        f"residual never turned positive up to q = {hi:.3e}", bracket=(0.0, hi)
    )


def _all_roots(rates, delta_s, lo, hi, n_scan=257):
    qs = np.linspace(lo, hi, n_scan)
    g = _residual(qs, rates, delta_s)
    roots = []
    for i in range(n_scan - 1):
        if g[i] == 0.0:
            roots.append(float(qs[i]))
        elif g[i] * g[i + 1] < 0:
            roots.append(
                brentq(_residual, qs[i], qs[i + 1], args=(rates, delta_s),
                       xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
            )
    return roots


def solve_steady_state(rates: DerivedRates, delta_s: float, *, rtol: float = 1e-12,
                       max_iter: int = 10_000) -> SteadyState:
    """Self-consistent steady state at fixed effective detuning ``delta_s``.

    Damped fixed-point iteration from q = 0, with bracketed bisection as the
    fallback. The bracket is scanned for further sign changes; if there are
    several roots the one with smallest |q| is returned and a
    :class:`MultistabilityWarning` is emitted.
    """
    if not math.isfinite(delta_s):
        raise ValueError(f"delta_s must be finite, got {delta_s!r}")

    if rates.D_norm == 0.0 or rates.drive_E == 0.0:
        q = 0.0
        n_roots = 1
        notes: tuple[str, ...] = ()
    else:
        lo, hi = _bracket(rates, delta_s)
        roots = _all_roots(rates, delta_s, lo, hi)
        q_fp = _fixed_point(rates, delta_s, rtol, max_iter)
        if q_fp is not None and roots and abs(q_fp - roots[0]) > 1e-8 * max(roots[0], 1.0):
            q_fp = None  # iteration landed on a farther branch
        if q_fp is not None:
            q = q_fp
        elif roots:
            q = roots[0]
        else:
            raise SteadyStateError(
                f"no sign change of the fixed-point residual in [{lo:.3e}, {hi:.3e}]",
                bracket=(lo, hi),
            )
        n_roots = max(len(roots), 1)
        notes = ()
        if n_roots > 1:
            msg = f"{n_roots} steady-state branches at delta_s={delta_s:.6g}; smallest |q_s| kept"
            warnings.warn(msg, MultistabilityWarning, stacklevel=2)
            notes = (msg,)

    q = float(q)
    kappa_s = float(rates.kappa + rates.R_norm * q)
    if not kappa_s > 0:
        raise SteadyStateError(f"kappa_s = {kappa_s:.3e} is not positive")
    a = float(cavity_amplitude(q, rates, delta_s))
    residual = float(steady_state_residual(q, a, rates, delta_s))
    if not residual < max(100 * rtol, 1e-10):
        raise ConvergenceError(f"steady state residual {residual:.3e} above tolerance", residual)
    return SteadyState(q_s=q, a_s=a, kappa_s=kappa_s, delta_s=delta_s,
                       residual=residual, n_roots=n_roots, warnings=notes)


def steady_state_residual(q: float, a: float, rates: DerivedRates, delta_s: float) -> float:
    """Largest normalized mismatch of the two defining equations."""
    kappa_s = rates.kappa + rates.R_norm * q
    s2k1 = math.sqrt(2.0 * rates.kappa1)
    a_rhs = (s2k1 + rates.R_norm * q / s2k1) * rates.drive_E / math.hypot(kappa_s, delta_s)
    q_rhs = rates.D_norm * a * a / rates.omega_m
    r_a = abs(a - a_rhs) / max(abs(a_rhs), 1e-300) if a_rhs else abs(a)
    r_q = abs(q - q_rhs) / max(abs(q_rhs), 1e-300) if q_rhs else abs(q)
    return max(r_a, r_q)


def effective_couplings(ss: SteadyState, rates: DerivedRates):
    """Figures of merit for the optomechanical interaction.

    Returns
    -------
    zeta : complex
        D sqrt(2 k1) E / (i Delta_s + k1 + k0), the dispersive coupling dressed
        by the intracavity field.
    eta : float
        R E / sqrt(k1), the reactive drive coupling.
    """
    zeta = (rates.D_norm * math.sqrt(2.0 * rates.kappa1) * rates.drive_E
            / complex(rates.kappa1 + rates.kappa0, ss.delta_s))
    eta = rates.R_norm * rates.drive_E / math.sqrt(rates.kappa1)
    return zeta, eta
