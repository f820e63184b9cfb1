"""One operating point end to end: rates -> steady state -> drift/diffusion ->
stability -> Lyapunov -> logarithmic negativity."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .dynamics import StabilityReport, build_diffusion, build_drift, routh_hurwitz
from .entanglement import (
    Covariance,
    EntanglementResult,
    log_negativity,
    solve_lyapunov,
    uncertainty_margin,
)
from .params import DerivedRates, PhysicalParams, derive_rates
from .steady_state import SteadyState, solve_steady_state

# E_N below this counts as zero
EN_ZERO = 1e-9

STATUS_OK = "stable"
STATUS_UNSTABLE = "unstable"
STATUS_MARGINAL = "marginal"


class StageError(RuntimeError):
    """A pipeline stage failed; ``stage`` names it and ``__cause__`` holds the original."""

    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {type(cause).__name__}: {cause}")


@dataclass(frozen=True)
class PointResult:
    params: PhysicalParams
    rates: DerivedRates
    steady: SteadyState
    drift: np.ndarray = field(repr=False)
    diffusion: np.ndarray = field(repr=False)
    stability: StabilityReport
    covariance: Covariance | None = None
    entanglement: EntanglementResult | None = None

    @property
    def status(self) -> str:
        if self.stability.marginal:
            return STATUS_MARGINAL
        return STATUS_OK if self.stability.hurwitz_pass else STATUS_UNSTABLE

    @property
    def stable(self) -> bool:
        return self.status == STATUS_OK

    @property
    def E_N(self) -> float:
        """Log negativity, NaN where no stationary state exists."""
        return self.entanglement.E_N if self.entanglement is not None else math.nan

    @property
    def entangled(self) -> bool:
        return self.stable and self.E_N > EN_ZERO

    def to_record(self) -> dict:
        """Flat JSON-ready record of scalars."""
        rec = {f"param_{k}": v for k, v in asdict(self.params).items()}
        ss = self.steady
        rec.update(
            status=self.status,
            E_N=self.E_N,
            q_s=ss.q_s,
            a_s=ss.a_s,
            X_s=ss.X_s,
            kappa_s=ss.kappa_s,
            delta_s=ss.delta_s,
            bare_detuning=ss.bare_detuning(self.rates),
            photon_number=ss.photon_number,
            steady_residual=ss.residual,
            steady_branches=ss.n_roots,
            hurwitz_pass=self.stability.hurwitz_pass,
            max_eig_real=self.stability.max_real_part,
            stability_agreement=self.stability.agreement,
        )
        ent = self.entanglement
        rec.update(
            nu_minus=ent.nu_minus if ent else math.nan,
            sigma=ent.sigma if ent else math.nan,
            lyapunov_residual=ent.lyapunov_residual if ent else math.nan,
        )
        if self.covariance is not None:
            rec["uncertainty_margin"] = uncertainty_margin(self.covariance.matrix)
            rec.update(self.covariance.unique_entries())
        else:
            rec["uncertainty_margin"] = math.nan
            rec.update({k: math.nan for k in _V_KEYS})
        return rec


_V_KEYS = [f"V_{'qpXY'[i]}{'qpXY'[j]}" for i in range(4) for j in range(i, 4)]


def entanglement_at(p: PhysicalParams) -> PointResult:
    """Evaluate the full pipeline at one parameter point.

    Unstable or marginal points are returned with ``entanglement=None``;
    numerical failures raise :class:`StageError` tagged with the stage.
    """
    try:
        rates = derive_rates(p)
    except Exception as exc:
        raise StageError("derive_rates", exc) from exc
    try:
        ss = solve_steady_state(rates, p.detuning_s)
    except Exception as exc:
        raise StageError("steady_state", exc) from exc
    M = build_drift(rates, ss)
    N = build_diffusion(rates, ss)
    try:
        report = routh_hurwitz(M, scale=rates.omega_m)
    except Exception as exc:
        raise StageError("stability", exc) from exc
    if not report.stable:
        return PointResult(p, rates, ss, M, N, report)
    try:
        cov = solve_lyapunov(M, N, scale=rates.omega_m)
    except Exception as exc:
        raise StageError("lyapunov", exc) from exc
    try:
        ent = log_negativity(cov)
    except Exception as exc:
        raise StageError("log_negativity", exc) from exc
    return PointResult(p, rates, ss, M, N, report, cov, ent)


def log_negativity_at(p: PhysicalParams) -> float:
    """E_N at ``p``; NaN when the point has no stable steady state."""
    return entanglement_at(p).E_N
