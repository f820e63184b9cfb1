"""Parameter grids, critical temperatures and the T/Q_m scaling checks."""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from . import __version__
from .params import HBAR, K_B, PhysicalParams
from .pipeline import EN_ZERO, PointResult, StageError, entanglement_at

AXIS_NAMES = (
    "delta_s",
    "coupling_ratio",
    "temperature_T",
    "mech_Q",
    "input_power_P",
    "rc_scale",
    "dc_scale",
)
WORKERS_ENV = "OPTOENT_WORKERS"


class SweepSpecError(ValueError):
    pass


class NonBracketingError(ValueError):
    pass


class MultimodalityError(RuntimeError):
    pass


class InstabilityError(RuntimeError):
    pass


class PartialFitError(RuntimeError):
    def __init__(self, failures: dict):
        self.failures = failures
        listing = ", ".join(f"Q_m={q:g}: {msg}" for q, msg in failures.items())
        super().__init__(f"T_c failed for {len(failures)} Q_m values: {listing}")


@dataclass(frozen=True)
class Axis:
    """One sweep axis. ``delta_s`` is given in units of omega_m."""

    name: str
    min: float
    max: float
    count: int
    spacing: str = "linear"

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise SweepSpecError(f"unknown axis {self.name!r}; valid: {', '.join(AXIS_NAMES)}")
        if self.spacing not in ("linear", "log"):
            raise SweepSpecError(f"axis {self.name}: spacing must be 'linear' or 'log'")
        if int(self.count) != self.count or self.count < 1:
            raise SweepSpecError(f"axis {self.name}: count must be a positive integer")
        if self.count == 1:
            if self.min != self.max:
                raise SweepSpecError(f"axis {self.name}: a single-point axis needs min == max")
        elif not self.min < self.max:
            raise SweepSpecError(f"axis {self.name}: need min < max")
        if self.spacing == "log" and self.min <= 0:
            raise SweepSpecError(f"axis {self.name}: log spacing requires min > 0")

    @classmethod
    def single(cls, name: str, value: float) -> Axis:
        return cls(name, value, value, 1)

    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([float(self.min)])
        if self.spacing == "log":
            return np.geomspace(self.min, self.max, self.count)
        return np.linspace(self.min, self.max, self.count)


def apply_axis(p: PhysicalParams, name: str, value: float) -> PhysicalParams:
    if name == "delta_s":
        return p.with_detuning_ratio(float(value))
    return p.replace(**{name: float(value)})


@dataclass(frozen=True)
class SweepSpec:
    base: PhysicalParams
    axes: tuple[Axis, ...]

    def __post_init__(self):
        object.__setattr__(self, "axes", tuple(self.axes))
        if not 1 <= len(self.axes) <= 2:
            raise SweepSpecError("a sweep takes one or two axes")
        names = [a.name for a in self.axes]
        if len(set(names)) != len(names):
            raise SweepSpecError(f"duplicate axis in {names}")

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(a.count for a in self.axes)

    def coordinates(self) -> list[tuple[float, ...]]:
        grids = np.meshgrid(*[a.values() for a in self.axes], indexing="ij")
        return [tuple(float(g.flat[i]) for g in grids) for i in range(grids[0].size)]

    def point_params(self, coords) -> PhysicalParams:
        p = self.base
        for axis, v in zip(self.axes, coords):
            p = apply_axis(p, axis.name, v)
        return p

    def to_dict(self) -> dict:
        return {
            "base": dataclasses.asdict(self.base),
            "axes": [dataclasses.asdict(a) for a in self.axes],
        }

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


@dataclass
class PointOutcome:
    coords: tuple[float, ...]
    result: PointResult | None = None
    error: str | None = None

    @property
    def status(self) -> str:
        if self.result is None:
            return "failed"
        return self.result.status

    @property
    def E_N(self) -> float:
        return math.nan if self.result is None else self.result.E_N


@dataclass
class SweepResult:
    spec: SweepSpec
    points: list[PointOutcome]
    metadata: dict = field(default_factory=dict)

    @property
    def axis_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.spec.axes)

    def grid(self, key: str = "E_N") -> np.ndarray:
        """Values on the grid; NaN wherever the point is not stable."""
        out = np.full(len(self.points), np.nan)
        for i, pt in enumerate(self.points):
            if pt.result is not None and pt.result.stable:
                out[i] = pt.E_N if key == "E_N" else pt.result.to_record()[key]
        return out.reshape(self.spec.shape)

    def rows(self) -> list[dict]:
        """Compact per-point rows for CSV output."""
        rows = []
        for pt in self.points:
            row = dict(zip(self.axis_names, pt.coords))
            r = pt.result
            row.update(
                E_N=pt.E_N,
                status=pt.status,
                q_s=r.steady.q_s if r else math.nan,
                X_s=r.steady.X_s if r else math.nan,
                nu_minus=r.entanglement.nu_minus if r and r.entanglement else math.nan,
                steady_residual=r.steady.residual if r else math.nan,
                lyapunov_residual=(r.entanglement.lyapunov_residual
                                   if r and r.entanglement else math.nan),
                error=pt.error or "",
            )
            rows.append(row)
        return rows

    def records(self) -> list[dict]:
        """Full per-point records for JSON output."""
        out = []
        for pt in self.points:
            rec = dict(zip(self.axis_names, pt.coords))
            if pt.result is not None:
                rec.update(pt.result.to_record())
            else:
                rec.update(status="failed", E_N=math.nan, error=pt.error)
            out.append(rec)
        return out

    def stable_max(self) -> tuple[float, tuple[float, ...]] | None:
        grid = self.grid().ravel()
        if np.all(np.isnan(grid)):
            return None
        i = int(np.nanargmax(grid))
        return float(grid[i]), self.points[i].coords


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def _evaluate(p: PhysicalParams) -> tuple[PointResult | None, str | None]:
    try:
        return entanglement_at(p), None
    except StageError as exc:
        return None, str(exc)


def run_sweep(spec: SweepSpec, workers: int | None = None) -> SweepResult:
    """Evaluate every grid point; failures are recorded per point.

    Results are returned in grid order regardless of ``workers``.
    """
    workers = default_workers() if workers is None else int(workers)
    coords = spec.coordinates()
    params = [spec.point_params(c) for c in coords]
    t0 = time.perf_counter()
    if workers <= 1 or len(params) == 1:
        outcomes = list(map(_evaluate, params))
    else:
        chunk = max(1, len(params) // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_evaluate, params, chunksize=chunk))
    elapsed = time.perf_counter() - t0
    points = [PointOutcome(c, res, err) for c, (res, err) in zip(coords, outcomes)]
    metadata = {
        "config_hash": spec.config_hash(),
        "version": __version__,
        "workers": workers,
        "elapsed_s": elapsed,
        "n_points": len(points),
        "n_stable": sum(pt.status == "stable" for pt in points),
        "n_failed": sum(pt.status == "failed" for pt in points),
    }
    return SweepResult(spec, points, metadata)


def parabolic_argmax(x, y) -> tuple[float, float]:
    """Refine the argmax of sampled y(x) with a parabola through its neighbours.

    NaN samples are ignored. Edge maxima are returned unrefined.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ok = ~np.isnan(y)
    x, y = x[ok], y[ok]
    if x.size == 0:
        raise ValueError("no finite samples")
    i = int(np.argmax(y))
    if i == 0 or i == x.size - 1:
        return float(x[i]), float(y[i])
    c2, c1, c0 = np.polyfit(x[i - 1:i + 2], y[i - 1:i + 2], 2)
    if c2 >= 0:
        return float(x[i]), float(y[i])
    xv = -c1 / (2 * c2)
    xv = min(max(xv, x[i - 1]), x[i + 1])
    return float(xv), float(np.polyval([c2, c1, c0], xv))


def profile_max(result: SweepResult, keep: str) -> tuple[np.ndarray, np.ndarray]:
    """For a 2-D sweep, the stable-point maximum of E_N along the other axis."""
    names = result.axis_names
    if len(names) != 2 or keep not in names:
        raise ValueError(f"need a 2-D sweep containing axis {keep!r}")
    k = names.index(keep)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)  # all-NaN slices
        reduced = np.nanmax(result.grid(), axis=1 - k)
    return result.spec.axes[k].values(), reduced


def optimal_coupling_ratio(result: SweepResult) -> tuple[float, float]:
    """Refined coupling ratio maximizing the detuning-maximized E_N."""
    ratios, best = profile_max(result, "coupling_ratio")
    return parabolic_argmax(ratios, best)


# --- critical temperature -------------------------------------------------


@dataclass(frozen=True)
class TcResult:
    mech_Q: float
    T_c: float
    bracket: tuple[float, float]
    iterations: int
    e_n_at_bracket: tuple[float, float]

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _en_checked(p: PhysicalParams) -> float:
    r = entanglement_at(p)
    if not r.stable:
        raise InstabilityError(
            f"no stable steady state at T={p.temperature_T:g} K, Q_m={p.mech_Q:g} ({r.status})"
        )
    return r.E_N


def critical_temperature(base: PhysicalParams, t_lo: float, t_hi: float, *,
                         rel_tol: float = 1e-3, abs_tol: float = 1e-3,
                         n_prescan: int = 16, max_iter: int = 200) -> TcResult:
    """Temperature at which E_N first drops to zero, by bisection.

    A coarse prescan over [t_lo, t_hi] (geometric when t_lo > 0) verifies
    that E_N decreases monotonically to zero; anything else is reported
    rather than guessed. Bisection stops at a half-width of
    ``max(rel_tol * T_c, abs_tol)``.
    """
    if not 0 <= t_lo < t_hi:
        raise NonBracketingError(f"need 0 <= t_lo < t_hi, got {t_lo}, {t_hi}")

    def en(t):
        return _en_checked(base.replace(temperature_T=float(t)))

    e_lo = en(t_lo)
    if not e_lo > EN_ZERO:
        raise NonBracketingError(f"E_N(t_lo={t_lo:g} K) = {e_lo:.3e} is already zero")
    e_hi = en(t_hi)
    if e_hi > EN_ZERO:
        raise NonBracketingError(f"E_N(t_hi={t_hi:g} K) = {e_hi:.3e} is still positive")

    if t_lo > 0:
        grid = np.geomspace(t_lo, t_hi, n_prescan)
    else:
        grid = np.linspace(t_lo, t_hi, n_prescan)
    values = [e_lo] + [en(t) for t in grid[1:-1]] + [e_hi]
    for i in range(len(values) - 1):
        a, b = values[i], values[i + 1]
        if b > a * (1 + 1e-9) + 1e-12 or (a <= EN_ZERO < b):
            raise MultimodalityError(
                f"E_N not monotone in T: E_N({grid[i]:.4g} K)={a:.3e} < "
                f"E_N({grid[i + 1]:.4g} K)={b:.3e}"
            )
    j = next(i for i, v in enumerate(values) if v <= EN_ZERO)
    lo, hi = float(grid[j - 1]), float(grid[j])
    e_a, e_b = values[j - 1], values[j]

    it = 0
    while (hi - lo) / 2 > max(rel_tol * (lo + hi) / 2, abs_tol):
        if it >= max_iter:
            raise RuntimeError(f"bisection did not converge in {max_iter} steps")
        mid = 0.5 * (lo + hi)
        e_mid = en(mid)
        if e_mid > EN_ZERO:
            lo, e_a = mid, e_mid
        else:
            hi, e_b = mid, e_mid
        it += 1
    return TcResult(base.mech_Q, 0.5 * (lo + hi), (lo, hi), it, (e_a, e_b))


def find_upper_temperature(base: PhysicalParams, t_start: float, factor: float = 10.0,
                           t_max: float = 1e12) -> float:
    """First temperature on a geometric ladder from ``t_start`` with E_N = 0."""
    t = t_start
    while t <= t_max:
        if _en_checked(base.replace(temperature_T=t)) <= EN_ZERO:
            return t
        t *= factor
    raise NonBracketingError(f"E_N still positive at {t_max:g} K")


@dataclass(frozen=True)
class TcFit:
    slope: float
    intercept: float
    r_squared: float
    results: tuple[TcResult, ...]

    def to_dict(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "results": [r.to_dict() for r in self.results],
        }


def tc_vs_qm_fit(qm_values, base: PhysicalParams, *, t_lo: float = 1e-3) -> TcFit:
    """Critical temperature for each Q_m and an ordinary least-squares line T_c(Q_m)."""
    qm = sorted(float(q) for q in qm_values)
    if len(qm) < 4:
        raise ValueError("need at least 4 Q_m values")
    if qm[0] <= 0 or qm[-1] / qm[0] < 100:
        raise ValueError("Q_m values must span at least two decades")
    results, failures = [], {}
    for q in qm:
        p = base.replace(mech_Q=q)
        try:
            t_hi = find_upper_temperature(p, t_lo * 10)
            results.append(critical_temperature(p, t_lo, t_hi))
        except (ValueError, RuntimeError) as exc:
            failures[q] = str(exc)
    if failures:
        raise PartialFitError(failures)
    x = np.array([r.mech_Q for r in results])
    y = np.array([r.T_c for r in results])
    lr = stats.linregress(x, y)
    return TcFit(float(lr.slope), float(lr.intercept), float(lr.rvalue**2), tuple(results))


def tq_collapse_check(base: PhysicalParams, scale_factors, *, simplified: bool = True) -> float:
    """Relative spread of E_N along the line (alpha T, alpha Q_m).

    With ``simplified`` the mechanical damping is dropped from the drift so
    temperature and Q_m enter only through gamma_m (2 nbar + 1).

    Returns (max - min) / max over the scale factors.
    """
    ratio = K_B * base.temperature_T / (HBAR * base.mech_freq_omega_m)
    if ratio < 100:
        raise ValueError(f"not in the high-temperature regime: k_B T / hbar omega_m = {ratio:.3g}")
    if base.mech_Q < 1e4:
        raise ValueError(f"Q_m = {base.mech_Q:g} below 1e4")
    p0 = base.replace(drop_gamma_in_drift=bool(simplified))
    values = []
    for alpha in scale_factors:
        p = p0.replace(temperature_T=alpha * base.temperature_T, mech_Q=alpha * base.mech_Q)
        r = entanglement_at(p)
        if not r.stable:
            raise InstabilityError(f"alpha={alpha:g}: point is {r.status}")
        values.append(r.E_N)
    top = max(values)
    if top == 0:
        return 0.0
    return (top - min(values)) / top
