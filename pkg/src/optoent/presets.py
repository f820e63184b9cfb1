"""Figure recipes: each preset pins the parameters stated for one figure and
inherits everything else from the base parameter set."""

from __future__ import annotations

import dataclasses
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .output import write_csv, write_json
from .params import PhysicalParams, default_params
from .sweep import (
    Axis,
    SweepSpec,
    optimal_coupling_ratio,
    run_sweep,
    tc_vs_qm_fit,
)

DELTA_AXIS_2D = Axis("delta_s", -2.0, 3.0, 51)
DELTA_AXIS_1D = Axis("delta_s", -1.0, 3.0, 81)
FIG3_BASE = {"input_power_P": 0.1, "temperature_T": 0.05, "coupling_ratio": 0.3}
FIG4_BASE = {"input_power_P": 0.1, "coupling_ratio": 0.3}
FIG4A_QM = (1e3, 1e4, 1e5, 1e6)
FIG4B_QM = tuple(float(q) for q in np.geomspace(1e2, 1e6, 9))


class UnknownPresetError(KeyError):
    def __init__(self, name):
        super().__init__(f"unknown preset {name!r}; valid: {', '.join(PRESETS)}")


@dataclass
class PresetOutput:
    tables: dict[str, list[dict]]
    payload: dict
    fixed: dict
    summary: dict = field(default_factory=dict)
    plot: str = ""


def _pin(base: PhysicalParams, fixed: dict) -> PhysicalParams:
    fixed = dict(fixed)
    ratio = fixed.pop("detuning_ratio", None)
    p = base.replace(**fixed)
    return p.with_detuning_ratio(ratio) if ratio is not None else p


def _series_rows(label_key, label, result):
    return [{label_key: label, **row} for row in result.rows()]


def fig2a(base, workers):
    fixed = {"input_power_P": 0.1, "temperature_T": 0.05}
    spec = SweepSpec(_pin(base, fixed), (DELTA_AXIS_2D, Axis("coupling_ratio", 0.05, 1.0, 40)))
    res = run_sweep(spec, workers)
    ratio, e_max = optimal_coupling_ratio(res)
    plot = _map_plot("fig2a.csv", "Delta_s / omega_m", "kappa_1 / kappa_0", 1, 2)
    return PresetOutput({"fig2a": res.rows()}, {"records": res.records()}, fixed,
                        {"optimal_coupling_ratio": ratio, "max_E_N": e_max}, plot)


def fig2b(base, workers):
    fixed = {"input_power_P": 0.1, "coupling_ratio": 0.3}
    spec = SweepSpec(_pin(base, fixed),
                     (DELTA_AXIS_2D, Axis("temperature_T", 1e-2, 1e3, 41, "log")))
    res = run_sweep(spec, workers)
    plot = _map_plot("fig2b.csv", "Delta_s / omega_m", "T (K)", 1, 2, logy=True)
    return PresetOutput({"fig2b": res.rows()}, {"records": res.records()}, fixed, {}, plot)


def _cut_series(base, workers, variants, fixed, name):
    rows, records, summary = [], {}, {}
    for label, changes in variants:
        spec = SweepSpec(_pin(base, {**fixed, **changes}), (DELTA_AXIS_1D,))
        res = run_sweep(spec, workers)
        rows.extend(_series_rows("series", label, res))
        records[label] = res.records()
        best = res.stable_max()
        summary[label] = {"max_E_N": best[0] if best else None,
                          "argmax_delta_s": best[1][0] if best else None}
    plot = _series_plot(f"{name}.csv", [lbl for lbl, _ in variants], "Delta_s / omega_m", 2)
    return PresetOutput({name: rows}, {"series": records}, fixed, summary, plot)


def fig3a(base, workers):
    variants = [
        ("DC+RC", {"dc_scale": 1.0, "rc_scale": 1.0}),
        ("DC only", {"dc_scale": 1.0, "rc_scale": 0.0}),
        ("RC only", {"dc_scale": 0.0, "rc_scale": 1.0}),
    ]
    return _cut_series(base, workers, variants, FIG3_BASE, "fig3a")


def fig3b(base, workers):
    variants = [(f"RC x{k}", {"dc_scale": 0.0, "rc_scale": float(k)}) for k in (20, 40, 60)]
    return _cut_series(base, workers, variants, FIG3_BASE, "fig3b")


def fig4a(base, workers):
    fixed = {**FIG4_BASE, "detuning_ratio": 1.8}
    rows, records = [], {}
    for q in FIG4A_QM:
        spec = SweepSpec(_pin(base, {**fixed, "mech_Q": q}),
                         (Axis("temperature_T", 1e-3, 1e3, 61, "log"),))
        res = run_sweep(spec, workers)
        label = f"Q_m={q:.0e}"
        rows.extend(_series_rows("series", label, res))
        records[label] = res.records()
    labels = [f"Q_m={q:.0e}" for q in FIG4A_QM]
    plot = _series_plot("fig4a.csv", labels, "T (K)", 2, logx=True)
    return PresetOutput({"fig4a": rows}, {"series": records}, fixed, {}, plot)


def fig4b(base, workers):
    fixed = {**FIG4_BASE, "detuning_ratio": 1.8}
    fit = tc_vs_qm_fit(FIG4B_QM, _pin(base, fixed))
    rows = [
        {"mech_Q": r.mech_Q, "T_c": r.T_c, "bracket_lo": r.bracket[0],
         "bracket_hi": r.bracket[1], "iterations": r.iterations}
        for r in fit.results
    ]
    fit_row = [{"slope_K": fit.slope, "intercept_K": fit.intercept, "r_squared": fit.r_squared}]
    plot = "\n".join([
        "set datafile separator ','",
        "set logscale xy",
        "set xlabel 'Q_m'",
        "set ylabel 'T_c (K)'",
        f"f(x) = {fit.slope!r}*x + {fit.intercept!r}",
        "plot 'fig4b.csv' using 1:2 skip 1 with points title 'T_c', f(x) title 'linear fit'",
        "",
    ])
    return PresetOutput({"fig4b": rows, "fig4b_fit": fit_row}, fit.to_dict(), fixed,
                        fit_row[0], plot)


PRESETS = {
    "fig2a": fig2a,
    "fig2b": fig2b,
    "fig3a": fig3a,
    "fig3b": fig3b,
    "fig4a": fig4a,
    "fig4b": fig4b,
}


def _map_plot(csv_name, xlabel, ylabel, xcol, ycol, logy=False):
    lines = [
        "set datafile separator ','",
        "set pm3d map",
        f"set xlabel '{xlabel}'",
        f"set ylabel '{ylabel}'",
        "set cblabel 'E_N'",
    ]
    if logy:
        lines.append("set logscale y")
    lines.append(f"splot '{csv_name}' using {xcol}:{ycol}:3 skip 1 notitle")
    return "\n".join(lines) + "\n"


def _series_plot(csv_name, labels, xlabel, xcol, logx=False):
    lines = [
        "set datafile separator ','",
        f"set xlabel '{xlabel}'",
        "set ylabel 'E_N'",
    ]
    if logx:
        lines.append("set logscale x")
    parts = [
        f"'{csv_name}' using {xcol}:(strcol(1) eq '{lbl}' ? $3 : 1/0) skip 1 with lines title '{lbl}'"
        for lbl in labels
    ]
    lines.append("plot " + ", \\\n     ".join(parts))
    return "\n".join(lines) + "\n"


def run_preset(name: str, out_dir=".", base: PhysicalParams | None = None,
               inherited: tuple[str, ...] | None = None, workers: int | None = None,
               plots: bool = False) -> list[Path]:
    """Run one figure preset and write its CSV/JSON (and optionally gnuplot) files."""
    if name not in PRESETS:
        raise UnknownPresetError(name)
    base = default_params() if base is None else base
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    out = PRESETS[name](base, workers)
    elapsed = time.perf_counter() - t0
    pinned = set(out.fixed)
    if "detuning_ratio" in pinned:
        pinned.add("detuning_s")
    if inherited is None:
        inherited = tuple(f.name for f in dataclasses.fields(PhysicalParams))
    metadata = {
        "preset": name,
        "version": __version__,
        "elapsed_s": elapsed,
        "workers": workers,
        "fixed_parameters": out.fixed,
        "inherited_parameters": {k: getattr(base, k) for k in inherited if k not in pinned},
        "summary": out.summary,
    }
    files = [write_csv(out_dir / f"{table}.csv", rows) for table, rows in out.tables.items()]
    files.append(write_json(out_dir / f"{name}.json", out.payload, metadata))
    if plots:
        path = out_dir / f"{name}.gp"
        path.write_text(out.plot, encoding="utf-8")
        files.append(path)
    return files
