"""Command-line front end.

    optoent point   [--config F] [--set K=V ...] [--format json|csv] [--out PATH]
    optoent sweep   --axis NAME:MIN:MAX:COUNT[:log] [--axis ...] [--workers N]
    optoent tc      [--t-lo K] [--t-hi K]
    optoent collapse [--alpha A ...] [--full-model]
    optoent preset  NAME [--out DIR] [--plots]

Exit codes: 0 ok, 2 usage, 3 parse, 4 validation, 5 numerical, 6 instability.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigParseError, ConfigValidationError, load_config
from .output import dump_csv, payload_json, write_csv, write_json
from .params import ParameterError
from .pipeline import StageError, entanglement_at
from .presets import PRESETS, UnknownPresetError, run_preset
from .sweep import (
    AXIS_NAMES,
    Axis,
    InstabilityError,
    MultimodalityError,
    NonBracketingError,
    PartialFitError,
    SweepSpec,
    SweepSpecError,
    critical_temperature,
    find_upper_temperature,
    run_sweep,
    tq_collapse_check,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_VALIDATION = 4
EXIT_NUMERICAL = 5
EXIT_INSTABILITY = 6


def _axis(text: str) -> Axis:
    parts = text.split(":")
    if len(parts) not in (4, 5):
        raise argparse.ArgumentTypeError(f"expected NAME:MIN:MAX:COUNT[:log], got {text!r}")
    try:
        return Axis(parts[0], float(parts[1]), float(parts[2]), int(parts[3]),
                    parts[4] if len(parts) == 5 else "linear")
    except (ValueError, SweepSpecError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key=value parameter file")
    common.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override one parameter (repeatable)")
    common.add_argument("--out", type=Path, help="output file (directory for presets)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--workers", type=int, default=None,
                        help="worker processes (default: $OPTOENT_WORKERS or 1)")
    common.add_argument("--plots", action="store_true", help="also write gnuplot scripts")

    parser = argparse.ArgumentParser(prog="optoent", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("point", parents=[common], help="E_N and diagnostics at one point")

    sp = sub.add_parser("sweep", parents=[common], help="1-D or 2-D parameter grid")
    sp.add_argument("--axis", dest="axes", type=_axis, action="append", required=True,
                    help=f"NAME:MIN:MAX:COUNT[:log], NAME in {{{', '.join(AXIS_NAMES)}}}; "
                         "delta_s in units of omega_m")

    tp = sub.add_parser("tc", parents=[common], help="critical temperature by bisection")
    tp.add_argument("--t-lo", type=float, default=1e-3)
    tp.add_argument("--t-hi", type=float, default=None,
                    help="upper bracket (default: first decade with E_N = 0)")

    cp = sub.add_parser("collapse", parents=[common], help="T/Q_m collapse spread")
    cp.add_argument("--alpha", type=float, nargs="+", default=[0.5, 1.0, 2.0, 5.0])
    cp.add_argument("--full-model", action="store_true",
                    help="keep mechanical damping in the drift matrix")

    pp = sub.add_parser("preset", parents=[common], help="reproduce one figure")
    pp.add_argument("name", help=f"one of {', '.join(PRESETS)}")
    return parser


def _emit(args, payload, rows=None, metadata=None):
    if args.format == "csv" and rows is not None:
        if args.out:
            write_csv(args.out, rows)
        else:
            dump_csv(sys.stdout, rows)
        return
    if args.out:
        write_json(args.out, payload, metadata)
    else:
        print(payload_json({"metadata": metadata or {}, "data": payload}))


def _run(args) -> int:
    params, inherited = load_config(args.config, args.overrides)

    if args.command == "point":
        result = entanglement_at(params)
        rec = result.to_record()
        rec["stability"] = result.stability.to_dict()
        _emit(args, rec, [result.to_record()])
        return EXIT_OK if result.stable else EXIT_INSTABILITY

    if args.command == "sweep":
        res = run_sweep(SweepSpec(params, tuple(args.axes)), args.workers)
        meta = {**res.metadata, "spec": res.spec.to_dict()}
        _emit(args, {"records": res.records()}, res.rows(), meta)
        return EXIT_OK

    if args.command == "tc":
        t_hi = args.t_hi if args.t_hi is not None else find_upper_temperature(params, args.t_lo * 10)
        tc = critical_temperature(params, args.t_lo, t_hi)
        _emit(args, tc.to_dict(), [tc.to_dict()])
        return EXIT_OK

    if args.command == "collapse":
        spread = tq_collapse_check(params, args.alpha, simplified=not args.full_model)
        out = {"alpha": args.alpha, "simplified": not args.full_model,
               "max_relative_spread": spread}
        _emit(args, out, [out])
        return EXIT_OK

    if args.command == "preset":
        files = run_preset(args.name, args.out or Path("."), params, inherited,
                           args.workers, args.plots)
        for f in files:
            print(f)
        return EXIT_OK
    raise AssertionError(args.command)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except ConfigParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ConfigValidationError, ParameterError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except UnknownPresetError as exc:
        print(f"usage error: {exc.args[0]}", file=sys.stderr)
        return EXIT_USAGE
    except InstabilityError as exc:
        print(f"instability: {exc}", file=sys.stderr)
        return EXIT_INSTABILITY
    except (StageError, NonBracketingError, MultimodalityError, PartialFitError,
            RuntimeError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (SweepSpecError, ValueError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
