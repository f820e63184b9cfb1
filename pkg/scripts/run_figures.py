"""Regenerate every figure preset into one directory.

    python3 scripts/run_figures.py --out results --workers 4 --plots
"""

import argparse
import json
import time
from pathlib import Path

from optoent.presets import PRESETS, run_preset


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("results"))
    ap.add_argument("--workers", type=int, default=None)
    ap.add_argument("--plots", action="store_true", help="write gnuplot scripts too")
    ap.add_argument("names", nargs="*", default=list(PRESETS), help="subset of presets")
    args = ap.parse_args()

    for name in args.names:
        t0 = time.perf_counter()
        files = run_preset(name, args.out / name, workers=args.workers, plots=args.plots)
        meta = json.loads((args.out / name / f"{name}.json").read_text())["metadata"]
        print(f"{name}: {len(files)} files in {time.perf_counter() - t0:.1f} s")
        for key, value in meta["summary"].items():
            print(f"    {key}: {value}")


if __name__ == "__main__":
    main()
