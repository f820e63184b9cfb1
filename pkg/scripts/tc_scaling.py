"""Critical temperature against Q_m, full and simplified drift.

Prints T_c/Q_m for each Q_m and the linear fit of each model, which shows
how close the full model is to strict T/Q_m proportionality.
"""

import argparse

import numpy as np

from optoent.params import default_params
from optoent.sweep import tc_vs_qm_fit


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--qm-min", type=float, default=1e2)
    ap.add_argument("--qm-max", type=float, default=1e6)
    ap.add_argument("--count", type=int, default=9)
    args = ap.parse_args()

    qm = np.geomspace(args.qm_min, args.qm_max, args.count)
    base = default_params().with_detuning_ratio(1.8)
    for label, p in [("full", base), ("simplified", base.replace(drop_gamma_in_drift=True))]:
        fit = tc_vs_qm_fit(qm, p)
        print(f"{label} model: slope {fit.slope:.6e} K, intercept {fit.intercept:.4e} K, "
              f"r^2 {fit.r_squared:.8f}")
        for r in fit.results:
            print(f"    Q_m {r.mech_Q:10.3e}   T_c {r.T_c:12.5e} K   T_c/Q_m {r.T_c / r.mech_Q:.6e}")


if __name__ == "__main__":
    main()
