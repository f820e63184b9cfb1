"""Where the reactive coupling changes E_N along a detuning cut (100 mW, 50 mK).

For each detuning, prints E_N with both couplings, dispersive only and
reactive only, plus the steady-state amplitude X_s in the first two cases.
The reactive term feeds the steady state through R q_s, so X_s differs
slightly between the two runs and E_N follows it.
"""

import argparse
import math

import numpy as np

from optoent.params import default_params
from optoent.pipeline import entanglement_at


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--min", type=float, default=-1.0, help="Delta_s / omega_m")
    ap.add_argument("--max", type=float, default=3.0)
    ap.add_argument("--count", type=int, default=41)
    args = ap.parse_args()

    base = default_params().replace(input_power_P=0.1, temperature_T=0.05, coupling_ratio=0.3)
    variants = {"DC+RC": (1.0, 1.0), "DC": (1.0, 0.0), "RC": (0.0, 1.0)}
    print(f"{'Delta/wm':>9} {'E_N DC+RC':>12} {'E_N DC':>12} {'E_N RC':>12} "
          f"{'rel diff':>9} {'X_s ratio':>10}")
    for x in np.linspace(args.min, args.max, args.count):
        res = {k: entanglement_at(base.replace(dc_scale=d, rc_scale=r).with_detuning_ratio(float(x)))
               for k, (d, r) in variants.items()}
        en = {k: v.E_N for k, v in res.items()}
        both, dc = en["DC+RC"], en["DC"]
        rel = abs(both - dc) / max(both, dc) if max(both, dc) > 0 else math.nan
        xs = res["DC+RC"].steady.X_s / res["DC"].steady.X_s
        print(f"{x:9.2f} {both:12.5e} {dc:12.5e} {en['RC']:12.5e} {rel:9.4f} {xs:10.6f}")


if __name__ == "__main__":
    main()
