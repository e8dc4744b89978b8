"""Euclidean against orbit oscillation of log|x - 1| as the smallest radius shrinks.

Prints one row per r_min: the two family sups and their growth relative to the
previous row.  Euclidean sups settle, orbit sups keep rising about (1/2) log 10
per decade.
"""

import argparse

import numpy as np

from dunkl_riesz import BallFamily, Grid, WeightedMeasure, bmo_norm, symbol_preset, z2n


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kappa", type=float, default=1.0)
    ap.add_argument("--cells", type=int, default=4096)
    ap.add_argument("--r-min", type=float, nargs="+", default=[1.0, 0.1, 0.01])
    ap.add_argument("--step", type=float, default=0.05)
    args = ap.parse_args()

    grid = Grid.uniform(WeightedMeasure(z2n(1, args.kappa)), 4.0, args.cells)
    b = grid.sample(symbol_preset("log-abs", 1))
    centers = np.arange(-3, 3 + 1e-9, args.step)[:, None]
    prev = None
    print(f"{'r_min':>8} {'euclidean':>10} {'orbit':>10} {'e_growth':>9} {'o_ratio':>8}")
    for r in args.r_min:
        fam = BallFamily.geometric(centers, r, 1.0)
        e, o = bmo_norm(b, "euclidean", fam).sup, bmo_norm(b, "orbit", fam).sup
        eg = f"{e / prev[0] - 1:9.3f}" if prev else f"{'':>9}"
        og = f"{o / prev[1]:8.3f}" if prev else f"{'':>8}"
        print(f"{r:8.3g} {e:10.4f} {o:10.4f} {eg} {og}")
        prev = (e, o)


if __name__ == "__main__":
    main()
