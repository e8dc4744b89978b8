"""Measure the unweighted (trivial group) values behind the shipped thresholds.

The numbers printed here are the ones frozen in ``dunkl_riesz.config``;
ceilings are ten times these values and the lower-bound floor one tenth.
"""

import argparse
import json

import numpy as np

from dunkl_riesz import verify
from dunkl_riesz.config import Thresholds
from dunkl_riesz.kernels import KernelEvaluator
from dunkl_riesz.reflection import trivial


def calibrate(dim: int, samples: int, seed: int) -> dict:
    ke = KernelEvaluator(trivial(dim))
    big = Thresholds(factor=1e12)  # no violations while measuring
    pairs = verify.sample_pairs(ke, samples, seed=seed)
    size = verify.check_size(ke, pairs, ceiling=big.size_ceiling(dim)).sup
    smooth = max(
        verify.check_smoothness(ke, pairs, v, ceiling=big.smoothness_ceiling(dim)).sup for v in ("x", "y")
    )
    heat = verify.check_heat_bounds(ke, verify.sample_heat(ke, samples, seed=seed), ceiling=1e300)
    rng = np.random.default_rng(seed)
    hp = [(y, y + 0.1 * rng.standard_normal(dim)) for y in rng.uniform(-2, 2, (4, dim))]
    horm = verify.check_hormander(ke, hp, 8.0, ceiling=1e300).sup
    return {
        "size": size,
        "smoothness": smooth,
        "lower": verify.classical_lower_value(dim),
        "heat": float(max(heat.extra["C_upper"], heat.extra["C_lower"], heat.extra["C_lipschitz"])),
        "hormander": horm,
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=500)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    out = {dim: calibrate(dim, args.samples, args.seed) for dim in (1, 2)}
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
