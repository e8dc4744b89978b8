"""Acceptance criteria 1-10 at their stated tolerances.

Each criterion is split into parts; every part records its measured outcome
through the ``criterion`` fixture and the terminal summary prints one
``CRITERION k: PASS/FAIL`` line per criterion.  Parts known to miss their
threshold are strict xfails, so the suite stays green while the criterion line
still reads FAIL, and an unexpected pass turns the suite red.
"""

from functools import lru_cache

import numpy as np
import pytest
from scipy.integrate import quad

import oracles
from dunkl_riesz import (
    Ball,
    BallFamily,
    Grid,
    IntertwiningMeasure,
    KernelEvaluator,
    WeightedMeasure,
    bmo_norm,
    heat_kernel,
    median_split,
    orbit_distance,
    riesz_kernel_explicit,
    riesz_kernel_subordination,
    symbol_preset,
    translation_modulus,
    trivial,
    z2n,
)
from dunkl_riesz import verify

SEED = 2024


def known_miss(reason: str):
    return pytest.mark.xfail(strict=True, reason=reason)


@lru_cache(maxsize=None)
def evaluator(dim: int, kappa: float) -> KernelEvaluator:
    return KernelEvaluator(z2n(dim, kappa) if kappa > 0 else trivial(dim))


# -- 1. classical reduction ----------------------------------------------------------------


@pytest.mark.parametrize("dim", [1, 2])
def test_c1_heat_is_gaussian(dim, criterion):
    ke = evaluator(dim, 0.0)
    rng = np.random.default_rng(SEED + dim)
    t = 10.0 ** rng.uniform(-2, 2, 100)
    x = rng.uniform(-3, 3, (100, dim))
    y = rng.uniform(-3, 3, (100, dim))
    got = np.array([heat_kernel(ke, t[i], x[i], y[i]) for i in range(100)])
    ref = np.array([oracles.gaussian(t[i], x[i], y[i]) for i in range(100)])
    err = float(np.max(np.abs(got - ref) / ref))
    assert criterion(1, f"heat N={dim}", err <= 1e-8, f"max rel {err:.2e}")


@pytest.mark.parametrize("dim", [1, 2])
def test_c1_riesz_is_classical(dim, criterion):
    ke = evaluator(dim, 0.0)
    rng = np.random.default_rng(SEED + 10 + dim)
    errs = []
    while len(errs) < 100:
        x, y = rng.uniform(-2, 2, dim), rng.uniform(-2, 2, dim)
        ref = oracles.classical_riesz(1, x, y)
        if np.linalg.norm(x - y) < 1e-3 or abs(ref) < 1e-12:
            continue
        errs.append(abs(riesz_kernel_subordination(ke, 1, x, y).value - ref) / abs(ref))
    err = max(errs)
    assert criterion(1, f"riesz N={dim}", err <= 1e-4, f"max rel {err:.2e}")


# -- 2. probability contracts --------------------------------------------------------------


@pytest.mark.parametrize("kappa", [0.5, 1.0, 2.3])
def test_c2_intertwining_mass(kappa, criterion):
    worst = max(abs(IntertwiningMeasure(np.array([kappa]), np.array([x])).mass() - 1.0) for x in (0.3, 1.0, 2.7))
    assert criterion(2, f"mu mass kappa={kappa}", worst <= 1e-8, f"{worst:.2e}")


@pytest.mark.parametrize("t", [0.1, 1.0, 10.0])
def test_c2_heat_integrates_to_one(t, criterion):
    ke = evaluator(1, 1.0)
    worst = 0.0
    for x in (-1.3, 0.4, 2.0):
        f = lambda y: ke.heat(t, np.array([x]), np.array([y])) * float(ke.measure.density(np.array([y])))
        s = 12 * np.sqrt(t) + abs(x)
        mass = sum(quad(f, a, b, limit=200, epsabs=1e-12, epsrel=1e-10)[0]
                   for a, b in zip((-s, -abs(x), 0.0, abs(x)), (-abs(x), 0.0, abs(x), s)))
        worst = max(worst, abs(mass - 1.0))
    assert criterion(2, f"heat mass t={t}", worst <= 1e-3, f"{worst:.2e}")


def test_c2_heat_symmetric_positive(criterion):
    ke = evaluator(1, 1.0)
    rng = np.random.default_rng(SEED)
    t = 10.0 ** rng.uniform(-2, 2, 200)
    x = rng.uniform(-3, 3, (200, 1))
    y = rng.uniform(-3, 3, (200, 1))
    a, b = ke.heat(t, x, y), ke.heat(t, y, x)
    err = float(np.max(np.abs(a - b) / np.abs(b)))
    assert criterion(2, "symmetry", err <= 1e-8 and np.all(a > 0), f"{err:.2e}")


# -- 3. explicit formula against subordination ---------------------------------------------


def test_c3_routes_agree(criterion):
    ke = evaluator(1, 1.0)
    rng = np.random.default_rng(SEED)
    errs = []
    while len(errs) < 200:
        x, y = rng.uniform(-3, 3, 1), rng.uniform(-3, 3, 1)
        if orbit_distance(ke.group, x, y) < 0.1:
            continue
        a = riesz_kernel_subordination(ke, 1, x, y).value
        b = riesz_kernel_explicit(ke, 1, x, y).value
        errs.append(abs(a - b) / abs(a))
    err = max(errs)
    assert criterion(3, "explicit vs subordination", err <= 1e-3, f"max rel {err:.2e}")


# -- 4. size and smoothness sweeps ---------------------------------------------------------


@lru_cache(maxsize=None)
def pair_samples(dim: int):
    return verify.sample_pairs(evaluator(dim, 1.0), 600, seed=SEED)


CHECKS = {
    "size": lambda ke, s: verify.check_size(ke, s),
    "smooth-y": lambda ke, s: verify.check_smoothness(ke, s, "y"),
    "smooth-x": lambda ke, s: verify.check_smoothness(ke, s, "x"),
}


@pytest.mark.parametrize(
    "dim, check",
    [
        pytest.param(1, "size", marks=known_miss("log singularity at the reflected diagonal in N=1")),
        (2, "size"),
        (1, "smooth-y"),
        (2, "smooth-y"),
        (1, "smooth-x"),
        pytest.param(2, "smooth-x", marks=known_miss("kappa-dependent constant above the kappa=0 ceiling")),
    ],
)
def test_c4_violations(dim, check, criterion):
    rep = CHECKS[check](evaluator(dim, 1.0), pair_samples(dim))
    ok = rep.count >= 500 and np.isfinite(rep.sup) and rep.violations == 0
    assert criterion(4, f"{check} N={dim}", ok,
                     f"sup {rep.sup:.3g} vs {rep.bound:.3g}, {rep.violations} violations of {rep.count}")


@pytest.mark.parametrize("dim", [1, 2])
@pytest.mark.parametrize("check", list(CHECKS))
def test_c4_scale_sweep(dim, check, criterion):
    ke = evaluator(dim, 1.0)
    sups = np.array([CHECKS[check](ke, pair_samples(dim).scaled(s)).sup for s in (0.5, 1.0, 2.0)])
    spread = float((sups.max() - sups.min()) / sups.min())
    assert criterion(4, f"{check} sweep N={dim}", spread <= 0.10, f"spread {spread:.2e}")


# -- 5. lower bound ----------------------------------------------------------------------------


@pytest.mark.parametrize(
    "dim, kappa",
    [
        (1, 0.5),
        pytest.param(1, 1.0, marks=known_miss("min m 0.0019 at hyperplane balls, floor 0.0091")),
        pytest.param(2, 0.5, marks=known_miss("min m 2.4e-4, floor 1.0e-3")),
        pytest.param(2, 1.0, marks=known_miss("min m 6.0e-6, floor 1.0e-3")),
    ],
)
def test_c5_lower_bound(dim, kappa, criterion):
    ke = evaluator(dim, kappa)
    centers = np.random.default_rng(SEED).uniform(-2, 2, (10, dim))
    rep = verify.check_lower_bound(ke, [0.25, 1.0, 4.0], centers)
    ok = rep.extra["sign_changes"] == 0 and rep.violations == 0 and rep.count == 30
    assert criterion(5, f"Z2^{dim} kappa={kappa}", ok,
                     f"min m {rep.inf:.3g} vs floor {rep.bound:.3g}, sign changes {rep.extra['sign_changes']}")


# -- 6. heat kernel bounds ---------------------------------------------------------------------


@pytest.mark.parametrize(
    "dim",
    [1, pytest.param(2, marks=known_miss("C_lower about 382 at large t, ceiling 39.9"))],
)
def test_c6_heat_bounds(dim, criterion):
    ke = evaluator(dim, 1.0)
    samples = verify.sample_heat(ke, 1000, seed=SEED)
    assert sum(k == "same-orbit" for k in samples.kind) > 0
    rep = verify.check_heat_bounds(ke, samples)
    e = rep.extra
    assert criterion(6, f"Z2^{dim}", rep.violations == 0,
                     f"C_up {e['C_upper']:.3g} C_low {e['C_lower']:.3g} C_lip {e['C_lipschitz']:.3g} "
                     f"vs {rep.bound:.3g}")


# -- 7. Hormander stability ----------------------------------------------------------------------


def test_c7_hormander_stable(criterion):
    ke = evaluator(1, 1.0)
    rng = np.random.default_rng(SEED)
    ys = rng.uniform(-2, 2, (10, 1))
    offs = rng.uniform(0.05, 0.5, (10, 1)) * rng.choice([-1.0, 1.0], (10, 1))
    pairs = list(zip(ys, ys + offs))
    a = verify.check_hormander(ke, pairs, 8.0).ratios
    b = verify.check_hormander(ke, pairs, 16.0).ratios
    change = float(np.max(np.abs(a - b) / b))
    assert criterion(7, "outer 8 vs 16", change < 0.10 and np.all(np.isfinite(a)), f"max change {change:.3g}")


# -- 8. commutator sandwich ------------------------------------------------------------------------


def test_c8_commutator_sandwich(criterion):
    ke = evaluator(1, 1.0)
    grids = [Grid.uniform(WeightedMeasure(z2n(1, 1.0)), 4.0, n) for n in (200, 400)]
    rep = verify.check_commutator_bounds(ke, ["sign-split", "lipschitz-bump", "log-abs", "constant"], grids)
    e = rep.extra
    fits_ok = np.all(np.isfinite(e["C_up"] + e["C_low"])) and e["C_up_spread"] <= 0.25 and e["C_low_spread"] <= 0.25
    criterion(8, "constant symbol", max(e["constant_norms"]) <= 1e-10, f"{max(e['constant_norms']):.2e}")
    assert criterion(8, "C_up, C_low", fits_ok, f"spreads {e['C_up_spread']:.3g}, {e['C_low_spread']:.3g}")
    assert max(e["constant_norms"]) <= 1e-10


# -- 9. strict inclusion witness -------------------------------------------------------------------


@lru_cache(maxsize=None)
def log_symbol_sups():
    g = Grid.uniform(WeightedMeasure(z2n(1, 1.0)), 4.0, 4096)
    b = g.sample(symbol_preset("log-abs", 1))
    centers = np.arange(-3, 3.0001, 0.05)[:, None]
    out = {}
    for mode in ("euclidean", "orbit"):
        out[mode] = [bmo_norm(b, mode, BallFamily.geometric(centers, r, 1.0)).sup for r in (0.1, 0.01)]
    return out


def test_c9_euclidean_stabilizes(criterion):
    e0, e1 = log_symbol_sups()["euclidean"]
    growth = e1 / e0 - 1
    assert criterion(9, "euclidean", growth < 0.05, f"growth {growth:.3g}")


@known_miss("orbit-mode sup grows additively, about 1.57x per decade")
def test_c9_orbit_doubles(criterion):
    o0, o1 = log_symbol_sups()["orbit"]
    assert criterion(9, "orbit", o1 >= 2 * o0, f"{o0:.3g} -> {o1:.3g}, ratio {o1 / o0:.3g}")


# -- 10. discrete machinery ---------------------------------------------------------------------


def test_c10_median_split(criterion):
    bad = 0
    count = 0
    for dim, n in ((1, 512), (2, 48)):
        g = Grid.uniform(WeightedMeasure(z2n(dim, 1.0)), 3.0, n)
        rng = np.random.default_rng(SEED + dim)
        fns = [g.function(rng.standard_normal(g.size).round(1))] + [
            g.sample(symbol_preset(p, dim)) for p in ("log-abs", "sign", "lipschitz-bump")
        ]
        for f in fns:
            for _ in range(10):
                r = rng.uniform(0.3, 0.5)
                c = rng.uniform(-2.5, 2.5 - 5 * r, dim) if dim == 1 else rng.uniform(-2.5, 2.5, dim) * [1, 0]
                shift = np.zeros(dim)
                shift[-1] = 4 * r if dim == 2 else 5 * r
                if dim == 2:
                    c[-1] = -2 * r
                ball, tilde = Ball(c, r), Ball(c + shift, r)
                split = median_split(f, ball, tilde)
                count += 1
                checks = split.verify(f, ball)
                halves = min(split.mass_F1, split.mass_F2) >= 0.5 * split.mass_tilde * (1 - 1e-12)
                bad += int(not (all(checks.values()) and halves))
    assert criterion(10, "median split", bad == 0, f"{bad} of {count} instances")


@pytest.mark.filterwarnings("ignore::dunkl_riesz.spaces.DomainClipped")  # Gaussian tail beyond the box
@pytest.mark.parametrize("preset", ["lipschitz-bump", "smooth-gaussian"])
def test_c10_translation_modulus(preset, criterion):
    g = Grid.uniform(WeightedMeasure(z2n(1, 1.0)), 4.0, 2048)
    f = g.sample((lambda x: np.exp(-x[..., 0] ** 2)) if preset == "smooth-gaussian" else symbol_preset(preset, 1))
    zero = translation_modulus(f, [0.0])
    steps = np.geomspace(1e-3, 0.5, 12)
    vals = np.array([translation_modulus(f, [s]) for s in steps])
    monotone = bool(np.all(np.diff(vals) > 0))
    small = vals[0] <= 5e-3  # continuity at 0
    assert criterion(10, f"modulus {preset}", zero == 0.0 and monotone and small,
                     f"w(0)={zero}, w(1e-3)={vals[0]:.2e}, monotone={monotone}")
