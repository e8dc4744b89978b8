import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from dunkl_riesz import Ball, BallFamily, Grid, GridMismatch, InsufficientResolution, InvalidArgument, OrbitBall
from dunkl_riesz import WeightedMeasure, bmo_norm, maximal_fn, median_split, sharp_fn, symbol_preset, z2n, trivial
from dunkl_riesz import translation_modulus, vmo_profile
from dunkl_riesz.spaces import DomainClipped, GridFunction, ball_average, oscillation, weighted_lower_median


@pytest.fixture(scope="module")
def grid1():
    return Grid.uniform(WeightedMeasure(z2n(1, 1.0)), 4.0, 512)


@pytest.fixture(scope="module")
def grid2():
    return Grid.uniform(WeightedMeasure(z2n(2, 0.5)), 2.0, 40)


def test_grid_layout(grid1, grid2):
    assert grid1.size == 512 and grid1.shape == (512,)
    assert not np.any(grid1.points == 0.0)
    assert np.allclose(grid1.spacing, 8 / 512)
    # midpoint rule for int_{-4}^{4} 2|x|^2 dx = 4 * 64 / 3
    assert grid1.weights.sum() == pytest.approx(256 / 3, rel=1e-4)
    assert grid2.size == 1600 and grid2.shape == (40, 40)
    with pytest.raises(InvalidArgument):
        Grid.uniform(WeightedMeasure(trivial(1)), 1.0, 1)


def test_masks(grid1):
    b = Ball([1.0], 0.5)
    assert grid1.mask(b).sum() == 64
    assert grid1.mask(OrbitBall(b)).sum() == 128
    with pytest.raises(InvalidArgument):
        grid1.mask("ball")


def test_averages_and_oscillation(grid1):
    one = grid1.sample(lambda x: np.ones(len(x)))
    assert ball_average(one, Ball([1.0], 0.5)) == pytest.approx(1.0)
    assert oscillation(one, Ball([1.0], 0.5)) == pytest.approx(0.0, abs=1e-15)
    flat = Grid.uniform(WeightedMeasure(trivial(1)), 4.0, 4096)
    lin = flat.sample(lambda x: x[:, 0])
    # mean |x - c| over (c - r, c + r) is r / 2
    assert oscillation(lin, Ball([0.3], 1.0)) == pytest.approx(0.5, rel=1e-5)
    with pytest.raises(InsufficientResolution):
        oscillation(one, Ball([1.0], 0.01))


@given(arrays(float, st.integers(1, 40), elements=st.floats(-5, 5)), st.data())
def test_weighted_lower_median_is_a_median(values, data):
    w = np.asarray(data.draw(arrays(float, len(values), elements=st.floats(0.01, 3))))
    m = weighted_lower_median(values, w)
    total = w.sum()
    assert w[values < m].sum() <= 0.5 * total + 1e-12
    assert w[values > m].sum() <= 0.5 * total + 1e-12
    assert m in values


@given(st.integers(0, 10_000), st.floats(0.3, 1.0), st.floats(-2, 2))
def test_median_split_postconditions(seed, r, c):
    g = Grid.uniform(WeightedMeasure(z2n(1, 1.0)), 4.0, 256)
    vals = np.random.default_rng(seed).standard_normal(g.size).round(1)  # ties on purpose
    f = g.function(vals)
    ball, tilde = Ball([c], r), Ball([c + 5 * r], r)
    if g.mask(tilde).sum() < 8:
        return
    split = median_split(f, ball, tilde)
    checks = split.verify(f, ball)
    assert all(checks.values()), checks
    assert split.mass_F1 >= 0.5 * split.mass_tilde * (1 - 1e-12)
    assert split.mass_F2 >= 0.5 * split.mass_tilde * (1 - 1e-12)


def test_median_split_two_dimensional(grid2):
    f = grid2.sample(symbol_preset("log-abs", 2))
    split = median_split(f, Ball([0.0, 0.0], 0.5), Ball([0.0, 1.0], 0.5))
    assert all(split.verify(f, Ball([0.0, 0.0], 0.5)).values())


def test_families_nest():
    a = BallFamily.geometric([[0.0]], 0.1, 1.0)
    b = BallFamily.geometric([[0.0]], 0.01, 1.0)
    assert np.allclose(b.radii[: len(a.radii)], a.radii)
    assert len(a.radii) == 4 and a.radii[-1] == pytest.approx(0.1)
    assert np.allclose(BallFamily.dyadic([[0.0]], 0.25, 1.0).radii, [1.0, 0.5, 0.25])
    lat = BallFamily.lattice(1.0, 0.5, 2, [0.5])
    assert len(lat) == 25
    with pytest.raises(InvalidArgument):
        BallFamily.geometric([[0.0]], 2.0, 1.0)


def test_bmo_of_constant_is_zero(grid1):
    fam = BallFamily.lattice(3.0, 0.5, 1, [0.25, 1.0])
    c = grid1.sample(symbol_preset("constant", 1, value=3.0))
    for mode in ("euclidean", "orbit"):
        rep = bmo_norm(c, mode, fam)
        assert rep.sup < 1e-14 and rep.skipped == 0


def test_bmo_of_log_separates_modes():
    g = Grid.uniform(WeightedMeasure(z2n(1, 1.0)), 4.0, 4096)
    b = g.sample(symbol_preset("log-abs", 1))
    centers = np.arange(-3, 3.0001, 0.05)[:, None]
    coarse = BallFamily.geometric(centers, 0.1, 1.0)
    fine = BallFamily.geometric(centers, 0.01, 1.0)
    e0, e1 = bmo_norm(b, "euclidean", coarse).sup, bmo_norm(b, "euclidean", fine).sup
    o0, o1 = bmo_norm(b, "orbit", coarse).sup, bmo_norm(b, "orbit", fine).sup
    assert e1 <= 1.05 * e0
    assert o1 > o0 + 0.5  # roughly (1/2) log 10 per decade
    assert o1 > e1


def test_report_summary_and_csv(grid1, tmp_path):
    fam = BallFamily.lattice(1.0, 0.5, 1, [0.01, 0.5])
    rep = bmo_norm(grid1.sample(symbol_preset("sign", 1)), "euclidean", fam)
    s = rep.summary()
    assert s["skipped"] == 5  # radius 0.01 holds fewer than 8 sites
    assert s["sup"] == rep.sup > 0
    rep.write_csv(tmp_path / "r.csv")
    assert (tmp_path / "r.csv").read_text().count("\n") == 11


def test_vmo_profile_buckets(grid1):
    fam = BallFamily.lattice(2.0, 0.5, 1, [0.1, 0.5, 1.0])
    rep = vmo_profile(grid1.sample(symbol_preset("log-abs", 1)), "euclidean", fam, [0.05, 0.2, 2.0], [0, 1, 10, 20])
    assert set(rep.by_radius) == {(0.05, 0.2), (0.2, 2.0)}
    assert rep.by_distance[(10.0, 20.0)] is None
    with pytest.raises(InvalidArgument):
        vmo_profile(grid1.sample(symbol_preset("log-abs", 1)), "euclidean", fam, [1.0], [0, 1])


def test_maximal_and_sharp(grid1):
    one = grid1.sample(lambda x: np.ones(len(x)))
    m = maximal_fn(one, "euclidean", [0.25, 0.5])
    assert np.allclose(m.values, 1.0)
    assert np.allclose(sharp_fn(one, [0.5]).values, 0.0)
    f = grid1.sample(symbol_preset("lipschitz-bump", 1))
    mf = maximal_fn(f, "orbit", [0.25], centers=[[0.5]])
    inside = grid1.mask(OrbitBall(Ball([0.5], 0.25)))
    assert np.all(mf.values[inside] > 0) and np.all(mf.values[~inside] == 0)
    with pytest.raises(InvalidArgument):
        maximal_fn(f, "other", [0.5])


def test_translation_modulus(grid1):
    f = grid1.sample(symbol_preset("lipschitz-bump", 1))
    assert translation_modulus(f, [0.0]) == 0.0
    vals = [translation_modulus(f, [s]) for s in (0.01, 0.05, 0.1, 0.3)]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    assert vals[0] < 0.05
    with pytest.warns(DomainClipped) as rec:
        translation_modulus(grid1.sample(symbol_preset("log-abs", 1)), [1.0])
    assert rec[0].message.bound > 0
    with pytest.raises(InvalidArgument):
        translation_modulus(f, [0.1], p=1.0)


def test_symbol_presets():
    x = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 0.0]])
    assert np.allclose(symbol_preset("log-abs", 2)(x), [0.0, 0.0, 0.0])
    assert symbol_preset("sign", 2)(x).tolist() == [-1.0, 1.0, 1.0]
    assert np.allclose(symbol_preset("lipschitz-bump", 2)(x), [0.5, 0.0, 0.0])
    assert np.allclose(symbol_preset("constant", 2, value=2.0)(x), 2.0)
    with pytest.raises(InvalidArgument):
        symbol_preset("unknown", 1)


def test_gridfunction_csv(grid1, tmp_path):
    f = grid1.sample(symbol_preset("sign", 1))
    p = tmp_path / "b.csv"
    np.savetxt(p, np.column_stack([grid1.points, f.values]), delimiter=",")
    assert np.array_equal(GridFunction.from_csv(grid1, p).values, f.values)
    np.savetxt(p, np.column_stack([grid1.points[:10], f.values[:10]]), delimiter=",")
    with pytest.raises(GridMismatch):
        GridFunction.from_csv(grid1, p)
    with pytest.raises(GridMismatch):
        grid1.function(np.ones(3))
