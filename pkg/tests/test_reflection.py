import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from dunkl_riesz import (
    GroupTooLarge,
    InvalidArgument,
    RootSystemSpec,
    dihedral,
    generate_group,
    orbit,
    orbit_distance,
    product,
    reflect,
    trivial,
    z2n,
)

finite = st.floats(-10, 10, allow_nan=False)
vec2 = arrays(float, 2, elements=finite)
nonzero2 = vec2.filter(lambda a: np.linalg.norm(a) > 1e-3)


@given(nonzero2, vec2)
def test_reflect_is_norm_preserving_involution(alpha, x):
    y = reflect(alpha, x)
    assert np.allclose(reflect(alpha, y), x, atol=1e-9 * (1 + np.abs(x).max()))
    assert np.isclose(np.linalg.norm(y), np.linalg.norm(x), rtol=1e-12, atol=1e-12)


def test_reflect_flips_the_root():
    a = np.array([1.0, 1.0])
    assert np.allclose(reflect(a, a), -a)
    assert np.allclose(reflect(a, [1.0, -1.0]), [1.0, -1.0])


@pytest.mark.parametrize(
    "spec, order",
    [
        (trivial(2), 1),
        (z2n(1, 1.0), 2),
        (z2n(2, 0.5), 4),
        (dihedral(3, 1.0), 6),
        (dihedral(4, [0.5, 1.0]), 8),
        (dihedral(6, 1.0), 12),
        (product(z2n(1, 1.0), dihedral(3, 0.5)), 12),
    ],
)
def test_group_orders(spec, order):
    g = generate_group(spec)
    assert g.order == order
    assert np.allclose(g.elements[0], np.eye(spec.dimension))
    table = g.cayley_table()
    assert (table >= 0).all()
    for row in list(table) + list(table.T):
        assert sorted(row) == list(range(order))
    for m in g.elements:
        assert np.allclose(m @ m.T, np.eye(spec.dimension), atol=1e-12)


def test_roots_normalized_and_weights():
    spec = RootSystemSpec.from_roots([[3.0, 0.0], [-3.0, 0.0]], 2.0, name="scaled")
    assert np.allclose(np.sum(spec.roots**2, axis=1), 2.0)
    assert spec.gamma == 4.0
    assert spec.homogeneous_dimension == 6.0
    assert len(spec.positive_roots) == 1


def test_homogeneous_dimension_of_presets():
    assert z2n(2, 1.0).homogeneous_dimension == 6.0  # 2 + four roots of kappa 1
    assert dihedral(3, 0.5).homogeneous_dimension == 2 + 6 * 0.5
    assert np.allclose(z2n(3, [0.0, 1.0, 2.0]).coordinate_multiplicities(), [0.0, 1.0, 2.0])
    assert dihedral(3, 1.0).coordinate_multiplicities() is None


def test_invalid_root_systems():
    with pytest.raises(InvalidArgument):
        RootSystemSpec.from_roots([[1.0, 0.0]], 1.0)  # -alpha missing
    with pytest.raises(InvalidArgument):
        RootSystemSpec.from_roots([[1.0, 0.0], [-1.0, 0.0], [1.0, 1.0], [-1.0, -1.0]], 1.0)  # not closed
    with pytest.raises(InvalidArgument):
        RootSystemSpec.from_roots([[1.0], [-1.0]], -0.5)
    with pytest.raises(InvalidArgument):
        dihedral(3, [0.5, 1.0])  # odd order has a single orbit
    with pytest.raises(InvalidArgument):
        dihedral(1, 1.0)


def test_group_order_bound():
    with pytest.raises(GroupTooLarge):
        generate_group(dihedral(12, 1.0), max_order=8)


def test_orbit_identifies_sign_flips():
    g = generate_group(z2n(2, 1.0))
    assert orbit_distance(g, [1.0, 1.0], [-1.0, 1.0]) == 0.0
    assert np.linalg.norm(np.array([1.0, 1.0]) - [-1.0, 1.0]) == 2.0
    pts = orbit(g, [1.0, 2.0])
    assert len(pts) == 4
    assert len(orbit(g, [0.0, 2.0])) == 2


@given(vec2, vec2)
def test_orbit_distance_is_a_pseudometric(x, y):
    g = generate_group(dihedral(3, 1.0))
    d = orbit_distance(g, x, y)
    assert d <= np.linalg.norm(x - y) + 1e-12
    assert np.isclose(d, orbit_distance(g, y, x), atol=1e-9)
    for m in g.elements:
        assert np.isclose(orbit_distance(g, m @ x, y), d, atol=1e-9)


@given(vec2, vec2, vec2)
def test_orbit_distance_triangle(x, y, z):
    g = generate_group(z2n(2, 1.0))
    assert orbit_distance(g, x, z) <= orbit_distance(g, x, y) + orbit_distance(g, y, z) + 1e-9


def test_orbit_distance_broadcasts():
    g = generate_group(z2n(1, 1.0))
    d = orbit_distance(g, np.array([[1.0], [2.0]]), np.array([[-1.5], [2.5]]))
    assert np.allclose(d, [0.5, 0.5])
