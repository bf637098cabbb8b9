import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from metricballs.errors import CoincidentPoints, DegenerateCrossRatio, DimensionMismatch, RadiusOutOfRange
from metricballs.geometry import (
    INFINITY,
    Plane,
    Sphere,
    angle_at,
    apollonian_boundary,
    apollonian_sublevel,
    cone_hull,
    cross_ratio,
)
from metricballs.regions import ComplementOfClosedBall, OpenBall, OpenHalfSpace

E1 = np.array([1.0, 0.0])
coord = st.floats(-5, 5, allow_nan=False, allow_infinity=False)
point2 = st.tuples(coord, coord).map(np.array)


def test_cross_ratio_examples():
    assert cross_ratio(0 * E1, E1, 2 * E1, 3 * E1) == pytest.approx(4)
    assert cross_ratio(INFINITY, 0 * E1, E1, 2 * E1) == pytest.approx(2)
    assert cross_ratio(E1, 3 * E1, E1, -E1) == 0


def test_cross_ratio_infinity_in_each_slot():
    a, b, c, d = np.array([0.3, 1.0]), np.array([-2.0, 0.5]), np.array([1.0, 1.0]), np.array([0.0, -1.0])
    n = np.linalg.norm
    assert cross_ratio(a, INFINITY, c, d) == pytest.approx(n(a - c) / n(c - d))
    assert cross_ratio(a, b, INFINITY, d) == pytest.approx(n(b - d) / n(a - b))
    # the fourth slot is the limit |a - c| / |a - b|
    assert cross_ratio(a, b, c, INFINITY) == pytest.approx(n(a - c) / n(a - b))
    far = 1e9 * np.array([1.0, 2.0])
    assert cross_ratio(a, b, c, far) == pytest.approx(cross_ratio(a, b, c, INFINITY), rel=1e-6)


def test_cross_ratio_errors():
    with pytest.raises(DegenerateCrossRatio):
        cross_ratio(E1, E1, 2 * E1, 3 * E1)
    with pytest.raises(DimensionMismatch):
        cross_ratio(E1, [0, 0, 1], 2 * E1, 3 * E1)


@given(point2, point2, point2, point2, point2, st.floats(0.1, 10))
def test_cross_ratio_mobius_invariance(a, b, c, d, shift, scale):
    pts = [a, b, c, d]
    gaps = [np.linalg.norm(p - q) for i, p in enumerate(pts) for q in pts[i + 1:]]
    assume(min(gaps) > 1e-2)
    base = cross_ratio(*pts)
    moved = cross_ratio(*[scale * p + shift for p in pts])
    assert moved == pytest.approx(base, rel=1e-9)
    # inversion about a point away from all four
    centre = np.array([7.3, -6.1])
    inv = [(p - centre) / np.sum((p - centre) ** 2) for p in pts]
    assert cross_ratio(*inv) == pytest.approx(base, rel=1e-9)


def test_apollonian_boundary_examples():
    s = apollonian_boundary([0, 0], E1, 2)
    assert isinstance(s, Sphere)
    np.testing.assert_allclose(s.center, [-1 / 3, 0], atol=1e-15)
    assert s.radius == pytest.approx(2 / 3)
    pl = apollonian_boundary([0, 0], E1, 1)
    assert isinstance(pl, Plane)
    np.testing.assert_allclose(pl.normal, E1)
    assert pl.offset == pytest.approx(0.5)
    s = apollonian_boundary([0, 0], E1, 0.5)
    np.testing.assert_allclose(s.center, [4 / 3, 0])
    assert s.radius == pytest.approx(2 / 3)
    with pytest.raises(CoincidentPoints):
        apollonian_boundary(E1, E1, 2)


@given(point2, point2, st.one_of(st.floats(0.05, 0.95), st.floats(1.05, 20)))
def test_apollonian_locus_residual(x, y, c):
    assume(np.linalg.norm(x - y) > 1e-3)
    z = apollonian_boundary(x, y, c).sample(360)
    res = np.abs(c * np.linalg.norm(x - z, axis=1) - np.linalg.norm(y - z, axis=1))
    assert res.max() < 1e-9 * (1 + np.linalg.norm(x - y))


def test_plane_locus_residual():
    x, y = np.array([0.2, -1.0]), np.array([2.0, 3.0])
    z = apollonian_boundary(x, y, 1.0).sample(50)
    np.testing.assert_allclose(np.linalg.norm(x - z, axis=1), np.linalg.norm(y - z, axis=1), rtol=1e-12)


def test_apollonian_sublevel_examples():
    b = apollonian_sublevel([0, 0], E1, 2)
    assert isinstance(b, OpenBall)
    assert b.contains([0, 0]) and not b.contains(E1)
    h = apollonian_sublevel([0, 0], E1, 1)
    assert isinstance(h, OpenHalfSpace)
    assert h.contains([0.49, 3]) and not h.contains([0.51, 0])
    c = apollonian_sublevel([0, 0], E1, 0.5)
    assert isinstance(c, ComplementOfClosedBall)
    assert c.contains(10 * E1)


@given(point2, point2, st.floats(0.05, 20))
def test_sublevel_contains_x_not_y(x, y, r):
    assume(np.linalg.norm(x - y) > 1e-6)
    region = apollonian_sublevel(x, y, r)
    assert region.contains(x)
    assert not region.contains(y)


def test_cone_hull_examples():
    desc, region = cone_hull([0, 0], E1, 0.5)
    assert desc.half_angle == pytest.approx(math.pi / 6)
    assert desc.length == pytest.approx(2 / math.sqrt(3))
    assert region.contains([0.5, 0.1])
    assert angle_at([0, 0], [0.5, 0.1], E1) == pytest.approx(0.197, abs=1e-3)
    assert not region.contains(2 * E1)
    with pytest.raises(RadiusOutOfRange):
        cone_hull([0, 0], E1, 1.0)


def test_cone_hull_matches_sampled_union(rng):
    x, y, r = np.array([0.1, -0.2]), np.array([0.9, 0.4]), 0.4
    _, region = cone_hull(x, y, r)
    Z = rng.uniform(-1.5, 2.0, (4000, 2))
    Z = Z[np.abs(region.level(Z)) > 1e-3]
    union = np.zeros(len(Z), dtype=bool)
    for t in np.arange(1, 1001) / 1000:
        zt = x + t * (y - x)
        union |= np.linalg.norm(Z - zt, axis=1) < r * np.linalg.norm(Z - x, axis=1)
    assert np.array_equal(region.contains(Z), union)
