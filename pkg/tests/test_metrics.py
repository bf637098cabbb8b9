import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from metricballs.balls import alpha_zero_set
from metricballs.errors import (
    BoundaryTooSmall,
    DimensionMismatch,
    DuplicatePuncture,
    PointOnBoundary,
    PointOutsideDomain,
    SamplerExhausted,
)
from metricballs.metrics import (
    ALPHA,
    DELTA,
    HalfSpace,
    MetricKind,
    PuncturedSpace,
    PuncturedUnitBall,
    UnitBall,
    alpha,
    apollonian_is_metric,
    delta,
    delta_punctured_ball,
    distance,
    hyperbolic_distance,
    j_distance,
    pair_distances,
    square_domain,
    sup_over_boundary_sample,
)

TWO = PuncturedSpace(((-1.0, 0.0), (1.0, 0.0)))
LOG3 = math.log(3)
coord = st.floats(-3, 3, allow_nan=False)
point2 = st.tuples(coord, coord).map(np.array)


def test_alpha_examples():
    assert alpha(TWO, [0, 0], [0.5, 0]) == pytest.approx(LOG3)
    assert alpha(UnitBall(), [0, 0], [0.5, 0]) == pytest.approx(LOG3)
    assert alpha(TWO, [0.3, 0.2], [0.3, 0.2]) == 0


def test_delta_examples():
    once = PuncturedSpace(((0.0, 0.0),), includes_infinity=True)
    assert delta(once, [1, 0], [3, 0]) == pytest.approx(LOG3)
    assert delta(TWO, [0, 0], [0.5, 0]) == pytest.approx(LOG3)
    assert delta(TWO, [0.1, 0.7], [0.1, 0.7]) == 0


def test_metric_kind_parsing():
    assert MetricKind.parse("Apollonian") is ALPHA
    assert MetricKind.parse("delta") is DELTA
    assert distance("alpha", TWO, [0, 0], [0.5, 0]) == pytest.approx(LOG3)


def test_hyperbolic_examples():
    assert hyperbolic_distance(HalfSpace(), [0, 1], [0, 2]) == pytest.approx(math.log(2))
    assert hyperbolic_distance(UnitBall(), [0.5, 0], [0.25, 0]) == pytest.approx(math.log(1.8))
    assert hyperbolic_distance(UnitBall(), [0.5, 0], [0.5, 0]) == 0
    with pytest.raises(PointOutsideDomain):
        hyperbolic_distance(UnitBall(), [0.5, 0], [1.5, 0])


def test_hyperbolic_matches_acosh_form(rng):
    X = rng.uniform(-0.7, 0.7, (200, 2))
    Y = rng.uniform(-0.7, 0.7, (200, 2))
    arg = 1 + 2 * np.sum((X - Y) ** 2, 1) / ((1 - np.sum(X * X, 1)) * (1 - np.sum(Y * Y, 1)))
    np.testing.assert_allclose(pair_distances(ALPHA, UnitBall(), X, Y), np.arccosh(arg), rtol=1e-9, atol=1e-12)
    X[:, 1] = np.abs(X[:, 1]) + 0.1
    Y[:, 1] = np.abs(Y[:, 1]) + 0.1
    arg = 1 + np.sum((X - Y) ** 2, 1) / (2 * X[:, 1] * Y[:, 1])
    np.testing.assert_allclose(pair_distances(DELTA, HalfSpace(), X, Y), np.arccosh(arg), rtol=1e-9, atol=1e-12)


def test_j_distance():
    assert j_distance([0, 0], [1, 0], [2, 0]) == pytest.approx(math.log(2))
    assert j_distance([0, 0], [1, 0], [1, 0]) == 0
    once = PuncturedSpace(((0.0, 0.0),), includes_infinity=True)
    assert j_distance([0, 0], [1, 0], [3, 0]) == pytest.approx(delta(once, [1, 0], [3, 0]))
    with pytest.raises(PointOnBoundary):
        j_distance([0, 0], [0, 0], [1, 0])


@given(point2, point2, point2)
def test_j_equals_once_punctured_delta(a, x, y):
    assume(min(np.linalg.norm(x - a), np.linalg.norm(y - a)) > 1e-3)
    once = PuncturedSpace((tuple(a),), includes_infinity=True)
    assert delta(once, x, y) == pytest.approx(j_distance(a, x, y), rel=1e-12, abs=1e-14)


def test_delta_punctured_ball_examples():
    assert delta_punctured_ball([0.5, 0], [0.25, 0]) == pytest.approx(LOG3)
    assert delta_punctured_ball([0.5, 0], [0.6, 0]) == pytest.approx(math.log(1.5))
    assert delta_punctured_ball([0.5, 0], [0.5, 0]) == 0
    with pytest.raises(PointOutsideDomain):
        delta_punctured_ball([0, 0], [0.5, 0])
    with pytest.raises(PointOutsideDomain):
        delta_punctured_ball([1.0, 0], [0.5, 0])


def test_punctured_ball_closed_forms_dominate_samples(rng):
    dom = PuncturedUnitBall(2)
    for _ in range(20):
        x, y = rng.uniform(-0.6, 0.6, (2, 2))
        for kind in (ALPHA, DELTA):
            exact = distance(kind, dom, x, y)
            low = sup_over_boundary_sample(dom, kind, x, y, 2000)
            assert low <= exact + 1e-12
            assert exact - low < 1e-3


def test_errors():
    with pytest.raises(PointOnBoundary):
        alpha(TWO, [1, 0], [0, 0])
    with pytest.raises(PointOutsideDomain):
        delta(UnitBall(), [0, 0], [2, 0])
    with pytest.raises(BoundaryTooSmall):
        delta(PuncturedSpace(((0.0, 0.0),)), [1, 0], [2, 0])
    with pytest.raises(DuplicatePuncture):
        PuncturedSpace(((0.0, 0.0), (0.0, 0.0)))
    with pytest.raises(DimensionMismatch):
        alpha(TWO, [0, 0, 0], [0.5, 0])


@given(point2, point2)
def test_symmetry(x, y):
    dom = PuncturedSpace(((-1.0, 0.0), (1.0, 0.0), (0.5, 2.0)))
    assume(bool(np.all(dom.contains(np.array([x, y])))))
    for fn in (alpha, delta):
        assert fn(dom, x, y) == fn(dom, y, x)


@given(point2, point2, point2)
def test_delta_triangle(x, y, z):
    dom = PuncturedSpace(((-1.0, 0.0), (1.0, 0.0)), includes_infinity=True)
    assume(bool(np.all(dom.contains(np.array([x, y, z])))))
    assert delta(dom, x, z) <= delta(dom, x, y) + delta(dom, y, z) + 1e-12


def test_triangle_on_domain_zoo(rng):
    for dom, lo, hi in ((UnitBall(), -0.6, 0.6), (PuncturedUnitBall(), -0.6, 0.6), (TWO, -2, 2)):
        P = rng.uniform(lo, hi, (3, 1000, 2))
        xy = pair_distances(DELTA, dom, P[0], P[1])
        yz = pair_distances(DELTA, dom, P[1], P[2])
        xz = pair_distances(DELTA, dom, P[0], P[2])
        assert np.all(xz <= xy + yz + 1e-12)


def test_alpha_vanishes_on_zero_set():
    x = np.array([0.5, 0.5])
    locus = alpha_zero_set([1, 0], [-1, 0], x)
    ys = locus.sample(100)
    assert np.max(alpha(TWO, x, ys)) < 1e-9


def test_sampled_unit_ball_delta():
    v = sup_over_boundary_sample(UnitBall(), DELTA, [0, 0], [0.5, 0], 1000)
    assert LOG3 - 1e-2 <= v <= LOG3 + 1e-12


def test_sampled_exhaustive_equals_exact():
    dom = PuncturedSpace(((-1.0, 0.0), (1.0, 0.0), (0.0, 2.0)))
    for kind in (ALPHA, DELTA):
        assert sup_over_boundary_sample(dom, kind, [0.1, 0.3], [-0.4, 0.9], 3) == distance(
            kind, dom, [0.1, 0.3], [-0.4, 0.9]
        )


def test_sampled_square_monotone_in_budget():
    sq = square_domain(2.0)
    vals = [sup_over_boundary_sample(sq, ALPHA, [0, 0], [1, 0], b) for b in (100, 200, 400, 800, 1600, 3200, 6400, 10000)]
    assert all(b >= a - 1e-15 for a, b in zip(vals, vals[1:]))


def test_sampler_exhausted():
    with pytest.raises(SamplerExhausted):
        sup_over_boundary_sample(square_domain(), DELTA, [0, 0], [1, 0], 1)


def test_apollonian_metric_flag():
    assert not apollonian_is_metric(TWO)
    # three points always lie on a circle; a fourth off that circle makes it a metric
    assert not apollonian_is_metric(PuncturedSpace(((-1.0, 0.0), (1.0, 0.0), (0.0, 2.0))))
    assert apollonian_is_metric(PuncturedSpace(((-1.0, 0.0), (1.0, 0.0), (0.0, 2.0), (0.0, 0.5))))
    assert not apollonian_is_metric(PuncturedSpace(((0.0, 0.0), (1.0, 1.0), (2.0, 2.0)), includes_infinity=True))
    assert apollonian_is_metric(UnitBall())


def test_domain_monotonicity(rng):
    small = TWO
    big = small.with_puncture((2.0, 0.0))
    X, Y = rng.uniform(-3, 3, (2, 1000, 2))
    for kind in (ALPHA, DELTA):
        assert np.all(pair_distances(kind, big, X, Y) >= pair_distances(kind, small, X, Y) - 1e-12)
