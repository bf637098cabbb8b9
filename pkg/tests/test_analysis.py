import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from metricballs.analysis import (
    ThresholdKind,
    ThresholdQuery,
    Verdict,
    boundary_profile,
    boundary_profile_derivative_c1,
    check_complement_connected,
    check_convex,
    check_starlike,
    estimate_threshold,
    sharpness_candidates,
    sharpness_witness_punctured_ball,
    threshold_formula,
    verify_metric_inequalities,
    witness_holds,
)
from metricballs.balls import (
    alpha_ball_twice_punctured,
    ball_halfspace,
    delta_ball_punctured_unitball,
    delta_ball_twice_punctured,
    metric_ball,
)
from metricballs.errors import (
    BracketNotStraddling,
    CenterOutsideRegion,
    EmptyRegionSampled,
    InadmissibleParameters,
    NoRootInRange,
    UnsupportedDimension,
)
from metricballs.metrics import DELTA, PuncturedSpace, PuncturedUnitBall, UnitBall, delta_punctured_ball
from metricballs.regions import Difference, EmptySet, OpenBall

P, Q, X = (1.0, 0.0), (-1.0, 0.0), (0.5, 0.5)
R0 = math.log(1 + 4 / math.sqrt(10))


def test_convex_ball():
    v = check_convex(OpenBall([0, 0], 1), samples=10_000)
    assert v.verdict is Verdict.CONVEX and v.samples_used >= 10_000


def test_alpha_ball_never_convex():
    for r in (0.05, 0.2, 1.4, 3.0):
        region = alpha_ball_twice_punctured(P, Q, X, r)
        v = check_convex(region)
        assert v.verdict is Verdict.NON_CONVEX
        assert witness_holds(region, v)


def test_delta_ball_threshold_probe():
    below = check_convex(delta_ball_twice_punctured(P, Q, X, R0 - 0.3))
    above_region = delta_ball_twice_punctured(P, Q, X, R0 + 0.3)
    above = check_convex(above_region)
    assert below.is_convex
    assert above.verdict is Verdict.NON_CONVEX and witness_holds(above_region, above)


def test_convex_deterministic_under_seed():
    region = Difference(OpenBall([0, 0], 2), OpenBall([1.9, 0], 0.3))
    a, b = check_convex(region, seed=3), check_convex(region, seed=3)
    assert a.verdict == b.verdict
    assert all(np.array_equal(u, v) for u, v in zip(a.witness, b.witness))


def test_shallow_dent_found_by_boundary_chords():
    # a bite too shallow for random pairs to hit reliably
    region = Difference(OpenBall([0, 0], 1), OpenBall([0, 5.995], 5))
    v = check_convex(region, samples=200, seed=1)
    assert v.verdict is Verdict.NON_CONVEX and witness_holds(region, v)


def test_convex_errors_and_zero_budget():
    with pytest.raises(EmptyRegionSampled):
        check_convex(EmptySet(), box=(np.array([-1, -1]), np.array([1, 1])))
    assert check_convex(OpenBall([0, 0], 1), samples=0).verdict is Verdict.INCONCLUSIVE


def test_starlike_examples():
    v = check_starlike(ball_halfspace([0, 1], 1), [0, 1])
    assert v.verdict is Verdict.STARLIKE
    region = delta_ball_twice_punctured(P, Q, X, 2.0)
    v = check_starlike(region, X)
    assert v.verdict is Verdict.NOT_STARLIKE and witness_holds(region, v)
    with pytest.raises(CenterOutsideRegion):
        check_starlike(OpenBall([0, 0], 1), [3, 0])


def test_starlike_just_above_threshold():
    region = delta_ball_twice_punctured(P, Q, X, R0 + 0.3)
    assert check_starlike(region, X, rays=1440, steps=800).verdict is Verdict.NOT_STARLIKE


def test_complement_components():
    assert check_complement_connected(OpenBall([0, 0], 1)) == 1
    assert check_complement_connected(delta_ball_twice_punctured(P, Q, X, 0.6)) == 1
    for r in (0.2, 1.4):
        assert check_complement_connected(alpha_ball_twice_punctured(P, Q, X, r)) >= 2
    with pytest.raises(UnsupportedDimension):
        check_complement_connected(OpenBall([0, 0, 0], 1))


def test_threshold_formulas():
    assert threshold_formula(ThresholdQuery(ThresholdKind.ONCE_PUNCTURED_CONVEX)) == pytest.approx(math.log(2))
    assert threshold_formula(ThresholdQuery("once-punctured-starlike")) == pytest.approx(math.log(1 + math.sqrt(2)))
    r0 = threshold_formula(ThresholdQuery(ThresholdKind.TWICE_PUNCTURED_DELTA, (P, Q), X))
    assert r0 == pytest.approx(math.log(1 + 4 / math.sqrt(10)))
    assert r0 == pytest.approx(0.81756, abs=1e-4)
    assert threshold_formula(ThresholdQuery(ThresholdKind.PUNCTURED_BALL_DELTA, x=(0.5, 0))) == pytest.approx(math.log(3))
    # the finitely punctured radius reduces to the two-point one
    assert threshold_formula(ThresholdQuery(ThresholdKind.FINITELY_PUNCTURED_DELTA, (P, Q), X)) == pytest.approx(r0)


def test_threshold_inadmissible():
    with pytest.raises(InadmissibleParameters):
        threshold_formula(ThresholdQuery(ThresholdKind.PUNCTURED_BALL_DELTA, x=(1.0, 0)))
    with pytest.raises(InadmissibleParameters):
        threshold_formula(ThresholdQuery(ThresholdKind.TWICE_PUNCTURED_DELTA, (P, P), X))
    with pytest.raises(InadmissibleParameters):
        threshold_formula(ThresholdQuery(ThresholdKind.TWICE_PUNCTURED_DELTA, (P, Q), P))
    with pytest.raises(InadmissibleParameters):
        threshold_formula(ThresholdQuery(ThresholdKind.TWICE_PUNCTURED_DELTA, (P, Q)))


def test_estimate_twice_punctured():
    est = estimate_threshold(PuncturedSpace((P, Q)), DELTA, X, (0.4, 1.4), tol=1e-3)
    assert abs(est.estimate - R0) < 1e-3
    lo, hi = est.bracket
    assert hi - lo <= 1e-3 and lo <= R0 <= hi
    # each step halves the bracket
    assert est.iterations == math.ceil(math.log2(1.0 / 1e-3))


def test_estimate_bracket_must_straddle():
    with pytest.raises(BracketNotStraddling):
        estimate_threshold(PuncturedSpace((P, Q)), DELTA, X, (0.1, 0.3), tol=1e-2)


def test_profile_examples():
    assert boundary_profile(0.5, 1.0, 0.0) == pytest.approx(0.25)
    assert boundary_profile(0.5, 1.0, math.pi) == pytest.approx(0.75)
    with pytest.raises(NoRootInRange):
        boundary_profile(1.5, 1.0, 0.0)


@given(st.floats(0.02, 0.98), st.floats(0.05, 4.0), st.floats(0, math.pi))
def test_profile_solves_implicit_equation(modx, c, beta):
    m = boundary_profile(modx, c, beta)
    x = np.array([modx, 0.0])
    y = x + m * np.array([math.cos(beta), math.sin(beta)])
    # |y| agrees with the constraint |y| = 1 - m / c
    assert np.linalg.norm(y) == pytest.approx(1 - m / c, abs=1e-9)
    r = math.log1p(c / modx)
    lhs = math.log1p(m / (modx * (1 - np.linalg.norm(y))))
    assert lhs == pytest.approx(r, abs=1e-9)


@given(st.floats(0.02, 0.98), st.floats(0.05, 4.0))
def test_profile_monotone(modx, c):
    m = np.array([boundary_profile(modx, c, b) for b in np.linspace(0, math.pi, 200)])
    assert np.min(np.diff(m)) >= -1e-9


def test_profile_continuous_across_c1():
    for modx in (0.1, 0.5, 0.9):
        for beta in (0.0, 1.0, math.pi):
            base = boundary_profile(modx, 1.0, beta)
            for eps in (1e-4, 1e-7):
                jump = max(abs(boundary_profile(modx, 1 + s, beta) - base) for s in (eps, -eps))
                assert jump < eps  # Lipschitz in c with constant below 1
            assert abs(boundary_profile(modx, 1 + 1e-7, beta) - base) < 1e-6


def test_profile_derivative_at_c1(rng):
    h = 1e-5
    for _ in range(100):
        modx, beta = rng.uniform(0.02, 0.98), rng.uniform(h, math.pi - h)
        fd = (boundary_profile(modx, 1, beta + h) - boundary_profile(modx, 1, beta - h)) / (2 * h)
        assert fd == pytest.approx(boundary_profile_derivative_c1(modx, beta), abs=1e-6)


def test_sharpness_examples():
    ra, rb, rc = sharpness_candidates([0.5, 0], [0.25, 0])
    assert ra == pytest.approx(math.log(3))
    assert rb == pytest.approx(math.log(5 / 3))
    assert rc == pytest.approx(math.log(1.8))
    rep = sharpness_witness_punctured_ball([0.5, 0], math.log(3))
    assert rep.holds and np.allclose(rep.y, [0.25, 0])
    rep = sharpness_witness_punctured_ball([0.5, 0], math.log(3) - 0.1)
    assert rep.holds
    assert abs(delta_punctured_ball([0.5, 0], rep.y) - (math.log(3) - 0.1)) < 1e-9


def test_sharpness_small_radius_residual():
    rep = sharpness_witness_punctured_ball([0.3, 0.4], 1e-3)
    assert rep.residual < 1e-9


def test_punctured_ball_convexity_flip():
    x = np.array([0.3, -0.4])
    r0 = threshold_formula(ThresholdQuery(ThresholdKind.PUNCTURED_BALL_DELTA, x=x))
    assert check_convex(delta_ball_punctured_unitball(x, r0 - 0.1), samples=20_000).is_convex
    assert not check_convex(delta_ball_punctured_unitball(x, r0 + 0.1), samples=20_000).is_convex


def test_inequality_report():
    rep = verify_metric_inequalities([PuncturedSpace((P, Q)), UnitBall(), PuncturedUnitBall()], pairs=500)
    assert rep.passed and rep.pairs == 1500
    assert rep.worst_slack <= 1e-12
