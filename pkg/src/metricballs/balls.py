"""
Closed-form metric balls as CSG regions.

Notation: for a sphere produced by :func:`apollonian_boundary` the "Euclidean
ball bounded by it" is the open bounded ball (or, when the ratio is 1, the
half-space on the side noted at each call).  The case tables below select
between intersections and differences of those balls; every constructor is
checked against the direct sublevel set ``{y : d(x, y) < r}`` of the exact
evaluator in the test suite.
"""

from __future__ import annotations

import math
from itertools import combinations
from typing import Tuple

import numpy as np

from .errors import (
    BoundaryTooSmall,
    CoincidentPoints,
    DegenerateRadius,
    PointOutsideDomain,
)
from .geometry import (
    Plane,
    SphereOrPlane,
    apollonian_boundary,
    apollonian_sublevel,
    as_point,
)
from .metrics import (
    ALPHA,
    DELTA,
    Domain,
    HalfSpace,
    MetricKind,
    PuncturedSpace,
    PuncturedUnitBall,
    SampledBoundary,
    UnitBall,
    pair_distances,
)
from .regions import (
    Difference,
    FullSpace,
    ImplicitRegion,
    Intersection,
    OpenBall,
    Region,
    Union,
    register_implicit,
)


def _radius(r) -> float:
    r = float(r)
    if not r > 0 or not math.isfinite(r):
        raise DegenerateRadius("radius must be a positive finite number")
    return r


def _distinct_from(x, *punctures):
    for p in punctures:
        if np.array_equal(x, p):
            raise CoincidentPoints("center coincides with a puncture")


def ball_halfspace(x, r) -> OpenBall:
    """Hyperbolic ball of the upper half-space (shared by both metrics)."""
    x = as_point(x)
    r = _radius(r)
    if x[-1] <= 0:
        raise PointOutsideDomain("center must satisfy x_n > 0")
    center = x.copy()
    center[-1] += x[-1] * (math.cosh(r) - 1)
    return OpenBall(center, x[-1] * math.sinh(r))


def ball_unitball(x, r) -> OpenBall:
    """Hyperbolic ball of the unit ball (shared by both metrics)."""
    x = as_point(x)
    r = _radius(r)
    s2 = float(x @ x)
    if s2 >= 1:
        raise PointOutsideDomain("center must lie inside the unit ball")
    t = math.tanh(r / 2)
    denom = 1 - s2 * t * t
    return OpenBall(x * (1 - t * t) / denom, (1 - s2) * t / denom)


def _bounded_or_halfspace(x, y, c) -> Region:
    """Euclidean ball bounded by ``{c|x-z| = |y-z|}``; at c = 1 the half-space containing x."""
    locus = apollonian_boundary(x, y, c)
    if isinstance(locus, Plane):
        return apollonian_sublevel(x, y, 1.0)
    return OpenBall(locus.center, locus.radius)


def delta_ball_once_punctured(a, x, r) -> Region:
    """Seittenranta ball of ``R^n minus {a}`` (boundary ``{a, inf}``), i.e. a j-metric ball."""
    a, x = as_point(a), as_point(x)
    r = _radius(r)
    if np.array_equal(a, x):
        raise CoincidentPoints("center coincides with the puncture")
    k = math.expm1(r)
    outer = OpenBall(x, k * np.linalg.norm(x - a))
    if k <= 1:
        return Intersection((outer, apollonian_sublevel(x, a, 1 / k)))
    return Difference(outer, _bounded_or_halfspace(a, x, k))


def alpha_ball_once_punctured(a, x, r) -> Region:
    """Apollonian ball for the boundary ``{a, inf}``: a spherical shell around a."""
    a, x = as_point(a), as_point(x)
    r = _radius(r)
    if np.array_equal(a, x):
        raise CoincidentPoints("center coincides with the puncture")
    rho = float(np.linalg.norm(x - a))
    return Difference(OpenBall(a, rho * math.exp(r)), OpenBall(a, rho * math.exp(-r)))


def alpha_twice_constants(p, q, x, r) -> Tuple[float, float]:
    x, p, q = as_point(x), as_point(p), as_point(q)
    er = math.exp(r)
    dp, dq = np.linalg.norm(x - p), np.linalg.norm(x - q)
    return float(er * dq / dp), float(er * dp / dq)


def alpha_case(c: float, d: float) -> str:
    if c < 1 and d >= 1:
        return "c<1,d>=1"
    if c >= 1 and d < 1:
        return "c>=1,d<1"
    return "c>=1,d>=1"


def alpha_ball_twice_punctured(p, q, x, r) -> Region:
    """Apollonian ball of ``R^n minus {p, q}`` (infinity is an interior point).

    With ``c = e^r|x-q|/|x-p|`` and ``d = e^r|x-p|/|x-q|`` let ``E_c`` be the
    Euclidean ball bounded by ``{c|p-z| = |q-z|}`` and ``E_d`` the one bounded
    by ``{d|q-z| = |p-z|}``.  Then the ball is ``E_c - cl E_d`` when c < 1,
    ``E_d - cl E_c`` when d < 1, and the complement of ``cl E_c u cl E_d``
    otherwise.  A ratio equal to 1 gives the half-space containing p (resp. q).
    """
    p, q, x = as_point(p), as_point(q), as_point(x)
    r = _radius(r)
    if np.array_equal(p, q):
        raise CoincidentPoints("punctures must be distinct")
    _distinct_from(x, p, q)
    c, d = alpha_twice_constants(p, q, x, r)
    e_c = _bounded_or_halfspace(p, q, c)
    e_d = _bounded_or_halfspace(q, p, d)
    case = alpha_case(c, d)
    if case == "c<1,d>=1":
        return Difference(e_c, e_d)
    if case == "c>=1,d<1":
        return Difference(e_d, e_c)
    return Difference(FullSpace(), Union((e_c, e_d)))


def alpha_zero_set(p, q, x) -> SphereOrPlane:
    """Locus through x on which the twice-punctured Apollonian distance to x vanishes."""
    p, q, x = as_point(p), as_point(q), as_point(x)
    if np.array_equal(p, q):
        raise CoincidentPoints("punctures must be distinct")
    _distinct_from(x, p, q)
    ratio = float(np.linalg.norm(x - q) / np.linalg.norm(x - p))
    return apollonian_boundary(p, q, ratio)


def delta_twice_constants(p, q, x, r) -> Tuple[float, float]:
    x, p, q = as_point(x), as_point(p), as_point(q)
    k = math.expm1(r) / np.linalg.norm(p - q)
    return float(k * np.linalg.norm(x - p)), float(k * np.linalg.norm(x - q))


def delta_case(c: float, d: float) -> str:
    return ("c<=1" if c <= 1 else "c>1") + "," + ("d<=1" if d <= 1 else "d>1")


def _lens_side(x, puncture, ratio) -> Region:
    """Ball bounded by ``{|x-y| = ratio |y-puncture|}``: x's side when ratio <= 1."""
    if ratio <= 1:
        return apollonian_sublevel(x, puncture, 1 / ratio)
    return _bounded_or_halfspace(x, puncture, 1 / ratio)


def delta_ball_twice_punctured(p, q, x, r) -> Region:
    """Seittenranta ball of ``R^n minus {p, q}`` (infinity is an interior point).

    ``B_c = {y : |x-y| < c|y-q|}`` and ``B_d = {y : |x-y| < d|y-p|}`` with
    ``c = (e^r-1)|x-p|/|p-q|`` and ``d = (e^r-1)|x-q|/|p-q|``.
    """
    p, q, x = as_point(p), as_point(q), as_point(x)
    r = _radius(r)
    if np.array_equal(p, q):
        raise CoincidentPoints("punctures must be distinct")
    _distinct_from(x, p, q)
    c, d = delta_twice_constants(p, q, x, r)
    b_c = _lens_side(x, q, c)
    b_d = _lens_side(x, p, d)
    if c <= 1 and d <= 1:
        return Intersection((b_c, b_d))
    if c <= 1:
        return Difference(b_c, b_d)
    if d <= 1:
        return Difference(b_d, b_c)
    return Difference(FullSpace(), Union((b_c, b_d)))


def ball_by_pair_intersection(domain: PuncturedSpace, kind, x, r) -> Region:
    """Intersection of the two-point balls over all boundary pairs ``a != b``."""
    kind = MetricKind.parse(kind)
    x = as_point(x)
    r = _radius(r)
    pts = [as_point(p) for p in domain.punctures]
    _distinct_from(x, *pts)
    if len(pts) + domain.includes_infinity < 2:
        raise BoundaryTooSmall("need at least two boundary points")
    twice = alpha_ball_twice_punctured if kind is ALPHA else delta_ball_twice_punctured
    once = alpha_ball_once_punctured if kind is ALPHA else delta_ball_once_punctured
    parts = [twice(p, q, x, r) for p, q in combinations(pts, 2)]
    if domain.includes_infinity:
        parts += [once(p, x, r) for p in pts]
    if len(parts) == 1:
        return parts[0]
    return Intersection(tuple(parts))


def punctured_ball_constant_a(x, r) -> float:
    """Ratio of the Apollonian ball ``A = {y : c|x-y| < |y|}``."""
    return 1.0 / (math.expm1(r) * (1 - np.linalg.norm(as_point(x))))


@register_implicit("punctured_ball_B")
def punctured_ball_set_b(x, r) -> ImplicitRegion:
    """``{y : log(1 + |x-y| / (|x| (1-|y|))) < r}``, written as a sign test."""
    from .analysis import boundary_profile

    x = as_point(x)
    r = _radius(r)
    nx = float(np.linalg.norm(x))
    k = math.expm1(r)

    def level(Y):
        return np.linalg.norm(Y - x, axis=1) - k * nx * (1 - np.linalg.norm(Y, axis=1))

    sampler = None
    box = (-np.ones(x.size), np.ones(x.size))
    if x.size == 2:
        c = nx * k
        u = x / nx
        v = np.array([-u[1], u[0]])

        def sampler(count):
            beta = 2 * np.pi * np.arange(count) / count
            folded = np.arccos(np.cos(beta))
            m = np.array([boundary_profile(nx, c, b) for b in folded])
            dirs = np.outer(np.cos(beta), u) + np.outer(np.sin(beta), v)
            return x + m[:, None] * dirs

        pts = sampler(256)
        pad = 0.02 * (pts.max(axis=0) - pts.min(axis=0)).max()
        box = (np.maximum(pts.min(axis=0) - pad, -1), np.minimum(pts.max(axis=0) + pad, 1))
    return ImplicitRegion(level, "punctured_ball_B", {"x": x.tolist(), "r": r}, box=box,
                          boundary_sampler=sampler, dim=x.size)


def delta_ball_punctured_unitball(x, r) -> Region:
    """Seittenranta ball of the punctured unit ball as ``A n B n C``."""
    x = as_point(x)
    r = _radius(r)
    nx = float(np.linalg.norm(x))
    if not 0 < nx < 1:
        raise PointOutsideDomain("center must satisfy 0 < |x| < 1")
    a_set = apollonian_sublevel(x, np.zeros_like(x), punctured_ball_constant_a(x, r))
    return Intersection((a_set, punctured_ball_set_b(x, r), ball_unitball(x, r)))


@register_implicit("metric_sublevel")
def metric_sublevel_region(domain, kind, x, r) -> ImplicitRegion:
    """``{y in G : d_G(x, y) < r}`` evaluated pointwise; level is ``d - r``."""
    from .domainspec import format_domain_spec, parse_domain_spec

    if isinstance(domain, str):
        domain = parse_domain_spec(domain)
    kind = MetricKind.parse(kind)
    x = as_point(x)
    r = _radius(r)

    def level(Y):
        out = np.full(len(Y), np.inf)
        inside = domain.contains(Y)
        if np.any(inside):
            Yi = Y[inside]
            vals = pair_distances(kind, domain, np.broadcast_to(x, Yi.shape), Yi)
            out[inside] = vals - r
        return out

    box = None
    if isinstance(domain, (UnitBall, PuncturedUnitBall)):
        box = (-np.ones(x.size), np.ones(x.size))
    elif isinstance(domain, SampledBoundary):
        pts = domain.boundary_points(256)
        box = (pts.min(axis=0), pts.max(axis=0))
    params = {"domain": format_domain_spec(domain), "kind": kind.value, "x": x.tolist(), "r": r}
    return ImplicitRegion(level, "metric_sublevel", params, box=box, dim=x.size)


def metric_ball(domain: Domain, kind, x, r) -> Region:
    """Dispatch to the closed-form constructor for ``B_{d_G}(x, r)``."""
    kind = MetricKind.parse(kind)
    x = as_point(x)
    r = _radius(r)
    if isinstance(domain, HalfSpace):
        return ball_halfspace(x, r)
    if isinstance(domain, UnitBall):
        return ball_unitball(x, r)
    if isinstance(domain, PuncturedUnitBall):
        if kind is DELTA:
            return delta_ball_punctured_unitball(x, r)
        return metric_sublevel_region(domain, kind, x, r)
    if isinstance(domain, PuncturedSpace):
        pts = domain.points
        if len(pts) == 2 and not domain.includes_infinity:
            fn = alpha_ball_twice_punctured if kind is ALPHA else delta_ball_twice_punctured
            return fn(pts[0], pts[1], x, r)
        return ball_by_pair_intersection(domain, kind, x, r)
    return metric_sublevel_region(domain, kind, x, r)
