"""Points of the extended space, cross-ratios and Apollonian spheres."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from .errors import (
    CoincidentPoints,
    DegenerateCrossRatio,
    DimensionMismatch,
    GeometryError,
    RadiusOutOfRange,
)
from .regions import (
    ComplementOfClosedBall,
    ImplicitRegion,
    OpenBall,
    OpenHalfSpace,
    Region,
    Union as RegionUnion,
    register_implicit,
)


class _Infinity:
    """The point at infinity of the one-point compactification."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()

ExtendedPoint = Union[np.ndarray, _Infinity]


def is_infinity(p) -> bool:
    return p is INFINITY


def as_point(p) -> np.ndarray:
    """Coerce to a finite float vector, rejecting NaN/inf and empty input."""
    if p is INFINITY:
        raise GeometryError("expected a finite point, got INFINITY")
    arr = np.asarray(p, dtype=float).reshape(-1)
    if arr.size == 0:
        raise GeometryError("points need at least one coordinate")
    if not np.all(np.isfinite(arr)):
        raise GeometryError("point coordinates must be finite")
    return arr


def _common_dim(*points) -> int:
    dims = {p.size for p in points if p is not INFINITY}
    if len(dims) > 1:
        raise DimensionMismatch(f"points have dimensions {sorted(dims)}")
    return dims.pop() if dims else 0


def _dist(p, q) -> float:
    return float(np.linalg.norm(p - q))


def cross_ratio(a, b, c, d) -> float:
    """``|a-c||b-d| / (|a-b||c-d|)`` with the limit convention at infinity.

    Each argument may be INFINITY (at most one of them).  The two distance
    factors involving the infinite point are replaced by their ratio's
    limit, which is 1.
    """
    pts = [p if p is INFINITY else as_point(p) for p in (a, b, c, d)]
    if sum(p is INFINITY for p in pts) > 1:
        raise GeometryError("at most one argument may be INFINITY")
    _common_dim(*pts)
    a, b, c, d = pts
    # numerator pairs (a,c), (b,d); denominator pairs (a,b), (c,d)
    def factor(p, q):
        return None if (p is INFINITY or q is INFINITY) else _dist(p, q)

    num = [factor(a, c), factor(b, d)]
    den = [factor(a, b), factor(c, d)]
    num = [v for v in num if v is not None]
    den = [v for v in den if v is not None]
    top = math.prod(num)
    bottom = math.prod(den)
    if bottom == 0.0:
        if top == 0.0 and a is not INFINITY and c is not INFINITY and np.array_equal(a, c):
            return 0.0
        raise DegenerateCrossRatio("cross-ratio denominator vanishes")
    return top / bottom


@dataclass(frozen=True, eq=False)
class Sphere:
    center: np.ndarray
    radius: float

    def sample(self, k: int, seed: int = 0) -> np.ndarray:
        n = self.center.size
        if n == 1:
            return np.array([self.center - self.radius, self.center + self.radius])
        if n == 2:
            t = 2 * np.pi * np.arange(k) / k
            return self.center + self.radius * np.column_stack([np.cos(t), np.sin(t)])
        g = np.random.default_rng(seed).normal(size=(k, n))
        return self.center + self.radius * g / np.linalg.norm(g, axis=1, keepdims=True)


@dataclass(frozen=True, eq=False)
class Plane:
    """The locus ``{z : z . normal = offset}`` with a unit normal."""

    normal: np.ndarray
    offset: float

    def sample(self, k: int, seed: int = 0, extent: float = 10.0) -> np.ndarray:
        n = self.normal.size
        foot = self.offset * self.normal
        if n == 1:
            return np.repeat(foot[None, :], k, axis=0)
        if n == 2:
            tangent = np.array([-self.normal[1], self.normal[0]])
            s = np.linspace(-extent, extent, k)
            return foot + s[:, None] * tangent
        g = np.random.default_rng(seed).normal(size=(k, n)) * extent
        g -= np.outer(g @ self.normal, self.normal)
        return foot + g


SphereOrPlane = Union[Sphere, Plane]


def _distinct(x, y) -> Tuple[np.ndarray, np.ndarray]:
    x, y = as_point(x), as_point(y)
    _common_dim(x, y)
    if np.array_equal(x, y):
        raise CoincidentPoints("the two points must be distinct")
    return x, y


def apollonian_boundary(x, y, c: float) -> SphereOrPlane:
    """The locus ``{z : c|x - z| = |y - z|}``: a sphere, or a plane when c = 1."""
    x, y = _distinct(x, y)
    c = float(c)
    if not c > 0:
        raise GeometryError("ratio must be positive")
    if c == 1.0:
        diff = y - x
        normal = diff / np.linalg.norm(diff)
        return Plane(normal, float(normal @ (x + y) / 2))
    center = (y - c * c * x) / (1 - c * c)
    radius = c * np.linalg.norm(x - y) / abs(1 - c * c)
    return Sphere(center, float(radius))


def bounded_ball(locus: Sphere) -> OpenBall:
    return OpenBall(locus.center, locus.radius)


def apollonian_sublevel(x, y, r: float) -> Region:
    """The set ``{z : r|x - z| < |y - z|}``, which always contains x."""
    locus = apollonian_boundary(x, y, r)
    if isinstance(locus, Plane):
        return OpenHalfSpace(locus.normal, locus.offset)
    if r > 1:
        return OpenBall(locus.center, locus.radius)
    return ComplementOfClosedBall(locus.center, locus.radius)


@dataclass(frozen=True, eq=False)
class Cone2Description:
    apex: np.ndarray
    axis: np.ndarray
    half_angle: float
    length: float
    cap: OpenBall


@register_implicit("truncated_cone")
def truncated_cone_region(apex, axis, half_angle, length) -> ImplicitRegion:
    """Open circular cone of the given half-angle, cut at distance ``length``."""
    apex = as_point(apex)
    axis = as_point(axis)
    axis = axis / np.linalg.norm(axis)
    cos_t = math.cos(half_angle)

    def level(Z):
        v = Z - apex
        dist = np.linalg.norm(v, axis=1)
        # angle test is (v . axis) > |v| cos(theta); scaled to distance units
        angular = dist * cos_t - v @ axis
        return np.maximum(angular, dist - length)

    box = (apex - length, apex + length)
    params = {"apex": apex.tolist(), "axis": axis.tolist(), "half_angle": half_angle, "length": length}
    return ImplicitRegion(level, "truncated_cone", params, box=box, dim=apex.size)


def cone_hull(x, y, r: float) -> Tuple[Cone2Description, Region]:
    """Union over ``t in (0, 1]`` of the Apollonian balls of ratio r around ``x + t(y - x)``.

    For ``r < 1`` the balls in question are the bounded ones
    ``{w : |z_t - w| < r |x - w|}``; their union is a truncated cone from x
    of half-angle ``arcsin r`` together with the cap ball at t = 1.
    """
    x, y = _distinct(x, y)
    r = float(r)
    if not 0 < r < 1:
        raise RadiusOutOfRange("cone hull needs r in (0, 1)")
    axis = (y - x) / np.linalg.norm(y - x)
    half_angle = math.asin(r)
    length = float(np.linalg.norm(x - y) / math.sqrt(1 - r * r))
    cap = bounded_ball(apollonian_boundary(x, y, r))
    desc = Cone2Description(x, axis, half_angle, length, cap)
    region = RegionUnion((truncated_cone_region(x, axis, half_angle, length), cap))
    return desc, region


def angle_at(vertex, a, b) -> float:
    """Angle at ``vertex`` between the rays towards a and b."""
    u = as_point(a) - as_point(vertex)
    v = as_point(b) - as_point(vertex)
    cos = u @ v / (np.linalg.norm(u) * np.linalg.norm(v))
    return float(math.acos(max(-1.0, min(1.0, cos))))


__all__ = [
    "INFINITY",
    "ExtendedPoint",
    "Sphere",
    "Plane",
    "SphereOrPlane",
    "Cone2Description",
    "as_point",
    "is_infinity",
    "cross_ratio",
    "apollonian_boundary",
    "apollonian_sublevel",
    "bounded_ball",
    "cone_hull",
    "angle_at",
]
