"""
Apollonian and Seittenranta distances on Euclidean domains.

Finite-boundary domains are evaluated exactly by maximising the pair
functional over ordered boundary pairs; the ball and the half-space use the
hyperbolic closed forms; the punctured unit ball has its own closed forms.
Anything else goes through :func:`sup_over_boundary_sample`, which is a lower
bound.

All evaluators accept a single query point ``y`` (returning a float) or an
(m, n) array of query points (returning an array).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    BoundaryTooSmall,
    DimensionMismatch,
    DuplicatePuncture,
    GeometryError,
    PointOnBoundary,
    PointOutsideDomain,
    SamplerExhausted,
)
from .geometry import as_point


class MetricKind(enum.Enum):
    APOLLONIAN = "alpha"
    SEITTENRANTA = "delta"

    @classmethod
    def parse(cls, text) -> "MetricKind":
        if isinstance(text, cls):
            return text
        key = str(text).strip().lower()
        aliases = {"alpha": cls.APOLLONIAN, "apollonian": cls.APOLLONIAN, "a": cls.APOLLONIAN,
                   "delta": cls.SEITTENRANTA, "seittenranta": cls.SEITTENRANTA, "d": cls.SEITTENRANTA}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown metric kind {text!r}") from None


ALPHA = MetricKind.APOLLONIAN
DELTA = MetricKind.SEITTENRANTA


def van_der_corput(i: np.ndarray, base: int = 2) -> np.ndarray:
    """Radical-inverse sequence; prefixes of length 2^k form a uniform grid."""
    i = np.asarray(i, dtype=np.int64).copy()
    out = np.zeros(i.shape, dtype=float)
    denom = 1.0
    while np.any(i > 0):
        denom *= base
        out += (i % base) / denom
        i //= base
    return out


def _sphere_points(idx: np.ndarray, dim: int) -> np.ndarray:
    if dim == 1:
        return np.where(idx % 2 == 0, 1.0, -1.0)[:, None]
    if dim == 2:
        t = 2 * np.pi * van_der_corput(idx)
        return np.column_stack([np.cos(t), np.sin(t)])
    pts = np.array([np.random.default_rng([7, int(i)]).normal(size=dim) for i in idx])
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


class Domain:
    """Common interface: interior test plus an index-addressable boundary sample."""

    dim: int = 2
    includes_infinity: bool = False
    boundary_size: Optional[int] = None  # None means infinitely many points

    def contains(self, z) -> np.ndarray:
        raise NotImplementedError

    def on_boundary(self, z) -> np.ndarray:
        raise NotImplementedError

    def boundary_points(self, budget: int) -> np.ndarray:
        """First ``budget`` points of a nested, deterministic boundary sequence."""
        raise NotImplementedError


@dataclass(frozen=True)
class HalfSpace(Domain):
    """Upper half-space ``{z : z_n > 0}``; infinity lies on its boundary."""

    dim: int = 2
    includes_infinity: bool = field(default=True, init=False)

    def contains(self, z):
        Z = np.atleast_2d(z)
        return Z[:, -1] > 0

    def on_boundary(self, z):
        Z = np.atleast_2d(z)
        return Z[:, -1] == 0

    def boundary_points(self, budget):
        idx = np.arange(budget)
        if self.dim == 1:
            return np.zeros((min(budget, 1), 1))
        u = van_der_corput(idx + 1)
        s = np.tan(np.pi * (u - 0.5))
        if self.dim == 2:
            return np.column_stack([s, np.zeros_like(s)])
        rng = np.random.default_rng(11)
        dirs = rng.normal(size=(budget, self.dim - 1))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        return np.column_stack([dirs * np.abs(s)[:, None], np.zeros(budget)])


@dataclass(frozen=True)
class UnitBall(Domain):
    dim: int = 2

    def contains(self, z):
        return np.linalg.norm(np.atleast_2d(z), axis=1) < 1

    def on_boundary(self, z):
        return np.linalg.norm(np.atleast_2d(z), axis=1) == 1

    def boundary_points(self, budget):
        return _sphere_points(np.arange(budget), self.dim)


@dataclass(frozen=True)
class PuncturedUnitBall(Domain):
    """Unit ball minus the origin."""

    dim: int = 2

    def contains(self, z):
        r = np.linalg.norm(np.atleast_2d(z), axis=1)
        return (r < 1) & (r > 0)

    def on_boundary(self, z):
        r = np.linalg.norm(np.atleast_2d(z), axis=1)
        return (r == 1) | (r == 0)

    def boundary_points(self, budget):
        if budget <= 0:
            return np.zeros((0, self.dim))
        return np.vstack([np.zeros((1, self.dim)), _sphere_points(np.arange(budget - 1), self.dim)])


@dataclass(frozen=True)
class PuncturedSpace(Domain):
    """Euclidean space minus finitely many points.

    ``includes_infinity`` decides whether the point at infinity counts as a
    boundary point.
    """

    punctures: Tuple[Tuple[float, ...], ...]
    includes_infinity: bool = False

    def __post_init__(self):
        pts = tuple(tuple(float(c) for c in as_point(p)) for p in self.punctures)
        if not pts:
            raise BoundaryTooSmall("a punctured space needs at least one puncture")
        if len({len(p) for p in pts}) != 1:
            raise DimensionMismatch("punctures have differing dimensions")
        if len(set(pts)) != len(pts):
            raise DuplicatePuncture("punctures must be pairwise distinct")
        object.__setattr__(self, "punctures", pts)

    @property
    def dim(self):
        return len(self.punctures[0])

    @property
    def points(self) -> np.ndarray:
        return np.array(self.punctures, dtype=float)

    @property
    def boundary_size(self):
        return len(self.punctures)

    def contains(self, z):
        return ~self.on_boundary(z)

    def on_boundary(self, z):
        Z = np.atleast_2d(z)
        return np.any(np.all(Z[:, None, :] == self.points[None, :, :], axis=2), axis=1)

    def boundary_points(self, budget):
        return self.points[:budget]

    def with_puncture(self, p) -> "PuncturedSpace":
        return PuncturedSpace(self.punctures + (tuple(as_point(p)),), self.includes_infinity)


@dataclass(frozen=True, eq=False)
class SampledBoundary(Domain):
    """A domain known only through a boundary sampler and an interior test.

    ``sampler(indices)`` maps an integer array to boundary points and must be
    a pure function of the index, so that budgets nest.
    """

    sampler: Callable[[np.ndarray], np.ndarray]
    interior: Callable[[np.ndarray], np.ndarray]
    dim: int = 2
    includes_infinity: bool = False
    default_budget: int = 1024
    name: str = "sampled"
    params: dict = field(default_factory=dict)

    def contains(self, z):
        return np.asarray(self.interior(np.atleast_2d(np.asarray(z, float))), dtype=bool)

    def on_boundary(self, z):
        return np.zeros(len(np.atleast_2d(z)), dtype=bool)

    def boundary_points(self, budget):
        if budget <= 0:
            return np.zeros((0, self.dim))
        return np.asarray(self.sampler(np.arange(budget)), dtype=float).reshape(budget, self.dim)


def polygon_domain(vertices: Sequence[Sequence[float]], default_budget: int = 1024) -> SampledBoundary:
    """Interior of a simple polygon, boundary sampled uniformly in arc length."""
    from matplotlib.path import Path

    V = np.array(vertices, dtype=float)
    if V.ndim != 2 or V.shape[1] != 2 or len(V) < 3:
        raise GeometryError("a polygon needs at least three planar vertices")
    closed = np.vstack([V, V[:1]])
    seg = np.linalg.norm(np.diff(closed, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    perimeter = cum[-1]
    path = Path(closed, closed=True)

    def sampler(idx):
        s = van_der_corput(idx) * perimeter
        k = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(V) - 1)
        t = (s - cum[k]) / seg[k]
        return closed[k] + t[:, None] * (closed[k + 1] - closed[k])

    def interior(Z):
        return path.contains_points(Z)

    return SampledBoundary(sampler, interior, 2, False, default_budget, "polygon",
                           {"vertices": V.tolist()})


def square_domain(half_width: float = 2.0, **kw) -> SampledBoundary:
    h = float(half_width)
    return polygon_domain([(-h, -h), (h, -h), (h, h), (-h, h)], **kw)


# ---------------------------------------------------------------- validation


def _prepare(domain: Domain, x, y):
    x = as_point(x)
    y_arr = np.asarray(y, dtype=float)
    single = y_arr.ndim == 1
    Y = np.atleast_2d(y_arr)
    if x.size != domain.dim or Y.shape[1] != domain.dim:
        raise DimensionMismatch(f"expected points of dimension {domain.dim}")
    if not np.all(np.isfinite(Y)):
        raise GeometryError("point coordinates must be finite")
    for pts in (x[None, :], Y):
        if np.any(domain.on_boundary(pts)):
            raise PointOnBoundary("query point lies on the domain boundary")
        if not np.all(domain.contains(pts)):
            raise PointOutsideDomain("query point lies outside the domain")
    return x, Y, single


def _finish(values: np.ndarray, single: bool):
    return float(values[0]) if single else values


# ---------------------------------------------------------------- pair functionals


def _pair_terms(kind: MetricKind, X, Y, A, B):
    """Pair functional for finite boundary points; all arrays broadcast to (..., n)."""
    ax = np.linalg.norm(A - X, axis=-1)
    yb = np.linalg.norm(Y - B, axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        if kind is ALPHA:
            ay = np.linalg.norm(A - Y, axis=-1)
            xb = np.linalg.norm(X - B, axis=-1)
            return np.log(ay * xb) - np.log(ax * yb)
        ab = np.linalg.norm(A - B, axis=-1)
        xy = np.linalg.norm(X - Y, axis=-1)
        return np.log1p(ab * xy / (ax * yb))


def _sup_finite(kind: MetricKind, X: np.ndarray, Y: np.ndarray, P: np.ndarray, with_inf: bool) -> np.ndarray:
    """Max of the pair functional over ordered pairs of ``P`` (plus infinity)."""
    m = len(Y)
    best = np.zeros(m)
    Xb = X[:, None, None, :]
    Yb = Y[:, None, None, :]
    k = len(P)
    if k:
        vals = _pair_terms(kind, Xb, Yb, P[None, :, None, :], P[None, None, :, :])
        # a == b contributes exactly zero for both functionals
        diag = np.eye(k, dtype=bool)[None]
        vals = np.where(diag, 0.0, vals)
        best = np.maximum(best, vals.reshape(m, -1).max(axis=1))
    if with_inf and k:
        xy = np.linalg.norm(X - Y, axis=1)[:, None]
        px = np.linalg.norm(P[None, :, :] - X[:, None, :], axis=2)
        py = np.linalg.norm(P[None, :, :] - Y[:, None, :], axis=2)
        with np.errstate(divide="ignore", invalid="ignore"):
            if kind is ALPHA:
                # a = inf: |x-b|/|y-b|;  b = inf: |a-y|/|a-x|
                cand = np.concatenate([np.log(px) - np.log(py), np.log(py) - np.log(px)], axis=1)
            else:
                # a = inf: |x-y|/|y-b|;  b = inf: |x-y|/|a-x|
                cand = np.concatenate([np.log1p(xy / py), np.log1p(xy / px)], axis=1)
        best = np.maximum(best, cand.max(axis=1))
    return best


def _sq_dists(X, P):
    """Squared distances ``|x_i - p_j|^2``, clipped at zero against cancellation."""
    d = np.sum(X * X, axis=1)[:, None] - 2.0 * X @ P.T + np.sum(P * P, axis=1)[None, :]
    return np.maximum(d, 0.0)


def _alpha_separable(X, Y, P, with_inf):
    """Apollonian distance for large boundary samples.

    The pair functional splits as ``log(|a-y|/|a-x|) + log(|x-b|/|y-b|)`` so
    the supremum over pairs is a sum of two independent maxima.
    """
    px = _sq_dists(X, P)
    py = _sq_dists(Y, P)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = py / px
        first = 0.5 * np.log(ratio.max(axis=1))
        second = -0.5 * np.log(ratio.min(axis=1))
    if with_inf:
        first = np.maximum(first, 0.0)
        second = np.maximum(second, 0.0)
    return np.maximum(first + second, 0.0)


def _delta_chunked(X, Y, P, with_inf, max_cells=4_000_000):
    m = len(Y)
    best = np.zeros(m)
    k = len(P)
    chunk = max(1, max_cells // max(1, m * k))
    xy = np.linalg.norm(X - Y, axis=1)
    px = np.linalg.norm(P[None, :, :] - X[:, None, :], axis=2)  # |a - x|
    py = np.linalg.norm(P[None, :, :] - Y[:, None, :], axis=2)  # |y - b|
    # for fixed a, maximise |a-b|/|y-b| over b
    for start in range(0, k, chunk):
        A = P[start:start + chunk]
        ab = np.linalg.norm(A[:, None, :] - P[None, :, :], axis=2)  # (c, k)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = ab[None, :, :] / py[:, None, :]  # (m, c, k)
            ratio = np.where(ab[None, :, :] == 0, 0.0, ratio)
            inner = ratio.max(axis=2)
            val = xy[:, None] * inner / px[:, start:start + chunk]
        best = np.maximum(best, np.log1p(val).max(axis=1))
    if with_inf and k:
        with np.errstate(divide="ignore"):
            cand = np.maximum(np.log1p(xy[:, None] / py).max(axis=1), np.log1p(xy[:, None] / px).max(axis=1))
        best = np.maximum(best, cand)
    return best


# ---------------------------------------------------------------- closed forms


def _rho_ball(X, Y):
    d = np.linalg.norm(X - Y, axis=1)
    s = np.sqrt((1 - np.sum(X * X, axis=1)) * (1 - np.sum(Y * Y, axis=1)))
    return 2 * np.arcsinh(d / s)


def _rho_halfspace(X, Y):
    d = np.linalg.norm(X - Y, axis=1)
    return 2 * np.arcsinh(d / (2 * np.sqrt(X[:, -1] * Y[:, -1])))


def _sphere_ratio_sup(X, Y):
    """``log max_{|b|=1} |x-b|/|y-b|`` for points inside the unit ball.

    The maximiser satisfies a quadratic in the squared ratio lambda:
    ``(1-|y|^2)^2 lambda^2 - 2 Q lambda + (1-|x|^2)^2 = 0`` with
    ``Q = (1+|x|^2)(1+|y|^2) - 4 x.y``; the larger root is the maximum.
    """
    xx = np.sum(X * X, axis=1)
    yy = np.sum(Y * Y, axis=1)
    q = (1 + xx) * (1 + yy) - 4 * np.sum(X * Y, axis=1)
    a = (1 - yy) ** 2
    c = (1 - xx) ** 2
    disc = np.sqrt(np.maximum(q * q - a * c, 0.0))
    lam = (q + disc) / a
    return 0.5 * np.log(lam)


def _alpha_punctured_ball(X, Y):
    nx = np.linalg.norm(X, axis=1)
    ny = np.linalg.norm(Y, axis=1)
    first = np.maximum(_sphere_ratio_sup(Y, X), np.log(ny / nx))  # sup_a log |a-y|/|a-x|
    second = np.maximum(_sphere_ratio_sup(X, Y), np.log(nx / ny))  # sup_b log |x-b|/|y-b|
    return np.maximum(first + second, 0.0)


def _delta_punctured_ball(X, Y):
    d = np.linalg.norm(X - Y, axis=1)
    nx = np.linalg.norm(X, axis=1)
    ny = np.linalg.norm(Y, axis=1)
    rho = _rho_ball(X, Y)
    with np.errstate(divide="ignore", invalid="ignore"):
        third = np.expm1(rho) / d
    cands = np.stack([1 / (ny * (1 - nx)), 1 / (nx * (1 - ny)), third])
    out = np.log1p(d * cands.max(axis=0))
    return np.where(d == 0, 0.0, out)


# ---------------------------------------------------------------- public API


def _broadcast_x(x, Y):
    return np.broadcast_to(x, Y.shape)


def _evaluate(kind: MetricKind, domain: Domain, x, y):
    x, Y, single = _prepare(domain, x, y)
    X = _broadcast_x(x, Y)
    if isinstance(domain, (UnitBall, HalfSpace)):
        vals = _rho_ball(X, Y) if isinstance(domain, UnitBall) else _rho_halfspace(X, Y)
    elif isinstance(domain, PuncturedUnitBall):
        vals = _alpha_punctured_ball(X, Y) if kind is ALPHA else _delta_punctured_ball(X, Y)
    elif isinstance(domain, PuncturedSpace):
        if kind is DELTA and domain.boundary_size + domain.includes_infinity < 2:
            raise BoundaryTooSmall("Seittenranta's distance needs at least two boundary points")
        vals = _sup_finite(kind, X, Y, domain.points, domain.includes_infinity)
    elif isinstance(domain, SampledBoundary):
        P = domain.boundary_points(domain.default_budget)
        vals = _sampled(kind, X, Y, P, domain.includes_infinity)
    else:
        raise TypeError(f"unsupported domain {domain!r}")
    vals = np.where(np.all(X == Y, axis=1), 0.0, vals)
    return _finish(vals, single)


def _sampled(kind, X, Y, P, with_inf, max_cells=2_000_000):
    fn = _alpha_separable if kind is ALPHA else _delta_chunked
    rows = max(1, max_cells // max(1, len(P)))
    if len(Y) <= rows:
        return fn(X, Y, P, with_inf)
    return np.concatenate([fn(X[i:i + rows], Y[i:i + rows], P, with_inf) for i in range(0, len(Y), rows)])


def alpha(domain: Domain, x, y):
    """Apollonian distance ``sup_{a,b} log(|a-y||x-b| / (|a-x||y-b|))``."""
    return _evaluate(ALPHA, domain, x, y)


def delta(domain: Domain, x, y):
    """Seittenranta's distance ``sup_{a,b} log(1 + |a-b||x-y| / (|a-x||y-b|))``."""
    return _evaluate(DELTA, domain, x, y)


def distance(kind, domain: Domain, x, y):
    return _evaluate(MetricKind.parse(kind), domain, x, y)


def hyperbolic_distance(domain: Domain, x, y):
    """Hyperbolic distance of the unit ball or the upper half-space."""
    if not isinstance(domain, (UnitBall, HalfSpace)):
        raise TypeError("hyperbolic distance is defined for UnitBall and HalfSpace only")
    x, Y, single = _prepare(domain, x, y)
    X = _broadcast_x(x, Y)
    vals = _rho_ball(X, Y) if isinstance(domain, UnitBall) else _rho_halfspace(X, Y)
    return _finish(vals, single)


def j_distance(puncture, x, y):
    """Distance-ratio metric of the once-punctured space."""
    a = as_point(puncture)
    dom = PuncturedSpace((tuple(a),), includes_infinity=True)
    x, Y, single = _prepare(dom, x, y)
    dx = np.linalg.norm(x - a)
    dy = np.linalg.norm(Y - a, axis=1)
    vals = np.log1p(np.linalg.norm(Y - x, axis=1) / np.minimum(dx, dy))
    return _finish(vals, single)


def delta_punctured_ball(x, y):
    """Seittenranta's distance of the punctured unit ball, three-candidate form."""
    pts = np.vstack([as_point(x)[None, :], np.atleast_2d(np.asarray(y, float))])
    norms = np.linalg.norm(pts, axis=1)
    if np.any((norms == 0) | (norms >= 1)):
        raise PointOutsideDomain("points must satisfy 0 < |z| < 1")
    x, Y, single = _prepare(PuncturedUnitBall(as_point(x).size), x, y)
    return _finish(_delta_punctured_ball(_broadcast_x(x, Y), Y), single)


def sup_over_boundary_sample(domain: Domain, kind, x, y, sample_budget: int):
    """Lower bound for the distance from the first ``sample_budget`` boundary points.

    Budgets nest (a larger budget sees a superset of points), so the value is
    nondecreasing in the budget.
    """
    kind = MetricKind.parse(kind)
    P = domain.boundary_points(max(int(sample_budget), 0))
    available = len(P) + (1 if domain.includes_infinity else 0)
    if available < 2:
        raise SamplerExhausted(f"boundary sampler produced only {available} point(s)")
    if not np.all(np.isfinite(P)):
        raise SamplerExhausted("boundary sampler produced non-finite points")
    x, Y, single = _prepare(domain, x, y)
    X = _broadcast_x(x, Y)
    if len(P) <= 16:
        vals = _sup_finite(kind, X, Y, P, domain.includes_infinity)
    else:
        vals = _sampled(kind, X, Y, P, domain.includes_infinity)
    vals = np.where(np.all(X == Y, axis=1), 0.0, vals)
    return _finish(vals, single)


def pair_distances(kind, domain: Domain, X, Y) -> np.ndarray:
    """Distances between row-paired points ``X[i]``, ``Y[i]`` (no validation)."""
    kind = MetricKind.parse(kind)
    X = np.asarray(X, float)
    Y = np.asarray(Y, float)
    if isinstance(domain, UnitBall):
        vals = _rho_ball(X, Y)
    elif isinstance(domain, HalfSpace):
        vals = _rho_halfspace(X, Y)
    elif isinstance(domain, PuncturedUnitBall):
        vals = _alpha_punctured_ball(X, Y) if kind is ALPHA else _delta_punctured_ball(X, Y)
    elif isinstance(domain, PuncturedSpace):
        vals = _sup_finite(kind, X, Y, domain.points, domain.includes_infinity)
    else:
        vals = _sampled(kind, X, Y, domain.boundary_points(domain.default_budget), domain.includes_infinity)
    return np.where(np.all(X == Y, axis=1), 0.0, vals)


def apollonian_is_metric(domain: Domain) -> bool:
    """False when the complement of the domain lies on one sphere (or plane).

    Only finite punctured spaces can fail; for those the test is the rank of
    the lifted point matrix.
    """
    if not isinstance(domain, PuncturedSpace):
        return True
    P = domain.points
    if domain.includes_infinity:
        M = np.column_stack([P, np.ones(len(P))])
    else:
        M = np.column_stack([np.sum(P * P, axis=1), P, np.ones(len(P))])
    return np.linalg.matrix_rank(M, tol=1e-12) == M.shape[1]
