"""
Numerical verification of convexity, starlikeness and sharp radii.

Convexity verdicts are probabilistic: ``CONVEX`` means no counterexample was
found at the reported budget.  Counterexamples are always re-verified by
exact membership before being reported.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import ndimage

from .errors import (
    BracketNotStraddling,
    CenterOutsideRegion,
    EmptyRegionSampled,
    InadmissibleParameters,
    NoBoundaryOnSegment,
    NoRootInRange,
    UnsupportedDimension,
)
from .geometry import as_point
from .metrics import (
    ALPHA,
    DELTA,
    Domain,
    HalfSpace,
    MetricKind,
    PuncturedSpace,
    PuncturedUnitBall,
    UnitBall,
    pair_distances,
)
from .regions import Box, Region, default_box, inflate, region_boundary_2d


class Verdict(enum.Enum):
    CONVEX = "Convex"
    NON_CONVEX = "NonConvex"
    STARLIKE = "StarlikeFrom"
    NOT_STARLIKE = "NotStarlike"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class ConvexityVerdict:
    verdict: Verdict
    witness: Optional[Tuple[np.ndarray, ...]] = None
    samples_used: int = 0
    tolerance: float = 0.0
    center: Optional[np.ndarray] = None

    @property
    def is_convex(self) -> bool:
        return self.verdict is Verdict.CONVEX

    def to_dict(self) -> dict:
        d = {"verdict": self.verdict.value, "samples_used": self.samples_used, "tolerance": self.tolerance}
        if self.center is not None:
            d["center"] = self.center.tolist()
        if self.witness is not None:
            d["witness"] = [np.asarray(w).tolist() for w in self.witness]
        return d


def witness_holds(region: Region, verdict: ConvexityVerdict) -> bool:
    """Re-evaluate a NonConvex/NotStarlike witness from scratch."""
    if verdict.witness is None:
        return False
    if verdict.verdict is Verdict.NON_CONVEX:
        p, q, z = verdict.witness
        on_segment = np.isclose(np.linalg.norm(p - z) + np.linalg.norm(z - q), np.linalg.norm(p - q))
        return bool(region.contains(p) and region.contains(q) and not region.contains(z) and on_segment)
    if verdict.verdict is Verdict.NOT_STARLIKE:
        c, out, back = verdict.witness
        return bool(region.contains(c) and not region.contains(out) and region.contains(back))
    return False


# ---------------------------------------------------------------- convexity


def _sample_inside(region: Region, box: Box, count: int, rng, max_rounds: int = 60) -> np.ndarray:
    lo, hi = box
    found = []
    total = 0
    batch = max(1024, count)
    for _ in range(max_rounds):
        pts = rng.uniform(lo, hi, size=(batch, lo.size))
        keep = pts[region.contains(pts)]
        found.append(keep)
        total += len(keep)
        if total >= count:
            break
        if total == 0:
            batch = min(batch * 2, 1 << 20)
    if not found:
        return np.zeros((0, lo.size))
    return np.vstack(found)[:count]


def _nudge_inside(region: Region, u: np.ndarray, max_step: float) -> Optional[np.ndarray]:
    angles = 2 * np.pi * np.arange(16) / 16
    if u.size == 2:
        dirs = np.column_stack([np.cos(angles), np.sin(angles)])
    else:
        dirs = np.vstack([np.eye(u.size), -np.eye(u.size)])
    for step in np.geomspace(max_step * 1e-6, max_step, 13):
        cand = u + step * dirs
        ok = region.contains(cand)
        if np.any(ok):
            return cand[np.argmax(ok)]
    return None


def _boundary_chord_witness(region, box, resolution, tol, rng, extra_pairs):
    """Look for a chord between boundary points whose midpoint is robustly outside."""
    polys = region_boundary_2d(region, resolution, box)
    if not polys:
        return None, 0
    loops = [p[:-1] if len(p) > 2 and np.array_equal(p[0], p[-1]) else p for p in polys]
    A, B = [], []
    for V in loops:
        k = len(V)
        if k < 3:
            continue
        stride = 1
        while stride <= k // 2:
            idx = np.arange(k)
            j = (idx + stride) % k
            A.append(V[idx])
            B.append(V[j])
            stride *= 2
    allv = np.vstack(loops)
    if len(allv) > 1:
        i = rng.integers(0, len(allv), extra_pairs)
        j = rng.integers(0, len(allv), extra_pairs)
        A.append(allv[i])
        B.append(allv[j])
    if not A:
        return None, 0
    A = np.vstack(A)
    B = np.vstack(B)
    mids = 0.5 * (A + B)
    lev = region.level(mids)
    used = len(mids)
    order = np.argsort(-lev)
    for idx in order[:40]:
        if lev[idx] <= tol:
            break
        shift = 0.25 * lev[idx]
        u = _nudge_inside(region, A[idx], shift)
        v = _nudge_inside(region, B[idx], shift)
        if u is None or v is None:
            continue
        m = 0.5 * (u + v)
        if not region.contains(m):
            return (u, v, m), used
    return None, used


def check_convex(region: Region, box: Optional[Box] = None, samples: int = 10_000, tol: float = 1e-9,
                 seed: int = 0, boundary_resolution: int = 256) -> ConvexityVerdict:
    """Search for a segment with both endpoints inside and a point outside.

    Random interior pairs are tested at 1/4, 1/2 and 3/4 of the segment.  In
    the plane, chords between marching-squares boundary points are tested as
    well, which catches shallow concavities that random pairs miss.  A point
    counts as outside only if its level exceeds ``tol`` (scaled by the box).
    """
    if samples <= 0:
        return ConvexityVerdict(Verdict.INCONCLUSIVE, samples_used=0, tolerance=tol)
    if box is None:
        box = region.bounds() or default_box(region)
    box = (np.asarray(box[0], float), np.asarray(box[1], float))
    scale = 1.0 + float(np.max(box[1] - box[0]))
    band = tol * scale
    rng = np.random.default_rng(seed)
    pts = _sample_inside(region, box, 2 * samples, rng)
    if len(pts) < 2:
        raise EmptyRegionSampled("no interior points found in the sampling box")
    half = len(pts) // 2
    P, Q = pts[:half], pts[half: 2 * half]
    used = 0
    for t in (0.5, 0.25, 0.75):
        Z = (1 - t) * P + t * Q
        lev = region.level(Z)
        used += len(Z)
        bad = np.flatnonzero(lev > band)
        if bad.size:
            i = bad[np.argmax(lev[bad])]
            return ConvexityVerdict(Verdict.NON_CONVEX, (P[i], Q[i], Z[i]), used, tol)
    if box[0].size == 2:
        witness, extra = _boundary_chord_witness(region, box, boundary_resolution, band, rng, min(samples, 20_000))
        used += extra
        if witness is not None:
            return ConvexityVerdict(Verdict.NON_CONVEX, witness, used, tol)
    return ConvexityVerdict(Verdict.CONVEX, None, used, tol)


# ---------------------------------------------------------------- starlikeness


def _directions(count: int, dim: int, seed: int) -> np.ndarray:
    if dim == 2:
        t = 2 * np.pi * np.arange(count) / count
        return np.column_stack([np.cos(t), np.sin(t)])
    g = np.random.default_rng(seed).normal(size=(count, dim))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def check_starlike(region: Region, center, rays: int = 720, steps: int = 400, radius: Optional[float] = None,
                   box: Optional[Box] = None, seed: int = 0) -> ConvexityVerdict:
    """March along rays from ``center``; a member after a non-member breaks starlikeness."""
    center = as_point(center)
    if not region.contains(center):
        raise CenterOutsideRegion("the center must belong to the region")
    if radius is None:
        if box is None:
            box = region.bounds() or default_box(region)
        lo, hi = np.asarray(box[0], float), np.asarray(box[1], float)
        corners = np.array(np.meshgrid(*zip(lo, hi))).reshape(center.size, -1).T
        radius = float(np.max(np.linalg.norm(corners - center, axis=1)))
    dirs = _directions(rays, center.size, seed)
    t = radius * np.arange(1, steps + 1) / steps
    pts = center + dirs[:, None, :] * t[None, :, None]
    inside = region.contains(pts.reshape(-1, center.size)).reshape(rays, steps)
    left = np.logical_not(inside)
    seen_out = np.cumsum(left, axis=1) > 0
    bad = seen_out & inside
    used = rays * steps
    if bad.any():
        ray, step = np.argwhere(bad)[0]
        out_step = np.flatnonzero(left[ray, :step])[0]
        witness = (center, pts[ray, out_step], pts[ray, step])
        return ConvexityVerdict(Verdict.NOT_STARLIKE, witness, used, radius / steps, center)
    return ConvexityVerdict(Verdict.STARLIKE, None, used, radius / steps, center)


# ---------------------------------------------------------------- connectivity


def check_complement_connected(region: Region, box: Optional[Box] = None, grid: int = 512) -> int:
    """Number of connected components of the complement, unbounded part counted once."""
    if region.dim is not None and region.dim != 2:
        raise UnsupportedDimension("complement connectivity is implemented for n = 2")
    if grid < 64:
        raise ValueError("grid must be at least 64")
    if box is None:
        base = region.display_bounds() or region.bounds()
        if base is None:
            raise ValueError("region has no bounded primitives; pass an explicit box")
        box = inflate(base, 2.0)
    lo, hi = np.asarray(box[0], float), np.asarray(box[1], float)
    xs = np.linspace(lo[0], hi[0], grid)
    ys = np.linspace(lo[1], hi[1], grid)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    outside = ~region.contains(np.column_stack([X.ravel(), Y.ravel()])).reshape(X.shape)
    labels, count = ndimage.label(outside)
    if count == 0:
        return 0
    frame = np.unique(np.concatenate([labels[0], labels[-1], labels[:, 0], labels[:, -1]]))
    frame = frame[frame > 0]
    return int(count - max(len(frame) - 1, 0))


# ---------------------------------------------------------------- thresholds


class ThresholdKind(enum.Enum):
    ONCE_PUNCTURED_CONVEX = "once-punctured-convex"
    ONCE_PUNCTURED_STARLIKE = "once-punctured-starlike"
    TWICE_PUNCTURED_DELTA = "twice-punctured-delta"
    FINITELY_PUNCTURED_DELTA = "finitely-punctured-delta"
    PUNCTURED_BALL_DELTA = "punctured-ball-delta"


@dataclass
class ThresholdQuery:
    which: ThresholdKind
    punctures: Sequence[Sequence[float]] = ()
    x: Optional[Sequence[float]] = None

    def __post_init__(self):
        if not isinstance(self.which, ThresholdKind):
            self.which = ThresholdKind(self.which)


def threshold_formula(query: ThresholdQuery) -> float:
    """Closed-form convexity (or starlikeness) radius."""
    w = query.which
    if w is ThresholdKind.ONCE_PUNCTURED_CONVEX:
        return math.log(2)
    if w is ThresholdKind.ONCE_PUNCTURED_STARLIKE:
        return math.log(1 + math.sqrt(2))
    if query.x is None:
        raise InadmissibleParameters("this radius depends on the center x")
    x = as_point(query.x)
    if w is ThresholdKind.PUNCTURED_BALL_DELTA:
        nx = float(np.linalg.norm(x))
        if not 0 < nx < 1:
            raise InadmissibleParameters("need 0 < |x| < 1")
        return math.log(1 + 1 / (1 - nx))
    pts = np.array(query.punctures, dtype=float)
    if pts.ndim != 2 or len(pts) < 2:
        raise InadmissibleParameters("need at least two punctures")
    if np.any(np.all(pts == x, axis=1)):
        raise InadmissibleParameters("x must not be a puncture")
    if w is ThresholdKind.TWICE_PUNCTURED_DELTA:
        if len(pts) != 2:
            raise InadmissibleParameters("need exactly two punctures")
        p, q = pts
        if np.array_equal(p, q):
            raise InadmissibleParameters("punctures must be distinct")
        return math.log(1 + np.linalg.norm(p - q) / max(np.linalg.norm(x - p), np.linalg.norm(x - q)))
    gaps = np.linalg.norm(pts[:, None] - pts[None], axis=2)
    off_diag = gaps[~np.eye(len(pts), dtype=bool)]
    if np.any(off_diag == 0):
        raise InadmissibleParameters("punctures must be distinct")
    return math.log(1 + off_diag.min() / np.linalg.norm(pts - x, axis=1).max())


@dataclass
class ThresholdEstimate:
    estimate: float
    bracket: Tuple[float, float]
    iterations: int
    assumption: str = "convexity flips exactly once inside the bracket"
    history: List[Tuple[float, str]] = field(default_factory=list)


def estimate_threshold(domain: Domain, kind, x, bracket: Tuple[float, float], tol: float = 1e-3,
                       samples: int = 10_000, seed: int = 0, box: Optional[Box] = None) -> ThresholdEstimate:
    """Bisect on the radius until the convex/non-convex transition is bracketed within ``tol``."""
    from .balls import metric_ball

    kind = MetricKind.parse(kind)
    x = as_point(x)

    def convex(r):
        region = metric_ball(domain, kind, x, r)
        return check_convex(region, box, samples=samples, seed=seed).is_convex

    lo, hi = map(float, bracket)
    v_lo, v_hi = convex(lo), convex(hi)
    if v_lo == v_hi:
        raise BracketNotStraddling(f"convexity verdict is {v_lo} at both ends of [{lo}, {hi}]")
    history = [(lo, str(v_lo)), (hi, str(v_hi))]
    it = 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        v = convex(mid)
        history.append((mid, str(v)))
        if v == v_lo:
            lo = mid
        else:
            hi = mid
        it += 1
    return ThresholdEstimate(0.5 * (lo + hi), (lo, hi), it, history=history)


# ---------------------------------------------------------------- punctured ball


def boundary_profile(modx: float, c: float, beta: float) -> float:
    """Distance ``m = |x - y|`` from x to the boundary of the set B in direction beta.

    B is ``{y : |x-y| < c (1-|y|)}`` with ``c = |x|(e^r - 1)``; beta is the angle
    between ``y - x`` and the outward direction of x.  Eliminating ``|y|``
    from ``|y| = 1 - m/c`` and the law of cosines gives
    ``(1/c^2 - 1) m^2 - 2 m (1/c + |x| cos beta) + (1 - |x|^2) = 0``;
    the root that stays finite as c -> 1 is taken in rationalised form.
    """
    modx, c, beta = float(modx), float(c), float(beta)
    if not (0 < modx < 1 and c > 0 and 0 <= beta <= math.pi):
        raise NoRootInRange("need 0 < modx < 1, c > 0 and beta in [0, pi]")
    qa = 1 / (c * c) - 1
    qb = 1 / c + modx * math.cos(beta)
    qc = 1 - modx * modx
    disc = qb * qb - qa * qc
    if disc < 0:
        # tangency (ray through the origin) leaves a rounding-level negative
        if disc < -1e-12 * (qb * qb + abs(qa * qc)):
            raise NoRootInRange("profile quadratic has no real root")
        disc = 0.0
    denom = qb + math.sqrt(disc)
    if denom <= 0:
        raise NoRootInRange("profile root is not positive")
    m = qc / denom
    if not 0 < m <= 1 + modx:
        raise NoRootInRange(f"profile root {m} outside (0, 1 + |x|]")
    return m


def boundary_profile_derivative_c1(modx: float, beta: float) -> float:
    """Analytic derivative in beta of the profile at c = 1."""
    return modx * (1 - modx ** 2) * math.sin(beta) / (2 * (1 + modx * math.cos(beta)) ** 2)


@dataclass
class SharpnessReport:
    y: np.ndarray
    r_a: float
    r_b: float
    r_c: float
    holds: bool
    residual: float

    def to_dict(self):
        return {"y": self.y.tolist(), "r_A": self.r_a, "r_B": self.r_b, "r_C": self.r_c,
                "holds": self.holds, "residual": self.residual}


def sharpness_candidates(x, y) -> Tuple[float, float, float]:
    """The three candidate distances ``r_A, r_B, r_C`` for the punctured unit ball."""
    x, y = as_point(x), as_point(y)
    d = float(np.linalg.norm(x - y))
    nx, ny = float(np.linalg.norm(x)), float(np.linalg.norm(y))
    r_a = math.log1p(d / (ny * (1 - nx)))
    r_b = math.log1p(d / (nx * (1 - ny)))
    r_c = float(pair_distances(DELTA, UnitBall(x.size), x[None], y[None])[0])
    return r_a, r_b, r_c


def sharpness_witness_punctured_ball(x, r: float, iters: int = 200) -> SharpnessReport:
    """Locate the boundary point of the ball on the segment from x to the origin."""
    x = as_point(x)
    nx = float(np.linalg.norm(x))
    if not 0 < nx < 1:
        raise InadmissibleParameters("need 0 < |x| < 1")
    if not r > 0:
        raise NoBoundaryOnSegment("radius must be positive")
    dom = PuncturedUnitBall(x.size)

    def dist(t):
        y = (1 - t) * x
        return float(pair_distances(DELTA, dom, x[None], y[None])[0])

    lo, hi = 0.0, 1.0 - 1e-15
    if dist(hi) < r:
        raise NoBoundaryOnSegment("ball does not reach the origin side of the segment")
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if dist(mid) < r:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-17:
            break
    t = 0.5 * (lo + hi)
    y = (1 - t) * x
    r_a, r_b, r_c = sharpness_candidates(x, y)
    return SharpnessReport(y, r_a, r_b, r_c, r_a > max(r_b, r_c), abs(dist(t) - r))


# ---------------------------------------------------------------- inequality chain


@dataclass
class InequalityReport:
    pairs: int = 0
    chain_violations: int = 0
    monotonicity_violations: int = 0
    worst_slack: float = -math.inf
    details: List[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.chain_violations == 0 and self.monotonicity_violations == 0

    def to_dict(self):
        return {"pairs": self.pairs, "chain_violations": self.chain_violations,
                "monotonicity_violations": self.monotonicity_violations,
                "worst_slack": self.worst_slack, "details": self.details}


def _interior_samples(domain: Domain, count: int, rng) -> np.ndarray:
    n = domain.dim
    if isinstance(domain, (UnitBall, PuncturedUnitBall)):
        g = rng.normal(size=(count, n))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        return g * (rng.uniform(0, 1, count) ** (1 / n) * 0.98 + 0.001)[:, None]
    if isinstance(domain, HalfSpace):
        pts = rng.uniform(-3, 3, size=(count, n))
        pts[:, -1] = rng.uniform(0.01, 3, count)
        return pts
    if isinstance(domain, PuncturedSpace):
        P = domain.points
        lo, hi = P.min(axis=0) - 2, P.max(axis=0) + 2
        return rng.uniform(lo, hi, size=(count, n))
    out = []
    pts = domain.boundary_points(64)
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    while sum(len(o) for o in out) < count:
        cand = rng.uniform(lo, hi, size=(count, n))
        out.append(cand[domain.contains(cand)])
    return np.vstack(out)[:count]


def _subdomain(domain: Domain, rng) -> Optional[Domain]:
    if isinstance(domain, PuncturedSpace):
        P = domain.points
        return domain.with_puncture(rng.uniform(P.min(axis=0) - 1, P.max(axis=0) + 1))
    if isinstance(domain, UnitBall):
        return PuncturedUnitBall(domain.dim)
    return None


def verify_metric_inequalities(domains: Sequence[Domain], pairs: int = 1000, seed: int = 0,
                               slack: float = 1e-12) -> InequalityReport:
    """Check ``alpha <= delta <= log(e^alpha + 2) <= alpha + log 3`` and monotonicity in the domain."""
    rng = np.random.default_rng(seed)
    report = InequalityReport()
    for domain in domains:
        X = _interior_samples(domain, pairs, rng)
        Y = _interior_samples(domain, pairs, rng)
        a = pair_distances(ALPHA, domain, X, Y)
        d = pair_distances(DELTA, domain, X, Y)
        bound = np.log(np.exp(a) + 2)
        gaps = np.stack([a - d, d - bound, bound - (a + math.log(3))])
        worst = float(np.max(gaps))
        violations = int(np.sum(np.any(gaps > slack, axis=0)))
        mono = 0
        sub = _subdomain(domain, rng)
        if sub is not None:
            keep = sub.contains(X) & sub.contains(Y)
            for kind, vals in ((ALPHA, a), (DELTA, d)):
                sv = pair_distances(kind, sub, X[keep], Y[keep])
                mono += int(np.sum(vals[keep] - sv > slack))
        report.pairs += len(X)
        report.chain_violations += violations
        report.monotonicity_violations += mono
        report.worst_slack = max(report.worst_slack, worst)
        report.details.append({"domain": type(domain).__name__, "pairs": len(X), "chain_violations": violations,
                               "monotonicity_violations": mono, "worst_slack": worst})
    return report
