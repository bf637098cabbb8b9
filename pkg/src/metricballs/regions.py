"""
Constructive solid geometry over open balls and half-spaces.

Every region carries a *level* function: negative strictly inside, positive
strictly outside the closure.  For the Euclidean primitives the level is the
exact signed distance; CSG nodes combine levels with min/max, so membership
(``level < 0``) and closure membership (``level <= 0``) follow the usual
strict/non-strict primitive inequalities.  ``Difference(A, B)`` removes the
closure of ``B``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import UnsupportedDimension

Box = Tuple[np.ndarray, np.ndarray]


def _as_points(z) -> Tuple[np.ndarray, bool]:
    z = np.asarray(z, dtype=float)
    if z.ndim == 1:
        return z[None, :], True
    return z, False


class Region:
    """Base class; subclasses implement ``_level`` on an (m, n) array."""

    dim: Optional[int] = None

    def _level(self, Z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def level(self, z):
        Z, single = _as_points(z)
        out = self._level(Z)
        return float(out[0]) if single else out

    def contains(self, z):
        Z, single = _as_points(z)
        out = self._level(Z) < 0
        return bool(out[0]) if single else out

    def closure_contains(self, z):
        Z, single = _as_points(z)
        out = self._level(Z) <= 0
        return bool(out[0]) if single else out

    def bounds(self) -> Optional[Box]:
        """Axis-aligned box containing the region, or None if unbounded/unknown."""
        return None

    def display_bounds(self) -> Optional[Box]:
        """Union of the boxes of all bounded primitives (used for canvases)."""
        return None

    def children(self) -> Sequence["Region"]:
        return ()

    def to_dict(self) -> dict:
        raise NotImplementedError

    def __and__(self, other: "Region") -> "Region":
        return Intersection((self, other))

    def __or__(self, other: "Region") -> "Region":
        return Union((self, other))

    def __sub__(self, other: "Region") -> "Region":
        return Difference(self, other)


def _vec(a) -> np.ndarray:
    return np.asarray(a, dtype=float).reshape(-1)


def _check_finite(*values):
    for v in values:
        if not np.all(np.isfinite(v)):
            raise ValueError("region parameters must be finite")


def _union_boxes(boxes) -> Optional[Box]:
    boxes = [b for b in boxes if b is not None]
    if not boxes:
        return None
    lo = np.min([b[0] for b in boxes], axis=0)
    hi = np.max([b[1] for b in boxes], axis=0)
    return lo, hi


@dataclass(frozen=True, eq=False)
class OpenBall(Region):
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _vec(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        _check_finite(self.center, self.radius)
        if self.radius <= 0:
            raise ValueError("radius must be positive")

    @property
    def dim(self):
        return self.center.size

    def _level(self, Z):
        return np.linalg.norm(Z - self.center, axis=1) - self.radius

    def bounds(self):
        return self.center - self.radius, self.center + self.radius

    display_bounds = bounds

    def to_dict(self):
        return {"type": "ball", "center": self.center.tolist(), "radius": self.radius}


@dataclass(frozen=True, eq=False)
class ComplementOfClosedBall(Region):
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _vec(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        _check_finite(self.center, self.radius)
        if self.radius <= 0:
            raise ValueError("radius must be positive")

    @property
    def dim(self):
        return self.center.size

    def _level(self, Z):
        return self.radius - np.linalg.norm(Z - self.center, axis=1)

    def display_bounds(self):
        return self.center - self.radius, self.center + self.radius

    def to_dict(self):
        return {"type": "ball_complement", "center": self.center.tolist(), "radius": self.radius}


@dataclass(frozen=True, eq=False)
class OpenHalfSpace(Region):
    """The set ``{z : z . normal < offset}``; ``normal`` is normalised on construction."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        n = _vec(self.normal)
        _check_finite(n, self.offset)
        norm = np.linalg.norm(n)
        if norm == 0:
            raise ValueError("half-space normal must be nonzero")
        object.__setattr__(self, "normal", n / norm)
        object.__setattr__(self, "offset", float(self.offset) / norm)

    @property
    def dim(self):
        return self.normal.size

    def _level(self, Z):
        return Z @ self.normal - self.offset

    def to_dict(self):
        return {"type": "halfspace", "normal": self.normal.tolist(), "offset": self.offset}


class FullSpace(Region):
    def _level(self, Z):
        return np.full(len(Z), -np.inf)

    def to_dict(self):
        return {"type": "full"}


class EmptySet(Region):
    def _level(self, Z):
        return np.full(len(Z), np.inf)

    def to_dict(self):
        return {"type": "empty"}


# name -> builder(**params) for implicit regions that can round-trip through JSON
IMPLICIT_BUILDERS: Dict[str, Callable[..., "ImplicitRegion"]] = {}


def register_implicit(name: str):
    def deco(fn):
        IMPLICIT_BUILDERS[name] = fn
        return fn

    return deco


@dataclass(frozen=True, eq=False)
class ImplicitRegion(Region):
    """``{z : level_fn(z) < 0}`` for a vectorised ``level_fn`` on (m, n) arrays.

    ``boundary_sampler(k)`` optionally returns k points on the boundary of a
    2D region in polar order; ``box`` bounds the region when known.
    """

    level_fn: Callable[[np.ndarray], np.ndarray]
    name: str = "implicit"
    params: dict = field(default_factory=dict)
    box: Optional[Box] = None
    boundary_sampler: Optional[Callable[[int], np.ndarray]] = None
    dim: Optional[int] = None

    def _level(self, Z):
        return np.asarray(self.level_fn(Z), dtype=float)

    def bounds(self):
        return self.box

    def display_bounds(self):
        return self.box

    def to_dict(self):
        return {"type": "implicit", "name": self.name, "params": self.params}


class _Node(Region):
    @property
    def dim(self):
        dims = {c.dim for c in self.children() if c.dim is not None}
        return dims.pop() if len(dims) == 1 else None

    def display_bounds(self):
        return _union_boxes(c.display_bounds() for c in self.children())


@dataclass(frozen=True, eq=False)
class Intersection(_Node):
    parts: Tuple[Region, ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))

    def children(self):
        return self.parts

    def _level(self, Z):
        if not self.parts:
            return np.full(len(Z), -np.inf)
        return np.max([p._level(Z) for p in self.parts], axis=0)

    def bounds(self):
        boxes = [b for b in (p.bounds() for p in self.parts) if b is not None]
        if not boxes:
            return None
        lo = np.max([b[0] for b in boxes], axis=0)
        hi = np.min([b[1] for b in boxes], axis=0)
        if np.any(lo > hi):
            return lo, lo
        return lo, hi

    def to_dict(self):
        return {"type": "intersection", "children": [p.to_dict() for p in self.parts]}


@dataclass(frozen=True, eq=False)
class Union(_Node):
    parts: Tuple[Region, ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))

    def children(self):
        return self.parts

    def _level(self, Z):
        if not self.parts:
            return np.full(len(Z), np.inf)
        return np.min([p._level(Z) for p in self.parts], axis=0)

    def bounds(self):
        boxes = [p.bounds() for p in self.parts]
        if any(b is None for b in boxes):
            return None
        return _union_boxes(boxes)

    def to_dict(self):
        return {"type": "union", "children": [p.to_dict() for p in self.parts]}


@dataclass(frozen=True, eq=False)
class Difference(_Node):
    """``base`` minus the closure of ``removed``."""

    base: Region
    removed: Region

    def children(self):
        return (self.base, self.removed)

    def _level(self, Z):
        return np.maximum(self.base._level(Z), -self.removed._level(Z))

    def bounds(self):
        return self.base.bounds()

    def to_dict(self):
        return {"type": "difference", "children": [self.base.to_dict(), self.removed.to_dict()]}


def region_contains(region: Region, z):
    return region.contains(z)


def region_from_dict(d: dict) -> Region:
    kind = d["type"]
    if kind == "ball":
        return OpenBall(d["center"], d["radius"])
    if kind == "ball_complement":
        return ComplementOfClosedBall(d["center"], d["radius"])
    if kind == "halfspace":
        return OpenHalfSpace(d["normal"], d["offset"])
    if kind == "full":
        return FullSpace()
    if kind == "empty":
        return EmptySet()
    if kind == "intersection":
        return Intersection(tuple(region_from_dict(c) for c in d["children"]))
    if kind == "union":
        return Union(tuple(region_from_dict(c) for c in d["children"]))
    if kind == "difference":
        a, b = d["children"]
        return Difference(region_from_dict(a), region_from_dict(b))
    if kind == "implicit":
        try:
            builder = IMPLICIT_BUILDERS[d["name"]]
        except KeyError:
            raise ValueError(f"unknown implicit region {d['name']!r}") from None
        return builder(**d["params"])
    raise ValueError(f"unknown region type {kind!r}")


def inflate(box: Box, factor: float) -> Box:
    lo, hi = np.asarray(box[0], float), np.asarray(box[1], float)
    mid = (lo + hi) / 2
    half = (hi - lo) / 2 * factor
    half = np.where(half > 0, half, 1.0)
    return mid - half, mid + half


def default_box(region: Region) -> Box:
    box = region.display_bounds() or region.bounds()
    if box is None:
        raise ValueError("region has no bounded primitives; pass an explicit box")
    return inflate(box, 1.2)


def _refine_crossings(region: Region, A: np.ndarray, B: np.ndarray, iters: int = 52) -> np.ndarray:
    """Bisect each segment [A_i, B_i] whose endpoints differ in membership."""
    inside_a = region.contains(A)
    lo = np.where(inside_a[:, None], A, B)
    hi = np.where(inside_a[:, None], B, A)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        m = region.contains(mid)
        lo = np.where(m[:, None], mid, lo)
        hi = np.where(m[:, None], hi, mid)
    return 0.5 * (lo + hi)


def region_boundary_2d(region: Region, resolution: int = 512, box: Optional[Box] = None) -> List[np.ndarray]:
    """Trace the boundary of a planar region with marching squares.

    Returns (k, 2) vertex arrays; closed loops repeat their first vertex at the
    end.  Each vertex sits on a grid edge and is bisected onto the boundary.
    """
    from skimage.measure import find_contours

    if region.dim is not None and region.dim != 2:
        raise UnsupportedDimension(f"boundary extraction needs n = 2, got {region.dim}")
    if box is None:
        try:
            box = default_box(region)
        except ValueError:
            return []
    lo, hi = np.asarray(box[0], float), np.asarray(box[1], float)
    if lo.size != 2:
        raise UnsupportedDimension("boundary extraction needs n = 2")
    xs = np.linspace(lo[0], hi[0], resolution + 1)
    ys = np.linspace(lo[1], hi[1], resolution + 1)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    field_ = region.contains(np.column_stack([X.ravel(), Y.ravel()])).reshape(X.shape)
    if field_.all() or not field_.any():
        return []
    contours = find_contours(field_.astype(float), 0.5)
    dx, dy = xs[1] - xs[0], ys[1] - ys[0]
    out = []
    for c in contours:
        i0 = np.floor(c[:, 0]).astype(int)
        j0 = np.floor(c[:, 1]).astype(int)
        on_i_edge = (c[:, 0] - i0) > 1e-9  # vertex lies between i0 and i0 + 1
        i1 = np.where(on_i_edge, i0 + 1, i0)
        j1 = np.where(on_i_edge, j0, j0 + 1)
        i0c, i1c = np.clip(i0, 0, resolution), np.clip(i1, 0, resolution)
        j0c, j1c = np.clip(j0, 0, resolution), np.clip(j1, 0, resolution)
        A = np.column_stack([lo[0] + i0c * dx, lo[1] + j0c * dy])
        B = np.column_stack([lo[0] + i1c * dx, lo[1] + j1c * dy])
        pts = _refine_crossings(region, A, B)
        if np.allclose(c[0], c[-1]):
            pts[-1] = pts[0]
        out.append(pts)
    return out


def polyline_is_closed(poly: np.ndarray) -> bool:
    return len(poly) > 2 and np.array_equal(poly[0], poly[-1])
