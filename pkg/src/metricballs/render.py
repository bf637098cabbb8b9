"""SVG figures of metric balls in planar domains."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .balls import alpha_zero_set, metric_ball
from .domainspec import format_domain_spec, parse_domain_spec
from .errors import UnsupportedDimension
from .geometry import Plane, Sphere, apollonian_boundary, as_point
from .metrics import ALPHA, DELTA, MetricKind, PuncturedSpace, PuncturedUnitBall, UnitBall
from .regions import Box, region_boundary_2d

_FMT = "%.3f"


@dataclass
class FigureRecipe:
    domain: str
    x: Sequence[float]
    radii: Sequence[float]
    kind: str = "alpha"
    canvas: int = 1000
    resolution: int = 512
    output: Optional[str] = None
    name: str = "figure"
    guides: bool = True

    def __post_init__(self):
        self.x = [float(v) for v in self.x]
        self.radii = [float(r) for r in self.radii]
        if any(not (r > 0 and math.isfinite(r)) for r in self.radii):
            raise ValueError("radii must be positive and finite")
        if list(self.radii) != sorted(self.radii):
            raise ValueError("radii must be sorted")
        self.kind = MetricKind.parse(self.kind).value
        if self.canvas <= 0 or self.resolution <= 1:
            raise ValueError("canvas and resolution must be positive")

    @classmethod
    def from_dict(cls, d: dict) -> "FigureRecipe":
        return cls(**d)

    @classmethod
    def load(cls, path: str) -> "FigureRecipe":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return asdict(self)


def _loops_of(locus, box: Box) -> List[np.ndarray]:
    if isinstance(locus, Sphere):
        return [locus.sample(720)]
    # clip a line to the box by sampling generously and trimming
    span = float(np.max(box[1] - box[0]))
    seg = Plane(locus.normal, locus.offset).sample(2001, extent=2 * span)
    keep = np.all((seg >= box[0]) & (seg <= box[1]), axis=1)
    return [seg[keep]] if keep.sum() > 1 else []


def _guides(recipe: FigureRecipe, domain, x, radius) -> List:
    """Gray reference loci drawn under the boundaries."""
    if not recipe.guides or not isinstance(domain, PuncturedSpace) or len(domain.points) != 2:
        return []
    p, q = domain.points
    if domain.includes_infinity:
        return []
    if recipe.kind == ALPHA.value:
        return [alpha_zero_set(p, q, x)]
    out = []
    k = math.expm1(radius)
    pq = float(np.linalg.norm(p - q))
    c = k * float(np.linalg.norm(x - p)) / pq
    d = k * float(np.linalg.norm(x - q)) / pq
    # boundary of {|x-y| < c|y-q|} and {|x-y| < d|y-p|}
    out.append(apollonian_boundary(q, x, c))
    out.append(apollonian_boundary(p, x, d))
    return out


def _member_extent(region, box: Box, grid: int = 256) -> Optional[Box]:
    """Tight box of the members when the region stays clear of ``box``'s frame."""
    lo, hi = box
    xs = np.linspace(lo[0], hi[0], grid)
    ys = np.linspace(lo[1], hi[1], grid)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    inside = region.contains(np.column_stack([X.ravel(), Y.ravel()])).reshape(X.shape)
    if not inside.any() or inside[0].any() or inside[-1].any() or inside[:, 0].any() or inside[:, -1].any():
        return None
    i = np.flatnonzero(inside.any(axis=1))
    j = np.flatnonzero(inside.any(axis=0))
    step = (hi - lo) / (grid - 1)
    return (np.array([xs[i[0]], ys[j[0]]]) - step, np.array([xs[i[-1]], ys[j[-1]]]) + step)


def _world_box(points: List[np.ndarray], regions, guides) -> Box:
    boxes = [(pt, pt) for pt in points]
    for reg in regions:
        b = reg.display_bounds() or reg.bounds()
        if b is None:
            continue
        # huge near-planar spheres would otherwise swamp a bounded ball
        tight = _member_extent(reg, b)
        boxes.append(tight if tight is not None else b)
    for g in guides:
        if isinstance(g, Sphere):
            boxes.append((g.center - g.radius, g.center + g.radius))
    lo = np.min([b[0] for b in boxes], axis=0)
    hi = np.max([b[1] for b in boxes], axis=0)
    mid = 0.5 * (lo + hi)
    half = 0.5 * float(np.max(hi - lo)) * 1.2
    half = max(half, 1e-3)
    return mid - half, mid + half


class _Canvas:
    def __init__(self, box: Box, size: int):
        self.lo, self.hi = box
        self.size = size
        self.scale = size / float(self.hi[0] - self.lo[0])

    def map(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        u = (pts[:, 0] - self.lo[0]) * self.scale
        v = self.size - (pts[:, 1] - self.lo[1]) * self.scale
        return np.column_stack([u, v])

    def path(self, poly: np.ndarray, closed: bool) -> str:
        uv = self.map(poly)
        if closed and len(uv) > 1 and np.allclose(uv[0], uv[-1]):
            uv = uv[:-1]
        parts = [("M" if i == 0 else "L") + (_FMT % u) + "," + (_FMT % v) for i, (u, v) in enumerate(uv)]
        return " ".join(parts) + (" Z" if closed else "")


def render_figure(recipe: FigureRecipe) -> str:
    """Return the SVG document for ``recipe`` (also written to ``recipe.output`` if set)."""
    domain = parse_domain_spec(recipe.domain)
    x = as_point(recipe.x)
    if x.size != 2 or getattr(domain, "dim", 2) != 2:
        raise UnsupportedDimension("figures are drawn in the plane only")
    kind = MetricKind.parse(recipe.kind)
    regions = [metric_ball(domain, kind, x, r) for r in recipe.radii]
    guides = []
    for r in recipe.radii[:1] if kind is ALPHA else recipe.radii:
        guides.extend(_guides(recipe, domain, x, r))
    # the zero set does not depend on r; keep one copy
    marks: List[np.ndarray] = [x]
    if isinstance(domain, PuncturedSpace):
        marks.extend(domain.points)
    elif isinstance(domain, (UnitBall, PuncturedUnitBall)):
        marks.extend([np.array([-1.0, -1.0]), np.array([1.0, 1.0])])
    if isinstance(domain, PuncturedUnitBall):
        marks.append(np.zeros(2))
    box = _world_box(marks, regions, guides)
    cv = _Canvas(box, recipe.canvas)
    size = recipe.canvas
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f"<title>{recipe.name}</title>",
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="white"/>',
    ]
    if isinstance(domain, (UnitBall, PuncturedUnitBall)):
        u, v = cv.map(np.zeros(2))[0]
        out.append(f'<circle class="domain" cx="{_FMT % u}" cy="{_FMT % v}" r="{_FMT % cv.scale}" '
                   'fill="none" stroke="black" stroke-width="2"/>')
    for g in guides:
        for poly in _loops_of(g, box):
            closed = isinstance(g, Sphere)
            out.append(f'<path class="guide" d="{cv.path(poly, closed)}" fill="none" stroke="gray" '
                       'stroke-width="1.5"/>')
    for r, reg in zip(recipe.radii, regions):
        for poly in region_boundary_2d(reg, recipe.resolution, box):
            closed = len(poly) > 2 and np.array_equal(poly[0], poly[-1])
            out.append(f'<path class="boundary" data-r="{r!r}" d="{cv.path(poly, closed)}" fill="none" '
                       'stroke="black" stroke-width="1.5"/>')
    punctures = list(domain.points) if isinstance(domain, PuncturedSpace) else []
    if isinstance(domain, PuncturedUnitBall):
        punctures.append(np.zeros(2))
    for p in punctures:
        u, v = cv.map(p)[0]
        out.append(f'<circle class="puncture" cx="{_FMT % u}" cy="{_FMT % v}" r="6" fill="white" '
                   'stroke="black" stroke-width="2"/>')
    u, v = cv.map(x)[0]
    out.append(f'<circle class="center" cx="{_FMT % u}" cy="{_FMT % v}" r="5" fill="black"/>')
    out.append("</svg>")
    svg = "\n".join(out) + "\n"
    if recipe.output:
        with open(recipe.output, "w", encoding="utf-8") as fh:
            fh.write(svg)
    return svg


def count_elements(svg: str) -> dict:
    """Structural tally used by tests and the verify suite."""
    import xml.etree.ElementTree as ET

    root = ET.fromstring(svg)
    tally = {"boundary": 0, "guide": 0, "puncture": 0, "center": 0, "domain": 0}
    for el in root.iter():
        cls = el.get("class")
        if cls in tally:
            tally[cls] += 1
    return tally


# ---------------------------------------------------------------- built-in recipes

TWO_POINTS = "punctured: (1.0,0.0);(-1.0,0.0)"
FOUR_POINTS = "punctured: (1.0,0.0);(-1.0,0.0);(2.0,1.0);(1.0,2.0)"
FIG3_RIGHT_X = (1.0, 1.0)


def _three_radii(r0: float) -> List[float]:
    return [r0 - 1 / 3, r0, r0 + 1 / 3]


def builtin_recipes() -> dict:
    from .analysis import ThresholdKind, ThresholdQuery, threshold_formula

    r_ball = threshold_formula(ThresholdQuery(ThresholdKind.PUNCTURED_BALL_DELTA, x=(0.5, 0.0)))
    pts = parse_domain_spec(FOUR_POINTS).points
    r_four = threshold_formula(ThresholdQuery(ThresholdKind.FINITELY_PUNCTURED_DELTA, pts, FIG3_RIGHT_X))
    return {
        "fig1-left": FigureRecipe(TWO_POINTS, (0.5, 0.5), [1 / 5], "alpha", name="fig1-left"),
        "fig1-right": FigureRecipe(TWO_POINTS, (0.5, 0.5), [7 / 5], "alpha", name="fig1-right"),
        "fig2-left": FigureRecipe(TWO_POINTS, (0.5, 0.5), [3 / 5], "delta", name="fig2-left"),
        "fig2-right": FigureRecipe(TWO_POINTS, (0.5, 0.5), [2.0], "delta", name="fig2-right"),
        "fig3-left": FigureRecipe("punctured-ball", (0.5, 0.0), _three_radii(r_ball), "delta", name="fig3-left"),
        "fig3-right": FigureRecipe(FOUR_POINTS, FIG3_RIGHT_X, _three_radii(r_four), "delta", name="fig3-right"),
    }


__all__ = ["FigureRecipe", "render_figure", "count_elements", "builtin_recipes", "format_domain_spec"]
