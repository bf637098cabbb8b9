"""Textual domain descriptors.

Grammar::

    halfspace | unitball | punctured-ball
    punctured: (x1,y1);(x2,y2);... [inf]
    polygon: (x1,y1);(x2,y2);...

A trailing ``inf`` token marks infinity as a boundary point.
"""

from __future__ import annotations

import re
from typing import List, Tuple

import numpy as np

from .errors import DuplicatePuncture, ParseError
from .metrics import (
    Domain,
    HalfSpace,
    PuncturedSpace,
    PuncturedUnitBall,
    SampledBoundary,
    UnitBall,
    polygon_domain,
)

_NUMBER = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_TUPLE = re.compile(r"\s*\(\s*(" + _NUMBER + r"(?:\s*,\s*" + _NUMBER + r")*)\s*\)\s*")


def _parse_points(text: str, offset: int) -> List[Tuple[float, ...]]:
    points = []
    pos = 0
    while pos < len(text):
        m = _TUPLE.match(text, pos)
        if not m:
            raise ParseError("expected a point like (x, y)", offset + pos)
        points.append(tuple(float(v) for v in m.group(1).split(",")))
        pos = m.end()
        if pos < len(text):
            if text[pos] != ";":
                raise ParseError("expected ';' between points", offset + pos)
            pos += 1
    if not points:
        raise ParseError("expected at least one point", offset)
    if len({len(p) for p in points}) != 1:
        raise ParseError("points have differing dimensions", offset)
    return points


def parse_point(text: str) -> np.ndarray:
    """Parse ``(x, y)`` or ``x,y`` into a vector."""
    s = text.strip()
    if not s.startswith("("):
        s = f"({s})"
    m = _TUPLE.fullmatch(s)
    if not m:
        raise ParseError(f"cannot parse point {text!r}", 0)
    return np.array([float(v) for v in m.group(1).split(",")])


def parse_domain_spec(text: str) -> Domain:
    if not text or not text.strip():
        raise ParseError("empty domain spec", 0)
    stripped = text.strip()
    lead = len(text) - len(text.lstrip())
    keyword = stripped.lower()
    if keyword == "halfspace":
        return HalfSpace()
    if keyword == "unitball":
        return UnitBall()
    if keyword == "punctured-ball":
        return PuncturedUnitBall()
    head, sep, body = stripped.partition(":")
    if not sep:
        raise ParseError(f"unknown domain {stripped!r}", lead)
    kind = head.strip().lower()
    body_offset = lead + len(head) + 1
    with_inf = False
    m = re.search(r"\binf\s*$", body)
    if m:
        with_inf = True
        body = body[: m.start()]
    body = body.rstrip()
    if kind == "punctured":
        pts = _parse_points(body, body_offset)
        if len(set(pts)) != len(pts):
            raise DuplicatePuncture("punctures must be pairwise distinct")
        return PuncturedSpace(tuple(pts), includes_infinity=with_inf)
    if kind == "polygon":
        if with_inf:
            raise ParseError("a polygon is bounded; 'inf' is not allowed", body_offset + len(body))
        return polygon_domain(_parse_points(body, body_offset))
    raise ParseError(f"unknown domain kind {kind!r}", lead)


def _fmt_point(p) -> str:
    return "(" + ",".join(repr(float(v)) for v in p) + ")"


def format_domain_spec(domain: Domain) -> str:
    if isinstance(domain, HalfSpace):
        return "halfspace"
    if isinstance(domain, PuncturedUnitBall):
        return "punctured-ball"
    if isinstance(domain, UnitBall):
        return "unitball"
    if isinstance(domain, PuncturedSpace):
        s = "punctured: " + ";".join(_fmt_point(p) for p in domain.punctures)
        return s + (" inf" if domain.includes_infinity else "")
    if isinstance(domain, SampledBoundary) and domain.name == "polygon":
        return "polygon: " + ";".join(_fmt_point(p) for p in domain.params["vertices"])
    raise ValueError(f"domain {domain!r} has no textual form")


def domains_equal(a: Domain, b: Domain) -> bool:
    return format_domain_spec(a) == format_domain_spec(b)
