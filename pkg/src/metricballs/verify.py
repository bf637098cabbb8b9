"""
Self-verification suite.

Each check compares a closed-form construction with an independent
brute-force oracle and returns a :class:`CheckResult`.  Checks take a seed
and a budget (the number of random query points, pairs or samples that
dominates the check); budget 0 makes every sampled check Inconclusive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from .analysis import (
    ThresholdKind,
    ThresholdQuery,
    boundary_profile,
    boundary_profile_derivative_c1,
    check_complement_connected,
    check_convex,
    check_starlike,
    estimate_threshold,
    sharpness_witness_punctured_ball,
    threshold_formula,
    verify_metric_inequalities,
    witness_holds,
)
from .balls import (
    alpha_ball_twice_punctured,
    ball_by_pair_intersection,
    ball_halfspace,
    ball_unitball,
    delta_ball_punctured_unitball,
    delta_ball_twice_punctured,
    metric_ball,
)
from .geometry import Sphere, apollonian_boundary, cone_hull
from .metrics import (
    ALPHA,
    DELTA,
    HalfSpace,
    PuncturedSpace,
    PuncturedUnitBall,
    UnitBall,
    hyperbolic_distance,
    pair_distances,
    square_domain,
)

SCHEMA = 1
PASS, FAIL, INCONCLUSIVE = "Pass", "Fail", "Inconclusive"


@dataclass
class CheckResult:
    name: str
    anchor: str
    seed: int
    budget: int
    residual: float
    verdict: str
    witness: Optional[dict] = None
    notes: Dict[str, object] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def to_dict(self) -> dict:
        d = {"name": self.name, "anchor": self.anchor, "seed": self.seed, "budget": self.budget,
             "residual": _finite(self.residual), "verdict": self.verdict}
        if self.witness is not None:
            d["witness"] = self.witness
        if self.notes:
            d["notes"] = self.notes
        return d


def _finite(v):
    v = float(v)
    return v if math.isfinite(v) else str(v)


def _inconclusive(name, anchor, seed):
    return CheckResult(name, anchor, seed, 0, float("nan"), INCONCLUSIVE, notes={"reason": "zero budget"})


def _away_from(rng, pts, lo, hi, gap, dim=2):
    while True:
        x = rng.uniform(lo, hi, dim)
        if all(np.linalg.norm(x - p) > gap for p in pts):
            return x


def _random_pair(rng):
    while True:
        p, q = rng.uniform(-2, 2, (2, 2))
        if np.linalg.norm(p - q) > 0.3:
            return p, q


def _query_points(rng, region, count, outer=4.0, dim=2):
    half = count // 2
    pts = [rng.uniform(-outer, outer, (half, dim))]
    box = region.display_bounds()
    if box is not None:
        lo, hi = np.maximum(box[0], -10), np.minimum(box[1], 10)
        mid, span = 0.5 * (lo + hi), 0.75 * (hi - lo)
        pts.append(rng.uniform(mid - span, mid + span, (count - half, dim)))
    else:
        pts.append(rng.uniform(-outer, outer, (count - half, dim)))
    return np.vstack(pts)


def _oracle_disagreements(region, domain, kind, x, r, Y, band=1e-6):
    """Points off the metric band where membership differs from ``d(x, y) < r``."""
    Y = Y[domain.contains(Y)]
    d = pair_distances(kind, domain, np.broadcast_to(x, Y.shape), Y)
    member = region.contains(Y)
    truth = d < r
    bad = (member != truth) & (np.abs(d - r) > band)
    return Y[bad], d[bad], member[bad], len(Y)


def _oracle_run(name, anchor, seed, budget, configs, kind, build_domain):
    """Shared driver for the closed-form versus exact-evaluator comparisons."""
    if budget == 0:
        return _inconclusive(name, anchor, seed)
    total_bad = 0
    witness = None
    worst = 0.0
    rng = np.random.default_rng(seed + 100)
    for p_list, x, r, region in configs:
        domain = build_domain(p_list)
        Y = _query_points(rng, region, budget)
        bad, d, member, _ = _oracle_disagreements(region, domain, kind, x, r, Y)
        if len(bad):
            total_bad += len(bad)
            worst = max(worst, float(np.max(np.abs(d - r))))
            if witness is None:
                witness = {"punctures": [list(map(float, p)) for p in p_list], "x": x.tolist(), "r": r,
                           "point": bad[0].tolist(), "distance": float(d[0]), "member": bool(member[0])}
    verdict = PASS if total_bad == 0 else FAIL
    return CheckResult(name, anchor, seed, budget, worst, verdict, witness,
                       {"configurations": len(configs), "disagreements": total_bad})


# ---------------------------------------------------------------- individual checks


def check_sphere_residual(seed=0, budget=1000):
    name, anchor = "apollonian_sphere_residual", "Apollonian sphere formula, c|x-z| = |y-z| on the locus"
    if budget == 0:
        return _inconclusive(name, anchor, seed)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for i in range(budget):
        n = 2 if i % 2 == 0 else 3
        x, y = rng.uniform(-3, 3, (2, n))
        c = rng.choice([rng.uniform(0.1, 0.9), rng.uniform(1.1, 10.0)])
        locus = apollonian_boundary(x, y, c)
        z = locus.sample(360, seed=i)
        res = np.abs(c * np.linalg.norm(x - z, axis=1) - np.linalg.norm(y - z, axis=1)) / (1 + np.linalg.norm(x - y))
        worst = max(worst, float(res.max()))
    return CheckResult(name, anchor, seed, budget, worst, PASS if worst < 1e-9 else FAIL,
                       notes={"samples_per_sphere": 360})


def _twice_configs(rng, build, count, random_punctures):
    out = []
    for i in range(count):
        p, q = _random_pair(rng) if random_punctures else (np.array([1.0, 0.0]), np.array([-1.0, 0.0]))
        x = _away_from(rng, (p, q), -2.5, 2.5, 0.1)
        r = float(rng.uniform(0.05, 3.0))
        out.append(((p, q), x, r, build(p, q, x, r)))
    return out


def _points_domain(pts):
    return PuncturedSpace(tuple(tuple(map(float, p)) for p in pts))


def check_alpha_twice_oracle(seed=0, budget=10_000, configs=100, constructor=alpha_ball_twice_punctured):
    rng = np.random.default_rng(seed)
    cfg = _twice_configs(rng, constructor, configs, False) + _twice_configs(rng, constructor, configs, True)
    res = _oracle_run("alpha_twice_punctured_oracle", "twice-punctured Apollonian ball case table",
                      seed, budget, cfg, ALPHA, _points_domain)
    res.notes["orientation"] = "bounded Euclidean balls of the two spheres; ratio 1 routed to the complement row"
    return res


def check_delta_twice_oracle(seed=0, budget=10_000, configs=100, constructor=delta_ball_twice_punctured):
    rng = np.random.default_rng(seed + 1)
    cfg = _twice_configs(rng, constructor, configs, False) + _twice_configs(rng, constructor, configs, True)
    return _oracle_run("delta_twice_punctured_oracle", "twice-punctured Seittenranta ball, four-case construction",
                       seed, budget, cfg, DELTA, _points_domain)


def check_pair_intersection(seed=0, budget=10_000, configs=20):
    name, anchor = "pair_intersection_oracle", "ball as an intersection over boundary pairs, m in {alpha, delta}"
    if budget == 0:
        return _inconclusive(name, anchor, seed)
    rng = np.random.default_rng(seed + 2)
    results = []
    for kind in (ALPHA, DELTA):
        cfg = []
        for count in (3, 4):
            for _ in range(configs):
                while True:
                    pts = rng.uniform(-2, 2, (count, 2))
                    gaps = np.linalg.norm(pts[:, None] - pts[None], axis=2) + np.eye(count) * 9
                    if gaps.min() > 0.3:
                        break
                x = _away_from(rng, pts, -2.5, 2.5, 0.1)
                r = float(rng.uniform(0.05, 2.0))
                cfg.append((tuple(pts), x, r, ball_by_pair_intersection(_points_domain(pts), kind, x, r)))
        results.append(_oracle_run(name, anchor, seed, budget, cfg, kind, _points_domain))
    bad = [r for r in results if not r.passed]
    out = bad[0] if bad else results[0]
    out.notes = {"configurations": sum(r.notes["configurations"] for r in results),
                 "disagreements": sum(r.notes["disagreements"] for r in results)}
    return out


def check_hyperbolic_balls(seed=0, budget=100):
    name, anchor = "hyperbolic_ball_closed_forms", "closed-form hyperbolic balls in the half-space and unit ball"
    if budget == 0:
        return _inconclusive(name, anchor, seed)
    rng = np.random.default_rng(seed + 3)
    worst = 0.0
    for i in range(budget):
        n = 2 if i % 2 == 0 else 3
        r = float(rng.uniform(0.01, 4.0))
        xh = rng.uniform(-2, 2, n)
        xh[-1] = rng.uniform(0.1, 3)
        xb = rng.normal(size=n)
        xb *= rng.uniform(0, 0.9) / np.linalg.norm(xb)
        for dom, x, ball in ((HalfSpace(n), xh, ball_halfspace(xh, r)), (UnitBall(n), xb, ball_unitball(xb, r))):
            ys = Sphere(ball.center, ball.radius).sample(360, seed=i)
            d = hyperbolic_distance(dom, x, ys)
            worst = max(worst, float(np.max(np.abs(d - r))))
    return CheckResult(name, anchor, seed, budget, worst, PASS if worst < 1e-9 else FAIL,
                       notes={"samples_per_sphere": 360, "configurations": 2 * budget})


def check_inequality_chain(seed=0, budget=10_000):
    name, anchor = "inequality_chain", "alpha <= delta <= log(e^alpha + 2) <= alpha + log 3, domain monotonicity"
    if budget == 0:
        return _inconclusive(name, anchor, seed)
    zoo = [
        PuncturedSpace(((1.0, 0.0), (-1.0, 0.0))),
        PuncturedSpace(((1.0, 0.0), (-1.0, 0.0), (0.0, 1.5))),
        PuncturedSpace(((0.0, 0.0),), includes_infinity=True),
        PuncturedSpace(((0.5, 0.0), (-1.0, 1.0)), includes_infinity=True),
        UnitBall(2),
        UnitBall(3),
        HalfSpace(2),
        PuncturedUnitBall(2),
        square_domain(2.0, default_budget=128),
    ]
    rep = verify_metric_inequalities(zoo, pairs=budget, seed=seed)
    verdict = PASS if rep.passed else FAIL
    return CheckResult(name, anchor, seed, budget, rep.worst_slack, verdict,
                       notes={"pairs": rep.pairs, "chain_violations": rep.chain_violations,
                              "monotonicity_violations": rep.monotonicity_violations})


THRESHOLD_CASES = (
    ("once-punctured delta", lambda: PuncturedSpace(((0.0, 0.0),), includes_infinity=True), (1.0, 0.0),
     (0.3, 1.2), ThresholdQuery(ThresholdKind.ONCE_PUNCTURED_CONVEX)),
    ("twice-punctured delta", lambda: PuncturedSpace(((1.0, 0.0), (-1.0, 0.0))), (0.5, 0.5), (0.4, 1.4),
     ThresholdQuery(ThresholdKind.TWICE_PUNCTURED_DELTA, ((1.0, 0.0), (-1.0, 0.0)), (0.5, 0.5))),
    ("punctured ball delta", lambda: PuncturedUnitBall(2), (0.5, 0.0), (0.5, 2.0),
     ThresholdQuery(ThresholdKind.PUNCTURED_BALL_DELTA, x=(0.5, 0.0))),
)


def check_thresholds(seed=0, budget=10_000):
    name, anchor = "sharp_threshold_bisection", "sharp convexity radii recovered by bisection"
    if budget == 0:
        return _inconclusive(name, anchor, seed)
    worst = 0.0
    notes = {}
    for label, dom, x, bracket, query in THRESHOLD_CASES:
        est = estimate_threshold(dom(), DELTA, x, bracket, tol=1e-3, samples=budget, seed=seed)
        truth = threshold_formula(query)
        err = abs(est.estimate - truth)
        worst = max(worst, err)
        notes[label] = {"estimate": est.estimate, "formula": truth, "bracket": list(est.bracket)}
    return CheckResult(name, anchor, seed, budget, worst, PASS if worst < 1e-3 else FAIL, notes=notes)


def check_disconnected_complement(seed=0, budget=512, configs=20):
    name, anchor = "alpha_complement_disconnected", "complement of a twice-punctured Apollonian ball is disconnected"
    if budget == 0:
        return _inconclusive(name, anchor, seed)
    rng = np.random.default_rng(seed + 4)
    grid = max(64, budget)
    alpha_counts, control_counts = [], []
    witness = None
    for i in range(configs):
        p, q = _random_pair(rng) if i % 2 else (np.array([1.0, 0.0]), np.array([-1.0, 0.0]))
        x = _away_from(rng, (p, q), -2.0, 2.0, 0.2)
        r = float(rng.uniform(0.1, 2.0))
        k = check_complement_connected(alpha_ball_twice_punctured(p, q, x, r), grid=grid)
        alpha_counts.append(k)
        if k < 2 and witness is None:
            witness = {"p": p.tolist(), "q": q.tolist(), "x": x.tolist(), "r": r, "components": k}
    for i in range(configs):
        if i % 2 == 0:
            p, q = _random_pair(rng)
            x = _away_from(rng, (p, q), -2.0, 2.0, 0.2)
            r0 = threshold_formula(ThresholdQuery(ThresholdKind.TWICE_PUNCTURED_DELTA, (p, q), x))
            region = delta_ball_twice_punctured(p, q, x, float(rng.uniform(0.1, 1.0)) * r0)
        else:
            xb = rng.uniform(-0.6, 0.6, 2)
            region = ball_unitball(xb, float(rng.uniform(0.1, 3.0)))
        k = check_complement_connected(region, grid=grid)
        control_counts.append(k)
        if k != 1 and witness is None:
            witness = {"control": i, "components": k}
    ok = min(alpha_counts) >= 2 and all(k == 1 for k in control_counts)
    return CheckResult(name, anchor, seed, grid, 0.0 if ok else 1.0, PASS if ok else FAIL, witness,
                       {"alpha_components": alpha_counts, "control_components": control_counts})


def check_square_starlike(seed=0, budget=720, radii=(0.25, 0.5, 1.0, 2.0, 3.0), steps=200):
    name, anchor = "square_alpha_starlike", "Apollonian balls are strictly starlike with respect to the center"
    if budget == 0:
        return _inconclusive(name, anchor, seed)
    dom = square_domain(2.0)
    x = np.zeros(2)
    verdicts = []
    witness = None
    for r in radii:
        v = check_starlike(metric_ball(dom, ALPHA, x, r), x, rays=budget, steps=steps)
        verdicts.append(v.verdict.value)
        if v.witness is not None and witness is None:
            witness = {"r": r, "points": [w.tolist() for w in v.witness]}
    ok = witness is None
    return CheckResult(name, anchor, seed, budget, 0.0 if ok else 1.0, PASS if ok else FAIL, witness,
                       {"radii": list(radii), "verdicts": verdicts, "boundary_budget": dom.default_budget})


def _t_union(x, y, r, Z, tgrid):
    inside = np.zeros(len(Z), dtype=bool)
    xz = np.linalg.norm(Z - x, axis=1)
    for chunk in np.array_split(tgrid, max(1, len(tgrid) // 50)):
        centers = x + chunk[:, None] * (y - x)
        dz = np.linalg.norm(Z[None, :, :] - centers[:, None, :], axis=2)
        inside |= np.any(dz < r * xz[None, :], axis=0)
    return inside


def check_cone_hull(seed=0, budget=10_000, configs=10, tsteps=1000):
    name, anchor = "cone_hull_union", "ice cream cone, union of Apollonian balls along a segment"
    if budget == 0:
        return _inconclusive(name, anchor, seed)
    rng = np.random.default_rng(seed + 5)
    tgrid = np.arange(1, tsteps + 1) / tsteps
    total_bad = 0
    witness = None
    for _ in range(configs):
        n = 2
        x, y = rng.uniform(-1, 1, (2, n))
        r = float(rng.uniform(0.05, 0.95))
        _, region = cone_hull(x, y, r)
        L = np.linalg.norm(x - y) / math.sqrt(1 - r * r)
        Z = rng.uniform(x - 1.2 * L, x + 1.2 * L, (budget, n))
        keep = np.abs(region.level(Z)) > 1e-3
        Z = Z[keep]
        bad = region.contains(Z) != _t_union(x, y, r, Z, tgrid)
        if bad.any():
            total_bad += int(bad.sum())
            if witness is None:
                witness = {"x": x.tolist(), "y": y.tolist(), "r": r, "point": Z[bad][0].tolist()}
    return CheckResult(name, anchor, seed, budget, float(total_bad), PASS if total_bad == 0 else FAIL, witness,
                       {"configurations": configs, "t_grid": tsteps})


def _random_ball_point(rng, lo=0.02, hi=0.95):
    x = rng.normal(size=2)
    return x * rng.uniform(lo, hi) / np.linalg.norm(x)


def check_punctured_ball(seed=0, budget=10_000, configs=50, profiles=100):
    name, anchor = "punctured_ball_decomposition", "punctured unit ball, B = A n B n C and the boundary profile"
    if budget == 0:
        return _inconclusive(name, anchor, seed)
    rng = np.random.default_rng(seed + 6)
    dom = PuncturedUnitBall(2)
    total_bad = 0
    witness = None
    for _ in range(configs):
        x = _random_ball_point(rng)
        r = float(rng.uniform(0.05, 3.0))
        region = delta_ball_punctured_unitball(x, r)
        Y = rng.uniform(-1, 1, (budget, 2))
        bad, d, member, _ = _oracle_disagreements(region, dom, DELTA, x, r, Y)
        if len(bad):
            total_bad += len(bad)
            if witness is None:
                witness = {"x": x.tolist(), "r": r, "point": bad[0].tolist(), "distance": float(d[0])}
    betas = np.linspace(0, math.pi, 400)
    worst_drop = 0.0
    for _ in range(profiles):
        modx, c = float(rng.uniform(0.02, 0.98)), float(rng.uniform(0.05, 4.0))
        m = np.array([boundary_profile(modx, c, b) for b in betas])
        worst_drop = max(worst_drop, float(-np.min(np.diff(m))))
    h = 1e-5
    worst_deriv = 0.0
    for _ in range(profiles):
        modx, b = float(rng.uniform(0.02, 0.98)), float(rng.uniform(h, math.pi - h))
        fd = (boundary_profile(modx, 1.0, b + h) - boundary_profile(modx, 1.0, b - h)) / (2 * h)
        worst_deriv = max(worst_deriv, abs(fd - boundary_profile_derivative_c1(modx, b)))
    ok = total_bad == 0 and worst_drop <= 1e-9 and worst_deriv < 1e-6
    # the printed c = 1 profile uses 1 - |x| cos(beta) in the denominator; report how far it is off
    printed = (1 - 0.25) / (2 * (1 - 0.5))
    return CheckResult(name, anchor, seed, budget, max(float(total_bad), worst_drop, worst_deriv),
                       PASS if ok else FAIL, witness,
                       {"disagreements": total_bad, "profile_worst_decrease": worst_drop,
                        "derivative_error": worst_deriv,
                        "printed_profile_at_beta0": printed, "derived_profile_at_beta0": boundary_profile(0.5, 1, 0)})


def check_punctured_ball_sharpness(seed=0, budget=100_000, configs=20):
    name, anchor = "punctured_ball_sharpness", "punctured unit ball radius r_0 is sharp, r_A > max(r_B, r_C)"
    if budget == 0:
        return _inconclusive(name, anchor, seed)
    rng = np.random.default_rng(seed + 7)
    failures = []
    for i in range(configs):
        x = _random_ball_point(rng, 0.05, 0.95)
        r0 = threshold_formula(ThresholdQuery(ThresholdKind.PUNCTURED_BALL_DELTA, x=x))
        above_region = delta_ball_punctured_unitball(x, r0 + 0.1)
        above = check_convex(above_region, samples=budget, seed=seed + i)
        below = check_convex(delta_ball_punctured_unitball(x, r0 - 0.1), samples=budget, seed=seed + i)
        sharp = sharpness_witness_punctured_ball(x, r0)
        if not (witness_holds(above_region, above) and below.is_convex and sharp.holds):
            failures.append({"x": x.tolist(), "above": above.verdict.value, "below": below.verdict.value,
                             "holds": sharp.holds})
    ok = not failures
    return CheckResult(name, anchor, seed, budget, float(len(failures)), PASS if ok else FAIL,
                       failures[0] if failures else None, {"configurations": configs})


def check_figures(seed=0, budget=512):
    from .render import builtin_recipes, count_elements, render_figure

    name, anchor = "figure_structure", "figure captions: twice-punctured alpha and delta disks, punctured ball"
    if budget == 0:
        return _inconclusive(name, anchor, seed)
    recipes = builtin_recipes()
    expect = {
        "fig1-left": lambda t: t["puncture"] == 2 and t["center"] == 1 and t["guide"] == 1 and t["boundary"] >= 2,
        "fig1-right": lambda t: t["puncture"] == 2 and t["center"] == 1 and t["guide"] == 1 and t["boundary"] >= 2,
        "fig2-left": lambda t: t["puncture"] == 2 and t["center"] == 1 and t["guide"] == 2 and t["boundary"] == 1,
        "fig2-right": lambda t: t["puncture"] == 2 and t["center"] == 1 and t["guide"] == 2 and t["boundary"] >= 2,
        "fig3-left": lambda t: t["puncture"] == 1 and t["center"] == 1 and t["domain"] == 1 and t["boundary"] == 3,
        "fig3-right": lambda t: t["puncture"] == 4 and t["center"] == 1 and t["boundary"] == 3,
    }
    tallies, failed = {}, []
    for key, recipe in recipes.items():
        recipe.resolution = budget
        a, b = render_figure(recipe), render_figure(recipe)
        tallies[key] = count_elements(a)
        if a != b or not expect[key](tallies[key]):
            failed.append(key)
    return CheckResult(name, anchor, seed, budget, float(len(failed)), PASS if not failed else FAIL,
                       {"failed": failed} if failed else None, {"tallies": tallies})


CHECKS: Dict[str, Callable[..., CheckResult]] = {
    "apollonian_sphere_residual": check_sphere_residual,
    "alpha_twice_punctured_oracle": check_alpha_twice_oracle,
    "delta_twice_punctured_oracle": check_delta_twice_oracle,
    "pair_intersection_oracle": check_pair_intersection,
    "hyperbolic_ball_closed_forms": check_hyperbolic_balls,
    "inequality_chain": check_inequality_chain,
    "sharp_threshold_bisection": check_thresholds,
    "alpha_complement_disconnected": check_disconnected_complement,
    "square_alpha_starlike": check_square_starlike,
    "cone_hull_union": check_cone_hull,
    "punctured_ball_decomposition": check_punctured_ball,
    "punctured_ball_sharpness": check_punctured_ball_sharpness,
    "figure_structure": check_figures,
}


def run_verify_suite(seed: int = 0, budget: Optional[int] = None, only: Optional[List[str]] = None) -> dict:
    """Run every check (default sizes unless ``budget`` is given) and return the report."""
    names = sorted(only or CHECKS)
    results = []
    for name in names:
        fn = CHECKS[name]
        res = fn(seed=seed) if budget is None else fn(seed=seed, budget=budget)
        results.append(res)
    passed = all(r.passed for r in results)
    return {"schema": SCHEMA, "seed": seed, "budget": budget, "passed": passed,
            "checks": [r.to_dict() for r in sorted(results, key=lambda r: r.name)]}
