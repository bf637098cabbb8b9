"""Command-line entry point (``metricballs`` / ``python -m metricballs``)."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from typing import List, Optional

import numpy as np

from .analysis import (
    ThresholdKind,
    ThresholdQuery,
    check_complement_connected,
    check_convex,
    check_starlike,
    estimate_threshold,
    sharpness_witness_punctured_ball,
    threshold_formula,
)
from .balls import metric_ball
from .domainspec import parse_domain_spec, parse_point
from .errors import GeometryError, ParseError
from .metrics import ALPHA, DELTA, MetricKind, distance, pair_distances

NUM = "%.12g"


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def _cmd_dist(args) -> int:
    domain = parse_domain_spec(args.domain)
    kind = MetricKind.parse(args.kind)
    x = parse_point(args.x)
    if args.y is not None:
        print(NUM % distance(kind, domain, x, parse_point(args.y)))
    if args.csv:
        ticks = np.linspace(-args.extent, args.extent, args.grid)
        Y = np.array([(x[0] + u, x[1] + v) for v in ticks for u in ticks])
        Y = Y[domain.contains(Y)]
        X = np.broadcast_to(x, Y.shape)
        a = pair_distances(ALPHA, domain, X, Y)
        d = pair_distances(DELTA, domain, X, Y)
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "y", "alpha", "delta"])
            for (u, v), av, dv in zip(Y, a, d):
                w.writerow([NUM % u, NUM % v, NUM % av, NUM % dv])
    elif args.y is None:
        raise ParseError("need a second point y or --csv", 0)
    return 0


def _ball(args):
    domain = parse_domain_spec(args.domain)
    return domain, metric_ball(domain, args.kind, parse_point(args.x), float(args.r))


def _cmd_ball(args) -> int:
    if args.svg:
        from .render import FigureRecipe, render_figure

        recipe = FigureRecipe(args.domain, parse_point(args.x), [float(args.r)], args.kind,
                              resolution=args.resolution, output=args.svg, name="ball")
        render_figure(recipe)
    if args.json or not args.svg:
        _, region = _ball(args)
        _emit(region.to_dict())
    return 0


def _cmd_check(args) -> int:
    _, region = _ball(args)
    if args.property == "convex":
        _emit(check_convex(region, samples=args.samples, seed=args.seed).to_dict())
    elif args.property == "starlike":
        _emit(check_starlike(region, parse_point(args.x), rays=args.rays, steps=args.steps).to_dict())
    else:
        _emit({"components": check_complement_connected(region, grid=args.grid)})
    return 0


def _cmd_threshold(args) -> int:
    if args.mode == "formula":
        punctures = []
        if args.punctures:
            punctures = [tuple(parse_point(t)) for t in args.punctures.split(";") if t.strip()]
        x = parse_point(args.x) if args.x else None
        query = ThresholdQuery(ThresholdKind(args.which), punctures, x)
        print(NUM % threshold_formula(query))
        return 0
    if args.bracket is None:
        raise ParseError("estimate needs --bracket LO HI", 0)
    est = estimate_threshold(parse_domain_spec(args.domain), args.kind, parse_point(args.x), tuple(args.bracket),
                             tol=args.tol, samples=args.samples, seed=args.seed)
    _emit({"estimate": est.estimate, "bracket": list(est.bracket), "iterations": est.iterations,
           "assumption": est.assumption})
    return 0


def _cmd_witness(args) -> int:
    _emit(sharpness_witness_punctured_ball(parse_point(args.x), float(args.r)).to_dict())
    return 0


def _cmd_render(args) -> int:
    from .render import FigureRecipe, builtin_recipes, render_figure

    if args.recipe:
        recipe = FigureRecipe.load(args.recipe)
    elif args.builtin:
        recipe = builtin_recipes()[args.builtin]
    else:
        raise ParseError("give --recipe FILE or --builtin NAME", 0)
    if args.out:
        recipe.output = args.out
    svg = render_figure(recipe)
    if not recipe.output:
        sys.stdout.write(svg)
    return 0


def _cmd_verify(args) -> int:
    from .verify import run_verify_suite

    report = run_verify_suite(seed=args.seed, budget=args.budget, only=args.only or None)
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    print(text)
    return 0 if report["passed"] else 1


def _add_ball_args(p):
    p.add_argument("domain", help="domain spec, e.g. 'punctured: (1,0);(-1,0)'")
    p.add_argument("kind", help="alpha or delta")
    p.add_argument("x", help="center, e.g. '(0.5,0.5)'")
    p.add_argument("r", type=float, help="radius")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="metricballs", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dist", help="distance between two points")
    p.add_argument("domain")
    p.add_argument("kind")
    p.add_argument("x")
    p.add_argument("y", nargs="?")
    p.add_argument("--csv", help="write alpha/delta from x over a grid to this file")
    p.add_argument("--grid", type=int, default=41)
    p.add_argument("--extent", type=float, default=1.0)
    p.set_defaults(func=_cmd_dist)

    p = sub.add_parser("ball", help="closed-form metric ball")
    _add_ball_args(p)
    p.add_argument("--json", action="store_true", help="print the region tree (default)")
    p.add_argument("--svg", help="write an SVG drawing")
    p.add_argument("--resolution", type=int, default=512)
    p.set_defaults(func=_cmd_ball)

    p = sub.add_parser("check", help="convexity, starlikeness or complement connectivity")
    p.add_argument("property", choices=["convex", "starlike", "complement"])
    _add_ball_args(p)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rays", type=int, default=720)
    p.add_argument("--steps", type=int, default=400)
    p.add_argument("--grid", type=int, default=512)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("threshold", help="closed-form or estimated convexity radius")
    tsub = p.add_subparsers(dest="mode", required=True)
    f = tsub.add_parser("formula")
    f.add_argument("which", choices=[k.value for k in ThresholdKind])
    f.add_argument("--punctures", help="'(x1,y1);(x2,y2);...'")
    f.add_argument("--x")
    f.set_defaults(func=_cmd_threshold)
    e = tsub.add_parser("estimate")
    e.add_argument("domain")
    e.add_argument("kind")
    e.add_argument("x")
    e.add_argument("--bracket", type=float, nargs=2, metavar=("LO", "HI"))
    e.add_argument("--tol", type=float, default=1e-3)
    e.add_argument("--samples", type=int, default=10_000)
    e.add_argument("--seed", type=int, default=0)
    e.set_defaults(func=_cmd_threshold)

    p = sub.add_parser("witness", help="sharpness witness")
    wsub = p.add_subparsers(dest="target", required=True)
    w = wsub.add_parser("punctured-ball")
    w.add_argument("x")
    w.add_argument("r", type=float)
    w.set_defaults(func=_cmd_witness)

    p = sub.add_parser("render", help="draw a figure recipe as SVG")
    p.add_argument("--recipe", help="JSON recipe file")
    p.add_argument("--builtin", help="fig1-left, fig1-right, fig2-left, fig2-right, fig3-left, fig3-right")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_render)

    p = sub.add_parser("verify", help="run the self-verification suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--only", nargs="*")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_verify)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (GeometryError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
