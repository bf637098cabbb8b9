"""Apollonian and Seittenranta distances, their metric balls, and numerical checks."""

from . import balls as _balls  # noqa: F401  registers implicit region builders
from .analysis import (
    ConvexityVerdict,
    ThresholdKind,
    ThresholdQuery,
    Verdict,
    boundary_profile,
    check_complement_connected,
    check_convex,
    check_starlike,
    estimate_threshold,
    sharpness_witness_punctured_ball,
    threshold_formula,
    verify_metric_inequalities,
)
from .balls import (
    alpha_ball_twice_punctured,
    alpha_zero_set,
    ball_by_pair_intersection,
    ball_halfspace,
    ball_unitball,
    delta_ball_once_punctured,
    delta_ball_punctured_unitball,
    delta_ball_twice_punctured,
    metric_ball,
)
from .domainspec import format_domain_spec, parse_domain_spec, parse_point
from .geometry import INFINITY, apollonian_boundary, apollonian_sublevel, cone_hull, cross_ratio
from .metrics import (
    ALPHA,
    DELTA,
    HalfSpace,
    MetricKind,
    PuncturedSpace,
    PuncturedUnitBall,
    UnitBall,
    alpha,
    delta,
    delta_punctured_ball,
    hyperbolic_distance,
    j_distance,
    sup_over_boundary_sample,
)
from .regions import region_boundary_2d, region_contains

__version__ = "0.1.0"
