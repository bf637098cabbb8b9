"""Acceptance criteria at full size.

Each criterion runs the matching verify check with its default (acceptance)
sizes and prints one PASS/FAIL line.  Also runnable directly:
``python3 tests/test_acceptance.py``.
"""

import sys
import time

import pytest

from metricballs.verify import CHECKS

CRITERIA = [
    (1, "apollonian_sphere_residual"),
    (2, "alpha_twice_punctured_oracle"),
    (3, "delta_twice_punctured_oracle"),
    (4, "pair_intersection_oracle"),
    (5, "hyperbolic_ball_closed_forms"),
    (6, "inequality_chain"),
    (7, "sharp_threshold_bisection"),
    (8, "alpha_complement_disconnected"),
    (9, "square_alpha_starlike"),
    (10, "cone_hull_union"),
    (11, "punctured_ball_decomposition"),
    (12, "punctured_ball_sharpness"),
    (13, "figure_structure"),
]


def _line(number, result, seconds):
    status = "PASS" if result.passed else "FAIL"
    return (f"criterion {number:2d}: {status} {result.name} residual={result.residual:.3g} "
            f"budget={result.budget} ({seconds:.1f}s)")


@pytest.mark.parametrize("number,name", CRITERIA, ids=[f"criterion_{n:02d}_{c}" for n, c in CRITERIA])
def test_criterion(number, name, capsys):
    start = time.perf_counter()
    result = CHECKS[name](seed=0)
    line = _line(number, result, time.perf_counter() - start)
    with capsys.disabled():
        print("\n" + line)
    assert result.passed, f"{line}\nwitness={result.witness}\nnotes={result.notes}"


def main() -> int:
    failed = 0
    for number, name in CRITERIA:
        start = time.perf_counter()
        result = CHECKS[name](seed=0)
        print(_line(number, result, time.perf_counter() - start), flush=True)
        failed += not result.passed
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
