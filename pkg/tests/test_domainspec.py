import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from metricballs.domainspec import domains_equal, format_domain_spec, parse_domain_spec, parse_point
from metricballs.errors import DuplicatePuncture, ParseError
from metricballs.metrics import HalfSpace, PuncturedSpace, PuncturedUnitBall, SampledBoundary, UnitBall


def test_keywords():
    assert isinstance(parse_domain_spec("halfspace"), HalfSpace)
    assert isinstance(parse_domain_spec("  unitball "), UnitBall)
    assert isinstance(parse_domain_spec("punctured-ball"), PuncturedUnitBall)


def test_punctured_examples():
    d = parse_domain_spec("punctured: (-1,0);(1,0)")
    assert d == PuncturedSpace(((-1.0, 0.0), (1.0, 0.0)))
    assert not d.includes_infinity
    d = parse_domain_spec("punctured: (0,0) inf")
    assert d.includes_infinity and d.punctures == ((0.0, 0.0),)
    with pytest.raises(DuplicatePuncture):
        parse_domain_spec("punctured: (1,0);(1,0)")


def test_polygon():
    d = parse_domain_spec("polygon: (-2,-2);(2,-2);(2,2);(-2,2)")
    assert isinstance(d, SampledBoundary)
    assert d.contains(np.array([[0.0, 0.0]]))[0]


def test_parse_errors_report_position():
    with pytest.raises(ParseError) as err:
        parse_domain_spec("punctured: (1,0;(2,0)")
    assert err.value.position == 10
    with pytest.raises(ParseError) as err:
        parse_domain_spec("moon")
    assert err.value.position == 0
    with pytest.raises(ParseError):
        parse_domain_spec("")
    with pytest.raises(ParseError):
        parse_domain_spec("punctured: (1,0);(2,0,1)")
    with pytest.raises(ParseError):
        parse_domain_spec("polygon: (0,0);(1,0);(0,1) inf")


def test_parse_point():
    np.testing.assert_array_equal(parse_point("(0.5, -1e-3)"), [0.5, -1e-3])
    np.testing.assert_array_equal(parse_point("1,2"), [1, 2])
    with pytest.raises(ParseError):
        parse_point("(1,,2)")


finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


@given(st.lists(st.tuples(finite, finite), min_size=1, max_size=6, unique=True), st.booleans())
def test_round_trip(points, inf):
    d = PuncturedSpace(tuple(points), includes_infinity=inf)
    text = format_domain_spec(d)
    again = parse_domain_spec(text)
    assert again == d
    assert format_domain_spec(again) == text
    assert domains_equal(d, again)


@pytest.mark.parametrize("text", ["halfspace", "unitball", "punctured-ball", "polygon: (0.0,0.0);(1.0,0.0);(0.0,1.0)"])
def test_round_trip_keywords(text):
    assert format_domain_spec(parse_domain_spec(text)) == text
