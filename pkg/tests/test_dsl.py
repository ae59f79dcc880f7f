import pytest
from hypothesis import given, settings

from conftest import fields
from singfol.dsl import (
    format_field,
    parse_directions,
    parse_field,
    parse_point,
    parse_polynomial,
    parse_spec,
)
from singfol.errors import ParseError
from singfol.exactalg import module_equal
from fractions import Fraction


def test_parse_F0():
    spec = parse_spec("vars x y\ngenerator x*dx + y*dy\ngenerator y*dx - x*dy")
    assert spec.vars == ("x", "y")
    assert [format_field(X, ["x", "y"]) for X in spec.generators] == ["x*dx + y*dy", "y*dx - x*dy"]


def test_parse_single_variable():
    spec = parse_spec("vars x\ngenerator x^2*dx")
    assert format_field(spec.generators[0], ["x"]) == "x^2*dx"


def test_generator_without_vars():
    with pytest.raises(ParseError) as err:
        parse_spec("generator x*dx")
    assert err.value.line == 1


def test_undeclared_variable_position():
    with pytest.raises(ParseError) as err:
        parse_spec("vars x y\n# comment\ngenerator x*dx + z*dy")
    assert (err.value.line, err.value.column) == (3, 18)


def test_zero_generator_rejected():
    with pytest.raises(ParseError):
        parse_spec("vars x\ngenerator x*dx - x*dx")


def test_syntax_error_position():
    with pytest.raises(ParseError) as err:
        parse_spec("vars x y\ngenerator x*dx + )")
    assert err.value.line == 2 and err.value.column == 18


def test_rational_literals_and_index_derivatives():
    X = parse_field("3/2*x*d0 - (x + y)^2*d1", ["x", "y"])
    assert X.components[0].coefficient((1, 0)) == Fraction(3, 2)
    assert parse_polynomial("(x+y)^2", ["x", "y"]).to_str(["x", "y"]) == "x^2 + 2*x*y + y^2"


def test_comments_metadata_and_zero():
    spec = parse_spec("name Z\n# nothing moves\nvars a b\nzero\n")
    F = spec.presentation()
    assert F.zero and F.n == 2 and F.name == "Z"
    assert parse_spec(spec.to_text()).zero


def test_scalar_generator_rejected():
    with pytest.raises(ParseError):
        parse_spec("vars x\ngenerator x^2")


@given(fields(n=2, degree=3))
@settings(max_examples=80, deadline=None)
def test_field_round_trip(X):
    if X.is_zero():
        return
    text = format_field(X, ["x", "y"])
    assert parse_field(text, ["x", "y"]) == X


@given(fields(n=2), fields(n=2))
@settings(max_examples=40, deadline=None)
def test_spec_round_trip(X, Y):
    gens = [g for g in (X, Y) if not g.is_zero()]
    if not gens:
        return
    from singfol.dsl import FoliationSpecFile

    spec = FoliationSpecFile(("x", "y"), tuple(gens), name="r")
    again = parse_spec(spec.to_text())
    assert again.generators == spec.generators
    assert module_equal(again.generators, spec.generators)


def test_points_and_directions():
    assert parse_point("0,1/2") == ([0, Fraction(1, 2)], True)
    coords, exact = parse_point("0.5,1")
    assert not exact and coords[0] == 0.5
    assert parse_directions("1,0;0,1") == [[1, 0], [0, 1]]
