from fractions import Fraction

import pytest
from hypothesis import given, settings

from src.errors import ParseError
from src.expr_core import (
    Expr,
    VarIndex,
    add,
    derivative,
    format_expr,
    mul,
    parse_expr,
    partial,
    proportionality,
    scalar,
    scale,
)
from strategies import exprs

Q1, Q2, Q3 = (Expr.var(v) for v in (VarIndex.Q1, VarIndex.Q2, VarIndex.Q3))
P1, P2, P3 = (Expr.var(v) for v in (VarIndex.P1, VarIndex.P2, VarIndex.P3))


def test_parse_polynomial_with_rational_division():
    assert parse_expr("q1/3") == Q1.scale(Fraction(1, 3))
    assert parse_expr("1/2*p1 - q2^2") == P1.scale(Fraction(1, 2)) - Q2 * Q2
    assert parse_expr("-(q1+p1)*(q1-p1)") == P1 * P1 - Q1 * Q1


def test_parse_complex_and_exponential():
    assert parse_expr("2*i*q1") == Q1.scale(scalar(0, 2))
    assert parse_expr("exp(i*(p1+1/2*p2))") == Expr.exp_momentum((1, Fraction(1, 2), 0))
    assert parse_expr("exp(i*(-p3))^2") == Expr.exp_momentum((0, 0, -2))


def test_exponentials_multiply_by_adding_alpha():
    product = Expr.exp_momentum((1, 0, 0)) * Expr.exp_momentum((-1, 0, 0))
    assert product == Expr.one()
    assert product.is_constant


def test_momentum_derivative_of_exponential():
    e = Expr.exp_momentum((2, 0, 0))
    assert e.partial(VarIndex.P1) == e.scale(scalar(0, 2))
    assert e.partial(VarIndex.Q1).is_zero
    assert (P1 * e).partial(VarIndex.P1) == e + (P1 * e).scale(scalar(0, 2))


def test_derivative_over_multi_index():
    f = parse_expr("q1^2*p1^3 + q2*p2")
    assert derivative(f, (VarIndex.Q1, VarIndex.P1)) == parse_expr("6*q1*p1^2")
    assert derivative(f, ()) == f


@pytest.mark.parametrize(
    "text, position",
    [
        ("q1 + q4", 5),
        ("p1/q1", 3),
        ("q1 +", 4),
        ("q1 $ p1", 3),
        ("(q1 + p1", 8),
    ],
)
def test_parse_errors_report_position(text, position):
    with pytest.raises(ParseError) as info:
        parse_expr(text)
    assert info.value.position == position
    assert f"at position {position}" in str(info.value)


def test_exp_argument_must_be_imaginary_linear_in_momenta():
    with pytest.raises(ParseError):
        parse_expr("exp(p1)")
    with pytest.raises(ParseError):
        parse_expr("exp(i*(q1))")


def test_queries():
    f = parse_expr("q1*p2 + 3")
    assert f.variables() == {VarIndex.Q1, VarIndex.P2}
    assert f.depends_on_positions() and f.depends_on_momenta()
    assert not f.is_constant
    assert parse_expr("5/2").constant_value() == scalar(Fraction(5, 2))
    assert Expr.exp_momentum((0, 1, 0)).has_exp()
    assert Expr.zero().is_zero and not Expr.zero()


def test_format_canonical_forms():
    assert format_expr(Expr.zero()) == "0"
    assert format_expr(parse_expr("2*i*q1")) == "2*i*q1"
    assert format_expr(parse_expr("-q1")) == "-q1"
    assert format_expr(parse_expr("(1+2*i)*p3")) == "(1+2*i)*p3"


@settings(max_examples=60, deadline=None)
@given(exprs())
def test_printed_expressions_parse_back(e):
    assert parse_expr(format_expr(e)) == e


@settings(max_examples=40, deadline=None)
@given(exprs(), exprs())
def test_product_rule(f, g):
    for v in VarIndex:
        assert (f * g).partial(v) == f.partial(v) * g + f * g.partial(v)


def test_proportionality():
    assert proportionality(parse_expr("2*q1+4*p1"), parse_expr("q1+2*p1")) == scalar(2)
    assert proportionality(parse_expr("q1+p1"), parse_expr("q1+2*p1")) is None
    assert proportionality(parse_expr("q1"), Expr.zero()) is None


@settings(max_examples=30, deadline=None)
@given(exprs(), exprs(), exprs())
def test_ring_axioms(a, b, c):
    assert mul(a, mul(b, c)) == mul(mul(a, b), c)
    assert mul(a, b) == mul(b, a)
    assert mul(a, add(b, c)) == add(mul(a, b), mul(a, c))
    assert add(a, scale(-1, a)).is_zero
    assert partial(mul(a, b), VarIndex.P2) == add(mul(partial(a, VarIndex.P2), b), mul(a, partial(b, VarIndex.P2)))
