import pytest
from hypothesis import given, settings

from src.errors import SeriesOrderError
from src.expr_core import COORDINATES, Expr, VarIndex, parse_expr
from src.operators import DiffOp, antisym_part, hochschild_d
from src.sampling import random_bidiff_op, random_diff_op, random_expr, rng_for
from src.star import (
    GaugeMap,
    LambdaSeries,
    commutator,
    format_series,
    gauge_transform,
    jordan,
    star_multiply,
    weyl_B2,
    weyl_star_product,
)
from src.structure import Bivector, FieldConfig, levi_civita
from strategies import exprs


def test_series_arithmetic_and_printing():
    a = LambdaSeries((parse_expr("q1"), parse_expr("p1"), Expr.zero(), Expr.zero()))
    b = LambdaSeries.lift(parse_expr("q1"), 3)
    assert (a - b) == LambdaSeries((Expr.zero(), parse_expr("p1"), Expr.zero(), Expr.zero()))
    assert format_series(a.scale(2)) == "2*q1+(2*p1)*lambda"
    assert format_series(LambdaSeries.zero(2)) == "0"
    with pytest.raises(SeriesOrderError):
        a + LambdaSeries.zero(2)


def test_order_limits(constant_field):
    pi = Bivector.from_field(constant_field)
    with pytest.raises(SeriesOrderError):
        weyl_star_product(pi, order=4)
    sp = weyl_star_product(pi, order=1)
    with pytest.raises(SeriesOrderError):
        sp.coefficient(2)
    with pytest.raises(SeriesOrderError):
        star_multiply(sp, LambdaSeries.zero(3), parse_expr("p1"))


@settings(max_examples=25, deadline=None)
@given(exprs())
def test_unit(f):
    sp = weyl_star_product(
        Bivector.from_field(FieldConfig.from_strings("q1^2/2", "0", "q2")),
        random_bidiff_op(rng_for(0, "B3")),
    )
    lifted = LambdaSeries.lift(f, 3)
    assert star_multiply(sp, Expr.one(), f) == lifted
    assert star_multiply(sp, f, Expr.one()) == lifted


def test_commutation_relations(any_field):
    sp = weyl_star_product(Bivector.from_field(any_field))
    zero = Expr.zero()
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            q_i, q_j = Expr.var(VarIndex.position(i)), Expr.var(VarIndex.position(j))
            p_i, p_j = Expr.var(VarIndex.momentum(i)), Expr.var(VarIndex.momentum(j))
            assert commutator(sp, q_i, q_j).is_zero
            delta = Expr.constant(2) if i == j else zero
            assert commutator(sp, q_i, p_j) == LambdaSeries((zero, delta, zero, zero))
            field_term = sum(
                (any_field.component(k).scale(2 * levi_civita(i, j, k)) for k in (1, 2, 3)), zero
            )
            assert commutator(sp, p_i, p_j) == LambdaSeries((zero, field_term, zero, zero))


def test_distinguished_coordinates(any_field, random_b3_pair):
    sp = weyl_star_product(Bivector.from_field(any_field), random_b3_pair[0])
    for x in COORDINATES:
        for y in COORDINATES:
            assert commutator(sp, x, y).coefficient(2).is_zero


def test_weyl_b2_structure(any_field):
    pi = Bivector.from_field(any_field)
    b2 = weyl_B2(pi)
    assert antisym_part(b2).is_zero
    assert (1, 1) not in b2.degree_profile()
    rng = rng_for(11, "b2")
    for _ in range(5):
        f, g = random_expr(rng, allow_exp=True), random_expr(rng, allow_exp=True)
        assert b2(f, g) == b2(g, f)


def test_weyl_b2_is_moyal_for_constant_field():
    pi = Bivector.from_field(FieldConfig.from_strings("0", "0", "1"))
    assert weyl_B2(pi).degree_profile() == {(2, 2)}
    p1, p2 = parse_expr("p1"), parse_expr("p2")
    # 1/2 Pi^{IJ} Pi^{KL} with {p1, p2} = 1 on the momentum plane
    assert weyl_B2(pi)(p1 * p1, p2 * p2) == Expr.constant(2)


def test_commutator_and_jordan(constant_field):
    sp = weyl_star_product(Bivector.from_field(constant_field))
    f, g = parse_expr("q1*p2^2 + p3"), parse_expr("p1*q2 - p3^2")
    assert commutator(sp, f, g) == -commutator(sp, g, f)
    assert commutator(sp, f, g).coefficient(1) == sp.B1(f, g).scale(2)
    assert jordan(sp, f, g) == jordan(sp, g, f)
    assert jordan(sp, f, f) == star_multiply(sp, f, f)


def test_grading_of_third_coefficient(nonconstant_field, random_b3_pair):
    pi = Bivector.from_field(nonconstant_field)
    b3 = random_b3_pair[0]
    with_b3 = weyl_star_product(pi, b3)
    without = weyl_star_product(pi)
    f, g = parse_expr("p1^2*q2 + p3"), parse_expr("q1*p2^3 - p1")
    difference = commutator(with_b3, f, g).coefficient(3) - commutator(without, f, g).coefficient(3)
    assert difference == antisym_part(b3)(f, g).scale(2)
    assert commutator(with_b3, f, g).coefficient(2) == commutator(without, f, g).coefficient(2)


def test_identity_gauge_returns_same_product(constant_sp):
    assert gauge_transform(constant_sp, DiffOp()) is constant_sp


@pytest.mark.parametrize("seed", range(3))
def test_gauge_first_order(nonconstant_field, seed):
    sp = weyl_star_product(Bivector.from_field(nonconstant_field), order=2)
    rng = rng_for(seed, "gauge")
    d1 = random_diff_op(rng)
    gauged = gauge_transform(sp, d1)
    f, g = random_expr(rng, max_terms=2, max_degree=2), random_expr(rng, max_terms=2, max_degree=2)
    assert gauged.B1(f, g) == sp.B1(f, g) - hochschild_d(d1)(f, g)
    assert star_multiply(gauged, Expr.one(), f) == LambdaSeries.lift(f, 2)


def test_gauge_intertwines_products(constant_field):
    sp = weyl_star_product(Bivector.from_field(constant_field), order=2)
    d1 = DiffOp([(parse_expr("q1"), (VarIndex.P1, VarIndex.P1))])
    gauged = gauge_transform(sp, d1)
    gauge = GaugeMap(sp, d1)
    f, g = parse_expr("p1^3"), parse_expr("q1*p1 + p2")
    lhs = star_multiply(gauged, gauge.apply(LambdaSeries.lift(f, 2)), gauge.apply(LambdaSeries.lift(g, 2)))
    rhs = gauge.apply(star_multiply(sp, f, g))
    assert lhs == rhs
