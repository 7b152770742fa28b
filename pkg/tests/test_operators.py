from fractions import Fraction

import pytest

from src.errors import ArityError, PreconditionError
from src.expr_core import COORDINATES, Expr, VarIndex, parse_expr
from src.operators import (
    BiDiffOp,
    DiffOp,
    FormulaCochain,
    antisym_part,
    antisymmetrize,
    apply,
    has_11_part,
    hochschild_d,
    is_multilinear_on,
    signed_permutations,
    sym_part,
)
from src.sampling import (
    random_antisymmetric_22,
    random_bidiff_op,
    random_diff_op,
    random_expr,
    rng_for,
)
from src.star import weyl_B1, weyl_B2
from src.structure import Bivector, bracket

Q1, P1, P2 = VarIndex.Q1, VarIndex.P1, VarIndex.P2


def test_signed_permutations():
    signs = dict(signed_permutations(3))
    assert signs[(0, 1, 2)] == 1
    assert signs[(1, 0, 2)] == -1
    assert signs[(1, 2, 0)] == 1
    assert sum(signs.values()) == 0


def test_coboundary_of_a_derivation_vanishes():
    d = DiffOp([(Expr.one(), (Q1,))])
    f, g = parse_expr("q1^2*p1"), parse_expr("q1+p2^2")
    assert hochschild_d(d)(f, g).is_zero


def test_coboundary_of_second_derivative():
    d = DiffOp([(Expr.one(), (Q1, Q1))])
    q1 = parse_expr("q1")
    assert hochschild_d(d)(q1, q1) == Expr.constant(-2)


def test_two_cochain_coboundary_matches_explicit_formula():
    rng = rng_for(3, "explicit")
    phi = random_bidiff_op(rng, 2, 2, 2, 1)
    f, g, h = (random_expr(rng, max_terms=2, max_degree=2) for _ in range(3))
    explicit = f * phi(g, h) - phi(f * g, h) + phi(f, g * h) - phi(f, g) * h
    assert hochschild_d(phi)(f, g, h) == explicit


@pytest.mark.parametrize("seed", range(4))
def test_coboundary_squares_to_zero(seed):
    rng = rng_for(seed, "d-squared")
    args = [random_expr(rng, max_terms=2, max_degree=2) for _ in range(4)]
    one_cochain = random_diff_op(rng)
    two_cochain = random_bidiff_op(rng, 2, 2, 2, 1)
    assert hochschild_d(hochschild_d(one_cochain))(*args[:3]).is_zero
    assert hochschild_d(hochschild_d(two_cochain))(*args).is_zero


def test_arity_is_enforced():
    op = BiDiffOp([(Expr.one(), (P1,), (P2,))])
    with pytest.raises(ArityError):
        op(parse_expr("p1"))
    with pytest.raises(ArityError):
        op + DiffOp([(Expr.one(), (P1,))])


def test_coefficients_must_be_position_only():
    with pytest.raises(PreconditionError):
        BiDiffOp([(parse_expr("p1"), (P1,), (P2,))])
    with pytest.raises(PreconditionError):
        DiffOp([(parse_expr("q1*p3"), (P1,))])


def test_terms_are_combined_and_cancelled():
    one = Expr.one()
    op = BiDiffOp([(one, (P2, P1), (Q1,)), (one, (P1, P2), (Q1,)), (-one, (P1,), (P2,)), (one, (P1,), (P2,))])
    assert op.terms == ((Expr.constant(2), (P1, P2), (Q1,)),)
    assert op.degree_profile() == {(2, 1)}


def test_symmetric_and_antisymmetric_parts():
    op = BiDiffOp([(Expr.one(), (P1,), (P2, P2))])
    assert sym_part(op) + antisym_part(op) == op
    assert antisym_part(op).swapped() == antisym_part(op).scaled(-1)
    f, g = parse_expr("p1^2"), parse_expr("p2^3")
    assert antisymmetrize(FormulaCochain(2, op))(f, g) == antisym_part(op)(f, g)
    assert apply(op, f, g) == op(f, g) == parse_expr("12*p1*p2")


def test_bracket_operator_has_11_part_and_b2_does_not(constant_field):
    pi = Bivector.from_field(constant_field)
    assert has_11_part(weyl_B1(pi))
    assert not has_11_part(weyl_B2(pi))


def test_11_part_is_read_off_the_terms():
    one = Expr.one()
    symmetric_11 = BiDiffOp([(one, (P1,), (P2,)), (one, (P2,), (P1,))])
    assert has_11_part(symmetric_11)
    assert not has_11_part(BiDiffOp([(one, (P1, P1), (P2,)), (one, (Q1,), (P2, P2))]))
    assert not has_11_part(BiDiffOp([(one, (P1, P1), (P2, P2)), (one, (P2, P2), (P1, P1))]))
    assert has_11_part(FormulaCochain(2, symmetric_11))
    with pytest.raises(ArityError):
        has_11_part(DiffOp([(one, (P1,))]))


def test_b1_operator_matches_bracket(any_field):
    pi = Bivector.from_field(any_field)
    b1 = weyl_B1(pi)
    rng = rng_for(1, "b1")
    for _ in range(5):
        f, g = random_expr(rng, allow_exp=True), random_expr(rng, allow_exp=True)
        assert b1(f, g) == bracket(pi, f, g)


def test_linear_combination_of_cochains(constant_field):
    pi = Bivector.from_field(constant_field)
    d1 = random_diff_op(rng_for(5, "gauge"))
    combination = weyl_B1(pi) - hochschild_d(d1)
    f, g = parse_expr("q1*p1^2"), parse_expr("p2+q3^2")
    assert combination(f, g) == bracket(pi, f, g) - hochschild_d(d1)(f, g)
    assert combination.scaled(Fraction(1, 2))(f, g) == combination(f, g).scale(Fraction(1, 2))


def test_multilinearity_spot_check(constant_field):
    pi = Bivector.from_field(constant_field)
    first = [parse_expr("q1*p2"), parse_expr("p1^2")]
    second = [parse_expr("p3"), parse_expr("q2*p1")]
    assert is_multilinear_on(weyl_B2(pi), first, second, 3) is None
    squaring = FormulaCochain(2, lambda f, g: f * f * g)
    assert is_multilinear_on(squaring, first, second, 3) == 0


def test_random_perturbation_is_antisymmetric():
    for seed in range(5):
        p = random_antisymmetric_22(rng_for(seed, "P"))
        assert p.swapped() == p.scaled(-1)
        assert p.degree_profile() == {(2, 2)}
        assert all(len(left) == 2 for _, left, _ in p.terms)


def test_zero_operator_and_constants():
    assert DiffOp().is_zero
    assert random_diff_op(rng_for(2, "D")).vanishes_on_constants
    op = random_bidiff_op(rng_for(2, "B"))
    assert op(Expr.one(), parse_expr("p1*q2")).is_zero
    assert all(not op(x, Expr.constant(3)) for x in COORDINATES)
