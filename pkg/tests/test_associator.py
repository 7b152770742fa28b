from fractions import Fraction
from itertools import combinations

import pytest

from src.associator import (
    EXPECT_NONZERO,
    EXPECT_PASS,
    FAIL,
    PASS,
    A2_antisym,
    A2_formula,
    A3_alternation,
    A3_antisym,
    A3_cadabra,
    A3_closed_form,
    A3_direct,
    Verdict,
    Witness,
    associator_series,
    check_alternative,
    check_flexible2,
    check_flexible3,
    check_power_assoc,
    dA3_two_ways,
    obstruction_O,
    obstruction_summands,
    pentagon_residual,
    validate_monopole,
)
from src.checks import (
    BOUNDED_ALPHAS,
    alternative_witnesses,
    constant_density_witness,
    exp_sum,
    exp_sum_a3_value,
    flexibility_breaking_perturbation,
    momentum_square,
    momentum_square_a3_value,
    perturbation_witnesses,
    perturbed,
)
from src.errors import PreconditionError
from src.expr_core import COORDINATES, MOMENTA, Expr, parse_expr
from src.sampling import random_antisymmetric_22, random_expr, rng_for
from src.star import weyl_star_product
from src.structure import Bivector, jacobiator

P1, P2, P3 = (Expr.var(p) for p in MOMENTA)
Q1 = parse_expr("q1")

TRIPLE = (parse_expr("p1^2*q2"), parse_expr("p2*p3"), parse_expr("q1*p1+p3^2"))
QUADRUPLE = TRIPLE + (parse_expr("p2^2-q3*p1"),)


def weyl(field, b3=None, order=3):
    return weyl_star_product(Bivector.from_field(field), b3, order)


# =============================================================================
# Associator series
# =============================================================================


def test_low_orders_vanish(nonconstant_sp):
    rng = rng_for(0, "grading")
    for _ in range(5):
        f, g, h = (random_expr(rng, max_terms=2, max_degree=2, allow_exp=True) for _ in range(3))
        series = associator_series(nonconstant_sp, f, g, h)
        assert series.coefficient(0).is_zero
        assert series.coefficient(1).is_zero


def test_unit_and_positions_associate(constant_sp):
    assert associator_series(constant_sp, Expr.one(), P1, parse_expr("q2*p3")).is_zero
    q = [parse_expr(s) for s in ("q1", "q2", "q3")]
    assert associator_series(constant_sp, *q).is_zero


def test_a2_formula_is_second_coefficient(any_field):
    sp = weyl(any_field)
    assert associator_series(sp, *TRIPLE).coefficient(2) == A2_formula(sp, *TRIPLE)


def test_a3_direct_is_third_coefficient(nonconstant_field, random_b3_pair):
    for b3 in random_b3_pair:
        sp = weyl(nonconstant_field, b3)
        assert associator_series(sp, *TRIPLE).coefficient(3) == A3_direct(sp, *TRIPLE)


# =============================================================================
# Second order
# =============================================================================


def test_a2_antisym_is_two_thirds_of_jacobiator(any_field):
    sp = weyl(any_field)
    pi = Bivector.from_field(any_field)
    for x, y, z in combinations(COORDINATES, 3):
        assert A2_antisym(sp, x, y, z) == jacobiator(pi, x, y, z).scale(Fraction(2, 3))


def test_a2_on_momenta_measures_density(any_field):
    sp = weyl(any_field)
    value = A2_formula(sp, P1, P2, P3)
    assert value == any_field.divergence.scale(Fraction(-2, 3))
    assert A2_antisym(sp, P1, P2, P3) == value
    assert A2_antisym(sp, P1, P1, P2).is_zero


def test_validate_monopole_condition_one_fails_with_density(monopole_field):
    first, *rest = validate_monopole(weyl(monopole_field))
    assert first.status == FAIL
    assert first.reproduced
    assert first.detail == "monopole"
    assert first.witness.inputs == ("p1", "p2", "p3")
    assert first.witness.difference == monopole_field.divergence.scale(Fraction(-2, 3))
    assert [v.status for v in rest] == [PASS] * 4


def test_validate_monopole_rejects_divergence_free(divergence_free_field):
    first, *rest = validate_monopole(weyl(divergence_free_field))
    assert first.status == PASS
    assert first.witness is None
    assert not first.reproduced
    assert first.detail == "associative-compatible field"
    assert all(v.status == PASS for v in rest)



def test_flexible_at_second_order(monopole_field):
    rng = rng_for(1, "flexible")
    pairs = [(random_expr(rng, allow_exp=True), random_expr(rng, allow_exp=True)) for _ in range(4)]
    assert check_flexible2(weyl(monopole_field), pairs).status == PASS


def test_shipped_perturbation_breaks_flexibility(constant_sp):
    sp = perturbed(constant_sp, flexibility_breaking_perturbation(Fraction(3)))
    f, g = perturbation_witnesses()[0]
    assert A2_formula(sp, f, g, f) == Expr.constant(24)
    verdict = check_flexible2(sp, [(f, g)], check_id="b2_perturbation")
    assert verdict.status == FAIL
    assert verdict.witness.difference == Expr.constant(24)


@pytest.mark.parametrize("seed", range(3))
def test_random_perturbation_breaks_flexibility(nonconstant_sp, seed):
    p = random_antisymmetric_22(rng_for(seed, "perturbation"))
    verdict = check_flexible2(perturbed(nonconstant_sp, p), perturbation_witnesses())
    assert verdict.status == FAIL
    assert not verdict.witness.difference.is_zero


# =============================================================================
# Third order
# =============================================================================


def test_a3_antisym_vanishes_for_weyl(any_field, random_b3_pair):
    sp = weyl(any_field)
    assert A3_antisym(sp, *TRIPLE).is_zero
    for b3 in random_b3_pair:
        assert A3_alternation(weyl(any_field, b3), *TRIPLE).is_zero


def test_a3_antisym_matches_alternation_under_perturbation(constant_sp, random_b3_pair):
    sp = perturbed(constant_sp, flexibility_breaking_perturbation())
    triple = (parse_expr("p1^2*p2"), parse_expr("p2^2+q1*p1"), parse_expr("p1*p3"))
    cyclic = A3_antisym(sp, *triple)
    assert cyclic == A3_alternation(sp, *triple)
    assert cyclic == A3_alternation(sp.with_coefficient(3, random_b3_pair[1]), *triple)


def test_obstruction_routes_agree(nonconstant_field, random_b3_pair):
    o = obstruction_O(weyl(nonconstant_field), *QUADRUPLE)
    for b3 in random_b3_pair:
        routes = dA3_two_ways(weyl(nonconstant_field, b3), *QUADRUPLE)
        assert routes == (o, o, o)


def test_pentagon_residual_vanishes(constant_field, random_b3_pair):
    sp = weyl(constant_field, random_b3_pair[0])
    assert pentagon_residual(sp, *QUADRUPLE).is_zero


def test_constant_density_obstruction(constant_sp):
    witness = constant_density_witness()
    summands = obstruction_summands(constant_sp, *witness)
    assert summands[0] == Expr.constant(Fraction(2, 3))
    assert all(term.is_zero for term in summands[1:])
    assert obstruction_O(constant_sp, *witness) == Expr.constant(Fraction(2, 3))


def test_nonconstant_density_obstruction(nonconstant_sp):
    assert A2_formula(nonconstant_sp, P2, P1, P3) == Q1.scale(Fraction(2, 3))
    assert obstruction_O(nonconstant_sp, P2, P1, P3, P1) == Expr.constant(Fraction(-2, 3))
    last = obstruction_summands(nonconstant_sp, P2, P1, P3, P1)[-1]
    assert last == Expr.constant(Fraction(-2, 3))


def test_obstruction_on_divergence_free_coordinates(divergence_free_field):
    sp = weyl(divergence_free_field)
    assert obstruction_O(sp, P1, P2, P3, P1).is_zero


# =============================================================================
# Diagonal A3 of the Weyl product
# =============================================================================


def test_momentum_square(any_field):
    pi = Bivector.from_field(any_field)
    f = momentum_square()
    expected = momentum_square_a3_value(any_field)
    assert A3_cadabra(pi, f) == expected
    assert A3_closed_form(pi, f) == expected


def test_momentum_square_for_one_third_field(constant_field):
    pi = Bivector.from_field(constant_field)
    expected = parse_expr("32/9*i*(q1*p1+q2*p2+q3*p3)")
    assert A3_cadabra(pi, momentum_square()) == expected


@pytest.mark.parametrize("alpha", BOUNDED_ALPHAS)
def test_bounded_exponentials(monopole_field, alpha):
    pi = Bivector.from_field(monopole_field)
    f = exp_sum(alpha)
    expected = exp_sum_a3_value(monopole_field, alpha)
    assert A3_cadabra(pi, f) == expected
    assert A3_closed_form(pi, f) == expected


def test_bounded_exponentials_unit_alpha(constant_field):
    pi = Bivector.from_field(constant_field)
    f = parse_expr("exp(i*(p1))+exp(i*(p2))+exp(i*(p3))")
    expected = parse_expr("-4/9*(q1+q2+q3)*exp(i*(p1+p2+p3))")
    assert A3_cadabra(pi, f) == expected


@pytest.mark.parametrize("text", ["p1^3", "p1", "p2^2"])
def test_single_momentum_functions_vanish(any_field, text):
    pi = Bivector.from_field(any_field)
    f = parse_expr(text)
    assert A3_cadabra(pi, f).is_zero
    assert A3_closed_form(pi, f).is_zero


def test_closed_form_preconditions(constant_field):
    pi = Bivector.from_field(constant_field)
    with pytest.raises(PreconditionError, match="d_p1 d_p2"):
        A3_closed_form(pi, parse_expr("p1*p2+p3^2"))
    with pytest.raises(PreconditionError):
        A3_closed_form(pi, parse_expr("q1*p1^2"))


def test_divergence_free_diagonal_vanishes(divergence_free_field):
    pi = Bivector.from_field(divergence_free_field)
    assert A3_cadabra(pi, momentum_square()).is_zero
    assert A3_cadabra(pi, exp_sum(BOUNDED_ALPHAS[1])).is_zero


# =============================================================================
# Verdicts
# =============================================================================


def test_power_associativity_fails_for_monopoles(monopole_field):
    pi = Bivector.from_field(monopole_field)
    verdict = check_power_assoc(pi, momentum_square())
    assert verdict.status == FAIL
    assert verdict.witness.difference == momentum_square_a3_value(monopole_field)


def test_power_associativity_holds_without_monopoles(divergence_free_field):
    verdict = check_power_assoc(Bivector.from_field(divergence_free_field), momentum_square())
    assert verdict.status == PASS


def test_flexibility_holds_without_monopoles(divergence_free_field):
    pi = Bivector.from_field(divergence_free_field)
    assert check_flexible3(pi, momentum_square()).status == PASS
    assert check_flexible3(pi, exp_sum(BOUNDED_ALPHAS[0])).status == PASS
    pairs, _, _ = alternative_witnesses(divergence_free_field)
    assert check_flexible2(weyl(divergence_free_field), pairs).status == PASS


def test_power_assoc_and_flexible3_share_a3(monopole_field):
    pi = Bivector.from_field(monopole_field)
    f = momentum_square()
    power, flexible = check_power_assoc(pi, f), check_flexible3(pi, f)
    assert (power.check_id, flexible.check_id) == ("power_assoc", "flexible3")
    assert power.witness == flexible.witness
    assert power.witness.difference == A3_cadabra(pi, f)


def test_alternativity_fails_for_monopoles(monopole_field):
    pairs, quadruples, diagonal = alternative_witnesses(monopole_field)
    verdict = check_alternative(weyl(monopole_field), pairs, quadruples, diagonal)
    assert verdict.status == FAIL
    assert not verdict.witness.difference.is_zero


def test_alternativity_holds_without_monopoles(divergence_free_field):
    verdict = check_alternative(weyl(divergence_free_field), *alternative_witnesses(divergence_free_field))
    assert verdict.status == PASS



def test_verdict_expectations():
    failing = Verdict("x", FAIL, "1", "0", Witness(("p1",), Expr.one()))
    assert not failing.reproduced
    assert failing.expecting(EXPECT_NONZERO).reproduced
    assert Verdict("x", PASS, "0", "0").expecting(EXPECT_PASS).reproduced
    with pytest.raises(ValueError):
        Verdict("x", FAIL, "1", "0")
    with pytest.raises(ValueError):
        Verdict("x", FAIL, "0", "0", Witness(("p1",), Expr.zero()))
    assert failing.to_dict()["witness"] == "(p1) -> 1"
