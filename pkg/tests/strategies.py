"""Hypothesis strategies for phase-space functions and magnetic fields."""

from fractions import Fraction

from hypothesis import strategies as st

from src.expr_core import COORDINATES, Expr, POSITIONS, VarIndex, expr_sum, scalar

small_ints = st.integers(min_value=-3, max_value=3).filter(bool)
rationals = st.fractions(min_value=-3, max_value=3, max_denominator=3)
alphas = st.tuples(*[st.sampled_from([Fraction(0), Fraction(1, 2), Fraction(1), Fraction(-1)])] * 3)
coordinates = st.sampled_from(COORDINATES)


@st.composite
def exponents(draw, variables=tuple(VarIndex), max_degree=3):
    powers = [0] * 6
    for v in draw(st.lists(st.sampled_from(variables), max_size=max_degree)):
        powers[v] += 1
    return powers


@st.composite
def exprs(draw, max_terms=3, max_degree=3, allow_exp=True, allow_complex=True):
    terms = []
    for _ in range(draw(st.integers(min_value=1, max_value=max_terms))):
        imag = draw(st.integers(min_value=-2, max_value=2)) if allow_complex else 0
        coefficient = scalar(draw(rationals), imag)
        alpha = draw(alphas) if allow_exp else (0, 0, 0)
        terms.append(Expr.monomial(draw(exponents(max_degree=max_degree)), coefficient, alpha))
    return expr_sum(terms)


@st.composite
def q_polys(draw, max_degree=2, max_terms=3):
    return expr_sum(
        Expr.monomial(draw(exponents(variables=POSITIONS, max_degree=max_degree)), draw(small_ints))
        for _ in range(draw(st.integers(min_value=1, max_value=max_terms)))
    )
