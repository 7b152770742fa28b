#!/usr/bin/env python3
"""
Associator-level formulas of a star product.

    A(f, g, h) = f * (g * h) - (f * g) * h = sum_j lambda^j A_j(f, g, h)

A_0 = A_1 = 0 always. A_2 and A_3 have closed expressions in B_1..B_3; their
totally antisymmetric parts, the obstruction O = dA_3, the pentagon identity
and the diagonal value A_3(f, f, f) of the Weyl product are all computed here,
together with the verdict type every check reports through.
"""

import logging
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from src.errors import PreconditionError
from src.expr_core import (
    COORDINATES,
    MOMENTA,
    POSITIONS,
    Expr,
    VarIndex,
    derivative,
    expr_sum,
    format_expr,
    scalar,
)
from src.operators import Cochain, FormulaCochain, hochschild_d, multi_index, signed_permutations
from src.star import LambdaSeries, SeriesLike, StarProduct, star_multiply
from src.structure import Bivector

logger = logging.getLogger(__name__)

PASS = "pass"
FAIL = "fail"
EXPECT_PASS = "pass"
EXPECT_NONZERO = "nonzero"


# =============================================================================
# VERDICTS
# =============================================================================


@dataclass(frozen=True)
class Witness:
    inputs: Tuple[str, ...]
    difference: Expr

    def __str__(self) -> str:
        return f"({', '.join(self.inputs)}) -> {format_expr(self.difference)}"


@dataclass(frozen=True)
class Verdict:
    """Outcome of one check; a failure always carries its witness."""

    check_id: str
    status: str
    lhs: str
    rhs: str
    witness: Optional[Witness] = None
    expected: str = EXPECT_PASS
    detail: str = ""

    def __post_init__(self):
        if self.status not in (PASS, FAIL):
            raise ValueError(f"unknown status {self.status!r}")
        if self.status == FAIL and self.witness is None:
            raise ValueError(f"failing verdict {self.check_id} needs a witness")
        if self.status == FAIL and self.witness.difference.is_zero:
            raise ValueError(f"failing verdict {self.check_id} has a zero witness difference")

    @property
    def reproduced(self) -> bool:
        """Status matches the expected-status table."""
        return (self.expected == EXPECT_PASS) == (self.status == PASS)

    def expecting(self, expected: str, detail: Optional[str] = None) -> "Verdict":
        return replace(self, expected=expected, detail=self.detail if detail is None else detail)

    def to_dict(self) -> Dict[str, Optional[str]]:
        return {
            "id": self.check_id,
            "status": self.status,
            "expected": self.expected,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "witness": str(self.witness) if self.witness else None,
            "detail": self.detail,
        }


def _label(args: Sequence[Expr]) -> Tuple[str, ...]:
    return tuple(format_expr(a) for a in args)


def compare(check_id: str, lhs: Expr, rhs: Expr, inputs: Sequence[Expr] = (), detail: str = "") -> Verdict:
    """Exact comparison lhs == rhs."""
    difference = lhs - rhs
    if difference.is_zero:
        return Verdict(check_id, PASS, format_expr(lhs), format_expr(rhs), detail=detail)
    return Verdict(
        check_id, FAIL, format_expr(lhs), format_expr(rhs), Witness(_label(inputs), difference), detail=detail
    )


def verdict_over(
    check_id: str,
    cases: Iterable[Tuple[Expr, Expr, Sequence[Expr]]],
    detail: str = "",
) -> Verdict:
    """First failing (lhs, rhs, inputs) case, or a pass carrying the last case."""
    last = None
    count = 0
    for lhs, rhs, inputs in cases:
        count += 1
        verdict = compare(check_id, lhs, rhs, inputs, detail)
        if verdict.status == FAIL:
            logger.debug(f"{check_id}: violation after {count} cases")
            return verdict
        last = verdict
    if last is None:
        return Verdict(check_id, PASS, "0", "0", detail=detail or "no cases")
    return last


# =============================================================================
# ASSOCIATOR SERIES
# =============================================================================


@dataclass(frozen=True)
class AssociatorSeries:
    """A_0..A_N of A(f, g, h) for fixed arguments."""

    coeffs: Tuple[Expr, ...]

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def coefficient(self, j: int) -> Expr:
        return self.coeffs[j]

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero for c in self.coeffs)

    def as_series(self) -> LambdaSeries:
        return LambdaSeries(self.coeffs)


def associator(sp: StarProduct, f: SeriesLike, g: SeriesLike, h: SeriesLike) -> LambdaSeries:
    """f * (g * h) - (f * g) * h on series arguments."""
    return star_multiply(sp, f, star_multiply(sp, g, h)) - star_multiply(sp, star_multiply(sp, f, g), h)


def associator_series(sp: StarProduct, f: SeriesLike, g: SeriesLike, h: SeriesLike) -> AssociatorSeries:
    return AssociatorSeries(associator(sp, f, g, h).coeffs)


# =============================================================================
# SECOND ORDER
# =============================================================================


def A2_formula(sp: StarProduct, f: Expr, g: Expr, h: Expr) -> Expr:
    """f B2(g,h) - B2(f,g) h + B2(f,gh) - B2(fg,h) + B1(f,B1(g,h)) - B1(B1(f,g),h)."""
    b1, b2 = sp.B1, sp.B2
    return expr_sum(
        (
            f * b2(g, h),
            -(b2(f, g) * h),
            b2(f, g * h),
            -b2(f * g, h),
            b1(f, b1(g, h)),
            -b1(b1(f, g), h),
        )
    )


def alternate(fn, args: Sequence[Expr]) -> Expr:
    """1/6 sum over S3 of sgn(s) fn(args permuted by s)."""
    total = expr_sum(
        fn(*(args[i] for i in perm)).scale(sign) for perm, sign in signed_permutations(len(args))
    )
    return total.scale(Fraction(1, 6))


def A2_antisym(sp: StarProduct, f: Expr, g: Expr, h: Expr) -> Expr:
    return alternate(lambda a, b, c: A2_formula(sp, a, b, c), (f, g, h))


# =============================================================================
# THIRD ORDER
# =============================================================================


def A3_direct(sp: StarProduct, f: Expr, g: Expr, h: Expr) -> Expr:
    """dB3(f,g,h) + B2(f,B1(g,h)) - B2(B1(f,g),h) + B1(f,B2(g,h)) - B1(B2(f,g),h)."""
    b1, b2 = sp.B1, sp.B2
    return expr_sum(
        (
            hochschild_d(sp.B3)(f, g, h),
            b2(f, b1(g, h)),
            -b2(b1(f, g), h),
            b1(f, b2(g, h)),
            -b1(b2(f, g), h),
        )
    )


def a3_cochain(sp: StarProduct) -> Cochain:
    return FormulaCochain(3, lambda f, g, h: A3_direct(sp, f, g, h), name="A3")


def A3_alternation(sp: StarProduct, f: Expr, g: Expr, h: Expr) -> Expr:
    """Totally antisymmetric part of A3 by direct alternation of A3_direct."""
    return alternate(lambda a, b, c: A3_direct(sp, a, b, c), (f, g, h))


def A3_antisym(sp: StarProduct, f: Expr, g: Expr, h: Expr) -> Expr:
    """
    Totally antisymmetric part of A3 for antisymmetric B1:

        3 A3^- = sum_cyc 2 B2^-(f, B1(g,h)) + sum_cyc 2 B1(f, B2^-(g,h))

    Independent of B3; vanishes when B2 is symmetric.
    """
    b1, b2 = sp.B1, sp.B2

    def b2_minus(a: Expr, b: Expr) -> Expr:
        return (b2(a, b) - b2(b, a)).scale(Fraction(1, 2))

    pieces = []
    for x, y, z in ((f, g, h), (g, h, f), (h, f, g)):
        pieces.append(b2_minus(x, b1(y, z)))
        pieces.append(b1(x, b2_minus(y, z)))
    return expr_sum(pieces).scale(Fraction(2, 3))


def obstruction_summands(sp: StarProduct, f: Expr, g: Expr, h: Expr, k: Expr) -> Tuple[Expr, ...]:
    """
    The five terms of
        O = A2(f,g,B1(h,k)) - A2(f,B1(g,h),k) + A2(B1(f,g),h,k)
            + B1(A2(g,h,k),f) - B1(A2(f,g,h),k)
    with their signs applied.
    """
    b1 = sp.B1
    return (
        A2_formula(sp, f, g, b1(h, k)),
        -A2_formula(sp, f, b1(g, h), k),
        A2_formula(sp, b1(f, g), h, k),
        b1(A2_formula(sp, g, h, k), f),
        -b1(A2_formula(sp, f, g, h), k),
    )


def obstruction_O(sp: StarProduct, f: Expr, g: Expr, h: Expr, k: Expr) -> Expr:
    """B3-independent expression of dA3(f, g, h, k)."""
    return expr_sum(obstruction_summands(sp, f, g, h, k))


def _dA3_pentagon(sp: StarProduct, f: Expr, g: Expr, h: Expr, k: Expr) -> Expr:
    """
    dA3 from the lambda^3 part of the pentagon identity.

    At lambda^3, f*A(g,h,k) = f A3(g,h,k) + B1(f, A2(g,h,k)), and likewise on the right;
    the rest of the pentagon is built from full star products, never from the A3 cochain.
    """
    fg, gh, hk = star_multiply(sp, f, g), star_multiply(sp, g, h), star_multiply(sp, h, k)
    rearranged = associator(sp, fg, h, k) - associator(sp, f, gh, k) + associator(sp, f, g, hk)
    classical = (
        associator(sp, f * g, h, k) - associator(sp, f, g * h, k) + associator(sp, f, g, h * k)
    )
    b1 = sp.B1
    return expr_sum(
        (
            rearranged.coefficient(3),
            -b1(f, A2_formula(sp, g, h, k)),
            -b1(A2_formula(sp, f, g, h), k),
            -classical.coefficient(3),
        )
    )


def _dA3_expanded(sp: StarProduct, f: Expr, g: Expr, h: Expr, k: Expr) -> Expr:
    """dA3 with every A2 replaced by dB2; the B1 B1 terms cancel pairwise."""
    b1 = sp.B1
    db2 = hochschild_d(sp.B2)
    return expr_sum(
        (
            db2(f, g, b1(h, k)),
            -db2(f, b1(g, h), k),
            db2(b1(f, g), h, k),
            b1(db2(g, h, k), f),
            -b1(db2(f, g, h), k),
        )
    )


def dA3_two_ways(sp: StarProduct, f: Expr, g: Expr, h: Expr, k: Expr) -> Tuple[Expr, Expr, Expr]:
    """
    dA3(f, g, h, k) by three independent routes.

    Returns:
        (coboundary of the A3 cochain, pentagon rearrangement, dB2 expansion)
    """
    return (
        hochschild_d(a3_cochain(sp))(f, g, h, k),
        _dA3_pentagon(sp, f, g, h, k),
        _dA3_expanded(sp, f, g, h, k),
    )


def pentagon_residual(sp: StarProduct, f: SeriesLike, g: SeriesLike, h: SeriesLike, k: SeriesLike) -> LambdaSeries:
    """f*A(g,h,k) + A(f,g,h)*k - A(f*g,h,k) + A(f,g*h,k) - A(f,g,h*k); zero in any algebra."""
    return (
        star_multiply(sp, f, associator(sp, g, h, k))
        + star_multiply(sp, associator(sp, f, g, h), k)
        - associator(sp, star_multiply(sp, f, g), h, k)
        + associator(sp, f, star_multiply(sp, g, h), k)
        - associator(sp, f, g, star_multiply(sp, h, k))
    )


# =============================================================================
# DIAGONAL A3 OF THE WEYL PRODUCT
# =============================================================================


def _d(f: Expr, *indices: VarIndex) -> Expr:
    return derivative(f, multi_index(indices))


def A3_cadabra(pi: Bivector, f: Expr) -> Expr:
    """
    A3(f, f, f) of the Weyl product as the four-term Pi contraction:

        2i/3 ( Pi^LM d_L Pi^NO d_N Pi^PQ  f_M f_P f_OQ
             - Pi^LM d_L Pi^NO d_N Pi^PQ  f_O f_P f_MQ
             - 2 Pi^LM Pi^NO d_L Pi^PQ    f_P f_MN f_OQ
             +   Pi^LM Pi^NO d_L Pi^PQ    f_M f_NP f_OQ )
    """
    entries = pi.nonzero_entries()
    pieces = []
    for l, m, p_lm in entries:
        for n, o, d_l_no in pi.derivative_entries(l):
            for p, q, d_n_pq in pi.derivative_entries(n):
                c = p_lm * d_l_no * d_n_pq
                pieces.append(c * _d(f, m) * _d(f, p) * _d(f, o, q))
                pieces.append(-(c * _d(f, o) * _d(f, p) * _d(f, m, q)))
        for p, q, d_l_pq in pi.derivative_entries(l):
            for n, o, p_no in entries:
                c = p_lm * p_no * d_l_pq
                pieces.append((c * _d(f, p) * _d(f, m, n) * _d(f, o, q)).scale(-2))
                pieces.append(c * _d(f, m) * _d(f, n, p) * _d(f, o, q))
    return expr_sum(pieces).scale(scalar(0, Fraction(2, 3)))


CYCLIC = ((1, 2, 3), (2, 3, 1), (3, 1, 2))


def A3_closed_form(pi: Bivector, f: Expr) -> Expr:
    """
    Diagonal A3 for momentum-only f with diagonal momentum Hessian:

        4i/3 (sum_cyc d_{q_a} Pi^{p_b p_c}) sum_cyc Pi^{p_a p_b} f_{p_c} f_{p_a p_a} f_{p_b p_b}

    Raises:
        PreconditionError: f depends on positions, or names the first nonzero
            mixed derivative d_{p_i} d_{p_j} f with i != j
    """
    if f.depends_on_positions():
        raise PreconditionError(f"A3_closed_form needs a function of the momenta only; got {f}")
    for a, b in ((1, 2), (1, 3), (2, 3)):
        pa, pb = VarIndex.momentum(a), VarIndex.momentum(b)
        mixed = _d(f, pa, pb)
        if not mixed.is_zero:
            raise PreconditionError(
                f"A3_closed_form needs d_{pa.symbol} d_{pb.symbol} f = 0, got {format_expr(mixed)}"
            )
    p = {axis: VarIndex.momentum(axis) for axis in (1, 2, 3)}
    prefactor = expr_sum(
        pi.entry(p[b], p[c]).partial(VarIndex.position(a)) for a, b, c in CYCLIC
    )
    contraction = expr_sum(
        pi.entry(p[a], p[b]) * _d(f, p[c]) * _d(f, p[a], p[a]) * _d(f, p[b], p[b]) for a, b, c in CYCLIC
    )
    return (prefactor * contraction).scale(scalar(0, Fraction(4, 3)))


# =============================================================================
# ALGEBRA-PROPERTY VERDICTS
# =============================================================================


def check_flexible2(sp: StarProduct, pairs: Iterable[Tuple[Expr, Expr]], check_id: str = "flexible2") -> Verdict:
    """A2(f, g, f) = 0 on every pair."""
    return verdict_over(
        check_id, ((A2_formula(sp, f, g, f), Expr.zero(), (f, g, f)) for f, g in pairs)
    )


def diagonal_associator_verdict(pi: Bivector, f: Expr, check_id: str, detail: str) -> Verdict:
    """A3(f, f, f) = 0, the single quantity behind power_assoc and flexible3."""
    return compare(check_id, A3_cadabra(pi, f), Expr.zero(), (f, f, f), detail=detail)


def check_power_assoc(pi: Bivector, f: Expr, check_id: str = "power_assoc") -> Verdict:
    """f * (f * f) = (f * f) * f at order lambda^3; the difference is A3(f, f, f)."""
    return diagonal_associator_verdict(pi, f, check_id, "A3(f,f,f)")


def check_flexible3(pi: Bivector, f: Expr, check_id: str = "flexible3") -> Verdict:
    """
    Flexibility A(f, g, f) = 0 at g = f, which is again A3(f, f, f) = 0.

    Same verdict as check_power_assoc up to its id; kept so flexibility has its own row.
    """
    return diagonal_associator_verdict(pi, f, check_id, "A3(f,f,f), shared with power_assoc")


def _alternative_cases(
    sp: StarProduct,
    pairs: Sequence[Tuple[Expr, Expr]],
    quadruples: Sequence[Tuple[Expr, Expr, Expr, Expr]],
    diagonal: Sequence[Expr],
):
    zero = Expr.zero()
    for a, b in pairs:
        yield A2_formula(sp, a, a, b), zero, (a, a, b)
        yield A2_formula(sp, a, b, b), zero, (a, b, b)
    for quadruple in quadruples:
        yield obstruction_O(sp, *quadruple), zero, quadruple
    if sp.bivector is not None:
        for f in diagonal:
            yield A3_cadabra(sp.bivector, f), zero, (f, f, f)


def check_alternative(
    sp: StarProduct,
    pairs: Sequence[Tuple[Expr, Expr]],
    quadruples: Sequence[Tuple[Expr, Expr, Expr, Expr]],
    diagonal: Sequence[Expr],
    check_id: str = "non_alternative",
) -> Verdict:
    """
    Search the witness set for a violation of alternativity.

    An alternative product has an alternating associator at every order; with
    symmetric B2 that forces A3 = 0, hence O = dA3 = 0. Three witness families:
    A2(a,a,b) / A2(a,b,b), the obstruction O, and the diagonal A3(f,f,f).
    """
    return verdict_over(check_id, _alternative_cases(sp, pairs, quadruples, diagonal))


def validate_monopole(sp: StarProduct) -> List[Verdict]:
    """
    The conditions of a monopole star product, one verdict each:
      1. A2(p1,p2,p3) = 0, which a monopole fails with witness -2/3 div B
      2. A2(q_i, x^I, x^J) = 0
      3. B1(q_i, A2(p1,p2,p3)) = 0
      4. A2 totally antisymmetric on coordinate triples
      5. B2^-(x^I, x^J) = 0
    """
    cache: Dict[Tuple[int, int, int], Expr] = {}

    def a2(i: int, j: int, k: int) -> Expr:
        key = (i, j, k)
        if key not in cache:
            cache[key] = A2_formula(sp, COORDINATES[i], COORDINATES[j], COORDINATES[k])
        return cache[key]

    p1, p2, p3 = (int(v) for v in MOMENTA)
    momentum_value = a2(p1, p2, p3)
    momenta = tuple(COORDINATES[v] for v in MOMENTA)
    zero = Expr.zero()

    first = compare("monopole_condition_1", momentum_value, zero, momenta).expecting(
        EXPECT_NONZERO, detail="monopole" if not momentum_value.is_zero else "associative-compatible field"
    )

    second = verdict_over(
        "monopole_condition_2",
        (
            (a2(q, j, k), zero, (COORDINATES[q], COORDINATES[j], COORDINATES[k]))
            for q in (int(v) for v in POSITIONS)
            for j in range(6)
            for k in range(6)
        ),
    )
    third = verdict_over(
        "monopole_condition_3",
        (
            (sp.B1(COORDINATES[q], momentum_value), zero, (COORDINATES[q],) + momenta)
            for q in (int(v) for v in POSITIONS)
        ),
    )
    fourth = verdict_over(
        "monopole_condition_4",
        (
            (a2(i, j, k) + swapped, zero, (COORDINATES[i], COORDINATES[j], COORDINATES[k]))
            for i in range(6)
            for j in range(6)
            for k in range(6)
            for swapped in (a2(j, i, k), a2(i, k, j))
        ),
    )
    b2 = sp.B2
    fifth = verdict_over(
        "monopole_condition_5",
        (
            ((b2(x, y) - b2(y, x)).scale(Fraction(1, 2)), zero, (x, y))
            for x in COORDINATES
            for y in COORDINATES
        ),
    )
    return [first, second, third, fourth, fifth]
