#!/usr/bin/env python3
"""
Truncated lambda-series and the monopole Weyl star product.

    f * g = sum_{j=0..N} lambda^j B_j(f, g),   B_0(f, g) = f g,   N <= 3

with lambda = i hbar / 2 kept symbolic: a series is just its coefficient
tuple. B_1 is the twisted Poisson bracket, B_2 the Weyl second coefficient,
B_3 is pluggable (zero by default).
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Tuple, Union

from src.errors import SeriesOrderError
from src.expr_core import Expr, ScalarLike, expr_sum, format_expr
from src.operators import BiDiffOp, Cochain, DiffOp
from src.structure import Bivector

logger = logging.getLogger(__name__)

MAX_ORDER = 3
LAMBDA_HBAR_RELATION = "lambda = i*hbar/2"
B1_NORMALIZATION = "B1 = {.,.}"


# =============================================================================
# SERIES
# =============================================================================


@dataclass(frozen=True)
class LambdaSeries:
    """sum_j coeffs[j] lambda^j, truncated after lambda^order."""

    coeffs: Tuple[Expr, ...]

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def lift(cls, expr: Expr, order: int) -> "LambdaSeries":
        return cls((expr,) + (Expr.zero(),) * order)

    @classmethod
    def zero(cls, order: int) -> "LambdaSeries":
        return cls((Expr.zero(),) * (order + 1))

    def coefficient(self, j: int) -> Expr:
        return self.coeffs[j]

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero for c in self.coeffs)

    def _check(self, other: "LambdaSeries") -> None:
        if other.order != self.order:
            raise SeriesOrderError(f"series orders differ: {self.order} vs {other.order}")

    def __add__(self, other: "LambdaSeries") -> "LambdaSeries":
        self._check(other)
        return LambdaSeries(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "LambdaSeries") -> "LambdaSeries":
        self._check(other)
        return LambdaSeries(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "LambdaSeries":
        return LambdaSeries(tuple(-c for c in self.coeffs))

    def scale(self, value: ScalarLike) -> "LambdaSeries":
        return LambdaSeries(tuple(c.scale(value) for c in self.coeffs))

    def __str__(self) -> str:
        return format_series(self)


SeriesLike = Union[Expr, LambdaSeries]


def as_series(value: SeriesLike, order: int) -> LambdaSeries:
    if isinstance(value, LambdaSeries):
        if value.order != order:
            raise SeriesOrderError(f"series of order {value.order} used with a product of order {order}")
        return value
    return LambdaSeries.lift(value, order)


def format_series(series: LambdaSeries) -> str:
    """c0+(c1)*lambda+(c2)*lambda^2..., zero coefficients omitted."""
    parts = []
    for j, c in enumerate(series.coeffs):
        if c.is_zero:
            continue
        if j == 0:
            parts.append(format_expr(c))
        else:
            power = "lambda" if j == 1 else f"lambda^{j}"
            parts.append(f"({format_expr(c)})*{power}")
    return "+".join(parts) if parts else "0"


# =============================================================================
# WEYL COEFFICIENTS
# =============================================================================


def weyl_B1(pi: Bivector) -> BiDiffOp:
    """The bracket as a (1,1) operator: Pi^{IJ} d_I f d_J g."""
    return BiDiffOp(((value, (i,), (j,)) for i, j, value in pi.nonzero_entries()), name="B1")


def weyl_B2(pi: Bivector) -> BiDiffOp:
    """
    Second Weyl coefficient for the real bivector:

        1/2 Pi^{IJ} Pi^{KL} (d_I d_K f)(d_J d_L g)
      + 1/3 Pi^{IJ} (d_J Pi^{KL}) ((d_I d_K f)(d_L g) - (d_K f)(d_I d_L g))

    Symmetric, no (1,1) part, Moyal for constant B.
    """
    entries = pi.nonzero_entries()
    terms = []
    for i, j, pij in entries:
        for k, l, pkl in entries:
            terms.append(((pij * pkl).scale(Fraction(1, 2)), (i, k), (j, l)))
    for i, j, pij in entries:
        for k, l, dpkl in pi.derivative_entries(j):
            c = (pij * dpkl).scale(Fraction(1, 3))
            terms.append((c, (i, k), (l,)))
            terms.append((-c, (k,), (i, l)))
    return BiDiffOp(terms, name="B2")


# =============================================================================
# STAR PRODUCT
# =============================================================================


@dataclass(frozen=True)
class StarProduct:
    """Coefficients B_1..B_N (B_0 is the pointwise product)."""

    coefficients: Tuple[Cochain, ...]
    bivector: Optional[Bivector] = None

    def __post_init__(self):
        if len(self.coefficients) > MAX_ORDER:
            raise SeriesOrderError(f"order {len(self.coefficients)} exceeds the supported maximum {MAX_ORDER}")
        for j, c in enumerate(self.coefficients, start=1):
            if c.arity != 2:
                raise SeriesOrderError(f"coefficient B{j} has arity {c.arity}")

    @property
    def order(self) -> int:
        return len(self.coefficients)

    def coefficient(self, j: int) -> Cochain:
        if not 1 <= j <= self.order:
            raise SeriesOrderError(f"no coefficient B{j} in a product of order {self.order}")
        return self.coefficients[j - 1]

    @property
    def B1(self) -> Cochain:
        return self.coefficient(1)

    @property
    def B2(self) -> Cochain:
        return self.coefficient(2)

    @property
    def B3(self) -> Cochain:
        return self.coefficient(3)

    def with_coefficient(self, j: int, op: Cochain) -> "StarProduct":
        coefficients = list(self.coefficients)
        coefficients[j - 1] = op
        return StarProduct(tuple(coefficients), self.bivector)


def weyl_star_product(pi: Bivector, b3: Optional[Cochain] = None, order: int = MAX_ORDER) -> StarProduct:
    """Weyl star product with B_3 = b3 (zero when omitted), truncated at `order`."""
    if not 0 <= order <= MAX_ORDER:
        raise SeriesOrderError(f"order must be between 0 and {MAX_ORDER}, got {order}")
    b3 = b3 if b3 is not None else BiDiffOp(name="B3")
    coefficients = (weyl_B1(pi), weyl_B2(pi), b3)[:order]
    return StarProduct(coefficients, pi)


def star_multiply(sp: StarProduct, f: SeriesLike, g: SeriesLike) -> LambdaSeries:
    """Cauchy product: [f*g]_j = sum_{a+b+c=j} B_c(f_a, g_b)."""
    f = as_series(f, sp.order)
    g = as_series(g, sp.order)
    coeffs = []
    for j in range(sp.order + 1):
        pieces = []
        for a in range(j + 1):
            fa = f.coeffs[a]
            if fa.is_zero:
                continue
            for b in range(j + 1 - a):
                gb = g.coeffs[b]
                if gb.is_zero:
                    continue
                c = j - a - b
                pieces.append(fa * gb if c == 0 else sp.coefficient(c)(fa, gb))
        coeffs.append(expr_sum(pieces))
    return LambdaSeries(tuple(coeffs))


def commutator(sp: StarProduct, f: SeriesLike, g: SeriesLike) -> LambdaSeries:
    """f * g - g * f."""
    return star_multiply(sp, f, g) - star_multiply(sp, g, f)


def jordan(sp: StarProduct, f: SeriesLike, g: SeriesLike) -> LambdaSeries:
    """(f * g + g * f) / 2."""
    return (star_multiply(sp, f, g) + star_multiply(sp, g, f)).scale(Fraction(1, 2))


def star_jacobiator(sp: StarProduct, f: SeriesLike, g: SeriesLike, h: SeriesLike) -> LambdaSeries:
    """[f,[g,h]] + [g,[h,f]] + [h,[f,g]] for the star commutator."""
    return (
        commutator(sp, f, commutator(sp, g, h))
        + commutator(sp, g, commutator(sp, h, f))
        + commutator(sp, h, commutator(sp, f, g))
    )


# =============================================================================
# GAUGE TRANSFORMATIONS
# =============================================================================


class GaugeMap:
    """D = id + lambda D1 acting on series, with its formal inverse."""

    def __init__(self, sp: StarProduct, d1: Cochain):
        if d1.arity != 1:
            raise SeriesOrderError(f"gauge map needs a 1-cochain, got arity {d1.arity}")
        self.sp = sp
        self.d1 = d1
        self.product = lru_cache(maxsize=4096)(self._product)

    def apply(self, series: LambdaSeries) -> LambdaSeries:
        coeffs = [series.coeffs[0]]
        for j in range(1, series.order + 1):
            coeffs.append(series.coeffs[j] + self.d1(series.coeffs[j - 1]))
        return LambdaSeries(tuple(coeffs))

    def inverse(self, f: Expr) -> LambdaSeries:
        """D^{-1} f = sum_n (-lambda D1)^n f, truncated."""
        coeffs = [f]
        for _ in range(self.sp.order):
            coeffs.append(-self.d1(coeffs[-1]))
        return LambdaSeries(tuple(coeffs))

    def _product(self, f: Expr, g: Expr) -> LambdaSeries:
        return self.apply(star_multiply(self.sp, self.inverse(f), self.inverse(g)))


class GaugedCoefficient(Cochain):
    """B'_j(f, g) = [D(D^{-1} f * D^{-1} g)]_j."""

    arity = 2

    def __init__(self, gauge: GaugeMap, j: int):
        self.gauge = gauge
        self.j = j
        self.name = f"B{j}'"

    def evaluate(self, f: Expr, g: Expr) -> Expr:
        return self.gauge.product(f, g).coeffs[self.j]


def gauge_transform(sp: StarProduct, d1: Cochain) -> StarProduct:
    """
    Equivalent product *' with D(f) *' D(g) = D(f * g), D = id + lambda D1.

    Args:
        sp: Star product to transform
        d1: Differential operator vanishing on constants

    Returns:
        The transformed product; sp itself when d1 is the zero operator
    """
    if isinstance(d1, DiffOp) and d1.is_zero:
        return sp
    gauge = GaugeMap(sp, d1)
    logger.debug(f"gauge transform of order {sp.order} by {d1.name}")
    return StarProduct(tuple(GaugedCoefficient(gauge, j) for j in range(1, sp.order + 1)), sp.bivector)
