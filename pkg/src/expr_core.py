#!/usr/bin/env python3
"""
Exact phase-space functions on T*R^3.

An Expr is a finite sum of Gaussian-rational multiples of monomials in
(q1, q2, q3, p1, p2, p3), each optionally carrying a momentum exponential
exp(i*(a1*p1 + a2*p2 + a3*p3)) with rational a_k. Internally the terms are
grouped by exponent vector alpha; the polynomial attached to each alpha is a
sparse sympy ring element over QQ_I. Products add alpha vectors, so the class
is closed under multiplication and partial differentiation.

Also houses the text grammar every external input flows through:

    expr     := ["+"|"-"] term (("+"|"-") term)*
    term     := factor (("*"|"/") factor)*         "/" only by a nonzero constant
    factor   := base ("^" nonneg_int)?
    base     := int | "i" | q1..q3 | p1..p3 | "(" expr ")"
              | "exp" "(" "i" "*" "(" linp ")" ")"
    linp     := ["+"|"-"] rational "*" pvar (("+"|"-") rational "*" pvar)*
    rational := int ("/" posint)?

format_expr prints the same grammar in canonical term order, so
parse_expr(format_expr(e)) == e.
"""

import re
import logging
from enum import IntEnum
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Set, Tuple, Union

from sympy.polys.domains import QQ, QQ_I
from sympy.polys.domains.gaussiandomains import GaussianRational
from sympy.polys.rings import PolyElement, ring

from src.errors import ParseError

logger = logging.getLogger(__name__)

# =============================================================================
# SCALARS
# =============================================================================

Scalar = GaussianRational
RationalLike = Union[int, Fraction]
ScalarLike = Union[Scalar, int, Fraction]


def scalar(re: RationalLike = 0, im: RationalLike = 0) -> Scalar:
    """Build the Gaussian rational re + im*i."""
    re, im = Fraction(re), Fraction(im)
    return QQ_I(QQ(re.numerator, re.denominator), QQ(im.numerator, im.denominator))


def as_scalar(value: ScalarLike) -> Scalar:
    if isinstance(value, GaussianRational):
        return value
    return scalar(value)


def _to_fraction(value) -> Fraction:
    return Fraction(int(value.numerator), int(value.denominator))


def scalar_parts(value: Scalar) -> Tuple[Fraction, Fraction]:
    """Real and imaginary parts as Fractions."""
    return _to_fraction(value.x), _to_fraction(value.y)


def scalar_inverse(value: Scalar) -> Scalar:
    re, im = scalar_parts(value)
    norm = re * re + im * im
    if norm == 0:
        raise ZeroDivisionError("inverse of the zero scalar")
    return scalar(re / norm, -im / norm)


def format_scalar(value: Scalar) -> str:
    re, im = scalar_parts(value)
    if im == 0:
        return str(re)
    if re == 0:
        return "i" if im == 1 else ("-i" if im == -1 else f"{im}*i")
    imag = "i" if abs(im) == 1 else f"{abs(im)}*i"
    return f"({re}{'-' if im < 0 else '+'}{imag})"


ZERO = scalar(0)
ONE = scalar(1)
IMAG_UNIT = scalar(0, 1)

# =============================================================================
# VARIABLES
# =============================================================================


class VarIndex(IntEnum):
    """Canonical linear coordinates x^I of T*R^3, ordered q1, q2, q3, p1, p2, p3."""

    Q1 = 0
    Q2 = 1
    Q3 = 2
    P1 = 3
    P2 = 4
    P3 = 5

    @property
    def is_position(self) -> bool:
        return self.value < 3

    @property
    def is_momentum(self) -> bool:
        return self.value >= 3

    @property
    def kind(self) -> str:
        return "position" if self.is_position else "momentum"

    @property
    def axis(self) -> int:
        return self.value % 3 + 1

    @property
    def symbol(self) -> str:
        return f"{'q' if self.is_position else 'p'}{self.axis}"

    @classmethod
    def position(cls, axis: int) -> "VarIndex":
        return cls(axis - 1)

    @classmethod
    def momentum(cls, axis: int) -> "VarIndex":
        return cls(axis + 2)


POSITIONS: Tuple[VarIndex, ...] = (VarIndex.Q1, VarIndex.Q2, VarIndex.Q3)
MOMENTA: Tuple[VarIndex, ...] = (VarIndex.P1, VarIndex.P2, VarIndex.P3)
VAR_BY_NAME: Dict[str, VarIndex] = {v.symbol: v for v in VarIndex}

# Multi-indices are sorted tuples of VarIndex (multisets of derivative slots)
MultiIndex = Tuple[VarIndex, ...]

_RING, *_GENS = ring("q1,q2,q3,p1,p2,p3", QQ_I)

Alpha = Tuple[Fraction, Fraction, Fraction]
ZERO_ALPHA: Alpha = (Fraction(0), Fraction(0), Fraction(0))
Monomial = Tuple[int, int, int, int, int, int]


class Term(NamedTuple):
    alpha: Alpha
    monomial: Monomial
    coefficient: Scalar


# =============================================================================
# EXPR
# =============================================================================


class Expr:
    """Immutable, canonical exact function of (q, p)."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Optional[Dict[Alpha, PolyElement]] = None):
        # Polynomials handed in here are owned by the Expr and never mutated
        self._terms: Dict[Alpha, PolyElement] = {
            alpha: poly for alpha, poly in (terms or {}).items() if poly
        }
        self._hash: Optional[int] = None

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zero(cls) -> "Expr":
        return cls()

    @classmethod
    def one(cls) -> "Expr":
        return cls.constant(1)

    @classmethod
    def constant(cls, value: ScalarLike) -> "Expr":
        return cls({ZERO_ALPHA: _RING.ground_new(as_scalar(value))})

    @classmethod
    def var(cls, v: VarIndex) -> "Expr":
        return cls({ZERO_ALPHA: _GENS[v]})

    @classmethod
    def exp_momentum(cls, alpha: Sequence[RationalLike]) -> "Expr":
        """exp(i*(alpha . p))."""
        key = tuple(Fraction(a) for a in alpha)
        if len(key) != 3:
            raise ValueError(f"alpha needs three components, got {len(key)}")
        return cls({key: _RING.one})

    @classmethod
    def monomial(
        cls,
        exponents: Sequence[int],
        coefficient: ScalarLike = 1,
        alpha: Sequence[RationalLike] = ZERO_ALPHA,
    ) -> "Expr":
        """coefficient * prod x_I^exponents[I] * exp(i*alpha.p)."""
        key = tuple(Fraction(a) for a in alpha)
        return cls({key: _RING.term_new(tuple(int(e) for e in exponents), as_scalar(coefficient))})

    # -- queries --------------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    @property
    def is_constant(self) -> bool:
        if not self._terms:
            return True
        if set(self._terms) != {ZERO_ALPHA}:
            return False
        return all(not any(monom) for monom in self._terms[ZERO_ALPHA].keys())

    def constant_value(self) -> Scalar:
        if not self.is_constant:
            raise ValueError(f"{self} is not constant")
        if not self._terms:
            return ZERO
        return self._terms[ZERO_ALPHA].get((0,) * 6, ZERO)

    def has_exp(self) -> bool:
        return any(alpha != ZERO_ALPHA for alpha in self._terms)

    def variables(self) -> Set[VarIndex]:
        found: Set[VarIndex] = set()
        for alpha, poly in self._terms.items():
            for axis, a in enumerate(alpha, start=1):
                if a:
                    found.add(VarIndex.momentum(axis))
            for monom in poly.keys():
                found.update(VarIndex(i) for i, e in enumerate(monom) if e)
        return found

    def depends_on_positions(self) -> bool:
        return any(v.is_position for v in self.variables())

    def depends_on_momenta(self) -> bool:
        return any(v.is_momentum for v in self.variables())

    def terms(self) -> Iterator[Term]:
        """Terms in canonical order: (alpha, q exponents, p exponents)."""
        for alpha in sorted(self._terms):
            poly = self._terms[alpha]
            for monom in sorted(poly.keys()):
                yield Term(alpha, monom, poly[monom])

    def __len__(self) -> int:
        return sum(len(poly) for poly in self._terms.values())

    # -- arithmetic -----------------------------------------------------------

    @staticmethod
    def _coerce(other) -> Optional["Expr"]:
        if isinstance(other, Expr):
            return other
        if isinstance(other, (int, Fraction, GaussianRational)):
            return Expr.constant(other)
        return None

    def __add__(self, other) -> "Expr":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        terms = dict(self._terms)
        for alpha, poly in other._terms.items():
            terms[alpha] = terms[alpha] + poly if alpha in terms else poly
        return Expr(terms)

    __radd__ = __add__

    def __neg__(self) -> "Expr":
        return Expr({alpha: -poly for alpha, poly in self._terms.items()})

    def __sub__(self, other) -> "Expr":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Expr":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def scale(self, value: ScalarLike) -> "Expr":
        value = as_scalar(value)
        if not value:
            return Expr()
        return Expr({alpha: poly * value for alpha, poly in self._terms.items()})

    def __mul__(self, other) -> "Expr":
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self.scale(other)
        if not isinstance(other, Expr):
            return NotImplemented
        terms: Dict[Alpha, PolyElement] = {}
        for alpha_a, poly_a in self._terms.items():
            for alpha_b, poly_b in other._terms.items():
                alpha = (alpha_a[0] + alpha_b[0], alpha_a[1] + alpha_b[1], alpha_a[2] + alpha_b[2])
                product = poly_a * poly_b
                terms[alpha] = terms[alpha] + product if alpha in terms else product
        return Expr(terms)

    __rmul__ = __mul__

    def __pow__(self, power: int) -> "Expr":
        if not isinstance(power, int) or power < 0:
            return NotImplemented
        result = Expr.one()
        for _ in range(power):
            result = result * self
        return result

    def partial(self, v: VarIndex) -> "Expr":
        """Exact derivative with respect to x^v."""
        v = VarIndex(v)
        gen = _GENS[v]
        terms: Dict[Alpha, PolyElement] = {}
        for alpha, poly in self._terms.items():
            derived = poly.diff(gen)
            if v.is_momentum and alpha[v.axis - 1]:
                derived = derived + poly * scalar(0, alpha[v.axis - 1])
            terms[alpha] = derived
        return Expr(terms)

    # -- identity -------------------------------------------------------------

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __str__(self) -> str:
        return format_expr(self)

    def __repr__(self) -> str:
        return f"Expr('{format_expr(self)}')"


# =============================================================================
# MODULE-LEVEL OPERATIONS
# =============================================================================


def add(a: Expr, b: Expr) -> Expr:
    return a + b


def mul(a: Expr, b: Expr) -> Expr:
    """Pointwise (classical) product B0(a, b)."""
    return a * b


def scale(s: ScalarLike, a: Expr) -> Expr:
    return a.scale(s)


def partial(a: Expr, v: VarIndex) -> Expr:
    return a.partial(v)


@lru_cache(maxsize=200_000)
def derivative(expr: Expr, index: MultiIndex) -> Expr:
    """Iterated partial derivative over a multi-index (order irrelevant)."""
    if not index:
        return expr
    return derivative(expr, index[:-1]).partial(index[-1])


def expr_sum(items: Iterable[Expr]) -> Expr:
    """Sum many Exprs with a single accumulator."""
    acc: Dict[Alpha, PolyElement] = {}
    for item in items:
        for alpha, poly in item._terms.items():
            acc[alpha] = acc[alpha] + poly if alpha in acc else poly
    return Expr(acc)


def proportionality(a: Expr, b: Expr) -> Optional[Scalar]:
    """Scalar c with a == c*b, or None when b is zero or no such c exists."""
    if b.is_zero:
        return None
    lead = next(b.terms())
    poly = a._terms.get(lead.alpha)
    numerator = poly.get(lead.monomial, ZERO) if poly is not None else ZERO
    ratio = numerator * scalar_inverse(lead.coefficient)
    return ratio if a == b.scale(ratio) else None


def coordinate(v: VarIndex) -> Expr:
    return Expr.var(v)


COORDINATES: Tuple[Expr, ...] = tuple(Expr.var(v) for v in VarIndex)

# =============================================================================
# PRINTING
# =============================================================================


def _format_alpha(alpha: Alpha) -> str:
    parts: List[str] = []
    for axis, a in enumerate(alpha, start=1):
        if not a:
            continue
        sign = "-" if a < 0 else ("+" if parts else "")
        parts.append(f"{sign}{abs(a)}*p{axis}")
    return f"exp(i*({''.join(parts)}))"


def _format_term(term: Term) -> Tuple[int, str]:
    factors: List[str] = []
    for v, power in zip(VarIndex, term.monomial):
        if power == 1:
            factors.append(v.symbol)
        elif power > 1:
            factors.append(f"{v.symbol}^{power}")
    if term.alpha != ZERO_ALPHA:
        factors.append(_format_alpha(term.alpha))

    re, im = scalar_parts(term.coefficient)
    sign = 1
    if im == 0:
        sign = -1 if re < 0 else 1
        if abs(re) != 1 or not factors:
            factors.insert(0, str(abs(re)))
    elif re == 0:
        sign = -1 if im < 0 else 1
        factors.insert(0, "i")
        if abs(im) != 1:
            factors.insert(0, str(abs(im)))
    else:
        factors.insert(0, format_scalar(term.coefficient))
    return sign, "*".join(factors)


def format_expr(expr: Expr) -> str:
    """Canonical text form, re-parseable by parse_expr."""
    if expr.is_zero:
        return "0"
    text = ""
    for position, term in enumerate(expr.terms()):
        sign, body = _format_term(term)
        if sign < 0:
            text += "-"
        elif position:
            text += "+"
        text += body
    return text


# =============================================================================
# PARSING
# =============================================================================

_TOKEN_RE = re.compile(r"(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()])")
_EXP_SHAPE = "exp argument must have the form i*(rational linear combination of p1, p2, p3)"


class _Token(NamedTuple):
    kind: str
    text: str
    position: int


def _tokenize(text: str) -> List[_Token]:
    tokens: List[_Token] = []
    position = 0
    while position < len(text):
        if text[position].isspace():
            position += 1
            continue
        match = _TOKEN_RE.match(text, position)
        if not match:
            raise ParseError(f"unexpected character {text[position]!r}", position, text)
        tokens.append(_Token(match.lastgroup, match.group(), position))
        position = match.end()
    return tokens


class _Parser:
    """Recursive-descent parser over the token list."""

    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.index = 0

    def _peek(self) -> Optional[_Token]:
        return self.tokens[self.index] if self.index < len(self.tokens) else None

    def _peek_op(self, *ops: str) -> bool:
        token = self._peek()
        return token is not None and token.kind == "op" and token.text in ops

    def _advance(self) -> _Token:
        token = self._peek()
        if token is None:
            raise ParseError("unexpected end of input", len(self.text), self.text)
        self.index += 1
        return token

    def _error(self, message: str, token: Optional[_Token] = None) -> ParseError:
        token = token or self._peek()
        position = token.position if token else len(self.text)
        return ParseError(message, position, self.text)

    def _expect(self, kind: str, text: str, message: str) -> _Token:
        token = self._peek()
        if token is None or token.kind != kind or token.text != text:
            raise self._error(message, token)
        return self._advance()

    def parse(self) -> Expr:
        if not self.tokens:
            raise ParseError("empty expression", 0, self.text)
        result = self._parse_sum()
        if self._peek() is not None:
            raise self._error("unexpected trailing input")
        return result

    def _parse_sum(self) -> Expr:
        negate = False
        if self._peek_op("+", "-"):
            negate = self._advance().text == "-"
        result = self._parse_term()
        if negate:
            result = -result
        while self._peek_op("+", "-"):
            op = self._advance()
            term = self._parse_term()
            result = result + term if op.text == "+" else result - term
        return result

    def _parse_term(self) -> Expr:
        result = self._parse_factor()
        while self._peek_op("*", "/"):
            op = self._advance()
            divisor_token = self._peek()
            value = self._parse_factor()
            if op.text == "*":
                result = result * value
                continue
            if not value.is_constant:
                raise self._error("division by a non-constant factor", divisor_token)
            if value.is_zero:
                raise self._error("division by zero", divisor_token)
            result = result.scale(scalar_inverse(value.constant_value()))
        return result

    def _parse_factor(self) -> Expr:
        base = self._parse_base()
        if self._peek_op("^"):
            self._advance()
            token = self._peek()
            if token is None or token.kind != "int":
                raise self._error("exponent must be a non-negative integer", token)
            self._advance()
            base = base ** int(token.text)
        return base

    def _parse_base(self) -> Expr:
        token = self._peek()
        if token is None:
            raise self._error("unexpected end of input")
        if token.kind == "int":
            self._advance()
            return Expr.constant(int(token.text))
        if token.kind == "name":
            if token.text == "i":
                self._advance()
                return Expr.constant(IMAG_UNIT)
            if token.text in VAR_BY_NAME:
                self._advance()
                return Expr.var(VAR_BY_NAME[token.text])
            if token.text == "exp":
                return self._parse_exp()
            raise self._error(f"unknown name {token.text!r}", token)
        if token.text == "(":
            self._advance()
            inner = self._parse_sum()
            self._expect("op", ")", "expected ')'")
            return inner
        raise self._error(f"unexpected token {token.text!r}", token)

    def _parse_exp(self) -> Expr:
        self._advance()
        self._expect("op", "(", _EXP_SHAPE)
        self._expect("name", "i", _EXP_SHAPE)
        self._expect("op", "*", _EXP_SHAPE)
        self._expect("op", "(", _EXP_SHAPE)
        alpha = [Fraction(0), Fraction(0), Fraction(0)]
        sign = 1
        if self._peek_op("+", "-"):
            sign = -1 if self._advance().text == "-" else 1
        while True:
            token = self._peek()
            coefficient = Fraction(1)
            if token is not None and token.kind == "int":
                coefficient = self._parse_rational()
                self._expect("op", "*", _EXP_SHAPE)
                token = self._peek()
            if token is None or token.kind != "name" or token.text not in ("p1", "p2", "p3"):
                raise self._error(_EXP_SHAPE, token)
            self._advance()
            alpha[VAR_BY_NAME[token.text].axis - 1] += sign * coefficient
            if not self._peek_op("+", "-"):
                break
            sign = -1 if self._advance().text == "-" else 1
        self._expect("op", ")", _EXP_SHAPE)
        self._expect("op", ")", _EXP_SHAPE)
        return Expr.exp_momentum(alpha)

    def _parse_rational(self) -> Fraction:
        numerator = int(self._advance().text)
        if not self._peek_op("/"):
            return Fraction(numerator)
        self._advance()
        token = self._peek()
        if token is None or token.kind != "int" or int(token.text) == 0:
            raise self._error("expected a positive integer denominator", token)
        self._advance()
        return Fraction(numerator, int(token.text))


def parse_expr(text: str) -> Expr:
    """
    Parse expression text into its canonical Expr.

    Args:
        text: Expression in the grammar documented at the top of this module

    Returns:
        Canonical Expr

    Raises:
        ParseError: with the offending character position
    """
    return _Parser(text).parse()
