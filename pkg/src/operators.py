#!/usr/bin/env python3
"""
Cochains on the classical algebra of phase-space functions.

A Cochain is an evaluation object: an n-linear map Expr^n -> Expr that can be
called, added, scaled and fed to the Hochschild coboundary. Bi-differential
operators (the star-product coefficients) and differential operators (gauge
maps) are the concrete coefficient-table cochains; everything else (associator
formulas, coboundaries, gauged coefficients) is a formula cochain.
"""

import logging
from abc import ABC, abstractmethod
from fractions import Fraction
from itertools import permutations
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Set, Tuple

from sympy.combinatorics import Permutation

from src.errors import ArityError, PreconditionError
from src.expr_core import (
    COORDINATES,
    MultiIndex,
    ONE,
    Expr,
    ScalarLike,
    VarIndex,
    as_scalar,
    derivative,
    expr_sum,
)

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)


def multi_index(indices: Iterable[VarIndex]) -> MultiIndex:
    """Canonical (sorted) multi-index."""
    return tuple(sorted(VarIndex(i) for i in indices))


def signed_permutations(n: int) -> List[Tuple[Tuple[int, ...], int]]:
    """All permutations of range(n) with their signs."""
    return [(perm, Permutation(list(perm)).signature()) for perm in permutations(range(n))]


# =============================================================================
# COCHAINS
# =============================================================================


class Cochain(ABC):
    """n-linear map on Exprs."""

    arity: int = 0
    name: str = "phi"

    def __call__(self, *args: Expr) -> Expr:
        if len(args) != self.arity:
            raise ArityError(f"{self.name} takes {self.arity} arguments, got {len(args)}")
        return self.evaluate(*args)

    @abstractmethod
    def evaluate(self, *args: Expr) -> Expr:
        ...

    def _combine(self, other: "Cochain", sign: int) -> "Cochain":
        if not isinstance(other, Cochain):
            return NotImplemented
        if other.arity != self.arity:
            raise ArityError(f"cannot combine cochains of arity {self.arity} and {other.arity}")
        return LinearCombination([(ONE, self), (as_scalar(sign), other)])

    def __add__(self, other: "Cochain") -> "Cochain":
        return self._combine(other, 1)

    def __sub__(self, other: "Cochain") -> "Cochain":
        return self._combine(other, -1)

    def scaled(self, value: ScalarLike) -> "Cochain":
        return LinearCombination([(as_scalar(value), self)])

    def __neg__(self) -> "Cochain":
        return self.scaled(-1)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name}, arity={self.arity})"


class FormulaCochain(Cochain):
    """Cochain defined by a Python callable."""

    def __init__(self, arity: int, fn: Callable[..., Expr], name: str = "phi"):
        self.arity = arity
        self.fn = fn
        self.name = name

    def evaluate(self, *args: Expr) -> Expr:
        return self.fn(*args)


class LinearCombination(Cochain):
    def __init__(self, parts: Sequence[Tuple[ScalarLike, Cochain]]):
        parts = [(as_scalar(s), c) for s, c in parts]
        arities = {c.arity for _, c in parts}
        if len(arities) != 1:
            raise ArityError(f"linear combination of mixed arities {sorted(arities)}")
        self.parts = tuple(parts)
        self.arity = arities.pop()
        self.name = "+".join(c.name for _, c in parts)

    def evaluate(self, *args: Expr) -> Expr:
        return expr_sum(c(*args).scale(s) for s, c in self.parts if s)


class Coboundary(Cochain):
    """
    Hochschild coboundary over the pointwise product:

        d phi(a0..an) = a0 phi(a1..an) + sum_{j=1..n} (-1)^j phi(.., a_{j-1} a_j, ..)
                        + (-1)^(n+1) phi(a0..a_{n-1}) an
    """

    def __init__(self, phi: Cochain):
        self.phi = phi
        self.arity = phi.arity + 1
        self.name = f"d({phi.name})"

    def evaluate(self, *args: Expr) -> Expr:
        n = self.phi.arity
        pieces = [args[0] * self.phi(*args[1:])]
        for j in range(1, n + 1):
            merged = args[: j - 1] + (args[j - 1] * args[j],) + args[j + 1:]
            pieces.append(self.phi(*merged).scale((-1) ** j))
        pieces.append((self.phi(*args[:-1]) * args[-1]).scale((-1) ** (n + 1)))
        return expr_sum(pieces)


def hochschild_d(phi: Cochain) -> Cochain:
    return Coboundary(phi)


# =============================================================================
# DIFFERENTIAL OPERATORS
# =============================================================================


def _check_coefficient(coefficient: Expr, where: str) -> None:
    if coefficient.depends_on_momenta():
        raise PreconditionError(f"{where} coefficient {coefficient} must depend on q only")


class DiffOp(Cochain):
    """sum_terms c(q) d_I f; the 1-cochains used as gauge maps."""

    arity = 1

    def __init__(self, terms: Iterable[Tuple[Expr, Sequence[VarIndex]]] = (), name: str = "D"):
        combined: Dict[MultiIndex, Expr] = {}
        for coefficient, index in terms:
            _check_coefficient(coefficient, name)
            key = multi_index(index)
            combined[key] = combined[key] + coefficient if key in combined else coefficient
        self.terms: Tuple[Tuple[Expr, MultiIndex], ...] = tuple(
            (c, key) for key, c in sorted(combined.items(), key=lambda kv: (len(kv[0]), kv[0])) if not c.is_zero
        )
        self.name = name

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def vanishes_on_constants(self) -> bool:
        return all(index for _, index in self.terms)

    def evaluate(self, f: Expr) -> Expr:
        return expr_sum(c * derivative(f, index) for c, index in self.terms)


class BiDiffOp(Cochain):
    """
    Bi-differential operator sum_terms c(q) (d_L f)(d_R g).

    Terms are stored combined and sorted by (|L|, |R|, L, R) so that two
    operators with the same action compare equal term by term.
    """

    arity = 2

    def __init__(
        self,
        terms: Iterable[Tuple[Expr, Sequence[VarIndex], Sequence[VarIndex]]] = (),
        name: str = "B",
    ):
        combined: Dict[Tuple[MultiIndex, MultiIndex], Expr] = {}
        for coefficient, left, right in terms:
            _check_coefficient(coefficient, name)
            key = (multi_index(left), multi_index(right))
            combined[key] = combined[key] + coefficient if key in combined else coefficient
        ordered = sorted(combined.items(), key=lambda kv: (len(kv[0][0]), len(kv[0][1]), kv[0]))
        self.terms: Tuple[Tuple[Expr, MultiIndex, MultiIndex], ...] = tuple(
            (c, left, right) for (left, right), c in ordered if not c.is_zero
        )
        self.name = name

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def degree_profile(self) -> Set[Tuple[int, int]]:
        return {(len(left), len(right)) for _, left, right in self.terms}

    def evaluate(self, f: Expr, g: Expr) -> Expr:
        pieces = []
        for coefficient, left, right in self.terms:
            df = derivative(f, left)
            if df.is_zero:
                continue
            dg = derivative(g, right)
            if dg.is_zero:
                continue
            pieces.append(coefficient * df * dg)
        return expr_sum(pieces)

    def swapped(self) -> "BiDiffOp":
        """(f, g) -> op(g, f)."""
        return BiDiffOp(((c, right, left) for c, left, right in self.terms), name=f"{self.name}^t")

    def scaled(self, value: ScalarLike) -> "BiDiffOp":
        value = as_scalar(value)
        return BiDiffOp(((c.scale(value), left, right) for c, left, right in self.terms), name=self.name)

    def __add__(self, other):
        if isinstance(other, BiDiffOp):
            return BiDiffOp(self.terms + other.terms, name=f"{self.name}+{other.name}")
        return super().__add__(other)

    def __sub__(self, other):
        if isinstance(other, BiDiffOp):
            return self + other.scaled(-1)
        return super().__sub__(other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BiDiffOp):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(self.terms)


def apply(op: BiDiffOp, f: Expr, g: Expr) -> Expr:
    return op(f, g)


def sym_part(op: BiDiffOp) -> BiDiffOp:
    result = (op + op.swapped()).scaled(HALF)
    result.name = f"{op.name}^+"
    return result


def antisym_part(op: BiDiffOp) -> BiDiffOp:
    result = (op - op.swapped()).scaled(HALF)
    result.name = f"{op.name}^-"
    return result


def antisymmetrize(phi: Cochain) -> Cochain:
    """Antisymmetric half of a 2-cochain, at operator level when possible."""
    if phi.arity != 2:
        raise ArityError(f"antisymmetrize needs a 2-cochain, got arity {phi.arity}")
    if isinstance(phi, BiDiffOp):
        return antisym_part(phi)
    return FormulaCochain(2, lambda f, g: (phi(f, g) - phi(g, f)).scale(HALF), name=f"{phi.name}^-")


def has_11_part(op: Cochain) -> bool:
    """
    True iff op has a term of bi-differential degree (1,1).

    BiDiffOps are read off their terms. Other 2-cochains are evaluated on
    coordinate pairs, where only the (1,1) part survives.
    """
    if isinstance(op, BiDiffOp):
        return (1, 1) in op.degree_profile()
    if op.arity != 2:
        raise ArityError(f"has_11_part needs a 2-cochain, got arity {op.arity}")
    return any(not op(x, y).is_zero for x in COORDINATES for y in COORDINATES)


def is_multilinear_on(phi: Cochain, first: Sequence[Expr], second: Sequence[Expr], factor: ScalarLike) -> Optional[int]:
    """
    Spot-check linearity of phi in every slot.

    Returns:
        None when phi(.., a + c*b, ..) == phi(.., a, ..) + c*phi(.., b, ..) in
        each slot, otherwise the first offending slot index
    """
    base = tuple(first)
    for slot in range(phi.arity):
        mixed = base[:slot] + (base[slot] + second[slot].scale(factor),) + base[slot + 1:]
        other = base[:slot] + (second[slot],) + base[slot + 1:]
        if phi(*mixed) != phi(*base) + phi(*other).scale(factor):
            return slot
    return None
