#!/usr/bin/env python3
"""
Magnetic fields, the twisted Poisson bivector they induce on T*R^3, the
classical bracket and its Jacobiator.

Conventions (printed in every report):
    Pi^{q_i p_j} = +delta_ij,  Pi^{p_i q_j} = -delta_ij,  Pi^{p_i p_j} = eps_ijk B^k
    {f, g} = sum_{I,J} Pi^{IJ} d_I f d_J g      (full double sum)
so {q_i, p_j} = delta_ij, {p_1, p_2} = B^3 and {p_i, g(q)} = -d_i g.
The electric charge is fixed to 1.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

from sympy import LeviCivita

from src.errors import FieldError
from src.expr_core import (
    Expr,
    MOMENTA,
    POSITIONS,
    VarIndex,
    derivative,
    expr_sum,
    parse_expr,
)

logger = logging.getLogger(__name__)

BRACKET_CONVENTION = "{q_i,p_j}=+delta_ij; Pi^{p_i p_j}=eps_ijk B^k; {f,g}=sum_IJ Pi^IJ d_I f d_J g"

MONOPOLE = "monopole"
ASSOCIATIVE_COMPATIBLE = "associative-compatible field"


@dataclass(frozen=True)
class FieldConfig:
    """Polynomial magnetic field B(q); the divergence is computed once at construction."""

    b1: Expr
    b2: Expr
    b3: Expr
    divergence: Expr = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for name, component in zip(("b1", "b2", "b3"), self.components):
            if component.depends_on_momenta():
                raise FieldError(f"field component {name}={component} depends on momenta")
        divergence = expr_sum(
            component.partial(axis) for axis, component in zip(POSITIONS, self.components)
        )
        object.__setattr__(self, "divergence", divergence)

    @classmethod
    def from_strings(cls, b1: str, b2: str, b3: str) -> "FieldConfig":
        return cls(parse_expr(b1), parse_expr(b2), parse_expr(b3))

    @property
    def components(self) -> Tuple[Expr, Expr, Expr]:
        return (self.b1, self.b2, self.b3)

    def component(self, axis: int) -> Expr:
        return self.components[axis - 1]

    @property
    def is_monopole(self) -> bool:
        return not self.divergence.is_zero

    @property
    def has_constant_density(self) -> bool:
        return self.divergence.is_constant

    @property
    def classification(self) -> str:
        return MONOPOLE if self.is_monopole else ASSOCIATIVE_COMPATIBLE


def monopole_density(cfg: FieldConfig) -> Expr:
    """div B = d_1 B^1 + d_2 B^2 + d_3 B^3."""
    return cfg.divergence


def levi_civita(i: int, j: int, k: int) -> int:
    return int(LeviCivita(i, j, k))


class Bivector:
    """Antisymmetric 6x6 array Pi^{IJ} of q-dependent Exprs."""

    def __init__(self, entries: Sequence[Sequence[Expr]]):
        rows = tuple(tuple(row) for row in entries)
        if len(rows) != 6 or any(len(row) != 6 for row in rows):
            raise ValueError("bivector needs a 6x6 array of entries")
        for i in VarIndex:
            for j in VarIndex:
                if rows[i][j] != -rows[j][i]:
                    raise ValueError(f"bivector is not antisymmetric at ({i.symbol}, {j.symbol})")
                if rows[i][j].depends_on_momenta():
                    raise ValueError(f"bivector entry ({i.symbol}, {j.symbol}) depends on momenta")
        self._entries = rows
        self._nonzero = tuple(
            (i, j, rows[i][j]) for i in VarIndex for j in VarIndex if not rows[i][j].is_zero
        )
        table: Dict[VarIndex, List[Tuple[VarIndex, VarIndex, Expr]]] = {v: [] for v in VarIndex}
        for i, j, value in self._nonzero:
            for v in VarIndex:
                d = value.partial(v)
                if not d.is_zero:
                    table[v].append((i, j, d))
        self._derivatives = {v: tuple(rows_) for v, rows_ in table.items()}

    @classmethod
    def from_field(cls, cfg: FieldConfig) -> "Bivector":
        zero = Expr.zero()
        entries = [[zero] * 6 for _ in range(6)]
        for axis in (1, 2, 3):
            q, p = VarIndex.position(axis), VarIndex.momentum(axis)
            entries[q][p] = Expr.one()
            entries[p][q] = -Expr.one()
        for i in (1, 2, 3):
            for j in (1, 2, 3):
                value = expr_sum(
                    cfg.component(k).scale(levi_civita(i, j, k)) for k in (1, 2, 3) if k not in (i, j)
                )
                entries[VarIndex.momentum(i)][VarIndex.momentum(j)] = value
        return cls(entries)

    def entry(self, i: VarIndex, j: VarIndex) -> Expr:
        return self._entries[i][j]

    def nonzero_entries(self) -> Tuple[Tuple[VarIndex, VarIndex, Expr], ...]:
        """All (I, J, Pi^{IJ}) with Pi^{IJ} != 0, in index order."""
        return self._nonzero

    def derivative_entries(self, v: VarIndex) -> Tuple[Tuple[VarIndex, VarIndex, Expr], ...]:
        """All (N, O, d_v Pi^{NO}) with a nonzero derivative."""
        return self._derivatives[v]


def bracket(pi: Bivector, f: Expr, g: Expr) -> Expr:
    """Twisted Poisson bracket {f, g}; antisymmetric bi-derivation."""
    if f.is_constant or g.is_constant:
        return Expr.zero()
    return expr_sum(
        value * derivative(f, (i,)) * derivative(g, (j,))
        for i, j, value in pi.nonzero_entries()
    )


def jacobiator(pi: Bivector, f: Expr, g: Expr, h: Expr) -> Expr:
    """{f,{g,h}} + {h,{f,g}} + {g,{h,f}}."""
    return (
        bracket(pi, f, bracket(pi, g, h))
        + bracket(pi, h, bracket(pi, f, g))
        + bracket(pi, g, bracket(pi, h, f))
    )


def momentum_jacobiator(pi: Bivector) -> Expr:
    return jacobiator(pi, *(Expr.var(p) for p in MOMENTA))
