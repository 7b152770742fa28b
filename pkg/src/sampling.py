#!/usr/bin/env python3
"""
Seeded generators for fuzzing: random Exprs, q-polynomials and operators.

Every generator takes a random.Random so that a run is reproducible from its
seed; rng_for derives independent named streams from one base seed.
"""

import random
from fractions import Fraction
from typing import List, Sequence, Tuple

from src.expr_core import POSITIONS, Expr, VarIndex, expr_sum, scalar
from src.operators import BiDiffOp, DiffOp

ALPHA_CHOICES = (Fraction(-1), Fraction(-1, 2), Fraction(1, 2), Fraction(1), Fraction(2))


def rng_for(seed: int, label: str) -> random.Random:
    """Independent deterministic stream for (seed, label)."""
    return random.Random(f"{seed}:{label}")


def _nonzero_int(rng: random.Random, bound: int = 3) -> int:
    return rng.choice([k for k in range(-bound, bound + 1) if k])


def _random_exponents(rng: random.Random, variables: Sequence[VarIndex], max_degree: int) -> List[int]:
    exponents = [0] * 6
    for _ in range(rng.randint(0, max_degree)):
        exponents[rng.choice(variables)] += 1
    return exponents


def random_expr(
    rng: random.Random,
    max_terms: int = 4,
    max_degree: int = 3,
    allow_exp: bool = False,
    allow_complex: bool = True,
) -> Expr:
    """Random nonzero Expr in all six coordinates."""
    while True:
        terms = []
        for _ in range(rng.randint(1, max_terms)):
            imag = _nonzero_int(rng) if allow_complex and rng.random() < 0.25 else 0
            coefficient = scalar(_nonzero_int(rng), imag)
            alpha = (0, 0, 0)
            if allow_exp and rng.random() < 0.3:
                alpha = tuple(rng.choice((0,) + ALPHA_CHOICES) for _ in range(3))
            terms.append(Expr.monomial(_random_exponents(rng, list(VarIndex), max_degree), coefficient, alpha))
        result = expr_sum(terms)
        if not result.is_zero:
            return result


def random_q_poly(rng: random.Random, max_degree: int = 2, max_terms: int = 3) -> Expr:
    """Random nonzero real polynomial in q1, q2, q3."""
    while True:
        result = expr_sum(
            Expr.monomial(_random_exponents(rng, list(POSITIONS), max_degree), _nonzero_int(rng))
            for _ in range(rng.randint(1, max_terms))
        )
        if not result.is_zero:
            return result


def random_multi_index(rng: random.Random, min_size: int, max_size: int) -> Tuple[VarIndex, ...]:
    return tuple(sorted(rng.choice(list(VarIndex)) for _ in range(rng.randint(min_size, max_size))))


def random_bidiff_op(
    rng: random.Random,
    max_left: int = 3,
    max_right: int = 3,
    n_terms: int = 3,
    coefficient_degree: int = 2,
    name: str = "B3",
) -> BiDiffOp:
    """Random operator vanishing on constants, degrees <= (max_left, max_right)."""
    while True:
        op = BiDiffOp(
            (
                (
                    random_q_poly(rng, coefficient_degree),
                    random_multi_index(rng, 1, max_left),
                    random_multi_index(rng, 1, max_right),
                )
                for _ in range(n_terms)
            ),
            name=name,
        )
        if not op.is_zero:
            return op


def random_diff_op(rng: random.Random, max_order: int = 2, n_terms: int = 2, name: str = "D1") -> DiffOp:
    """Random gauge operator D1 of order <= max_order, vanishing on constants."""
    while True:
        op = DiffOp(
            ((random_q_poly(rng, 2), random_multi_index(rng, 1, max_order)) for _ in range(n_terms)),
            name=name,
        )
        if not op.is_zero:
            return op


def random_antisymmetric_22(rng: random.Random, name: str = "P") -> BiDiffOp:
    """c (d_L f d_R g - d_R f d_L g) with |L| = |R| = 2 and L != R."""
    left = random_multi_index(rng, 2, 2)
    right = left
    while right == left:
        right = random_multi_index(rng, 2, 2)
    c = Expr.constant(Fraction(_nonzero_int(rng), rng.randint(1, 3)))
    return BiDiffOp([(c, left, right), (-c, right, left)], name=name)
