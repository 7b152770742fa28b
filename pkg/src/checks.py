"""
Named verification checks and the expected-status table.

Every check is a function of a CheckContext returning one or more Verdicts
whose `expected` field is already set, so a run "reproduces" exactly when
every verdict's status matches its expectation.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from src.associator import (
    EXPECT_NONZERO,
    EXPECT_PASS,
    FAIL,
    A2_antisym,
    A2_formula,
    A3_alternation,
    A3_antisym,
    A3_cadabra,
    A3_closed_form,
    Verdict,
    associator,
    associator_series,
    check_alternative,
    check_flexible2,
    check_flexible3,
    check_power_assoc,
    compare,
    dA3_two_ways,
    obstruction_O,
    obstruction_summands,
    pentagon_residual,
    validate_monopole,
    verdict_over,
)
from src.config import RunConfig
from src.errors import ConfigError
from src.expr_core import (
    COORDINATES,
    MOMENTA,
    POSITIONS,
    Expr,
    VarIndex,
    expr_sum,
    proportionality,
    scalar,
    scalar_parts,
)
from src.operators import BiDiffOp, Cochain, hochschild_d, signed_permutations
from src.sampling import (
    random_antisymmetric_22,
    random_bidiff_op,
    random_diff_op,
    random_expr,
    rng_for,
)
from src.star import (
    LambdaSeries,
    StarProduct,
    commutator,
    gauge_transform,
    star_jacobiator,
    star_multiply,
    weyl_star_product,
)
from src.structure import Bivector, FieldConfig, jacobiator, levi_civita

logger = logging.getLogger(__name__)

# Shapes of fuzz inputs; the nested checks use smaller ones
EXPR_SHAPE = dict(max_terms=3, max_degree=3, allow_exp=True)
NESTED_SHAPE = dict(max_terms=2, max_degree=2, allow_exp=True)

BOUNDED_ALPHAS: Tuple[Tuple[Fraction, Fraction, Fraction], ...] = (
    (Fraction(1), Fraction(1), Fraction(1)),
    (Fraction(1), Fraction(2), Fraction(1, 2)),
    (Fraction(-1), Fraction(1, 2), Fraction(2)),
)


# =============================================================================
# CONTEXT
# =============================================================================


@dataclass
class CheckContext:
    """Products and sample streams shared by the checks of one run."""

    config: RunConfig
    field: FieldConfig
    pi: Bivector
    sp: StarProduct
    sp_alt: StarProduct
    weyl: StarProduct
    _cache: Dict[Tuple[str, int], list] = field(default_factory=dict, repr=False)

    @property
    def order(self) -> int:
        return self.config.order

    def rng(self, label: str):
        return rng_for(self.config.seed, label)

    def exprs(self, label: str, count: int, size: int = 1, **shape) -> list:
        """count seeded random tuples of `size` Exprs, cached per label."""
        key = (label, count)
        if key not in self._cache:
            rng = self.rng(label)
            shape = shape or EXPR_SHAPE
            self._cache[key] = [tuple(random_expr(rng, **shape) for _ in range(size)) for _ in range(count)]
        return self._cache[key]


def random_b3(seed: int) -> BiDiffOp:
    return random_bidiff_op(rng_for(seed, "B3"), name=f"B3[random:{seed}]")


def build_context(config: RunConfig) -> CheckContext:
    pi = Bivector.from_field(config.field)
    mode = config.b3_mode
    primary = None if mode.primary_seed is None else random_b3(mode.primary_seed)
    secondary = random_b3(mode.secondary_seed)
    logger.info(f"B3 mode {mode}: primary seed {mode.primary_seed}, secondary seed {mode.secondary_seed}")
    return CheckContext(
        config=config,
        field=config.field,
        pi=pi,
        sp=weyl_star_product(pi, primary, config.order),
        sp_alt=weyl_star_product(pi, secondary, config.order),
        weyl=weyl_star_product(pi, None, config.order),
    )


# =============================================================================
# REGISTRY
# =============================================================================

Runner = Callable[[CheckContext], List[Verdict]]


@dataclass(frozen=True)
class CheckSpec:
    check_id: str
    description: str
    expected: str
    runner: Runner
    min_order: int = 2
    applies: Optional[Callable[[FieldConfig], Optional[str]]] = None

    def skip_reason(self, ctx: CheckContext) -> Optional[str]:
        """Why the check does not apply to this run, or None."""
        if ctx.order < self.min_order:
            return f"needs order >= {self.min_order}, run has order {ctx.order}"
        if self.applies is not None:
            return self.applies(ctx.field)
        return None


REGISTRY: Dict[str, CheckSpec] = {}


def register(check_id: str, description: str, expected: str = "pass", min_order: int = 2, applies=None):
    def decorator(fn: Runner) -> Runner:
        REGISTRY[check_id] = CheckSpec(check_id, description, expected, fn, min_order, applies)
        return fn

    return decorator


def select_checks(ids: Sequence[str]) -> List[CheckSpec]:
    """Registry entries for ids ("all" selects everything, in registry order)."""
    if "all" in ids:
        return list(REGISTRY.values())
    unknown = [i for i in ids if i not in REGISTRY]
    if unknown:
        raise ConfigError(f"unknown check id(s): {', '.join(unknown)}")
    return [REGISTRY[i] for i in ids]


def _iff_monopole(ctx: CheckContext) -> str:
    return EXPECT_NONZERO if ctx.field.is_monopole else EXPECT_PASS


def _expect(verdicts: Sequence[Verdict], expected: str) -> List[Verdict]:
    return [v.expecting(expected) for v in verdicts]


# =============================================================================
# WITNESS FUNCTIONS
# =============================================================================


def momentum_square() -> Expr:
    return expr_sum(Expr.var(p) ** 2 for p in MOMENTA)


def exp_sum(alpha: Sequence[Fraction]) -> Expr:
    """sum_k exp(i alpha_k p_k)."""
    return expr_sum(
        Expr.exp_momentum(tuple(a if k == axis else 0 for k in range(3))) for axis, a in enumerate(alpha)
    )


def momentum_dot_field(cfg: FieldConfig) -> Expr:
    return expr_sum(Expr.var(p) * cfg.component(p.axis) for p in MOMENTA)


def momentum_square_a3_value(cfg: FieldConfig) -> Expr:
    """32/3 i (p.B) div B."""
    return (momentum_dot_field(cfg) * cfg.divergence).scale(scalar(0, Fraction(32, 3)))


def exp_sum_a3_value(cfg: FieldConfig, alpha: Sequence[Fraction]) -> Expr:
    """-4/3 a1^2 a2^2 a3^2 exp(i a.p) (sum_k B^k / a_k) div B."""
    a1, a2, a3 = alpha
    weighted = expr_sum(cfg.component(k + 1).scale(1 / Fraction(a)) for k, a in enumerate(alpha))
    factor = -Fraction(4, 3) * a1 ** 2 * a2 ** 2 * a3 ** 2
    return (Expr.exp_momentum(alpha) * weighted * cfg.divergence).scale(factor)


def flexibility_breaking_perturbation(c: Fraction = Fraction(1)) -> BiDiffOp:
    """c (d_p1^2 f d_p2^2 g - d_p2^2 f d_p1^2 g)."""
    p1, p2 = VarIndex.P1, VarIndex.P2
    constant = Expr.constant(c)
    return BiDiffOp([(constant, (p1, p1), (p2, p2)), (-constant, (p2, p2), (p1, p1))], name="P")


def perturbed(sp: StarProduct, perturbation: BiDiffOp) -> StarProduct:
    return sp.with_coefficient(2, sp.B2 + perturbation)


def perturbation_witnesses() -> List[Tuple[Expr, Expr]]:
    """(p1^2 + p2, p2) for the shipped perturbation; (s^2, sum_I 2^I x^I) for any (2,2) one."""
    p1, p2 = Expr.var(VarIndex.P1), Expr.var(VarIndex.P2)
    s = expr_sum(COORDINATES)
    weighted = expr_sum(x.scale(2 ** i) for i, x in enumerate(COORDINATES))
    return [(p1 ** 2 + p2, p2), (s ** 2, weighted)]


def constant_density_witness() -> Tuple[Expr, Expr, Expr, Expr]:
    p1, p2, p3 = (Expr.var(p) for p in MOMENTA)
    return (p1, p2, p3, Expr.var(VarIndex.Q3) * p3)


def nonconstant_density_witnesses(cfg: FieldConfig) -> List[Tuple[Expr, Expr, Expr, Expr]]:
    """(p_b, p_a, p_c, p_a) for every axis a the density depends on, then all momentum quadruples."""
    momenta = [Expr.var(p) for p in MOMENTA]
    axes = [q.axis for q in POSITIONS if q in cfg.divergence.variables()]
    quadruples = []
    for a in axes:
        b, c = a % 3 + 1, (a + 1) % 3 + 1
        quadruples.append((momenta[b - 1], momenta[a - 1], momenta[c - 1], momenta[a - 1]))
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1), (1, 0, 2), (0, 2, 1), (2, 1, 0)):
        for l in range(3):
            quadruples.append((momenta[i], momenta[j], momenta[k], momenta[l]))
    return quadruples


def alternative_witnesses(cfg: FieldConfig):
    """Witness families for the alternativity search."""
    momenta = [Expr.var(p) for p in MOMENTA]
    q3p3 = Expr.var(VarIndex.Q3) * momenta[2]
    pairs = [
        (momenta[0], momenta[1]),
        (momenta[0], Expr.var(VarIndex.Q1)),
        (momentum_square(), momenta[2]),
        (q3p3, momenta[0]),
    ]
    quadruples = [constant_density_witness()] + nonconstant_density_witnesses(cfg)
    diagonal = [momentum_square(), exp_sum(BOUNDED_ALPHAS[0])]
    return pairs, quadruples, diagonal


def series_cases(lhs: LambdaSeries, rhs: LambdaSeries, inputs: Sequence[Expr]):
    return ((a, b, inputs) for a, b in zip(lhs.coeffs, rhs.coeffs))


def _constant_density(cfg: FieldConfig) -> Optional[str]:
    return None if cfg.has_constant_density else "density div B is not constant"


def _nonconstant_density(cfg: FieldConfig) -> Optional[str]:
    return "density div B is constant" if cfg.has_constant_density else None


# =============================================================================
# CHECKS
# =============================================================================


@register("unit_grading", "1*f = f*1 = f and A_0 = A_1 = 0 on random Exprs", min_order=0)
def check_unit_grading(ctx: CheckContext) -> List[Verdict]:
    exprs = [e for (e,) in ctx.exprs("exprs", ctx.config.sample_count("exprs"))]
    one = Expr.one()

    def unit_cases():
        for f in exprs:
            lifted = LambdaSeries.lift(f, ctx.order)
            yield from series_cases(star_multiply(ctx.sp, one, f), lifted, (one, f))
            yield from series_cases(star_multiply(ctx.sp, f, one), lifted, (f, one))

    low = weyl_star_product(ctx.pi, order=min(ctx.order, 1))

    def grading_cases():
        for f, g, h in zip(exprs, exprs[1:], exprs[2:]):
            series = associator_series(low, f, g, h)
            for j in range(series.order + 1):
                yield series.coefficient(j), Expr.zero(), (f, g, h)

    return [
        verdict_over("unit_grading", unit_cases(), detail="unit"),
        verdict_over("unit_grading", grading_cases(), detail="A_0 and A_1"),
    ]


@register("commutation_relations", "[q,q] = 0, [q_i,p_j] = 2 lambda delta_ij, [p_i,p_j] = 2 lambda eps_ijk B^k", min_order=1)
def check_commutation_relations(ctx: CheckContext) -> List[Verdict]:
    order = ctx.order

    def target(first: Expr) -> LambdaSeries:
        return LambdaSeries((Expr.zero(), first.scale(2)) + (Expr.zero(),) * (order - 1))

    def cases():
        for i in (1, 2, 3):
            for j in (1, 2, 3):
                qi, qj = Expr.var(VarIndex.position(i)), Expr.var(VarIndex.position(j))
                pi_, pj = Expr.var(VarIndex.momentum(i)), Expr.var(VarIndex.momentum(j))
                yield from series_cases(commutator(ctx.weyl, qi, qj), LambdaSeries.zero(order), (qi, qj))
                delta = Expr.one() if i == j else Expr.zero()
                yield from series_cases(commutator(ctx.weyl, qi, pj), target(delta), (qi, pj))
                b = expr_sum(ctx.field.component(k).scale(levi_civita(i, j, k)) for k in (1, 2, 3))
                yield from series_cases(commutator(ctx.weyl, pi_, pj), target(b), (pi_, pj))

    return [verdict_over("commutation_relations", cases(), detail="B3 = 0")]


@register("distinguished_coordinates", "lambda^2 coefficient of [x^I, x^J] vanishes on all 36 pairs")
def check_distinguished_coordinates(ctx: CheckContext) -> List[Verdict]:
    return [
        verdict_over(
            "distinguished_coordinates",
            ((commutator(ctx.sp, x, y).coefficient(2), Expr.zero(), (x, y)) for x in COORDINATES for y in COORDINATES),
        )
    ]


@register("weyl_b2_structure", "B2 symmetric with no (1,1) part")
def check_weyl_b2_structure(ctx: CheckContext) -> List[Verdict]:
    b2 = ctx.sp.B2
    pairs = ctx.exprs("pairs", ctx.config.sample_count("pairs"), size=2)
    symmetric = verdict_over(
        "weyl_b2_structure", ((b2(f, g), b2(g, f), (f, g)) for f, g in pairs), detail="symmetric"
    )
    no_11 = verdict_over(
        "weyl_b2_structure",
        ((b2(x, y), Expr.zero(), (x, y)) for x in COORDINATES for y in COORDINATES),
        detail="no (1,1) part",
    )
    return [symmetric, no_11]


@register("a2_jacobiator", "A2^- = 2/3 Jacobiator on the 20 coordinate triples")
def check_a2_jacobiator(ctx: CheckContext) -> List[Verdict]:
    return [
        verdict_over(
            "a2_jacobiator",
            (
                (A2_antisym(ctx.sp, x, y, z), jacobiator(ctx.pi, x, y, z).scale(Fraction(2, 3)), (x, y, z))
                for x, y, z in combinations(COORDINATES, 3)
            ),
        )
    ]


@register("monopole_definition", "the five conditions of a monopole star product", expected="condition 1 nonzero iff monopole")
def check_monopole_definition(ctx: CheckContext) -> List[Verdict]:
    first, *rest = validate_monopole(ctx.sp)
    first = first.expecting(_iff_monopole(ctx))
    return [first] + _expect(rest, EXPECT_PASS)


@register("flexible2", "A2(f, g, f) = 0 on random pairs")
def check_flexible2_fuzz(ctx: CheckContext) -> List[Verdict]:
    pairs = ctx.exprs("pairs", ctx.config.sample_count("pairs"), size=2)
    return [check_flexible2(ctx.sp, pairs)]


@register("b2_perturbation", "an antisymmetric (2,2) perturbation of B2 breaks flexibility", expected="nonzero")
def check_flexibility_breaking_perturbation(ctx: CheckContext) -> List[Verdict]:
    witnesses = perturbation_witnesses()
    shipped = check_flexible2(
        perturbed(ctx.sp, flexibility_breaking_perturbation()), witnesses[:1], check_id="b2_perturbation"
    )
    rng = ctx.rng("perturbation")
    p = random_antisymmetric_22(rng)
    pairs = witnesses + ctx.exprs("pairs", ctx.config.sample_count("pairs"), size=2)
    random_case = check_flexible2(perturbed(ctx.sp, p), pairs, check_id="b2_perturbation")
    return [
        shipped.expecting(EXPECT_NONZERO, "P = d_p1^2 f d_p2^2 g - d_p2^2 f d_p1^2 g"),
        random_case.expecting(EXPECT_NONZERO, f"random (2,2) perturbation, seed {ctx.config.seed}"),
    ]


@register("a3_antisym_vanishes", "A3^- = 0 by the cyclic formula and by alternation under two B3", min_order=3)
def check_a3_antisym_vanishes(ctx: CheckContext) -> List[Verdict]:
    triples = ctx.exprs("triples", ctx.config.sample_count("triples"), size=3, **NESTED_SHAPE)
    zero = Expr.zero()
    return [
        verdict_over("a3_antisym_vanishes", ((A3_antisym(ctx.sp, *t), zero, t) for t in triples), detail="cyclic formula"),
        verdict_over("a3_antisym_vanishes", ((A3_alternation(ctx.sp, *t), zero, t) for t in triples), detail="alternation, primary B3"),
        verdict_over("a3_antisym_vanishes", ((A3_alternation(ctx.sp_alt, *t), zero, t) for t in triples), detail="alternation, secondary B3"),
    ]


@register("obstruction_routes", "O = dA3 by coboundary, pentagon and dB2 expansion under two B3", min_order=3)
def check_obstruction_routes(ctx: CheckContext) -> List[Verdict]:
    quadruples = ctx.exprs("quadruples", ctx.config.sample_count("quadruples"), size=4, **NESTED_SHAPE)

    def cases():
        for quadruple in quadruples:
            o = obstruction_O(ctx.sp, *quadruple)
            for sp in (ctx.sp, ctx.sp_alt):
                for route in dA3_two_ways(sp, *quadruple):
                    yield route, o, quadruple

    return [verdict_over("obstruction_routes", cases())]


@register("pentagon", "pentagon residual vanishes at every order under two B3", min_order=0)
def check_pentagon(ctx: CheckContext) -> List[Verdict]:
    quadruples = ctx.exprs("quadruples", ctx.config.sample_count("quadruples"), size=4, **NESTED_SHAPE)
    zero = LambdaSeries.zero(ctx.order)

    def cases():
        for quadruple in quadruples:
            for sp in (ctx.sp, ctx.sp_alt):
                yield from series_cases(pentagon_residual(sp, *quadruple), zero, quadruple)

    return [verdict_over("pentagon", cases())]


@register(
    "obstruction_constant",
    "O(p1,p2,p3,q3 p3) != 0 for constant density, first summand only",
    expected="nonzero iff monopole",
    min_order=3,
    applies=_constant_density,
)
def check_obstruction_constant(ctx: CheckContext) -> List[Verdict]:
    witness = constant_density_witness()
    first, *others = obstruction_summands(ctx.sp, *witness)
    value = compare("obstruction_constant", expr_sum([first] + others), Expr.zero(), witness)
    only_first = verdict_over(
        "obstruction_constant",
        ((term, Expr.zero(), witness) for term in others),
        detail="summands two to five vanish",
    )
    return [value.expecting(_iff_monopole(ctx), "O(p1,p2,p3,q3*p3)"), only_first.expecting(EXPECT_PASS)]


@register(
    "obstruction_nonconstant",
    "O(p_b,p_a,p_c,p_a) != 0 for non-constant density",
    expected="nonzero",
    min_order=3,
    applies=_nonconstant_density,
)
def check_obstruction_nonconstant(ctx: CheckContext) -> List[Verdict]:
    witnesses = nonconstant_density_witnesses(ctx.field)
    verdict = verdict_over(
        "obstruction_nonconstant",
        ((obstruction_O(ctx.sp, *w), Expr.zero(), w) for w in witnesses),
    )
    f, g, h, _ = witnesses[0]
    a2 = A2_formula(ctx.sp, f, g, h)
    return [verdict.expecting(EXPECT_NONZERO, f"A2({f},{g},{h}) = {a2}")]


@register("momentum_square_a3", "A3(|p|^2,|p|^2,|p|^2) = 32/3 i (p.B) div B, contraction and closed form", min_order=3)
def check_momentum_square_a3(ctx: CheckContext) -> List[Verdict]:
    f = momentum_square()
    target = momentum_square_a3_value(ctx.field)
    return [
        compare("momentum_square_a3", A3_cadabra(ctx.pi, f), target, (f,), detail="contraction"),
        compare("momentum_square_a3", A3_closed_form(ctx.pi, f), target, (f,), detail="closed form"),
    ]


@register("bounded_exp_a3", "A3 on sum_k exp(i a_k p_k) for three rational a", min_order=3)
def check_bounded_exp_a3(ctx: CheckContext) -> List[Verdict]:
    def cases():
        for alpha in BOUNDED_ALPHAS:
            f = exp_sum(alpha)
            target = exp_sum_a3_value(ctx.field, alpha)
            yield A3_cadabra(ctx.pi, f), target, (f,)
            yield A3_closed_form(ctx.pi, f), target, (f,)

    return [verdict_over("bounded_exp_a3", cases())]


def _diagonal_functions(ctx: CheckContext) -> List[Expr]:
    return [momentum_square()] + list(ctx.config.parsed_functions.values())


def _diagonal_verdict(ctx: CheckContext, check) -> List[Verdict]:
    verdicts = [check(ctx.pi, f) for f in _diagonal_functions(ctx)]
    failing = [v for v in verdicts if v.status == FAIL]
    return _expect((failing or verdicts)[:1], _iff_monopole(ctx))


@register("power_assoc", "f*(f*f) = (f*f)*f at order 3 for f = |p|^2", expected="nonzero iff monopole", min_order=3)
def check_power_assoc_witnesses(ctx: CheckContext) -> List[Verdict]:
    return _diagonal_verdict(ctx, check_power_assoc)


@register(
    "flexible3",
    "A(f,f,f) = 0 at order 3 for f = |p|^2; same A3(f,f,f) as power_assoc",
    expected="nonzero iff monopole",
    min_order=3,
)
def check_flexible3_witnesses(ctx: CheckContext) -> List[Verdict]:
    return _diagonal_verdict(ctx, check_flexible3)


@register("non_alternative", "search the witness set for a violation of alternativity", expected="nonzero iff monopole", min_order=3)
def check_non_alternative(ctx: CheckContext) -> List[Verdict]:
    pairs, quadruples, diagonal = alternative_witnesses(ctx.field)
    return _expect([check_alternative(ctx.sp, pairs, quadruples, diagonal)], _iff_monopole(ctx))


@register("hochschild_d_squared", "d(d phi) = 0 for random 1- and 2-cochains", min_order=0)
def check_hochschild_d_squared(ctx: CheckContext) -> List[Verdict]:
    rng = ctx.rng("cochains")
    count = ctx.config.sample_count("cochains")
    inputs = ctx.exprs("cochain-inputs", count, size=4, **NESTED_SHAPE)

    def cases():
        for n in range(count):
            phi: Cochain = random_diff_op(rng) if n % 2 == 0 else random_bidiff_op(rng, 2, 2, 2, 1)
            args = inputs[n][: phi.arity + 2]
            yield hochschild_d(hochschild_d(phi))(*args), Expr.zero(), args

    return [verdict_over("hochschild_d_squared", cases())]


@register("gauge_first_order", "B1' = B1 - dD1 and 1 *' f = f for random gauge maps", min_order=1)
def check_gauge_first_order(ctx: CheckContext) -> List[Verdict]:
    rng = ctx.rng("gauges")
    count = ctx.config.sample_count("gauges")
    first_order = weyl_star_product(ctx.pi, order=1)
    inputs = ctx.exprs("gauge-inputs", count, size=2, **NESTED_SHAPE)
    one = Expr.one()

    def cases():
        for n in range(count):
            d1 = random_diff_op(rng)
            gauged = gauge_transform(first_order, d1)
            f, g = inputs[n]
            expected = first_order.B1 - hochschild_d(d1)
            yield gauged.B1(f, g), expected(f, g), (f, g)
            yield from series_cases(star_multiply(gauged, one, f), LambdaSeries.lift(f, 1), (one, f))

    return [verdict_over("gauge_first_order", cases())]


@register("star_jacobi_identity", "star Jacobiator = alternating sum of associators", min_order=0)
def check_star_jacobi_identity(ctx: CheckContext) -> List[Verdict]:
    momenta = tuple(Expr.var(p) for p in MOMENTA)
    triples = [momenta] + ctx.exprs("jacobi", min(ctx.config.sample_count("triples"), 5), size=3, **NESTED_SHAPE)

    def cases():
        for t in triples:
            alternating = LambdaSeries.zero(ctx.order)
            for perm, sign in signed_permutations(3):
                alternating = alternating + associator(ctx.sp, *(t[i] for i in perm)).scale(sign)
            yield from series_cases(star_jacobiator(ctx.sp, *t), alternating, t)

    return [verdict_over("star_jacobi_identity", cases())]


def a2_density_ratio(sp: StarProduct, cfg: FieldConfig) -> Optional[Fraction]:
    """Measured A2(p1,p2,p3) / div B, None when not a rational multiple."""
    value = A2_formula(sp, *(Expr.var(p) for p in MOMENTA))
    ratio = proportionality(value, cfg.divergence)
    if ratio is None:
        return None
    re, im = scalar_parts(ratio)
    return re if im == 0 else None
