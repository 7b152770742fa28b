#!/usr/bin/env python3
"""
Run orchestration and reporting: execute the selected checks for one run
configuration, evaluate single operations, and render or persist reports.
"""

import json
import logging
import time
from dataclasses import dataclass, field
from datetime import datetime
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

from tqdm import tqdm

from src import __version__
from src.associator import (
    A2_antisym,
    A2_formula,
    A3_antisym,
    A3_cadabra,
    A3_closed_form,
    A3_direct,
    PASS,
    Verdict,
    associator,
    dA3_two_ways,
    obstruction_O,
)
from src.checks import CheckContext, a2_density_ratio, build_context, select_checks
from src.config import REPORT_DIR, RunConfig
from src.errors import ArityError, ConfigError
from src.expr_core import Expr, format_expr, parse_expr, proportionality, scalar_parts
from src.star import B1_NORMALIZATION, LAMBDA_HBAR_RELATION, LambdaSeries, commutator, format_series, jordan, star_jacobiator
from src.structure import BRACKET_CONVENTION, bracket, jacobiator, momentum_jacobiator

logger = logging.getLogger(__name__)


# =============================================================================
# REPORT
# =============================================================================


@dataclass
class Report:
    conventions: Dict[str, str]
    field: Dict[str, str]
    verdicts: List[Verdict]
    skipped: List[Dict[str, str]] = field(default_factory=list)
    engine_version: str = __version__
    timestamp: str = field(default_factory=lambda: datetime.now().isoformat())

    @property
    def summary(self) -> Dict[str, int]:
        passed = sum(1 for v in self.verdicts if v.status == PASS)
        reproduced = sum(1 for v in self.verdicts if v.reproduced)
        return {
            "pass": passed,
            "fail": len(self.verdicts) - passed,
            "reproduced": reproduced,
            "not_reproduced": len(self.verdicts) - reproduced,
            "skipped": len(self.skipped),
        }

    @property
    def reproduced(self) -> bool:
        return all(v.reproduced for v in self.verdicts)

    @property
    def exit_code(self) -> int:
        """0 when every verdict matches its expected status, 2 otherwise."""
        return 0 if self.reproduced else 2

    def to_dict(self, include_timestamp: bool = True) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "engine_version": self.engine_version,
            "conventions": self.conventions,
            "field": self.field,
            "verdicts": [v.to_dict() for v in self.verdicts],
            "skipped": self.skipped,
            "summary": self.summary,
        }
        if include_timestamp:
            data["timestamp"] = self.timestamp
        return data


def _format_ratio(ratio: Optional[Fraction]) -> str:
    return "n/a" if ratio is None else str(ratio)


def conventions_for(ctx: CheckContext) -> Dict[str, str]:
    """Normalization choices plus the two measured density ratios."""
    conventions = {
        "bracket": BRACKET_CONVENTION,
        "b1_normalization": B1_NORMALIZATION,
        "lambda_hbar": LAMBDA_HBAR_RELATION,
        "b3_mode": str(ctx.config.b3_mode),
        "order": str(ctx.order),
        "seed": str(ctx.config.seed),
    }
    density = ctx.field.divergence
    jacobi_ratio = proportionality(momentum_jacobiator(ctx.pi), density)
    if jacobi_ratio is not None:
        re, im = scalar_parts(jacobi_ratio)
        conventions["jacobiator_over_div"] = str(re) if im == 0 else "n/a"
    else:
        conventions["jacobiator_over_div"] = "n/a"
    conventions["a2_over_div"] = _format_ratio(a2_density_ratio(ctx.sp, ctx.field)) if ctx.order >= 2 else "n/a"
    return conventions


def field_echo(ctx: CheckContext) -> Dict[str, str]:
    cfg = ctx.field
    return {
        "b1": format_expr(cfg.b1),
        "b2": format_expr(cfg.b2),
        "b3": format_expr(cfg.b3),
        "div": format_expr(cfg.divergence),
        "classification": cfg.classification,
    }


def run(config: RunConfig, progress: bool = True) -> Report:
    """
    Execute the configured checks.

    Args:
        config: Validated run configuration
        progress: Show a tqdm progress bar over the checks

    Returns:
        Report with verdicts in registry order
    """
    specs = select_checks(config.checks)
    ctx = build_context(config)
    logger.info("=" * 60)
    logger.info(f"VERIFYING FIELD B = ({', '.join(format_expr(c) for c in ctx.field.components)})")
    logger.info(f"div B = {format_expr(ctx.field.divergence)} ({ctx.field.classification})")
    logger.info("=" * 60)

    verdicts: List[Verdict] = []
    skipped: List[Dict[str, str]] = []
    for spec in tqdm(specs, desc="Checks", unit="check", disable=not progress):
        reason = spec.skip_reason(ctx)
        if reason:
            logger.info(f"Skipping {spec.check_id}: {reason}")
            skipped.append({"id": spec.check_id, "reason": reason})
            continue
        start = time.time()
        results = spec.runner(ctx)
        elapsed = time.time() - start
        for verdict in results:
            marker = "ok" if verdict.reproduced else "NOT REPRODUCED"
            logger.info(
                f"{verdict.check_id}: {verdict.status} (expected {verdict.expected}) "
                f"{verdict.detail} [{marker}, {elapsed:.2f}s]"
            )
            if verdict.witness is not None:
                logger.debug(f"{verdict.check_id} witness: {verdict.witness}")
        verdicts.extend(results)

    report = Report(conventions_for(ctx), field_echo(ctx), verdicts, skipped)
    summary = report.summary
    logger.info(
        f"{summary['reproduced']}/{len(verdicts)} verdicts reproduced, "
        f"{summary['fail']} fail, {summary['skipped']} skipped"
    )
    return report


# =============================================================================
# RENDERING
# =============================================================================


def render_json(report: Report, include_timestamp: bool = True) -> str:
    return json.dumps(report.to_dict(include_timestamp), indent=2)


def render_text(report: Report) -> str:
    lines = [f"monopole-star {report.engine_version}", "", "Conventions:"]
    lines += [f"  {key}: {value}" for key, value in report.conventions.items()]
    lines += ["", "Field:"]
    lines += [f"  {key}: {value}" for key, value in report.field.items()]
    lines += ["", "Verdicts:"]
    for v in report.verdicts:
        marker = "" if v.reproduced else "  <-- not reproduced"
        detail = f" [{v.detail}]" if v.detail else ""
        lines.append(f"  {v.check_id:28s} {v.status:5s} expected {v.expected:8s}{detail}{marker}")
        if v.witness is not None:
            lines.append(f"      witness {v.witness}")
    for entry in report.skipped:
        lines.append(f"  {entry['id']:28s} skipped ({entry['reason']})")
    summary = report.summary
    lines += [
        "",
        f"Summary: {summary['pass']} pass, {summary['fail']} fail, "
        f"{summary['reproduced']} reproduced, {summary['skipped']} skipped",
    ]
    return "\n".join(lines)


def render(report: Report, output: str) -> str:
    return render_json(report) if output == "json" else render_text(report)


def write_report(report: Report, report_dir: Path = REPORT_DIR) -> Path:
    """Write report_<timestamp>.json and refresh latest_run.json."""
    report_dir = Path(report_dir)
    report_dir.mkdir(parents=True, exist_ok=True)
    text = render_json(report)
    report_file = report_dir / f"report_{datetime.now().strftime('%Y%m%d_%H%M%S')}.json"
    report_file.write_text(text)
    (report_dir / "latest_run.json").write_text(text)
    logger.info(f"Report saved to {report_file}")
    return report_file


# =============================================================================
# SINGLE-OPERATION EVALUATION
# =============================================================================

EvalResult = Union[Expr, LambdaSeries, Tuple[Expr, ...]]


class EvalOp(NamedTuple):
    arity: int
    fn: Callable[..., EvalResult]
    description: str


EVAL_OPS: Dict[str, EvalOp] = {
    "A2": EvalOp(3, lambda ctx, f, g, h: A2_formula(ctx.sp, f, g, h), "second associator coefficient"),
    "A2_antisym": EvalOp(3, lambda ctx, f, g, h: A2_antisym(ctx.sp, f, g, h), "alternating part of A2"),
    "A3_direct": EvalOp(3, lambda ctx, f, g, h: A3_direct(ctx.sp, f, g, h), "third associator coefficient"),
    "A3_antisym": EvalOp(3, lambda ctx, f, g, h: A3_antisym(ctx.sp, f, g, h), "alternating part of A3"),
    "O": EvalOp(4, lambda ctx, f, g, h, k: obstruction_O(ctx.sp, f, g, h, k), "B3-independent dA3"),
    "dA3": EvalOp(4, lambda ctx, f, g, h, k: dA3_two_ways(ctx.sp, f, g, h, k), "dA3 by three routes"),
    "A3_cadabra": EvalOp(1, lambda ctx, f: A3_cadabra(ctx.pi, f), "A3(f,f,f) contraction"),
    "A3_closed_form": EvalOp(1, lambda ctx, f: A3_closed_form(ctx.pi, f), "A3(f,f,f) for diagonal momentum Hessian"),
    "bracket": EvalOp(2, lambda ctx, f, g: bracket(ctx.pi, f, g), "twisted Poisson bracket"),
    "jacobiator": EvalOp(3, lambda ctx, f, g, h: jacobiator(ctx.pi, f, g, h), "bracket Jacobiator"),
    "commutator": EvalOp(2, lambda ctx, f, g: commutator(ctx.sp, f, g), "star commutator series"),
    "associator": EvalOp(3, lambda ctx, f, g, h: associator(ctx.sp, f, g, h), "associator series"),
    "jordan": EvalOp(2, lambda ctx, f, g: jordan(ctx.sp, f, g), "symmetrized star product series"),
    "star_jacobiator": EvalOp(3, lambda ctx, f, g, h: star_jacobiator(ctx.sp, f, g, h), "star commutator Jacobiator"),
}

DA3_ROUTES = ("coboundary", "pentagon", "expansion")


def resolve_argument(text: str, config: RunConfig) -> Expr:
    """Parse an argument; @name refers to functions.<name> of the config."""
    if text.startswith("@"):
        name = text[1:]
        if name not in config.parsed_functions:
            raise ConfigError(f"no function named {name!r} in the run config")
        return config.parsed_functions[name]
    return parse_expr(text)


def format_result(result: EvalResult) -> str:
    if isinstance(result, LambdaSeries):
        return format_series(result)
    if isinstance(result, tuple):
        return "\n".join(f"{route}: {format_expr(value)}" for route, value in zip(DA3_ROUTES, result))
    return format_expr(result)


def evaluate(op_name: str, args: Sequence[str], config: RunConfig) -> str:
    """
    Evaluate one registered operation on expression strings.

    Raises:
        ConfigError: unknown operation or function reference
        ArityError: wrong number of arguments
        ParseError: an argument does not parse
        PreconditionError: operation hypotheses violated
    """
    if op_name not in EVAL_OPS:
        raise ConfigError(f"unknown operation {op_name!r}; known: {', '.join(EVAL_OPS)}")
    op = EVAL_OPS[op_name]
    if len(args) != op.arity:
        raise ArityError(f"{op_name} takes {op.arity} argument(s), got {len(args)}")
    exprs = [resolve_argument(a, config) for a in args]
    ctx = build_context(config)
    logger.debug(f"eval {op_name}({', '.join(format_expr(e) for e in exprs)})")
    return format_result(op.fn(ctx, *exprs))
