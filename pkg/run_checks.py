#!/usr/bin/env python3
"""
Verify the associator structure of the Weyl star product of a magnetic field.

    python run_checks.py verify --field-b1 q1/3 --field-b2 q2/3 --field-b3 q3/3
    python run_checks.py eval --op A3_cadabra --arg "p1^2+p2^2+p3^2" --field-b1 q1/3 ...
    python run_checks.py list-checks

Exit codes: 0 every verdict reproduces its expected status, 2 some do not,
1 bad input (usage errors included) or unexpected error.
"""

import argparse
import logging
import sys
import traceback
from datetime import datetime
from pathlib import Path
from typing import Dict, List, Optional

from src.checks import REGISTRY
from src.config import LOG_DIR, LOG_LEVEL, load_run_config
from src.errors import MonopoleStarError
from src.report import EVAL_OPS, evaluate, render, run, write_report

logger = logging.getLogger(__name__)


def setup_logging(verbose: bool = False) -> Path:
    """File + stderr logging; stdout stays free for the report."""
    LOG_DIR.mkdir(parents=True, exist_ok=True)
    log_file = LOG_DIR / f"verify_{datetime.now().strftime('%Y%m%d_%H%M%S')}.log"
    level = logging.DEBUG if verbose else getattr(logging, LOG_LEVEL.upper(), logging.INFO)
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(log_file),
            logging.StreamHandler(sys.stderr)
        ]
    )
    return log_file


EXPRESSION_FLAGS = ('--field-b1', '--field-b2', '--field-b3', '--arg')


def attach_negative_values(argv: List[str]) -> List[str]:
    """Rewrite `--arg -q1` as `--arg=-q1`; argparse would read -q1 as an option."""
    out: List[str] = []
    i = 0
    while i < len(argv):
        token = argv[i]
        following = argv[i + 1] if i + 1 < len(argv) else None
        if (
            token in EXPRESSION_FLAGS
            and following is not None
            and following.startswith('-')
            and not following.startswith('--')
        ):
            out.append(f"{token}={following}")
            i += 2
            continue
        out.append(token)
        i += 1
    return out


def add_field_arguments(parser: argparse.ArgumentParser):
    parser.add_argument('--field-b1', help='B^1(q) expression')
    parser.add_argument('--field-b2', help='B^2(q) expression')
    parser.add_argument('--field-b3', help='B^3(q) expression')
    parser.add_argument('--order', help='truncation order 0..3')
    parser.add_argument('--b3', help='zero | random:<seed> | pair:<seed>')
    parser.add_argument('--seed', help='base seed of the fuzz generators')
    parser.add_argument('--config', help='flat key=value run-config file')
    parser.add_argument('--verbose', action='store_true')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Monopole star product verifier")
    commands = parser.add_subparsers(dest='command', required=True)

    verify = commands.add_parser('verify', help='run named checks or the full suite')
    add_field_arguments(verify)
    verify.add_argument('--checks', help='all or comma-separated check ids')
    verify.add_argument('--format', choices=['text', 'json'])
    verify.add_argument('--out', help='also write the rendered report to this path')
    verify.add_argument('--no-progress', action='store_true')

    ev = commands.add_parser('eval', help='evaluate one operation')
    add_field_arguments(ev)
    ev.add_argument('--op', required=True, choices=sorted(EVAL_OPS))
    ev.add_argument('--arg', action='append', default=[], help='expression, or @name for functions.<name>; -q1 and --arg=-q1 both work')

    commands.add_parser('list-checks', help='print check ids and expected statuses')
    return parser


def overrides_from(args: argparse.Namespace) -> Dict[str, Optional[str]]:
    return {
        'field.b1': args.field_b1,
        'field.b2': args.field_b2,
        'field.b3': args.field_b3,
        'order': args.order,
        'b3_mode': args.b3,
        'seed': args.seed,
        'checks': getattr(args, 'checks', None),
        'format': getattr(args, 'format', None),
    }


def list_checks() -> int:
    for spec in REGISTRY.values():
        print(f"{spec.check_id:28s} {spec.expected:26s} {spec.description}")
    return 0


def verify(args: argparse.Namespace) -> int:
    config = load_run_config(args.config, overrides_from(args))
    report = run(config, progress=not args.no_progress)
    text = render(report, config.output)
    print(text)
    if args.out:
        Path(args.out).write_text(text)
        logger.info(f"Rendered report written to {args.out}")
    write_report(report)
    return report.exit_code


def evaluate_op(args: argparse.Namespace) -> int:
    config = load_run_config(args.config, overrides_from(args))
    print(evaluate(args.op, args.arg, config))
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    argv = attach_negative_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # usage errors exit 1; 2 is reserved for unreproduced verdicts
        return 0 if e.code in (0, None) else 1
    if args.command == 'list-checks':
        return list_checks()

    log_file = setup_logging(args.verbose)
    logger.info(f"Log file: {log_file}")
    try:
        if args.command == 'verify':
            return verify(args)
        return evaluate_op(args)
    except MonopoleStarError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return 1
    except Exception as e:
        logger.error(f"Unexpected error: {e}")
        logger.error(traceback.format_exc())
        return 1


if __name__ == '__main__':
    sys.exit(main())
