"""
Run configuration: engine defaults from the environment and the flat
key=value run-config file, merged with command-line overrides.
"""

import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Mapping, Optional, Tuple

from dotenv import dotenv_values, load_dotenv

from src.errors import ConfigError
from src.expr_core import Expr, parse_expr
from src.structure import FieldConfig

load_dotenv()

logger = logging.getLogger(__name__)


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {raw!r}")


DEFAULT_ORDER = _env_int("MONOPOLE_STAR_ORDER", 3)
DEFAULT_SEED = _env_int("MONOPOLE_STAR_SEED", 0)
LOG_DIR = Path(os.getenv("MONOPOLE_STAR_LOG_DIR", "outputs/logs"))
LOG_LEVEL = os.getenv("MONOPOLE_STAR_LOG_LEVEL", "INFO")
REPORT_DIR = Path(os.getenv("MONOPOLE_STAR_REPORT_DIR", "outputs/reports"))

FORMATS = ("text", "json")
ALL_CHECKS = "all"

DEFAULT_SAMPLES: Dict[str, int] = {
    "exprs": 100,
    "pairs": 50,
    "quadruples": 25,
    "cochains": 20,
    "gauges": 10,
    "triples": 25,
}

SCALAR_KEYS = ("field.b1", "field.b2", "field.b3", "order", "b3_mode", "checks", "format", "seed")


# =============================================================================
# B3 MODE
# =============================================================================


@dataclass(frozen=True)
class B3Mode:
    """zero | random:<seed> | pair:<seed>."""

    kind: str = "zero"
    seed: Optional[int] = None

    @classmethod
    def parse(cls, text: str) -> "B3Mode":
        text = text.strip()
        if text == "zero":
            return cls()
        kind, sep, seed = text.partition(":")
        if kind not in ("random", "pair") or not sep:
            raise ConfigError(f"b3 mode must be zero, random:<seed> or pair:<seed>, got {text!r}")
        try:
            return cls(kind, int(seed))
        except ValueError:
            raise ConfigError(f"b3 mode seed must be an integer, got {seed!r}")

    @property
    def primary_seed(self) -> Optional[int]:
        """Seed of the primary B3, None for the zero operator."""
        return self.seed

    @property
    def secondary_seed(self) -> int:
        return 1 if self.seed is None else self.seed + 1

    def __str__(self) -> str:
        return self.kind if self.seed is None else f"{self.kind}:{self.seed}"


# =============================================================================
# RUN CONFIG
# =============================================================================


@dataclass
class RunConfig:
    """Everything a verify or eval run needs; validated on construction."""

    field_exprs: Tuple[str, str, str] = ("0", "0", "0")
    order: int = DEFAULT_ORDER
    b3_mode: B3Mode = field(default_factory=B3Mode)
    checks: Tuple[str, ...] = (ALL_CHECKS,)
    functions: Dict[str, str] = field(default_factory=dict)
    output: str = "text"
    seed: int = DEFAULT_SEED
    samples: Dict[str, int] = field(default_factory=lambda: dict(DEFAULT_SAMPLES))

    def __post_init__(self):
        if not 0 <= self.order <= 3:
            raise ConfigError(f"order must be between 0 and 3, got {self.order}")
        if self.output not in FORMATS:
            raise ConfigError(f"format must be one of {', '.join(FORMATS)}, got {self.output!r}")
        unknown = set(self.samples) - set(DEFAULT_SAMPLES)
        if unknown:
            raise ConfigError(f"unknown sample budget(s): {', '.join(sorted(unknown))}")
        for name, count in self.samples.items():
            if count < 1:
                raise ConfigError(f"samples.{name} must be positive, got {count}")
        self.field = FieldConfig.from_strings(*self.field_exprs)
        self.parsed_functions: Dict[str, Expr] = {
            name: parse_expr(text) for name, text in self.functions.items()
        }

    def sample_count(self, name: str) -> int:
        return self.samples[name]


def _int_value(key: str, raw: str) -> int:
    try:
        return int(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"{key} must be an integer, got {raw!r}")


def parse_checks(raw: str) -> Tuple[str, ...]:
    ids = tuple(part.strip() for part in raw.split(",") if part.strip())
    return ids or (ALL_CHECKS,)


def config_from_values(values: Mapping[str, Optional[str]]) -> RunConfig:
    """
    Build a RunConfig from flat key=value pairs.

    Raises:
        ConfigError: unknown key, key without a value, or malformed value
    """
    fields = ["0", "0", "0"]
    kwargs = {}
    functions: Dict[str, str] = {}
    samples = dict(DEFAULT_SAMPLES)
    for key, raw in values.items():
        if raw is None:
            raise ConfigError(f"config key {key!r} has no value")
        if key.startswith("functions.") and len(key) > len("functions."):
            functions[key[len("functions."):]] = raw
        elif key.startswith("samples.") and len(key) > len("samples."):
            samples[key[len("samples."):]] = _int_value(key, raw)
        elif key not in SCALAR_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        elif key.startswith("field."):
            fields["b1 b2 b3".split().index(key[len("field."):])] = raw
        elif key == "order":
            kwargs["order"] = _int_value(key, raw)
        elif key == "seed":
            kwargs["seed"] = _int_value(key, raw)
        elif key == "b3_mode":
            kwargs["b3_mode"] = B3Mode.parse(raw)
        elif key == "checks":
            kwargs["checks"] = parse_checks(raw)
        elif key == "format":
            kwargs["output"] = raw
    return RunConfig(field_exprs=tuple(fields), functions=functions, samples=samples, **kwargs)


def load_run_config(path: Optional[str] = None, overrides: Optional[Mapping[str, Optional[str]]] = None) -> RunConfig:
    """
    Read the optional config file and apply command-line overrides on top.

    Args:
        path: Flat key=value file, or None
        overrides: Values from CLI flags; None entries are ignored

    Returns:
        Validated RunConfig
    """
    values: Dict[str, Optional[str]] = {}
    if path:
        config_path = Path(path)
        if not config_path.is_file():
            raise ConfigError(f"config file not found: {config_path}")
        values.update(dotenv_values(config_path, interpolate=False))
        logger.info(f"Loaded {len(values)} config keys from {config_path}")
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value
    return config_from_values(values)
