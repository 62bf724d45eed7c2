"""Numerical lab for the critical fractional conservation law with shock-like data."""

from ._core import (
    ConfigError,
    FslError,
    apply_lambda,
    describe,
    evaluate,
    heat_semigroup,
    list_experiments,
    read_snapshot,
    resolved_config,
    run,
    worker_count,
)

__all__ = [
    "ConfigError",
    "FslError",
    "apply_lambda",
    "describe",
    "evaluate",
    "heat_semigroup",
    "list_experiments",
    "read_snapshot",
    "resolved_config",
    "run",
    "worker_count",
]
