from __future__ import annotations

from typing import Any, Optional


class AllocationError(Exception):
    """Base class for every error raised by the toolkit.

    `exit_code` is what the CLI returns when the error escapes a command.
    """

    exit_code: int = 1


class InvalidInputError(AllocationError, ValueError):
    """Out-of-range value, dimension mismatch or invalid configuration."""

    exit_code = 1

    def __init__(self, message: str, *, field: Optional[str] = None) -> None:
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field


class DegenerateHypothesisError(InvalidInputError):
    """Hypothesis whose derivative vanishes (p == alpha) or whose variance is zero."""


class InfeasibleBudgetError(AllocationError):
    exit_code = 3

    def __init__(self, message: str, *, min_budget: float) -> None:
        super().__init__(f"{message} (minimum feasible budget: {min_budget:g})")
        self.min_budget = min_budget


class ConvergenceError(AllocationError, RuntimeError):
    exit_code = 4

    def __init__(self, message: str, **details: Any) -> None:
        suffix = ", ".join(f"{k}={v!r}" for k, v in details.items())
        super().__init__(f"{message} ({suffix})" if suffix else message)
        self.details = details


class OracleError(AllocationError, RuntimeError):
    """Sampling oracle failure; `state` holds the Monte-Carlo state reached so far."""

    exit_code = 1

    def __init__(self, message: str, *, state: Any = None, iteration: Optional[int] = None) -> None:
        super().__init__(message if iteration is None else f"{message} (iteration {iteration})")
        self.state = state
        self.iteration = iteration


class StorageError(AllocationError, OSError):
    exit_code = 2
