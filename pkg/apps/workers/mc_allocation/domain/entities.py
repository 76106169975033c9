from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .values import Allocation, Classification, MonteCarloState


@dataclass(frozen=True, eq=False)
class KtSolution:
    """Continuous optimum of h under sum(k) = K (stationarity dh/dk_i = -lambda*)."""

    allocation: Allocation
    lambda_star: float
    stationarity_residual: float
    iterations_outer: int
    iterations_inner_total: int
    budget: float
    # 0-based indices excluded from the stationarity system (budget 0)
    degenerate: tuple[int, ...] = ()
    infeasible_floor: bool = False
    floored: tuple[int, ...] = ()

    @property
    def budget_error(self) -> float:
        return abs(self.allocation.total() - self.budget)


@dataclass(eq=False)
class GreedyState:
    """Mutable working state of the greedy allocator."""

    k: np.ndarray
    b: np.ndarray
    d: np.ndarray
    jump: int
    j: int | None = None


@dataclass(frozen=True, eq=False)
class GreedyResult:
    allocation: Allocation
    iterations: int
    unspent_budget: int
    saturated: bool
    jump: int
    literal_argmax: bool
    # objective after each accepted batch, starting with the initial allocation
    objective_trace: tuple[float, ...] = ()


@dataclass(frozen=True, eq=False)
class ThompsonRun:
    allocation: Allocation
    classification: Classification
    state: MonteCarloState
    # instability weights averaged over iterations
    mean_weights: np.ndarray
    iterations: int
    batch_sizes: tuple[int, ...] = ()
    # decision of the raw S / k estimate; `classification` uses (S + 1) / (k + 1)
    classification_raw: Classification | None = None


@dataclass(frozen=True, eq=False)
class AllocationResult:
    """An allocation plus whatever the producing strategy wants to report."""

    strategy: str
    allocation: Allocation
    metadata: dict[str, Any] = field(default_factory=dict)
    # strategy-specific payload (KtSolution, GreedyResult, ThompsonRun)
    detail: Any = None
