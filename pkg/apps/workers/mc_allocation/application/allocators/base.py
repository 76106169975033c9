# application/allocators/base.py
from abc import ABC, abstractmethod
from typing import Final, Literal

from mc_allocation.domain.entities import AllocationResult
from mc_allocation.domain.values import PValueSet
from mc_allocation.settings import Settings

# Allocation strategies available across the application.
#
# - "kt":       continuous optimum of the normal approximation h (nested bisection).
# - "greedy":   integer batches on the exact objective g.
# - "thompson": adaptive, p-value-oblivious allocation from posterior instability.
# - "constant": floor(K / m) per hypothesis, the baseline.
StrategyKey = Literal["kt", "greedy", "thompson", "constant"]

DEFAULT_STRATEGY: Final[StrategyKey] = "kt"


class BaseAllocator(ABC):
    """Common interface for all allocation strategies.

    Args:
        settings: Solver/greedy/thompson configuration.
        seed: Seed for strategies that draw random numbers.
    """

    strategy: StrategyKey

    def __init__(self, settings: Settings | None = None, *, seed: int = 0) -> None:
        self.settings = settings or Settings()
        self.seed = int(seed)

    @abstractmethod
    def allocate(self, p: PValueSet, budget: float) -> AllocationResult:
        ...
