import math

from mc_allocation.application.greedy import greedy_allocate
from mc_allocation.domain.entities import AllocationResult
from mc_allocation.domain.errors import InvalidInputError
from mc_allocation.domain.values import PValueSet

from .base import BaseAllocator


class GreedyAllocator(BaseAllocator):
    """Integer allocation by best decrease of g per sample."""

    strategy = "greedy"

    def allocate(self, p: PValueSet, budget: float) -> AllocationResult:
        if float(budget) != math.floor(budget):
            raise InvalidInputError(f"greedy needs an integer budget, got {budget!r}", field="K")
        result = greedy_allocate(p, int(budget), self.settings.greedy)
        return AllocationResult(
            strategy=self.strategy,
            allocation=result.allocation,
            metadata={
                "iterations": result.iterations,
                "unspent_budget": result.unspent_budget,
                "saturated": result.saturated,
                "jump": result.jump,
                "compat_flag": result.literal_argmax,
            },
            detail=result,
        )
