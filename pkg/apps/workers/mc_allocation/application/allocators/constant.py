import math

from mc_allocation.application.experiments import constant_allocation
from mc_allocation.domain.entities import AllocationResult
from mc_allocation.domain.values import PValueSet

from .base import BaseAllocator


class ConstantAllocator(BaseAllocator):
    strategy = "constant"

    def allocate(self, p: PValueSet, budget: float) -> AllocationResult:
        k = int(math.floor(budget)) // p.m
        return AllocationResult(
            strategy=self.strategy,
            allocation=constant_allocation(p.m, int(math.floor(budget))),
            metadata={"k": k},
        )
