import math

from mc_allocation.application import thompson
from mc_allocation.application.experiments import thompson_config
from mc_allocation.domain.entities import AllocationResult
from mc_allocation.domain.errors import InvalidInputError
from mc_allocation.domain.ports import SamplingOracle
from mc_allocation.domain.values import PValueSet
from mc_allocation.infrastructure.oracle import SimulatedOracle
from mc_allocation.infrastructure.rng import RNG_ID

from .base import BaseAllocator


class ThompsonAllocator(BaseAllocator):
    """Adaptive allocation; without an explicit oracle, samples are simulated from p."""

    strategy = "thompson"

    def __init__(self, settings=None, *, seed: int = 0, oracle: SamplingOracle | None = None) -> None:
        super().__init__(settings, seed=seed)
        self.oracle = oracle

    def allocate(self, p: PValueSet, budget: float) -> AllocationResult:
        if float(budget) != math.floor(budget):
            raise InvalidInputError(f"thompson needs an integer budget, got {budget!r}", field="K")
        cfg = thompson_config(int(budget), self.settings.thompson, self.seed, p.m)
        oracle = self.oracle if self.oracle is not None else SimulatedOracle(p, self.seed)
        run = thompson.run(oracle, p.m, p.alpha, cfg)
        return AllocationResult(
            strategy=self.strategy,
            allocation=run.allocation,
            metadata={
                "K": cfg.total_budget,
                "it": cfg.iterations,
                "d": cfg.posterior_draws,
                "seed": cfg.seed,
                "warm_up": cfg.warm_up,
                "rng": RNG_ID,
                "variant": thompson.VARIANT,
                "rejected_plus_one": len(run.classification),
                "rejected_raw": len(run.classification_raw),
            },
            detail=run,
        )
