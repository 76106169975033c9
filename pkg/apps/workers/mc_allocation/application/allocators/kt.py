from mc_allocation.application.kt_solver import solve_optimal
from mc_allocation.application.rounding import ROUNDING_RULE
from mc_allocation.domain.entities import AllocationResult
from mc_allocation.domain.values import PValueSet

from .base import BaseAllocator


class KtAllocator(BaseAllocator):
    """Continuous Kuhn-Tucker optimum; budgets may be fractional."""

    strategy = "kt"

    def allocate(self, p: PValueSet, budget: float) -> AllocationResult:
        solver = self.settings.solver
        solution = solve_optimal(p, budget, solver)
        return AllocationResult(
            strategy=self.strategy,
            allocation=solution.allocation,
            metadata={
                "lambda_star": solution.lambda_star,
                "stationarity_residual": solution.stationarity_residual,
                "budget_error": solution.budget_error,
                "iterations_outer": solution.iterations_outer,
                "iterations_inner_total": solution.iterations_inner_total,
                "degenerate": list(solution.degenerate),
                "infeasible_floor": solution.infeasible_floor,
                "floored": list(solution.floored),
                "rounding": ROUNDING_RULE,
                "tolerances": solver.model_dump(),
            },
            detail=solution,
        )
