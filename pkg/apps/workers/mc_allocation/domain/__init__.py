from .entities import AllocationResult, GreedyResult, GreedyState, KtSolution, ThompsonRun
from .errors import (
    AllocationError,
    ConvergenceError,
    DegenerateHypothesisError,
    InfeasibleBudgetError,
    InvalidInputError,
    OracleError,
    StorageError,
)
from .ports import SamplingOracle
from .values import (
    Allocation,
    AllocationMode,
    Classification,
    MixtureConfig,
    MonteCarloState,
    ObjectiveValue,
    PValueSet,
    ThompsonConfig,
)

__all__ = [
    "Allocation",
    "AllocationError",
    "AllocationMode",
    "AllocationResult",
    "Classification",
    "ConvergenceError",
    "DegenerateHypothesisError",
    "GreedyResult",
    "GreedyState",
    "InfeasibleBudgetError",
    "InvalidInputError",
    "KtSolution",
    "MixtureConfig",
    "MonteCarloState",
    "ObjectiveValue",
    "OracleError",
    "PValueSet",
    "SamplingOracle",
    "StorageError",
    "ThompsonConfig",
    "ThompsonRun",
]
