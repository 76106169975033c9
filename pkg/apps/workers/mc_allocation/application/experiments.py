"""Evaluation protocols: theoretical vs. empirical misclassifications, the
convergence study over a budget grid, g_i profiles, and side-by-side
allocations of all strategies.

Two rejection rules coexist. The objectives g and h (and every solver) reject
when S/k <= alpha; the empirical protocol classifies with the plus-one
estimate (S + 1)/(k + 1) <= alpha unless `Estimator.RAW` is requested.
"""
from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from mc_allocation.application.dto.reports import ConvergencePoint, MisclassificationReport
from mc_allocation.config.experiment import Estimator
from mc_allocation.config.solver import GreedyConfig, SolverConfig
from mc_allocation.config.thompson import ThompsonSettings
from mc_allocation.domain.entities import GreedyResult, KtSolution, ThompsonRun
from mc_allocation.domain.errors import InvalidInputError
from mc_allocation.domain.values import Allocation, PValueSet, ThompsonConfig
from mc_allocation.infrastructure.oracle import SimulatedOracle
from mc_allocation.infrastructure.rng import RNG_ID, STREAM_EMPIRICAL, STREAM_STUDY, child_seed, stream_for

from . import thompson
from .greedy import greedy_allocate
from .hypotheses import bonferroni
from .kt_solver import solve_optimal
from .misclassification import g_terms, h
from .rounding import ROUNDING_RULE, round_allocation

logger = logging.getLogger(__name__)


def constant_allocation(m: int, budget: int) -> Allocation:
    """Baseline k_i = floor(K / m) for every hypothesis."""
    if int(m) < 1:
        raise InvalidInputError("must be >= 1", field="m")
    if int(budget) < 0:
        raise InvalidInputError("must be non-negative", field="K")
    return Allocation.discrete(np.full(int(m), int(budget) // int(m), dtype=np.int64))


def classify_draws(s: np.ndarray, k: np.ndarray, alpha: float, estimator: Estimator) -> np.ndarray:
    """Rejection mask from observed exceedances under the chosen estimator."""
    s = np.asarray(s, dtype=np.float64)
    k = np.asarray(k, dtype=np.float64)
    if Estimator(estimator) is Estimator.PLUS_ONE:
        return (s + 1.0) / (k + 1.0) <= alpha
    p_hat = np.divide(s, k, out=np.zeros_like(s), where=k > 0)
    return p_hat <= alpha


def empirical_misclassifications(
    p: PValueSet,
    k: Allocation,
    r: int,
    seed: int,
    estimator: Estimator = Estimator.PLUS_ONE,
) -> list[int]:
    """Misclassification counts of r independent redraws S_i ~ Binomial(k_i, p_i).

    Repetition j uses its own child stream of `seed`, so any prefix of the
    runs is reproducible on its own.
    """
    if p.m != k.m:
        raise InvalidInputError(f"dimension mismatch: {p.m} p-values vs {k.m} budgets", field="allocation")
    if not k.is_discrete:
        raise InvalidInputError(
            f"empirical protocol needs an integer allocation; round first ({ROUNDING_RULE})", field="allocation"
        )
    if int(r) < 1:
        raise InvalidInputError("must be >= 1", field="r")
    truth = bonferroni(p).mask
    counts: list[int] = []
    for j in range(int(r)):
        rng = stream_for(seed, STREAM_EMPIRICAL, j)
        s = rng.binomial(k.budgets, p.values)
        rejected = classify_draws(s, k.budgets, p.alpha, estimator)
        counts.append(int(np.count_nonzero(rejected != truth)))
    return counts


def misclassification_report(
    strategy: str,
    p: PValueSet,
    allocation: Allocation,
    budget: int,
    r: int,
    seed: int,
    estimator: Estimator,
    *,
    theoretical_continuous: float | None = None,
    parameters: dict | None = None,
) -> MisclassificationReport:
    """Theoretical h and r empirical misclassification counts for one allocation."""
    runs = empirical_misclassifications(p, allocation, r, seed, estimator)
    return MisclassificationReport(
        strategy=strategy,
        m=p.m,
        alpha=p.alpha,
        K=budget,
        r=r,
        seed=seed,
        rng=RNG_ID,
        estimator=estimator,
        theoretical=h(p, allocation).value,
        theoretical_continuous=theoretical_continuous,
        empirical_runs=runs,
        empirical_mean=math.fsum(runs) / len(runs),
        parameters=parameters or {},
    )


def thompson_config(budget: int, settings: ThompsonSettings, seed: int, m: int) -> ThompsonConfig:
    """Run config from settings; `it` is capped so small budgets stay valid."""
    spendable = int(budget) - (m if settings.warm_up else 0)
    iterations = max(1, min(settings.iterations, spendable))
    return ThompsonConfig(
        total_budget=int(budget),
        iterations=iterations,
        posterior_draws=settings.posterior_draws,
        seed=seed,
        warm_up=settings.warm_up,
    )


def run_thompson(
    p: PValueSet, budget: int, settings: ThompsonSettings, seed: int
) -> tuple[ThompsonRun, ThompsonConfig]:
    """Thompson allocation against a simulated oracle backed by p."""
    cfg = thompson_config(budget, settings, seed, p.m)
    return thompson.run(SimulatedOracle(p, seed), p.m, p.alpha, cfg), cfg


def table1_protocol(
    p: PValueSet,
    budget: int,
    r: int,
    *,
    seed: int = 0,
    solver: SolverConfig | None = None,
    thompson_settings: ThompsonSettings | None = None,
    greedy: GreedyConfig | None = None,
    estimator: Estimator = Estimator.PLUS_ONE,
    include_greedy: bool = False,
) -> list[MisclassificationReport]:
    """Reports for the KT optimum (rounded), Thompson, the constant baseline and optionally greedy.

    Every strategy is evaluated on the same empirical streams of `seed`.
    """
    solver = solver or SolverConfig()
    thompson_settings = thompson_settings or ThompsonSettings()
    budget = int(budget)

    kt = solve_optimal(p, budget, solver)
    kt_rounded = round_allocation(kt.allocation, budget)
    reports = [
        misclassification_report(
            "optimal_kt",
            p,
            kt_rounded,
            budget,
            r,
            seed,
            estimator,
            theoretical_continuous=h(p, kt.allocation).value,
            parameters=kt_parameters(kt, solver),
        )
    ]

    run, cfg = run_thompson(p, budget, thompson_settings, seed)
    reports.append(
        misclassification_report("thompson", p, run.allocation, budget, r, seed, estimator, parameters=thompson_parameters(cfg))
    )
    reports.append(
        misclassification_report("constant", p, constant_allocation(p.m, budget), budget, r, seed, estimator, parameters={"k": budget // p.m})
    )
    if include_greedy:
        result = greedy_allocate(p, budget, greedy)
        reports.append(
            misclassification_report("greedy", p, result.allocation, budget, r, seed, estimator, parameters=greedy_parameters(result))
        )
    for rep in reports:
        logger.info(
            "misclassification report",
            extra={
                "strategy": rep.strategy,
                "theoretical": rep.theoretical,
                "empirical_mean": rep.empirical_mean,
                "K": budget,
                "r": r,
            },
        )
    return reports


def kt_parameters(kt: KtSolution, solver: SolverConfig) -> dict:
    return {
        "lambda_star": kt.lambda_star,
        "stationarity_residual": kt.stationarity_residual,
        "budget_error": kt.budget_error,
        "iterations_outer": kt.iterations_outer,
        "iterations_inner_total": kt.iterations_inner_total,
        "degenerate": list(kt.degenerate),
        "infeasible_floor": kt.infeasible_floor,
        "floored": list(kt.floored),
        "rounding": ROUNDING_RULE,
        "solver": solver.model_dump(),
    }


def thompson_parameters(cfg: ThompsonConfig) -> dict:
    return {
        "it": cfg.iterations,
        "d": cfg.posterior_draws,
        "warm_up": cfg.warm_up,
        "variant": thompson.VARIANT,
    }


def greedy_parameters(result: GreedyResult) -> dict:
    return {
        "iterations": result.iterations,
        "unspent_budget": result.unspent_budget,
        "saturated": result.saturated,
        "jump": result.jump,
        "literal_argmax": result.literal_argmax,
    }


def budget_grid(k_min: int, k_max: int, steps: int) -> list[int]:
    """Log-spaced integer budgets from k_min to k_max; duplicates after rounding are dropped."""
    if not (0 < k_min < k_max) or steps < 2:
        raise InvalidInputError("need 0 < k_min < k_max and steps >= 2", field="K_grid")
    grid = np.unique(np.rint(np.geomspace(k_min, k_max, steps)).astype(np.int64))
    return [int(v) for v in grid]


def _convergence_point(
    p: PValueSet,
    budget: int,
    r: int,
    seed: int,
    solver: SolverConfig,
    thompson_settings: ThompsonSettings,
    estimator: Estimator,
) -> ConvergencePoint:
    task_seed = child_seed(seed, STREAM_STUDY, budget)
    kt = solve_optimal(p, budget, solver)
    correct_theoretical = p.m - h(p, kt.allocation).value
    run, _ = run_thompson(p, budget, thompson_settings, task_seed)
    runs = empirical_misclassifications(p, run.allocation, r, task_seed, estimator)
    ratios = (p.m - np.asarray(runs, dtype=np.float64)) / correct_theoretical
    q05, q50, q95 = np.quantile(ratios, [0.05, 0.5, 0.95])
    logger.info(
        "convergence point",
        extra={"K": budget, "q05": float(q05), "q50": float(q50), "q95": float(q95), "r": r},
    )
    return ConvergencePoint(K=budget, q05=float(q05), q50=float(q50), q95=float(q95))


def convergence_study(
    p: PValueSet,
    k_grid: list[int],
    r: int,
    *,
    seed: int = 0,
    solver: SolverConfig | None = None,
    thompson_settings: ThompsonSettings | None = None,
    estimator: Estimator = Estimator.PLUS_ONE,
    threads: int | None = None,
) -> list[ConvergencePoint]:
    """Quantiles of (m - empirical_j) / (m - h(k*(K))) for Thompson allocations over a K grid.

    Grid points run in a thread pool; each derives its seed from (seed, K), so
    the result does not depend on the thread count.
    """
    grid = [int(k) for k in k_grid]
    if not grid:
        raise InvalidInputError("must not be empty", field="K_grid")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise InvalidInputError("must be strictly increasing", field="K_grid")
    if int(r) < 1:
        raise InvalidInputError("must be >= 1", field="r")
    solver = solver or SolverConfig()
    thompson_settings = thompson_settings or ThompsonSettings()
    workers = threads or os.cpu_count() or 1

    def task(budget: int) -> ConvergencePoint:
        return _convergence_point(p, budget, r, seed, solver, thompson_settings, estimator)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        points = list(pool.map(task, grid))
    return sorted(points, key=lambda pt: pt.budget)


def profile_g(p: float, alpha: float, k_max: int) -> list[tuple[int, float]]:
    """(k, g_i(k)) for k = 0..k_max."""
    if int(k_max) < 1:
        raise InvalidInputError("must be >= 1", field="k_max")
    if not (0.0 <= p <= 1.0):
        raise InvalidInputError(f"p must lie in [0, 1], got {p!r}", field="p")
    if not (0.0 < alpha < 1.0):
        raise InvalidInputError(f"alpha must lie in (0, 1), got {alpha!r}", field="alpha")
    k = np.arange(int(k_max) + 1, dtype=np.int64)
    values = g_terms(np.full(k.shape, float(p)), alpha, k)
    return [(int(a), float(b)) for a, b in zip(k, values)]


@dataclass(frozen=True, eq=False)
class AllocationComparison:
    """KT (continuous and rounded), greedy and constant allocations for one budget."""

    kt: KtSolution
    kt_rounded: Allocation
    greedy: GreedyResult
    constant: Allocation


def compare_allocations(
    p: PValueSet,
    budget: int,
    *,
    solver: SolverConfig | None = None,
    greedy: GreedyConfig | None = None,
) -> AllocationComparison:
    budget = int(budget)
    kt = solve_optimal(p, budget, solver)
    return AllocationComparison(
        kt=kt,
        kt_rounded=round_allocation(kt.allocation, budget),
        greedy=greedy_allocate(p, budget, greedy),
        constant=constant_allocation(p.m, budget),
    )
