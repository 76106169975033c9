"""Continuous optimal allocation under a normal approximation.

h(k) is separable and each dh_i/dk_i is negative and strictly increasing in
k_i, so the Kuhn-Tucker system reduces to dh_i/dk_i = -lambda for every
hypothesis. Two nested bisections solve it:

  inner: for a fixed lambda, k_i(lambda) per hypothesis (vectorised over i),
  outer: lambda such that sum_i k_i(lambda) = K (the sum decreases in lambda).

Both searches run in log space; log|dh/dk| stays finite where the derivative
itself underflows.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from mc_allocation.config.solver import SolverConfig
from mc_allocation.domain.entities import KtSolution
from mc_allocation.domain.errors import ConvergenceError, DegenerateHypothesisError, InvalidInputError
from mc_allocation.domain.values import Allocation, PValueSet

from .misclassification import log_abs_dh_dk

logger = logging.getLogger(__name__)

# bisection stops once the bracket cannot shrink any further in float64
_BRACKET_RESOLUTION = 4.0 * np.finfo(np.float64).eps


@dataclass
class _InnerResult:
    log_k: np.ndarray
    iterations: int
    residual: float


def _relative_residual(p: np.ndarray, alpha: float, log_k: np.ndarray, log_lam: float) -> np.ndarray:
    """|dh/dk + lambda| / lambda."""
    return np.abs(np.expm1(log_abs_dh_dk(p, alpha, log_k) - log_lam))


def _solve_inner(p: np.ndarray, alpha: float, log_lam: float, cfg: SolverConfig) -> _InnerResult:
    """k_i with dh_i/dk_i = -lambda for every i, by bracketing then bisection on log k."""
    step = math.log(cfg.bracket_growth)
    lo = np.full(p.shape, math.log(cfg.inner_k_lo))
    hi = np.full(p.shape, math.log(cfg.inner_k_hi))

    # |dh/dk| decreases in k: need f(lo) >= log lambda >= f(hi)
    for _ in range(cfg.max_inner_iter):
        short = log_abs_dh_dk(p, alpha, lo) < log_lam
        if not short.any():
            break
        hi = np.where(short, lo, hi)
        lo = np.where(short, lo - step, lo)
    else:
        raise ConvergenceError("inner bracket (lower end) not found", lam=math.exp(log_lam))
    for _ in range(cfg.max_inner_iter):
        short = log_abs_dh_dk(p, alpha, hi) > log_lam
        if not short.any():
            break
        lo = np.where(short, hi, lo)
        hi = np.where(short, hi + step, hi)
    else:
        raise ConvergenceError("inner bracket (upper end) not found", lam=math.exp(log_lam))

    iterations = 0
    mid = 0.5 * (lo + hi)
    residual = _relative_residual(p, alpha, mid, log_lam)
    while iterations < cfg.max_inner_iter:
        if residual.max() <= 0.1 * cfg.stationarity_tol:
            break
        if np.all(hi - lo <= _BRACKET_RESOLUTION * np.maximum(1.0, np.abs(mid))):
            break
        iterations += 1
        above = log_abs_dh_dk(p, alpha, mid) > log_lam
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
        mid = 0.5 * (lo + hi)
        residual = _relative_residual(p, alpha, mid, log_lam)

    worst = float(residual.max())
    if worst > cfg.stationarity_tol:
        raise ConvergenceError(
            "inner bisection did not reach the stationarity tolerance",
            lam=math.exp(log_lam),
            residual=worst,
            iterations=iterations,
        )
    return _InnerResult(mid, iterations, worst)


def _check_active(p: float, alpha: float, cfg: SolverConfig) -> None:
    if not (0.0 < p < 1.0):
        raise DegenerateHypothesisError(f"p = {p!r} has zero variance under the normal approximation", field="p")
    if abs(p - alpha) <= cfg.degeneracy_eps:
        raise DegenerateHypothesisError(f"|p - alpha| <= {cfg.degeneracy_eps:g}: derivative vanishes", field="p")


def solve_k_given_lambda(p: float, alpha: float, lam: float, config: SolverConfig | None = None) -> float:
    """Unique k > 0 with dh_i/dk = -lambda (exists for every lambda > 0)."""
    cfg = config or SolverConfig()
    if not (0.0 < alpha < 1.0):
        raise InvalidInputError(f"alpha must lie in (0, 1), got {alpha!r}", field="alpha")
    _check_active(p, alpha, cfg)
    if not (lam > 0.0) or not math.isfinite(lam):
        raise InvalidInputError(f"lambda must be positive and finite, got {lam!r}", field="lambda")
    res = _solve_inner(np.array([p], dtype=np.float64), alpha, math.log(lam), cfg)
    return float(math.exp(res.log_k[0]))


def active_mask(p: PValueSet, config: SolverConfig | None = None) -> np.ndarray:
    """Hypotheses that enter the stationarity system."""
    cfg = config or SolverConfig()
    v = p.values
    return (v > 0.0) & (v < 1.0) & (np.abs(v - p.alpha) > cfg.degeneracy_eps)


def total_for_lambda(p: PValueSet, lam: float, config: SolverConfig | None = None) -> float:
    """sum_i k_i(lambda) over the active hypotheses; strictly decreasing in lambda."""
    cfg = config or SolverConfig()
    mask = active_mask(p, cfg)
    if not mask.any():
        return 0.0
    res = _solve_inner(p.values[mask], p.alpha, math.log(lam), cfg)
    return math.fsum(np.exp(res.log_k).tolist())


def solve_optimal(p: PValueSet, budget: float, config: SolverConfig | None = None) -> KtSolution:
    """Continuous allocation minimising h subject to sum(k) = K.

    Degenerate hypotheses (p in {0, 1}, or p within `degeneracy_eps` of alpha)
    are left out of the system and receive budget 0.
    """
    cfg = config or SolverConfig()
    budget = float(budget)
    if not (budget > 0.0) or not math.isfinite(budget):
        raise InvalidInputError(f"budget must be positive and finite, got {budget!r}", field="K")

    mask = active_mask(p, cfg)
    degenerate = tuple(int(i) for i in np.flatnonzero(~mask))
    if not mask.any():
        raise DegenerateHypothesisError("every hypothesis is degenerate; nothing to optimise", field="p")
    p_act = p.values[mask]
    alpha = p.alpha

    infeasible_floor = False
    floor = cfg.k_floor
    if floor > 0.0 and budget < floor * p_act.size:
        infeasible_floor = True
        floor = 0.0
        logger.warning(
            "budget below the positivity floor; floor relaxed",
            extra={"K": budget, "k_floor": cfg.k_floor, "active": int(p_act.size)},
        )

    inner_total = 0

    def total(log_lam: float) -> tuple[float, _InnerResult]:
        nonlocal inner_total
        res = _solve_inner(p_act, alpha, log_lam, cfg)
        inner_total += res.iterations
        return math.fsum(np.maximum(np.exp(res.log_k), floor).tolist()), res

    step = math.log(cfg.bracket_growth)
    start = float(np.max(log_abs_dh_dk(p_act, alpha, np.full(p_act.shape, math.log(budget)))))
    log_hi = start
    log_lo = start
    for _ in range(cfg.max_outer_iter):
        s_hi, _ = total(log_hi)
        if s_hi <= budget:
            break
        log_lo = log_hi
        log_hi += step
    else:
        raise ConvergenceError("outer bracket (upper lambda) not found", K=budget)
    for _ in range(cfg.max_outer_iter):
        s_lo, _ = total(log_lo)
        if s_lo >= budget:
            break
        log_hi = min(log_hi, log_lo)
        log_lo -= step
    else:
        raise ConvergenceError("outer bracket (lower lambda) not found", K=budget)

    tol = cfg.budget_tol(budget)
    outer = 0
    log_mid = 0.5 * (log_lo + log_hi)
    s_mid, res = total(log_mid)
    while outer < cfg.max_outer_iter:
        if s_mid == budget or log_hi - log_lo <= _BRACKET_RESOLUTION * max(1.0, abs(log_mid)):
            break
        outer += 1
        if s_mid > budget:
            log_lo = log_mid
        else:
            log_hi = log_mid
        log_mid = 0.5 * (log_lo + log_hi)
        s_mid, res = total(log_mid)

    if abs(s_mid - budget) > tol:
        raise ConvergenceError(
            "outer bisection did not meet the budget",
            K=budget,
            total=s_mid,
            lam=math.exp(log_mid),
            iterations=outer,
        )

    stationary = np.exp(res.log_k)
    budgets = np.zeros(p.m, dtype=np.float64)
    budgets[mask] = np.maximum(stationary, floor)
    # active hypotheses held at k_floor instead of their stationary budget
    floored = tuple(int(i) for i in np.flatnonzero(mask)[stationary < floor])
    solution = KtSolution(
        allocation=Allocation.continuous(budgets),
        lambda_star=math.exp(log_mid),
        stationarity_residual=res.residual,
        iterations_outer=outer,
        iterations_inner_total=inner_total,
        budget=budget,
        degenerate=degenerate,
        infeasible_floor=infeasible_floor,
        floored=floored,
    )
    logger.info(
        "kt solution",
        extra={
            "m": p.m,
            "K": budget,
            "lambda_star": solution.lambda_star,
            "residual": solution.stationarity_residual,
            "budget_error": solution.budget_error,
            "outer": outer,
            "inner_total": inner_total,
            "degenerate": len(degenerate),
            "floored": len(floored),
        },
    )
    return solution
