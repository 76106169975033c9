"""Adaptive allocation by Thompson sampling.

Each hypothesis carries a Beta(s + 1, k - s + 1) posterior over its p-value
(flat prior). Every iteration draws d posterior samples per hypothesis,
measures how unstable the classification against alpha is,

    q_i = #{draws <= alpha} / d,    w_i = min(q_i, 1 - q_i),

and spends the next batch proportionally to w. The allocator only sees
exceedance counts from the oracle, never the p-values themselves.
"""
from __future__ import annotations

import logging
import math

import numpy as np
from scipy import stats

from mc_allocation.domain.entities import ThompsonRun
from mc_allocation.domain.errors import InvalidInputError, OracleError
from mc_allocation.domain.ports import SamplingOracle
from mc_allocation.domain.values import Allocation, Classification, MonteCarloState, ThompsonConfig
from mc_allocation.infrastructure.rng import STREAM_POSTERIOR, stream_for

from .rounding import proportional_split

logger = logging.getLogger(__name__)

VARIANT = "beta-flat-prior/instability-min(q,1-q)/largest-remainder"


def posterior_draw(k: int, s: int, rng: np.random.Generator) -> float:
    """One draw from Beta(s + 1, k - s + 1)."""
    if not (0 <= s <= k):
        raise InvalidInputError(f"need 0 <= s <= k, got s={s!r}, k={k!r}", field="s")
    return float(rng.beta(s + 1.0, k - s + 1.0))


def instability_weights(state: MonteCarloState, alpha: float, d: int, rng: np.random.Generator) -> np.ndarray:
    """w_i = min(q_i, 1 - q_i) from d posterior draws per hypothesis; values in [0, 0.5]."""
    if int(d) < 1:
        raise InvalidInputError("must be >= 1", field="posterior_draws")
    a = state.s + 1.0
    b = state.k - state.s + 1.0
    draws = rng.beta(a, b, size=(int(d), state.m))
    q = np.count_nonzero(draws <= alpha, axis=0) / float(d)
    return np.minimum(q, 1.0 - q)


def allocate_batch(weights: np.ndarray, batch: int) -> np.ndarray:
    """Split `batch` proportionally to `weights` (uniformly if they are all zero)."""
    if int(batch) < 0:
        raise InvalidInputError("must be non-negative", field="batch")
    return proportional_split(weights, int(batch))


def batch_schedule(total_budget: int, iterations: int) -> list[int]:
    """floor(K / it) per iteration; the last iteration takes the remainder."""
    base = total_budget // iterations
    sizes = [base] * iterations
    sizes[-1] += total_budget - base * iterations
    return sizes


def _query(oracle: SamplingOracle, counts: np.ndarray, state: MonteCarloState, iteration: int) -> np.ndarray:
    try:
        s_add = np.asarray(oracle.draw(counts), dtype=np.int64)
    except OracleError:
        raise
    except Exception as exc:
        raise OracleError(f"oracle failed: {exc}", state=state, iteration=iteration) from exc
    if s_add.shape != counts.shape or np.any(s_add < 0) or np.any(s_add > counts):
        raise OracleError("oracle returned inconsistent exceedance counts", state=state, iteration=iteration)
    return s_add


def run(oracle: SamplingOracle, m: int, alpha: float, cfg: ThompsonConfig) -> ThompsonRun:
    """Spend exactly cfg.total_budget samples over cfg.iterations rounds.

    The final classification rejects i iff (s_i + 1) / (k_i + 1) <= alpha.
    """
    if int(m) < 1 or getattr(oracle, "m", m) != m:
        raise InvalidInputError(f"oracle serves {getattr(oracle, 'm', None)} hypotheses, expected {m}", field="m")
    if not (0.0 < alpha < 1.0):
        raise InvalidInputError(f"alpha must lie in (0, 1), got {alpha!r}", field="alpha")

    rng = stream_for(cfg.seed, STREAM_POSTERIOR)
    state = MonteCarloState.empty(m)
    budget = int(cfg.total_budget)
    iterations = int(cfg.iterations)

    if cfg.warm_up:
        if budget < m + iterations:
            raise InvalidInputError(
                f"warm-up needs K >= m + it = {m + iterations}", field="warm_up"
            )
        ones = np.ones(m, dtype=np.int64)
        state = state.add(ones, _query(oracle, ones, state, 0))
        budget -= m

    weight_sum = np.zeros(m, dtype=np.float64)
    sizes = batch_schedule(budget, iterations)
    for it, batch in enumerate(sizes, start=1):
        w = instability_weights(state, alpha, cfg.posterior_draws, rng)
        weight_sum += w
        counts = allocate_batch(w, batch)
        state = state.add(counts, _query(oracle, counts, state, it))
        if it == 1 or it == iterations or it % max(1, iterations // 10) == 0:
            logger.debug(
                "thompson iteration",
                extra={"iteration": it, "batch": batch, "active": int(np.count_nonzero(w)), "spent": int(state.k.sum())},
            )

    allocation = Allocation.discrete(state.k)
    classification = Classification(state.p_hat_plus_one() <= alpha)
    classification_raw = Classification(state.p_hat_raw() <= alpha)
    mean_weights = weight_sum / float(iterations)
    logger.info(
        "thompson run",
        extra={
            "m": m,
            "K": int(cfg.total_budget),
            "it": iterations,
            "d": cfg.posterior_draws,
            "seed": cfg.seed,
            "warm_up": cfg.warm_up,
            "rejected": len(classification),
            "rejected_raw": len(classification_raw),
        },
    )
    return ThompsonRun(
        allocation=allocation,
        classification=classification,
        state=state,
        mean_weights=mean_weights,
        iterations=iterations,
        batch_sizes=tuple(sizes),
        classification_raw=classification_raw,
    )


def spearman(x: np.ndarray, y: np.ndarray) -> float:
    """Rank correlation used to check that budget follows the instability weights."""
    rho = stats.spearmanr(x, y).statistic
    return float(rho) if not math.isnan(rho) else 0.0
