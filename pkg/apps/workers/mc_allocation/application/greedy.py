"""Greedy discrete allocation on the exact objective g.

Starting from k_i = I(p_i <= alpha), every round proposes one batch b_i per
hypothesis and accepts the batch with the best decrease of g per sample:

  p_i >  alpha            b_i = min{z >= 1 : g_i(k_i + z) < g_i(k_i)}
  p_i <= alpha, k < jump  b_i = jump - 1   (land on the first k where S = 1 still rejects)
  p_i <= alpha, k >= jump b_i = jump

The loop stops as soon as the chosen batch no longer fits strictly inside K,
or when no hypothesis can decrease g any more (saturation).
"""
from __future__ import annotations

import logging
import math

import numpy as np

from mc_allocation.config.solver import GreedyConfig
from mc_allocation.domain.entities import GreedyResult, GreedyState
from mc_allocation.domain.errors import InfeasibleBudgetError, InvalidInputError
from mc_allocation.domain.values import Allocation, PValueSet

from .misclassification import g_terms, jump_size

logger = logging.getLogger(__name__)


def _first_decrease(p: float, alpha: float, k: int, current: float, jump: int) -> int | None:
    """Smallest z >= 1 with g_i(k + z) < g_i(k), scanning blocks that double in size.

    The result may exceed the remaining budget; the caller's budget check
    decides whether it is spent. None means g_i is flat over 64 jumps.
    """
    start = 1
    width = max(1, jump)
    while start <= 64 * max(jump, 1):
        stop = start + width
        z = np.arange(start, stop, dtype=np.int64)
        values = g_terms(np.full(z.shape, p), alpha, k + z)
        hit = np.flatnonzero(values < current)
        if hit.size:
            return int(z[hit[0]])
        start = stop
        width *= 2
    return None


def batch_proposal(p: float, alpha: float, k: int, jump: int) -> tuple[int, float]:
    """(b, d) for one hypothesis: batch size and the change of g_i it causes.

    d = 0 signals that no batch can improve g_i (e.g. g_i(k) is already 0).
    """
    if not (0.0 <= p <= 1.0):
        raise InvalidInputError(f"p must lie in [0, 1], got {p!r}", field="p")
    if k < 0:
        raise InvalidInputError("k must be non-negative", field="k")
    current = float(g_terms(np.array([p]), alpha, np.array([k]))[0])

    if p <= alpha:
        b = jump - 1 if k < jump else jump
        b = max(b, 1)
        return b, float(g_terms(np.array([p]), alpha, np.array([k + b]))[0]) - current

    if current <= 0.0:
        return 1, 0.0
    z = _first_decrease(p, alpha, k, current, jump)
    if z is None:
        return 1, 0.0
    return z, float(g_terms(np.array([p]), alpha, np.array([k + z]))[0]) - current


def choose_next(d: np.ndarray, b: np.ndarray, *, literal_argmax: bool = False) -> int | None:
    """Index with the best improvement per sample, argmax_i (-d_i / b_i).

    Only strict improvements (d_i < 0) are candidates; ties go to the lowest
    index. Returns None when nothing improves. `literal_argmax` ranks by
    d_i / b_i instead, over every hypothesis.
    """
    d = np.asarray(d, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if d.shape != b.shape:
        raise InvalidInputError("d and b must have the same length", field="d")
    if np.any(b <= 0):
        raise InvalidInputError("batch sizes must be positive", field="b")
    if literal_argmax:
        return int(np.argmax(d / b)) if d.size else None
    improving = d < 0.0
    if not improving.any():
        return None
    benefit = np.where(improving, -d / b, -np.inf)
    return int(np.argmax(benefit))


def greedy_allocate(p: PValueSet, budget: int, config: GreedyConfig | None = None) -> GreedyResult:
    """Integer allocation filled batch by batch, never exceeding K."""
    cfg = config or GreedyConfig()
    if float(budget) != math.floor(budget):
        raise InvalidInputError(f"budget must be an integer, got {budget!r}", field="K")
    budget = int(budget)
    alpha = p.alpha
    values = p.values
    below = values <= alpha
    min_budget = int(np.count_nonzero(below))
    if budget < min_budget:
        raise InfeasibleBudgetError("greedy starts with one sample per rejected hypothesis", min_budget=min_budget)

    jump = jump_size(alpha)
    state = GreedyState(
        k=below.astype(np.int64),
        b=np.ones(p.m, dtype=np.int64),
        d=np.zeros(p.m, dtype=np.float64),
        jump=jump,
    )
    spent = int(state.k.sum())

    def propose(i: int) -> None:
        b_i, d_i = batch_proposal(float(values[i]), alpha, int(state.k[i]), jump)
        state.b[i] = b_i
        state.d[i] = d_i

    for i in range(p.m):
        propose(i)

    objective = math.fsum(g_terms(values, alpha, state.k).tolist())
    trace = [objective]
    iterations = 0
    saturated = False
    while cfg.max_iterations is None or iterations < cfg.max_iterations:
        j = choose_next(state.d, state.b, literal_argmax=cfg.literal_argmax)
        if j is None:
            saturated = True
            break
        state.j = j
        if spent + int(state.b[j]) >= budget:
            break
        state.k[j] += state.b[j]
        spent += int(state.b[j])
        objective += float(state.d[j])
        trace.append(objective)
        iterations += 1
        # only hypothesis j changed; its proposal is the only one to refresh
        propose(j)

    unspent = budget - spent
    logger.info(
        "greedy allocation",
        extra={
            "m": p.m,
            "K": budget,
            "iterations": iterations,
            "unspent": unspent,
            "saturated": saturated,
            "jump": jump,
            "literal_argmax": cfg.literal_argmax,
        },
    )
    return GreedyResult(
        allocation=Allocation.discrete(state.k.copy()),
        iterations=iterations,
        unspent_budget=unspent,
        saturated=saturated,
        jump=jump,
        literal_argmax=cfg.literal_argmax,
        objective_trace=tuple(trace),
    )
