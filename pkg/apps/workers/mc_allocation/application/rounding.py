from __future__ import annotations

import math

import numpy as np

from mc_allocation.domain.errors import InvalidInputError
from mc_allocation.domain.values import Allocation

ROUNDING_RULE = "largest-remainder to floor(K), ties by lowest index"


def largest_remainder(quotas: np.ndarray, total: int) -> np.ndarray:
    """Integer vector summing to `total` that stays within 1 of each quota.

    Floors every quota, then hands the missing units to the largest fractional
    parts (lowest index first on ties). If the floors already exceed `total`,
    units are taken back from the smallest fractional parts among positive entries.
    """
    quotas = np.asarray(quotas, dtype=np.float64)
    if np.any(quotas < 0) or not np.all(np.isfinite(quotas)):
        raise InvalidInputError("quotas must be finite and non-negative", field="quotas")
    total = int(total)
    base = np.floor(quotas).astype(np.int64)
    remainder = quotas - base
    missing = total - int(base.sum())
    if missing > 0:
        # stable sort on -remainder keeps lower indices first among ties
        order = np.argsort(-remainder, kind="stable")
        reps, extra = divmod(missing, quotas.size)
        base += reps
        base[order[:extra]] += 1
    elif missing < 0:
        order = np.argsort(remainder, kind="stable")
        for idx in order:
            if missing == 0:
                break
            take = min(int(base[idx]), -missing)
            base[idx] -= take
            missing += take
    return base


def proportional_split(weights: np.ndarray, batch: int) -> np.ndarray:
    """Split `batch` proportionally to non-negative weights; uniform when all are zero."""
    weights = np.asarray(weights, dtype=np.float64)
    if weights.size == 0:
        return np.zeros(0, dtype=np.int64)
    if np.any(weights < 0):
        raise InvalidInputError("weights must be non-negative", field="weights")
    total_weight = math.fsum(weights.tolist())
    if total_weight > 0.0:
        quotas = weights * (batch / total_weight)
    else:
        quotas = np.full(weights.size, batch / weights.size)
    return largest_remainder(quotas, batch)


def round_allocation(allocation: Allocation, budget: float) -> Allocation:
    """Discrete allocation summing to floor(K) closest to a continuous one."""
    if allocation.is_discrete:
        return allocation
    return Allocation.discrete(largest_remainder(allocation.budgets, int(math.floor(budget))))
