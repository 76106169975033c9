from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidInputError


def _frozen(values: Iterable[float] | np.ndarray, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True).reshape(-1)
    arr.setflags(write=False)
    return arr


def _as_array(values) -> np.ndarray:
    return values if isinstance(values, np.ndarray) else np.asarray(list(values))


@dataclass(frozen=True, eq=False)
class PValueSet:
    """Ideal p-values p_1..p_m together with the Bonferroni threshold alpha."""

    values: np.ndarray
    alpha: float

    def __post_init__(self):
        arr = _frozen(self.values, np.float64)
        if arr.size < 1:
            raise InvalidInputError("at least one p-value is required", field="values")
        if not np.all(np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
            raise InvalidInputError("p-values must lie in [0, 1]", field="values")
        alpha = float(self.alpha)
        if not (0.0 < alpha < 1.0):
            raise InvalidInputError(f"alpha must lie in (0, 1), got {alpha!r}", field="alpha")
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "alpha", alpha)

    @property
    def m(self) -> int:
        return int(self.values.size)

    def __len__(self) -> int:
        return self.m

    @classmethod
    def with_alpha_star(cls, values: Sequence[float] | np.ndarray, alpha_star: float) -> "PValueSet":
        """Bonferroni-corrected threshold alpha = alpha_star / m."""
        arr = np.asarray(values, dtype=np.float64).reshape(-1)
        if arr.size < 1:
            raise InvalidInputError("at least one p-value is required", field="values")
        return cls(arr, float(alpha_star) / arr.size)


@dataclass(frozen=True)
class MixtureConfig:
    """pi0 * Uniform[0,1] + (1 - pi0) * Beta(shape1, shape2) p-value mixture."""

    m: int
    pi0: float = 0.5
    beta_shape1: float = 0.25
    beta_shape2: float = 25.0
    seed: int = 0
    sort_output: bool = True

    def __post_init__(self):
        if int(self.m) < 1:
            raise InvalidInputError("must be >= 1", field="m")
        if not (0.0 <= float(self.pi0) <= 1.0):
            raise InvalidInputError(f"must lie in [0, 1], got {self.pi0!r}", field="pi0")
        if not float(self.beta_shape1) > 0.0:
            raise InvalidInputError("must be positive", field="beta_shape1")
        if not float(self.beta_shape2) > 0.0:
            raise InvalidInputError("must be positive", field="beta_shape2")
        if int(self.seed) < 0:
            raise InvalidInputError("must be non-negative", field="seed")

    def nulls_among_first(self, n: int) -> int:
        """floor(pi0 * n + 0.5): nulls among hypotheses 0..n-1, independent of m."""
        return int(math.floor(self.pi0 * int(n) + 0.5))

    @property
    def null_count(self) -> int:
        return self.nulls_among_first(self.m)

    def null_mask(self) -> np.ndarray:
        """Hypothesis i is a null iff it raises the running null count."""
        counts = np.floor(self.pi0 * np.arange(self.m + 1, dtype=np.float64) + 0.5)
        return np.diff(counts) > 0


@dataclass(frozen=True, eq=False)
class Classification:
    """Rejected set B(p, alpha), stored as a boolean mask over hypotheses."""

    mask: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mask", _frozen(self.mask, np.bool_))

    @property
    def rejected(self) -> frozenset[int]:
        """1-based indices of rejected hypotheses."""
        return frozenset(int(i) + 1 for i in np.flatnonzero(self.mask))

    @property
    def m(self) -> int:
        return int(self.mask.size)

    def __len__(self) -> int:
        return int(np.count_nonzero(self.mask))

    def disagreements(self, other: "Classification") -> int:
        if other.m != self.m:
            raise InvalidInputError(f"dimension mismatch: {self.m} vs {other.m}", field="classification")
        return int(np.count_nonzero(self.mask != other.mask))


class AllocationMode(str, Enum):
    CONTINUOUS = "continuous"
    DISCRETE = "discrete"


@dataclass(frozen=True, eq=False)
class Allocation:
    """Per-hypothesis sample budgets k_1..k_m."""

    budgets: np.ndarray
    mode: AllocationMode = AllocationMode.DISCRETE

    def __post_init__(self):
        mode = AllocationMode(self.mode)
        raw = np.asarray(self.budgets)
        if mode is AllocationMode.DISCRETE:
            as_float = np.asarray(raw, dtype=np.float64)
            if np.any(as_float != np.round(as_float)):
                raise InvalidInputError("discrete budgets must be integers", field="budgets")
            arr = _frozen(np.round(as_float), np.int64)
        else:
            arr = _frozen(raw, np.float64)
        if not np.all(np.isfinite(arr.astype(np.float64))):
            raise InvalidInputError("budgets must be finite", field="budgets")
        if np.any(arr < 0):
            raise InvalidInputError("budgets must be non-negative", field="budgets")
        object.__setattr__(self, "budgets", arr)
        object.__setattr__(self, "mode", mode)

    @classmethod
    def continuous(cls, budgets: Iterable[float] | np.ndarray) -> "Allocation":
        return cls(_as_array(budgets), AllocationMode.CONTINUOUS)

    @classmethod
    def discrete(cls, budgets: Iterable[int] | np.ndarray) -> "Allocation":
        return cls(_as_array(budgets), AllocationMode.DISCRETE)

    @property
    def m(self) -> int:
        return int(self.budgets.size)

    @property
    def is_discrete(self) -> bool:
        return self.mode is AllocationMode.DISCRETE

    def total(self) -> int | float:
        if self.is_discrete:
            return int(self.budgets.sum())
        return float(math.fsum(self.budgets.tolist()))

    def __len__(self) -> int:
        return self.m


@dataclass(frozen=True, eq=False)
class ObjectiveValue:
    """Expected misclassification count and its per-hypothesis terms."""

    value: float
    per_hypothesis: np.ndarray
    # 0-based indices whose term was fixed by a degeneracy convention
    degenerate: tuple[int, ...] = ()

    def __post_init__(self):
        per = _frozen(self.per_hypothesis, np.float64)
        object.__setattr__(self, "per_hypothesis", per)
        object.__setattr__(self, "value", float(self.value))

    @classmethod
    def from_terms(cls, terms: np.ndarray, degenerate: Iterable[int] = ()) -> "ObjectiveValue":
        terms = np.clip(np.asarray(terms, dtype=np.float64), 0.0, 1.0)
        return cls(math.fsum(terms.tolist()), terms, tuple(int(i) for i in degenerate))


@dataclass(frozen=True, eq=False)
class MonteCarloState:
    """Samples drawn k_i and exceedances observed S_i per hypothesis."""

    k: np.ndarray
    s: np.ndarray

    def __post_init__(self):
        k = _frozen(self.k, np.int64)
        s = _frozen(self.s, np.int64)
        if k.shape != s.shape:
            raise InvalidInputError("k and s must have the same length", field="state")
        if np.any(s < 0) or np.any(s > k):
            raise InvalidInputError("0 <= s_i <= k_i violated", field="state")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "s", s)

    @classmethod
    def empty(cls, m: int) -> "MonteCarloState":
        zeros = np.zeros(int(m), dtype=np.int64)
        return cls(zeros, zeros)

    @property
    def m(self) -> int:
        return int(self.k.size)

    def add(self, k_add: np.ndarray, s_add: np.ndarray) -> "MonteCarloState":
        return MonteCarloState(self.k + np.asarray(k_add, dtype=np.int64), self.s + np.asarray(s_add, dtype=np.int64))

    def p_hat_plus_one(self) -> np.ndarray:
        return (self.s + 1.0) / (self.k + 1.0)

    def p_hat_raw(self) -> np.ndarray:
        """S / k, with 0 where no sample was drawn."""
        s = self.s.astype(np.float64)
        return np.divide(s, self.k, out=np.zeros_like(s), where=self.k > 0)


@dataclass(frozen=True)
class ThompsonConfig:
    """Run parameters of one Thompson-sampling allocation."""

    total_budget: int
    iterations: int = 1000
    posterior_draws: int = 100
    seed: int = 0
    warm_up: bool = False

    def __post_init__(self):
        if int(self.total_budget) < 1:
            raise InvalidInputError("must be positive", field="total_budget")
        if int(self.iterations) < 1:
            raise InvalidInputError("must be positive", field="iterations")
        if int(self.iterations) > int(self.total_budget):
            raise InvalidInputError("iterations must not exceed the total budget", field="iterations")
        if int(self.posterior_draws) < 1:
            raise InvalidInputError("must be >= 1", field="posterior_draws")
        if int(self.seed) < 0:
            raise InvalidInputError("must be non-negative", field="seed")
