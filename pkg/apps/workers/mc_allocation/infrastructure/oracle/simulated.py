from __future__ import annotations

import numpy as np

from mc_allocation.domain.errors import InvalidInputError
from mc_allocation.domain.values import PValueSet
from mc_allocation.infrastructure.rng import STREAM_ORACLE, stream_for


class SimulatedOracle:
    """Sampling oracle backed by known p-values.

    A batch of c Bernoulli(p_i) draws is realised as one Binomial(c, p_i) draw,
    which has the same distribution as summing the individual exceedances.
    """

    def __init__(self, p: PValueSet, seed: int) -> None:
        self._p = p.values
        self._rng = stream_for(seed, STREAM_ORACLE)
        self.m = p.m
        self.samples_served = 0

    def draw(self, counts: np.ndarray) -> np.ndarray:
        counts = np.asarray(counts, dtype=np.int64)
        if counts.shape != (self.m,):
            raise InvalidInputError(f"expected {self.m} counts, got shape {counts.shape}", field="counts")
        if np.any(counts < 0):
            raise InvalidInputError("counts must be non-negative", field="counts")
        self.samples_served += int(counts.sum())
        return self._rng.binomial(counts, self._p).astype(np.int64)
