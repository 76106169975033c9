from __future__ import annotations

from abc import abstractmethod
from typing import Protocol, runtime_checkable

import numpy as np


@runtime_checkable
class SamplingOracle(Protocol):
    """Source of Monte-Carlo samples under each null hypothesis.

    A sample for hypothesis i is an exceedance (significant sample) with
    probability p_i; the allocator only ever sees exceedance counts, never p_i.
    """

    m: int

    @abstractmethod
    def draw(self, counts: np.ndarray) -> np.ndarray:
        """
        Draw `counts[i]` fresh samples for every hypothesis i and return the
        number of exceedances observed per hypothesis (same length as `counts`).
        """
        ...
