from __future__ import annotations

import logging

import numpy as np

from mc_allocation.domain.values import Classification, MixtureConfig, PValueSet
from mc_allocation.infrastructure.rng import STREAM_MIXTURE, stream_for

logger = logging.getLogger(__name__)


def bonferroni(p: PValueSet) -> Classification:
    """B(p, alpha) = {i : p_i <= alpha}; the boundary p_i == alpha is rejected."""
    return Classification(p.values <= p.alpha)


def generate_mixture(cfg: MixtureConfig, alpha: float | None = None, *, alpha_star: float = 0.1) -> PValueSet:
    """Draw m p-values from pi0 * Uniform[0,1] + (1 - pi0) * Beta(shape1, shape2).

    floor(pi0 * m + 0.5) hypotheses are nulls, spread evenly over the indices so
    that whether hypothesis i is a null does not depend on m. Hypothesis i draws
    from its own child stream of `cfg.seed`, so growing m leaves earlier draws
    intact.
    `alpha` defaults to alpha_star / m.
    """
    nulls = cfg.null_mask()
    n_null = int(np.count_nonzero(nulls))
    values = np.empty(cfg.m, dtype=np.float64)
    for i in range(cfg.m):
        rng = stream_for(cfg.seed, STREAM_MIXTURE, i)
        if nulls[i]:
            values[i] = rng.uniform(0.0, 1.0)
        else:
            values[i] = rng.beta(cfg.beta_shape1, cfg.beta_shape2)
    if cfg.sort_output:
        values.sort(kind="stable")

    effective_alpha = float(alpha) if alpha is not None else float(alpha_star) / cfg.m
    logger.debug(
        "mixture generated",
        extra={"m": cfg.m, "nulls": n_null, "seed": cfg.seed, "sorted": cfg.sort_output},
    )
    return PValueSet(values, effective_alpha)
