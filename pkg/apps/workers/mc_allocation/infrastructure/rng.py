"""Seeded random streams.

Every consumer derives its own child stream from (seed, key...), so a result
never depends on how many threads ran or in which order tasks finished.
"""
from __future__ import annotations

from typing import Final

import numpy as np

RNG_ID: Final[str] = "numpy.PCG64+SeedSequence"

# spawn-key namespaces; keep stable, reports depend on them
STREAM_MIXTURE: Final[int] = 1
STREAM_POSTERIOR: Final[int] = 2
STREAM_ORACLE: Final[int] = 3
STREAM_EMPIRICAL: Final[int] = 4
STREAM_STUDY: Final[int] = 5


def stream_for(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for the spawn key `key` under `seed`."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def child_seed(seed: int, *key: int) -> int:
    """Derive a 63-bit integer seed for a nested task (e.g. one grid point)."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))
