"""Deterministic seed derivation.

All randomness in training and evaluation flows from a single master seed
through numpy SeedSequence spawn keys, so any world or episode stream can
be re-derived from (master_seed, key) without running anything else first.
"""

from __future__ import annotations

import numpy as np

# Stream tags: keep distinct so e.g. world seeds never collide with episode rngs.
STREAM_WORLD = 0
STREAM_EPISODE = 1
STREAM_EVAL_WORLD = 2
STREAM_EVAL_EPISODE = 3


def spawn_seed(master_seed: int, *key: int) -> int:
    """64-bit seed for the (master_seed, key) slot."""
    ss = np.random.SeedSequence(master_seed, spawn_key=tuple(key))
    return int(ss.generate_state(1, np.uint64)[0])


def spawn_rng(master_seed: int, *key: int) -> np.random.Generator:
    """Independent generator for the (master_seed, key) slot."""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=tuple(key)))
