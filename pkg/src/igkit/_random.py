"""Seeded, splittable pseudo-random streams.

Every stream is numpy's PCG64 bit generator keyed by a
``numpy.random.SeedSequence``. A 64-bit integer seed therefore pins the
whole stream, and child streams are derived from ``(seed, index)`` so that
work split across replicates or paths never depends on scheduling order.
"""

import numpy as np

_SEED_MAX = 2**64


def check_seed(seed):
    seed = int(seed)
    if not 0 <= seed < _SEED_MAX:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def make_rng(seed):
    """Return a ``Generator`` for ``seed`` (int) or pass a Generator through."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(check_seed(seed))))


def child_rng(seed, index):
    """Independent stream number ``index`` under master ``seed``."""
    ss = np.random.SeedSequence([check_seed(seed), int(index)])
    return np.random.Generator(np.random.PCG64(ss))
