"""Seed derivation helpers.

All randomness in the library flows from explicit integer seeds through
PCG64. Independent streams (per restart, per trial, per worker) are
derived by keying a ``SeedSequence`` with the parent seed plus an integer
path, so results are reproducible regardless of execution order.
"""

from __future__ import annotations

import numpy as np


def generator(seed: int, *path: int) -> np.random.Generator:
    """Return a PCG64 generator for ``seed`` and an optional derivation path."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), *map(int, path)])))


def child_seed(seed: int, *path: int) -> int:
    """Derive a 63-bit child seed (kept positive so it survives JSON round-trips)."""
    ss = np.random.SeedSequence([int(seed), *map(int, path)])
    return int(ss.generate_state(1, np.uint64)[0] >> 1)
