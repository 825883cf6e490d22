"""Deterministic random streams: one master seed, many addressable substreams.

Streams are PCG64 generators keyed by an integer path (seed, part, part, ...),
so any unit of work can draw from its own stream and results never depend on
execution order or worker count.
"""

from __future__ import annotations

import numpy as np


def substream(seed: int, *path: int) -> np.random.Generator:
    """Generator for the substream addressed by (seed, *path)."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *(int(p) for p in path)]))


def derive_seed(seed: int, *path: int) -> int:
    """Stable nonnegative 63-bit seed for the substream addressed by (seed, *path)."""
    ss = np.random.SeedSequence([int(seed), *(int(p) for p in path)])
    return int(ss.generate_state(1, np.uint64)[0] >> np.uint64(1))


def exponential(rng: np.random.Generator, mean: float, size=None) -> np.ndarray:
    """Exponential draws via the inverse CDF, for bit-stable streams."""
    return -mean * np.log1p(-rng.random(size))
