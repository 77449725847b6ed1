"""Deterministic seed derivation and worker-count resolution.

Every random draw in the package flows from a caller-supplied seed.  Batch
draws use a counter derivation: draw ``i`` of a batch is generated from
``seed XOR i``.  Derivation is stateless, so batch elements can be computed
in any order, or concurrently, and still reproduce bit-identically.
"""

from __future__ import annotations

import os

import numpy as np

_MASK64 = (1 << 64) - 1


def derive_seed(seed: int, index: int) -> int:
    """Seed for element ``index`` of a batch rooted at ``seed``."""
    return (int(seed) ^ int(index)) & _MASK64


def rng_for(seed: int, index: int = 0) -> np.random.Generator:
    """Fresh generator for one batch element; independent of call order."""
    return np.random.default_rng(derive_seed(seed, index))


def worker_count() -> int:
    """Worker cap from ``PLANKFORGE_THREADS`` (unset, empty, or 0 = auto)."""
    raw = os.environ.get("PLANKFORGE_THREADS", "").strip()
    try:
        n = int(raw) if raw else 0
    except ValueError:
        n = 0
    if n <= 0:
        return os.cpu_count() or 1
    return n
