"""Counter-based random numbers keyed by (seed, stream, kind, counter).

Each draw is a pure function of its key and counter: output ``i`` of a
stream is the SplitMix64 output at position ``i`` of the sequence started
from the stream key. Draws can be generated in any order, in any chunking,
on any worker, and come out bit-identical.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    """SplitMix64 finaliser on a Python int."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def stream_key(*parts: int) -> int:
    """Fold non-negative integers into one 64-bit stream key."""
    key = 0
    for part in parts:
        if part < 0:
            raise ValueError("key parts must be non-negative")
        key = mix64(key ^ mix64((part & MASK64) + GOLDEN))
    return key


def raw64(key: int, counters: np.ndarray) -> np.ndarray:
    """64-bit outputs at the given counter positions (uint64 array)."""
    z = np.uint64(key) + (np.asarray(counters, dtype=np.uint64) + np.uint64(1)) * np.uint64(GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def uniforms(key: int, counters: np.ndarray) -> np.ndarray:
    """Uniform doubles in [0, 1) with 53 random bits."""
    return (raw64(key, counters) >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


def derive_seed(master_seed: int, index: int) -> int:
    """Child seed for sub-experiment ``index`` (e.g. one sweep point)."""
    return stream_key(master_seed, 0x5EED, index)
