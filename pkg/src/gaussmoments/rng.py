"""Seeded, versioned PRNG for reproducible rank experiments.

All randomness in the package flows from a single 64-bit seed through
SplitMix64 (Steele, Lea & Flood).  The generator is implemented here rather
than taken from ``random`` so that streams are bit-stable across Python
versions; its name and version are echoed into every output header.

Per-task substreams are derived with :func:`derive_seed`, which folds a tuple
of integer words (n, d, k, trial index, ...) into the master seed.  Results
of a census therefore do not depend on the order in which rows are computed.
"""

from __future__ import annotations

PRNG_NAME = "splitmix64-v1"

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


class SplitMix64:
    """SplitMix64 stream; deterministic function of the 64-bit seed."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection sampling (no modulo bias)."""
        if n <= 0:
            raise ValueError("below() requires n >= 1")
        limit = (1 << 64) - (1 << 64) % n
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n


def derive_seed(seed: int, *words: int) -> int:
    """Derive a substream seed from the master seed and integer words."""
    acc = SplitMix64(seed).next_u64()
    for w in words:
        acc = SplitMix64(acc ^ (w & _MASK64)).next_u64()
    return acc
