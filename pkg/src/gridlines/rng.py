"""Seeded pseudo-randomness for set generation and sweep trials.

The repository fixes one generator: SplitMix64 (Steele, Lea and Flood's
64-bit mixer, as shipped in Java's SplittableRandom).  Output i of the
stream seeded with s is

    mix64(s + (i + 1) * GOLDEN  mod 2**64)

which makes the stream a pure function of (seed, i) and lets us produce
outputs either sequentially (class SplitMix64) or as a vectorized block
(splitmix64_stream).  Both forms emit bit-identical values.

Trial seeds for sweeps are derived with trial_seed(base, prime, index),
a fixed two-stage SplitMix64 mix.  Because the derivation is a pure
function of the triple, adding primes to a sweep never reshuffles the
seeds of existing (prime, index) pairs.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    """SplitMix64 output scramble of a 64-bit word."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """Sequential SplitMix64 stream."""

    def __init__(self, seed: int):
        self._state = seed & MASK64

    def next_u64(self) -> int:
        self._state = (self._state + GOLDEN) & MASK64
        return mix64(self._state)

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound) by rejection (unbiased)."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = MASK64 + 1 - (MASK64 + 1) % bound
        while True:
            u = self.next_u64()
            if u < limit:
                return u % bound


def splitmix64_stream(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """Outputs offset .. offset+count-1 of the stream, as a uint64 array.

    Matches SplitMix64(seed).next_u64() call for call; uint64 arithmetic
    wraps mod 2**64 exactly like the scalar path.
    """
    idx = np.arange(offset + 1, offset + count + 1, dtype=np.uint64)
    z = (np.uint64(seed & MASK64) + idx * np.uint64(GOLDEN)).astype(np.uint64)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


def trial_seed(base_seed: int, prime: int, trial_index: int) -> int:
    """Per-trial seed for sweeps: mix64(mix64(base + prime*GOLDEN) + trial + 1).

    Pure in (base_seed, prime, trial_index); independent of any prime list,
    so extending a sweep with new primes keeps existing trial seeds stable.
    """
    s = mix64((base_seed + prime * GOLDEN) & MASK64)
    return mix64((s + trial_index + 1) & MASK64)
