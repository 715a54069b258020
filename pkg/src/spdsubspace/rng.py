"""Reproducible 64-bit PRNG used for every randomized selection rule.

The generator is xorshift64* (Vigna 2016).  State is a single nonzero
uint64; one draw is

    s ^= s >> 12;  s ^= s << 25;  s ^= s >> 27          (mod 2^64)
    output = (s * 0x2545F4914F6CDD1D) mod 2^64

A seed is expanded into an initial state with one splitmix64 step,

    z = (seed + 0x9E3779B97F4A7C15) mod 2^64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2^64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) mod 2^64
    state = z ^ (z >> 31),  or 1 if that is zero,

so seed 0 is valid.  Derived draws are fully specified so that sequences
can be replayed from the documented update alone:

    uniform():        (output >> 11) * 2^-53                  in [0, 1)
    randbelow(m):     (output * m) >> 64                      in [0, m)
    permutation(n):   Fisher-Yates, i = n-1 .. 1, j = randbelow(i + 1)

The same update is implemented in the numba kernels on a one-element
uint64 array; both produce identical streams for identical seeds.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_MULT = 0x2545F4914F6CDD1D


def seed_state(seed: int) -> int:
    """Expand a seed into a nonzero xorshift64* state (splitmix64 step)."""
    z = (int(seed) + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    z = z ^ (z >> 31)
    return z if z != 0 else 1


class Xorshift:
    """xorshift64* stream; one instance is owned by one solver run.

    The state lives in a 1-element uint64 array so numba kernels can
    advance the same stream in place, interleaved with Python draws."""

    def __init__(self, seed: int = 0):
        self._arr = np.array([seed_state(seed)], dtype=np.uint64)

    @property
    def state(self) -> int:
        return int(self._arr[0])

    @state.setter
    def state(self, value: int) -> None:
        self._arr[0] = np.uint64(value & _MASK)

    def next_u64(self) -> int:
        s = int(self._arr[0])
        s = (s ^ (s >> 12)) & _MASK
        s = (s ^ (s << 25)) & _MASK
        s = (s ^ (s >> 27)) & _MASK
        self._arr[0] = s
        return (s * _MULT) & _MASK

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * 2.0**-53

    def randbelow(self, m: int) -> int:
        """Integer in [0, m) by the multiply-shift reduction."""
        return (self.next_u64() * m) >> 64

    def permutation(self, n: int) -> np.ndarray:
        """Fisher-Yates permutation of 0..n-1."""
        p = np.arange(n, dtype=np.int64)
        for i in range(n - 1, 0, -1):
            j = self.randbelow(i + 1)
            p[i], p[j] = p[j], p[i]
        return p

    def state_array(self) -> np.ndarray:
        """The live state buffer shared with the kernels (not a copy)."""
        return self._arr
