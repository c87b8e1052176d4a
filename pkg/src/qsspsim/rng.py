"""Deterministic 64-bit PRNG shared by placement, solvers, and test fuzzing.

The generator is SplitMix64: the state advances by the 64-bit golden-ratio
increment and each output is a xor-shift/multiply finalizer of the new
state.  The exact constants are fixed here so that a given seed produces
the same stream in any reimplementation:

    state    += 0x9E3779B97F4A7C15                (mod 2^64)
    z         = state
    z         = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9   (mod 2^64)
    z         = (z ^ (z >> 27)) * 0x94D049BB133111EB   (mod 2^64)
    output    = z ^ (z >> 31)

``uniform()`` maps the top 53 bits of an output to [0, 1) and
``randrange(n)`` uses rejection sampling, so both are bias-free and
platform-independent.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """Seeded deterministic generator; never draws from global state."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Float in [0, 1) built from the top 53 bits of one output."""
        return (self.next_u64() >> 11) * 2.0**-53

    def randrange(self, n: int) -> int:
        """Unbiased integer in [0, n); rejection-sampled."""
        if n <= 0:
            raise ValueError(f"randrange bound must be positive, got {n}")
        threshold = (1 << 64) - ((1 << 64) % n)
        while True:
            v = self.next_u64()
            if v < threshold:
                return v % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle driven by this generator."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randrange(i + 1)
            items[i], items[j] = items[j], items[i]
