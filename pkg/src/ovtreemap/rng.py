"""Small deterministic PRNG so every randomized feature is reproducible.

splitmix64 is used instead of the stdlib Mersenne twister because its state
is a single 64-bit word, it is trivially portable, and derived streams for
sub-tasks (per-node seeds, jitter, benchmark repeats) are cheap to fork.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def _fnv1a(text: str) -> int:
    h = 0xCBF29CE484222325
    for b in text.encode("utf-8"):
        h = ((h ^ b) * 0x100000001B3) & _MASK
    return h


def derive_seed(seed: int, *parts: int | str) -> int:
    """Fold extra tokens into a seed, giving an independent child stream."""
    s = seed & _MASK
    for part in parts:
        token = part & _MASK if isinstance(part, int) else _fnv1a(part)
        s = _mix((s + _GAMMA) & _MASK) ^ token
    return _mix((s + _GAMMA) & _MASK)


class SplitMix64:
    """splitmix64 sequence generator."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        return _mix(self._state)

    def random(self) -> float:
        """Uniform float in [0, 1)."""
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi]."""
        return lo + self.next_u64() % (hi - lo + 1)
