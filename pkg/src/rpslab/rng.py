"""Deterministic random streams shared by every engine backend.

The generator is splitmix64: tiny, fast, and trivial to reproduce bit for
bit inside the compiled kernel. Every consumer in a session (each ensemble
member, the synthetic opponent, ...) owns a stream derived from the session
seed with a fixed key, so adding or removing one consumer never shifts
anyone else's draws.

Stream keys in use:
    1..16          ensemble members, keyed by memory length
    101            synthetic opponent in a scripted match
    1_000_000_007+i  session seed for replication i of a batch
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15

OPPONENT_STREAM_KEY = 101
REPLICATION_KEY_BASE = 1_000_000_007


def _finalize(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, key: int) -> int:
    """Stable child seed for (seed, key); same formula as the C kernel."""
    z = (seed + _GAMMA * ((key & MASK64) + 1)) & MASK64
    return _finalize((_finalize(z) + _GAMMA) & MASK64)


class SplitMix64:
    """splitmix64 stream yielding 64-bit words, bounded ints and unit doubles."""

    __slots__ = ("state",)

    def __init__(self, seed: int) -> None:
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & MASK64
        return _finalize(self.state)

    def randbelow(self, n: int) -> int:
        return self.next_u64() % n

    def next_unit(self) -> float:
        # 53-bit mantissa in [0, 1); identical arithmetic in the kernel
        return (self.next_u64() >> 11) * 2.0**-53
