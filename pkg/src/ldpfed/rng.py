"""Deterministic 64-bit PRNG used for every random draw in the simulator.

The generator is splitmix64: a single 64-bit word of state advanced by a
fixed odd increment, with the output produced by a finalizing mix.  Because
the state walk is linear (state_i = state_0 + i * GOLDEN mod 2^64), blocks
of draws can be produced vectorized with numpy while staying bit-identical
to repeated scalar calls.  Unit values are (output >> 11) / 2^53, i.e.
uniform on [0, 1) with 53 bits of mantissa.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_UNIT_SCALE = float(2**53)


def rng_next(state: int) -> tuple[int, float]:
    """Advance one splitmix64 step; return (new state, unit value in [0, 1))."""
    s = (state + GOLDEN) & MASK64
    z = s
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    z = z ^ (z >> 31)
    return s, (z >> 11) / _UNIT_SCALE


def unit_block(state: int, n: int) -> tuple[int, np.ndarray]:
    """Produce n consecutive unit draws as a float64 array.

    Bit-identical to calling rng_next n times from the same state; the new
    state equals the state after those n scalar steps.
    """
    if n < 0:
        raise ValueError("draw count must be nonnegative")
    idx = np.arange(1, n + 1, dtype=np.uint64)
    s = np.uint64(state) + idx * np.uint64(GOLDEN)  # wraps mod 2^64
    z = (s ^ (s >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    z = z ^ (z >> np.uint64(31))
    units = (z >> np.uint64(11)) / _UNIT_SCALE
    new_state = (state + n * GOLDEN) & MASK64
    return new_state, units


class SplitMix64:
    """Mutable wrapper around the splitmix64 recurrence.

    The full generator state is the single integer `state`, so sessions can
    be snapshotted and replayed exactly.
    """

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_unit(self) -> float:
        self.state, u = rng_next(self.state)
        return u

    def next_units(self, n: int) -> np.ndarray:
        self.state, units = unit_block(self.state, n)
        return units

    def next_symmetric(self) -> float:
        """One draw mapped affinely onto [-1, 1)."""
        return 2.0 * self.next_unit() - 1.0

    def copy(self) -> "SplitMix64":
        return SplitMix64(self.state)

    def __repr__(self) -> str:
        return f"SplitMix64(state={self.state:#018x})"
