"""Counter-based uniforms: one independent draw per ``(seed, round_id)``.

Each draw is the SplitMix64 finaliser applied to
``seed + (round_id + 1) * GOLDEN`` (mod 2**64), keeping the top 53 bits.
No state is carried between draws, so any partition of the round range
over workers reproduces the same sequence.
"""

from __future__ import annotations

import numpy as np

__all__ = ["GOLDEN", "counter_uniform", "mix64", "normalize_seed"]

GOLDEN = 0x9E3779B97F4A7C15
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
MASK64 = (1 << 64) - 1


def normalize_seed(seed: int) -> int:
    """Reduce an arbitrary integer seed to an unsigned 64-bit value."""
    return int(seed) & MASK64


def mix64(z: np.ndarray) -> np.ndarray:
    z = z.astype(np.uint64, copy=True)
    z ^= z >> np.uint64(30)
    z *= _M1
    z ^= z >> np.uint64(27)
    z *= _M2
    z ^= z >> np.uint64(31)
    return z


def counter_uniform(seed: int, start: int, stop: int) -> np.ndarray:
    """Uniforms in ``[0, 1)`` for round ids ``start .. stop-1``."""
    ids = np.arange(start, stop, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(normalize_seed(seed)) + (ids + np.uint64(1)) * np.uint64(GOLDEN)
        z = mix64(z)
    return (z >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)
