"""Pure numpy implementation of the per-round simulation kernels."""

from __future__ import annotations

import numpy as np

from .hidden_model import ModelContext, sample_lambda, transform
from .rng import counter_uniform

NAME = "python"
CHUNK = 1 << 18


def round_lambdas(ctx: ModelContext, seed: int, start: int, stop: int):
    u = counter_uniform(seed, start, stop)
    lam_a = np.atleast_1d(sample_lambda(ctx.family, u))
    lam_b = np.atleast_1d(transform(ctx, lam_a))
    return lam_a, lam_b


def round_counts(ctx: ModelContext, seed: int, start: int, stop: int):
    """Return ``(n_pp, n_pm, n_mp, n_mm)`` for rounds ``start .. stop-1``."""
    totals = np.zeros(4, dtype=np.int64)
    for lo in range(start, stop, CHUNK):
        lam_a, lam_b = round_lambdas(ctx, seed, lo, min(lo + CHUNK, stop))
        # cell index: 0 = (+,+), 1 = (+,-), 2 = (-,+), 3 = (-,-)
        cell = 2 * (lam_a < 0.0) + (lam_b < 0.0)
        totals += np.bincount(cell, minlength=4)
    return tuple(int(x) for x in totals)
