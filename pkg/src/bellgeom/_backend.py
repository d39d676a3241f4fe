"""Pick the compiled kernels when importable, else the numpy fallback.

Set ``BELLGEOM_BACKEND=python`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _fallback
from .hidden_model import ModelContext
from .rng import normalize_seed

try:
    if os.environ.get("BELLGEOM_BACKEND", "auto").lower() == "python":
        raise ImportError("compiled backend disabled by BELLGEOM_BACKEND")
    from . import _kernels
except ImportError:
    _kernels = None

__all__ = ["available", "default_backend", "round_counts", "round_lambdas"]


def available() -> list[str]:
    names = ["python"]
    if _kernels is not None:
        names.insert(0, "cython")
    return names


def default_backend() -> str:
    return available()[0]


def _use_compiled(ctx: ModelContext, backend: str | None) -> bool:
    backend = backend or default_backend()
    if backend == "python":
        return False
    if backend != "cython":
        raise ValueError(f"unknown backend {backend!r}")
    if _kernels is None:
        raise ImportError("compiled backend is not built")
    return ctx.family.kernel_code >= 0


def _kernel_args(ctx: ModelContext):
    f = ctx.family
    return f.kernel_code, float(f.param or 1.0), ctx.theta


def round_counts(ctx: ModelContext, seed: int, start: int, stop: int, backend: str | None = None):
    if _use_compiled(ctx, backend):
        return _kernels.round_counts(*_kernel_args(ctx), normalize_seed(seed), start, stop)
    return _fallback.round_counts(ctx, seed, start, stop)


def round_lambdas(ctx: ModelContext, seed: int, start: int, stop: int, backend: str | None = None):
    if _use_compiled(ctx, backend):
        return _kernels.round_lambdas(*_kernel_args(ctx), normalize_seed(seed), start, stop)
    return _fallback.round_lambdas(ctx, seed, start, stop)
