"""The CHSH functional and its extrema over a correlation family.

``F(t1, t2, d) = E(t1) + E(t2) + E(t1 - d) - E(t2 - d)``. For admissible
families with ``|E(pi/4)| > 1/2`` the maximum of ``|F|`` is
``4 |E(pi/4)|``, reached at ``(pi/4, -pi/4, pi/2)`` and its mirror image.
For the cosine this is ``2 sqrt 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._format import sig12
from .correlation_family import CorrelationFamily, canonicalize, derivative, evaluate
from .errors import DomainError

__all__ = [
    "BoundCheck",
    "ChshQuery",
    "ChshResult",
    "canonical_representative",
    "chsh_gradient",
    "chsh_value",
    "generalized_bound",
    "golden_section_max",
    "lattice_search",
    "optimize_chsh",
    "small_angle_dominance",
    "stationarity_residual",
    "verify_bound",
]

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ChshQuery:
    theta1: float
    theta2: float
    delta: float

    def __post_init__(self):
        for name in ("theta1", "theta2", "delta"):
            object.__setattr__(self, name, canonicalize(getattr(self, name)))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.theta1, self.theta2, self.delta)


@dataclass(frozen=True)
class ChshResult:
    query: ChshQuery
    value: float
    bound: float
    stationarity_residual: float

    def to_dict(self, family: CorrelationFamily, grid_n: int, refine_tol: float) -> dict:
        q = self.query
        return {
            "family": family.spec,
            "bound": sig12(self.bound),
            "max_value": sig12(abs(self.value)),
            "argmax": {
                "theta1": sig12(q.theta1),
                "theta2": sig12(q.theta2),
                "delta": sig12(q.delta),
            },
            "stationarity_residual": sig12(self.stationarity_residual),
            "grid_n": grid_n,
            "refine_tol": refine_tol,
        }


def _chsh(f, t1, t2, d):
    return evaluate(f, t1) + evaluate(f, t2) + evaluate(f, t1 - d) - evaluate(f, t2 - d)


def chsh_value(f: CorrelationFamily, q: ChshQuery) -> float:
    return float(_chsh(f, q.theta1, q.theta2, q.delta))


def generalized_bound(f: CorrelationFamily) -> float:
    """``4 |E(pi/4)|``."""
    return 4.0 * abs(evaluate(f, math.pi / 4))


def chsh_gradient(f: CorrelationFamily, q: ChshQuery) -> tuple[float, float, float]:
    t1, t2, d = q.as_tuple()
    d1, d2 = derivative(f, t1), derivative(f, t2)
    d1d, d2d = derivative(f, t1 - d), derivative(f, t2 - d)
    return (d1 + d1d, d2 - d2d, d2d - d1d)


def stationarity_residual(f: CorrelationFamily, q: ChshQuery) -> float:
    """Largest absolute partial derivative of F; ``inf`` if E' diverges."""
    grad = chsh_gradient(f, q)
    if not all(math.isfinite(g) for g in grad):
        return math.inf
    return max(abs(g) for g in grad)


def lattice_search(f: CorrelationFamily, grid_n: int) -> tuple[ChshQuery, float]:
    """Exhaustive search of |F| on the ``grid_n**3`` lattice over ``[-pi, pi)**3``.

    Returns the best lattice point and the signed value of F there.
    """
    step = 2.0 * math.pi / grid_n
    axis = -math.pi + step * np.arange(grid_n)
    e = evaluate(f, axis)
    # E at lattice offsets: t_i - d_k = step * (i - k)
    offsets = evaluate(f, step * np.arange(grid_n))
    idx = np.arange(grid_n)
    best = (-1.0, 0, 0, 0, 0.0)
    for k in range(grid_n):
        shifted = offsets[(idx - k) % grid_n]
        vals = (e + shifted)[:, None] + (e - shifted)[None, :]
        flat = int(np.argmax(np.abs(vals)))
        i, j = divmod(flat, grid_n)
        v = float(vals[i, j])
        if abs(v) > best[0]:
            best = (abs(v), i, j, k, v)
    _, i, j, k, v = best
    return ChshQuery(axis[i], axis[j], axis[k]), v


def golden_section_max(fn, a: float, b: float, tol: float) -> tuple[float, float]:
    """Maximise a unimodal ``fn`` on ``[a, b]``; return ``(x, fn(x))``."""
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = fn(d)
        if c >= d:
            break
    return (c, fc) if fc >= fd else (d, fd)


def canonical_representative(q: ChshQuery) -> ChshQuery:
    """Apply the mirror symmetry ``F(-x) = F(x)`` so that ``theta1 >= 0``."""
    if q.theta1 < 0.0:
        return ChshQuery(-q.theta1, -q.theta2, -q.delta)
    return q


def optimize_chsh(
    f: CorrelationFamily,
    grid_n: int = 64,
    refine_tol: float = 1e-10,
    max_passes: int = 200,
) -> ChshResult:
    """Global maximum of |F|: lattice search, then coordinate golden-section passes."""
    if grid_n < 16:
        raise DomainError("grid_n must be at least 16")
    start, _ = lattice_search(f, grid_n)
    x = list(start.as_tuple())

    def objective(point):
        return abs(float(_chsh(f, *point)))

    best = objective(x)
    width = 2.0 * math.pi / grid_n
    for _ in range(max_passes):
        if width < refine_tol:
            break
        moved = 0.0
        for axis in range(3):
            def along(t, axis=axis):
                trial = list(x)
                trial[axis] = t
                return objective(trial)

            t, val = golden_section_max(along, x[axis] - width, x[axis] + width, refine_tol)
            if val > best:
                moved = max(moved, abs(t - x[axis]))
                x[axis] = t
                best = val
        width = max(2.0 * moved, 0.5 * width)

    q = canonical_representative(ChshQuery(*x))
    return ChshResult(
        query=q,
        value=chsh_value(f, q),
        bound=generalized_bound(f),
        stationarity_residual=stationarity_residual(f, q),
    )


@dataclass(frozen=True)
class BoundCheck:
    ok: bool
    worst: ChshQuery
    worst_value: float
    bound: float


def verify_bound(
    f: CorrelationFamily,
    samples: int,
    seed: int,
    slack: float = 1e-9,
    chunk: int = 1 << 18,
) -> BoundCheck:
    """Random-query check that ``|F| <= 4 |E(pi/4)| + slack``."""
    if samples < 1:
        raise DomainError("samples must be at least 1")
    rng = np.random.default_rng(seed)
    bound = generalized_bound(f)
    worst_val, worst_q = -1.0, None
    done = 0
    while done < samples:
        n = min(chunk, samples - done)
        t1, t2, d = rng.uniform(-math.pi, math.pi, size=(3, n))
        vals = np.abs(_chsh(f, t1, t2, d))
        i = int(np.argmax(vals))
        if vals[i] > worst_val:
            worst_val, worst_q = float(vals[i]), ChshQuery(t1[i], t2[i], d[i])
        done += n
    return BoundCheck(worst_val <= bound + slack, worst_q, worst_val, bound)


def small_angle_dominance(f: CorrelationFamily, grid_n: int = 10001) -> bool:
    """``|E(t)| > |E(pi/4)|`` for every grid angle with ``|t| < pi/4``."""
    edge = math.pi / 4 - 1e-6
    t = np.linspace(-edge, edge, grid_n)
    return bool(np.all(np.abs(evaluate(f, t)) > abs(evaluate(f, math.pi / 4))))
