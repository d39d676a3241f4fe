"""Hidden configurations on the unit circle and the chart-change law.

Each detector labels the same hidden configuration with its own
coordinate in ``[-pi, pi)``. The second detector's coordinate is
``lambda_b = -L(lambda_a; theta)`` where ``L`` is piecewise, built from
the inverse correlation function ``chi``. Configurations are distributed
with density ``|E'(lambda)| / 4``, which the chart change preserves, and
each detector answers with the sign of its own coordinate.

Branch table for ``theta >= 0`` (all intervals left-closed)::

    [-pi, theta-pi)   chi(-E(theta) - E(lam) + 1)
    [theta-pi, 0)     chi( E(theta) + E(lam) + 1)
    [0, theta)        chi( E(theta) - E(lam) - 1)
    [theta, pi)       chi(-E(theta) + E(lam) - 1)

and for ``theta < 0``, the mirror image ``L(lam; theta) = -L(-lam; -theta)``::

    [-pi, theta)      chi(-E(theta) + E(lam) - 1)
    [theta, 0)        chi( E(theta) - E(lam) - 1)
    [0, theta+pi)     chi( E(theta) + E(lam) + 1)
    [theta+pi, pi)    chi(-E(theta) - E(lam) + 1)

every entry multiplied by ``q(lam - theta)``, the sign of the canonical
difference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .correlation_family import (
    CorrelationFamily,
    canonicalize,
    chi,
    derivative,
    evaluate,
)
from .errors import BranchConsistencyError, DomainError, InvalidFamilyError

__all__ = [
    "ModelContext",
    "branch_boundaries",
    "branch_values",
    "density",
    "q_sign",
    "response",
    "sample_lambda",
    "transform",
]

CLAMP_WINDOW = 1e-12


@dataclass(frozen=True)
class ModelContext:
    """A validated family together with the relative detector angle."""

    family: CorrelationFamily
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", canonicalize(self.theta))
        if not self.family.is_valid:
            ids = ", ".join(v.constraint for v in self.family.report.violations)
            raise InvalidFamilyError(f"family {self.family.spec} violates {ids}")


def q_sign(x):
    """Sign of the canonical angle difference, with ``q(0) = +1``."""
    out = np.where(np.asarray(canonicalize(x)) >= 0.0, 1, -1)
    if out.ndim == 0:
        return int(out)
    return out


def response(lam):
    """Detector outcome: +1 on the upper half circle ``[0, pi)``, else -1."""
    out = np.where(np.asarray(canonicalize(lam)) >= 0.0, 1, -1)
    if out.ndim == 0:
        return int(out)
    return out


def branch_boundaries(theta: float) -> tuple[float, float, float]:
    """Interior cut points of the branch table for a canonical ``theta``."""
    if theta >= 0.0:
        return (theta - math.pi, 0.0, theta)
    return (theta, 0.0, theta + math.pi)


def _branch_args(theta: float, e_theta: float, e_lam):
    if theta >= 0.0:
        return (
            -e_theta - e_lam + 1.0,
            e_theta + e_lam + 1.0,
            e_theta - e_lam - 1.0,
            -e_theta + e_lam - 1.0,
        )
    return (
        -e_theta + e_lam - 1.0,
        e_theta - e_lam - 1.0,
        e_theta + e_lam + 1.0,
        -e_theta - e_lam + 1.0,
    )


def _clamped(arg):
    arg = np.asarray(arg, dtype=float)
    if np.any(np.abs(arg) > 1.0 + CLAMP_WINDOW) or np.any(np.isnan(arg)):
        worst = float(np.nanmax(np.abs(arg))) if not np.all(np.isnan(arg)) else math.nan
        raise BranchConsistencyError(f"chi argument out of range (|arg| = {worst!r})")
    return np.clip(arg, -1.0, 1.0)


def branch_values(ctx: ModelContext, lam, branch: int):
    """L(lam) computed with one branch formula regardless of interval.

    Used to take one-sided limits at the cut points. Arguments are
    clamped to ``[-1, 1]`` unconditionally.
    """
    lam = np.asarray(lam, dtype=float)
    f = ctx.family
    arg = _branch_args(ctx.theta, evaluate(f, ctx.theta), evaluate(f, lam))[branch]
    # at lam = +pi take the limit from below: q = +1 for theta >= 0, else -1
    q = np.where(lam == math.pi, 1 if ctx.theta >= 0.0 else -1, q_sign(lam - ctx.theta))
    out = q * chi(f, np.clip(arg, -1.0, 1.0))
    return float(out) if out.ndim == 0 else out


def transform(ctx: ModelContext, lam):
    """Second detector's coordinate ``-L(lam; theta)`` in ``[-pi, pi)``."""
    lam = np.asarray(canonicalize(lam))
    f = ctx.family
    theta = ctx.theta
    args = _branch_args(theta, evaluate(f, theta), evaluate(f, lam))
    b1, b2, b3 = branch_boundaries(theta)
    arg = np.select([lam < b1, lam < b2, lam < b3], args[:3], args[3])
    big_l = q_sign(lam - theta) * chi(f, _clamped(arg))
    return canonicalize(-big_l)


def density(ctx: ModelContext, lam):
    """Probability density ``|E'(lam)| / 4``; ``inf`` at singular points."""
    return 0.25 * np.abs(derivative(ctx.family, lam))


def sample_lambda(f: CorrelationFamily, u):
    """Inverse-CDF map from ``u in [0, 1)`` to a hidden coordinate.

    The CDF is ``(1 - E) / 4`` on the lower half circle and
    ``(3 + E) / 4`` on the upper half.
    """
    u = np.asarray(u, dtype=float)
    if np.any(~((u >= 0.0) & (u < 1.0))):
        raise DomainError("u must lie in [0, 1)")
    lower = u < 0.5
    e = np.where(lower, 1.0 - 4.0 * u, 4.0 * u - 3.0)
    t = chi(f, np.clip(e, -1.0, 1.0))
    lam = np.where(lower, -t, t)
    # -chi(1) = -pi is already canonical; t = pi cannot occur on the upper half
    if lam.ndim == 0:
        return float(lam)
    return lam
