"""Correlation functions of two-outcome random games.

A correlation function ``E`` maps the relative detector angle to the
expected product of the two ``+1/-1`` outcomes. Admissible members are
2*pi-periodic, even, antisymmetric about pi/2, start at ``E(0) = -1`` and
are convex on ``[0, pi/2]``. Two built-in families are provided:

``cosine``
    ``E(t) = -cos(t)``, the textbook Bell correlation.
``power:<p>``
    ``E(t) = -sign(cos t) * |cos t|**p``. ``p = 1`` is the cosine;
    ``p < 1`` gives CHSH values above 2 sqrt 2.

Functions accept scalars or numpy arrays and mirror the input kind on
output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable

import numpy as np

from .errors import DomainError, FamilySpecError

__all__ = [
    "INFINITE_DERIVATIVE",
    "CorrelationFamily",
    "ValidationReport",
    "Violation",
    "canonicalize",
    "chi",
    "derivative",
    "evaluate",
    "make_family",
    "validate",
]

TWO_PI = 2.0 * math.pi

#: |E'| above this is reported as an infinite derivative (signed ``inf``).
INFINITE_DERIVATIVE = 1e12

FD_STEP_FIRST = 1e-6
FD_STEP_SECOND = 1e-4
BISECTION_MAX_ITER = 200


def _wrap(fn):
    """Return a float for scalar input and an ndarray otherwise."""

    def wrapper(*args):
        out = fn(*args)
        if np.ndim(out) == 0:
            return float(out)
        return out

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def canonicalize(theta):
    """Map an angle to its representative in ``[-pi, pi)``.

    Angles already in range are returned unchanged; the shift-and-reduce
    step would otherwise round away low-order bits of small angles.
    """
    t = np.asarray(theta, dtype=float)
    inside = (t >= -math.pi) & (t < math.pi)
    t = np.where(inside, t, np.mod(t + math.pi, TWO_PI) - math.pi)
    if t.ndim == 0:
        return float(t)
    return t


@dataclass(frozen=True)
class CorrelationFamily:
    """A correlation function with optional analytic derivative and inverse.

    ``fn``, ``deriv`` and ``inverse`` must be numpy-vectorised. ``fn`` and
    ``deriv`` receive canonical angles; ``inverse`` receives values in
    ``[-1, 1]`` and returns angles in ``[0, pi]``. Missing ``deriv`` or
    ``inverse`` fall back to finite differences and bisection.
    """

    name: str
    fn: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    param: float | None = None
    deriv: Callable[[np.ndarray], np.ndarray] | None = field(default=None, repr=False)
    inverse: Callable[[np.ndarray], np.ndarray] | None = field(default=None, repr=False)

    @property
    def spec(self) -> str:
        if self.name == "power":
            return f"power:{self.param!r}"
        return self.name

    @property
    def smooth(self) -> bool:
        """True when E' is bounded everywhere."""
        if self.name == "cosine":
            return True
        if self.name == "power":
            return self.param >= 1.0
        return False

    @property
    def kernel_code(self) -> int:
        """Identifier understood by the compiled kernels; -1 if unsupported."""
        if self.name == "cosine":
            return 0
        if self.name == "power":
            return 1
        return -1

    @cached_property
    def report(self) -> "ValidationReport":
        return validate(self, 10001)

    @property
    def is_valid(self) -> bool:
        return self.report.passed

    def __call__(self, theta):
        return evaluate(self, theta)


def _cosine_fn(t):
    return -np.cos(t)


def _cosine_deriv(t):
    return np.sin(t)


def _cosine_inverse(e):
    return np.arccos(-e)


def _power_parts(p: float):
    # cos(t) as sin(pi/2 - |t|): exact zero at t = +-pi/2 keeps E(pi/2) = 0
    def cos_(t):
        return np.sin(math.pi / 2 - np.abs(t))

    def fn(t):
        c = cos_(t)
        return -np.sign(c) * np.abs(c) ** p

    def deriv(t):
        c = np.abs(cos_(t))
        s = np.sin(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            d = p * c ** (p - 1.0) * s
        if p < 1.0:
            d = np.where(c == 0.0, np.copysign(np.inf, s), d)
        return d

    def inverse(e):
        return np.arccos(-np.sign(e) * np.abs(e) ** (1.0 / p))

    return fn, deriv, inverse


def _parse_exponent(text: str) -> float:
    try:
        if "/" in text:
            value = float(Fraction(text.strip()))
        else:
            value = float(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise FamilySpecError(f"cannot parse exponent {text!r}") from exc
    if not math.isfinite(value) or value <= 0.0:
        raise FamilySpecError(f"power exponent must be positive and finite, got {text!r}")
    return value


def make_family(spec: str) -> CorrelationFamily:
    """Build a family from ``"cosine"`` or ``"power:<p>"``.

    ``<p>`` is a positive decimal; a ratio such as ``1/3`` is also
    accepted.
    """
    spec = spec.strip()
    if spec == "cosine":
        return CorrelationFamily("cosine", _cosine_fn, None, _cosine_deriv, _cosine_inverse)
    name, sep, arg = spec.partition(":")
    if name == "power" and sep:
        p = _parse_exponent(arg)
        fn, deriv, inverse = _power_parts(p)
        return CorrelationFamily("power", fn, p, deriv, inverse)
    raise FamilySpecError(f"unknown family spec {spec!r}")


@_wrap
def evaluate(f: CorrelationFamily, theta):
    """E(theta) after canonicalisation."""
    return f.fn(np.asarray(canonicalize(theta)))


def _flag_infinite(d):
    return np.where(np.abs(d) > INFINITE_DERIVATIVE, np.copysign(np.inf, d), d)


@_wrap
def derivative(f: CorrelationFamily, theta):
    """E'(theta); ``+-inf`` marks a divergent derivative."""
    t = np.asarray(canonicalize(theta))
    if f.deriv is not None:
        d = f.deriv(t)
    else:
        h = FD_STEP_FIRST
        d = (evaluate(f, t + h) - evaluate(f, t - h)) / (2.0 * h)
    return _flag_infinite(np.asarray(d, dtype=float))


def second_derivative(f: CorrelationFamily, theta):
    """Central second difference of E with step 1e-4."""
    h = FD_STEP_SECOND
    t = np.asarray(theta, dtype=float)
    return (evaluate(f, t + h) - 2.0 * evaluate(f, t) + evaluate(f, t - h)) / (h * h)


def _bisect_inverse(f: CorrelationFamily, e: np.ndarray) -> np.ndarray:
    lo = np.zeros_like(e)
    hi = np.full_like(e, math.pi)
    for _ in range(BISECTION_MAX_ITER):
        mid = 0.5 * (lo + hi)
        below = evaluate(f, mid) < e
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.all((hi - lo) <= np.spacing(hi)):
            break
    # pick whichever endpoint lands closer to the target
    err_lo = np.abs(evaluate(f, lo) - e)
    err_hi = np.abs(evaluate(f, hi) - e)
    return np.where(err_lo <= err_hi, lo, hi)


@_wrap
def chi(f: CorrelationFamily, e):
    """Inverse of E restricted to ``[0, pi]``."""
    e = np.asarray(e, dtype=float)
    if np.any(~((e >= -1.0) & (e <= 1.0))):
        raise DomainError("chi is defined on [-1, 1] only")
    if f.inverse is not None:
        return np.clip(f.inverse(e), 0.0, math.pi)
    return _bisect_inverse(f, np.atleast_1d(e)).reshape(e.shape)


@dataclass(frozen=True)
class Violation:
    constraint: str
    witness: float
    magnitude: float


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "violations": [
                {"constraint": v.constraint, "witness": v.witness, "magnitude": v.magnitude}
                for v in self.violations
            ],
        }


def _interior(a: float, b: float, n: int) -> np.ndarray:
    return np.linspace(a, b, n + 2)[1:-1]


def validate(f: CorrelationFamily, grid_n: int = 10001) -> ValidationReport:
    """Check the four defining constraints on a uniform interior grid.

    C1 ``E(0) = -1``; C2 evenness; C3 ``E(pi - t) = -E(t)``; C4 convexity
    on ``(eps, pi/2 - eps)`` via second differences, skipping points where
    the derivative diverges.
    """
    if grid_n < 3:
        raise DomainError("grid_n must be at least 3")
    tol = 1e-10
    found: list[Violation] = []

    c1 = abs(evaluate(f, 0.0) + 1.0)
    if not c1 < tol:
        found.append(Violation("C1", 0.0, c1))

    t = _interior(0.0, math.pi, grid_n)
    for cid, resid in (
        ("C2", np.abs(evaluate(f, -t) - evaluate(f, t))),
        ("C3", np.abs(evaluate(f, math.pi - t) + evaluate(f, t))),
    ):
        bad = ~(resid < tol)
        if bad.any():
            i = int(np.argmax(np.where(bad, resid, -np.inf)))
            found.append(Violation(cid, float(t[i]), float(resid[i])))

    eps = 1e-3
    t = _interior(eps, math.pi / 2 - eps, grid_n)
    finite = np.isfinite(derivative(f, t))
    t = t[finite]
    curv = second_derivative(f, t)
    bad = ~(curv > -1e-6)
    if bad.any():
        i = int(np.argmin(np.where(bad, curv, np.inf)))
        found.append(Violation("C4", float(t[i]), float(-curv[i])))

    return ValidationReport(tuple(found))
