# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-round kernels for the built-in correlation families.

Family codes: 0 = cosine, 1 = power (exponent ``p``). Arithmetic follows
the numpy path in ``_fallback`` operation for operation.
"""

from libc.math cimport M_PI, NAN, acos, cos, fabs, fmod, isnan, pow, sin
from libc.stdint cimport int64_t, uint64_t

import numpy as np

NAME = "cython"

cdef double TWO_PI = 2.0 * M_PI
cdef double CLAMP = 1e-12
cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL


cdef inline double canon(double x) noexcept nogil:
    if x >= -M_PI and x < M_PI:
        return x
    cdef double m = fmod(x + M_PI, TWO_PI)
    if m != 0.0:
        if m < 0.0:
            m += TWO_PI
    else:
        m = 0.0
    return m - M_PI


cdef inline double corr(int kind, double p, double t) noexcept nogil:
    cdef double c
    if kind == 0:
        return -cos(t)
    c = sin(M_PI / 2.0 - fabs(t))
    if c > 0.0:
        return -pow(c, p)
    if c < 0.0:
        return pow(-c, p)
    return 0.0


cdef inline double inverse(int kind, double p, double e) noexcept nogil:
    cdef double r
    if kind == 0:
        r = acos(-e)
    elif e > 0.0:
        r = acos(-pow(e, 1.0 / p))
    elif e < 0.0:
        r = acos(pow(-e, 1.0 / p))
    else:
        r = acos(0.0)
    if r < 0.0:
        return 0.0
    if r > M_PI:
        return M_PI
    return r


cdef inline double uniform(uint64_t seed, uint64_t rid) noexcept nogil:
    cdef uint64_t z = seed + (rid + 1) * GOLDEN
    z ^= z >> 30
    z *= 0xBF58476D1CE4E5B9ULL
    z ^= z >> 27
    z *= 0x94D049BB133111EBULL
    z ^= z >> 31
    return <double>(z >> 11) * (1.0 / 9007199254740992.0)


cdef inline double sample(int kind, double p, double u) noexcept nogil:
    cdef double e, t
    if u < 0.5:
        e = 1.0 - 4.0 * u
    else:
        e = 4.0 * u - 3.0
    if e > 1.0:
        e = 1.0
    elif e < -1.0:
        e = -1.0
    t = inverse(kind, p, e)
    return -t if u < 0.5 else t


cdef inline double transform(int kind, double p, double theta, double e_theta,
                             double lam) noexcept nogil:
    """Return ``-L(lam; theta)``; NaN flags an out-of-range chi argument."""
    cdef double e_lam = corr(kind, p, lam)
    cdef double arg, q
    if theta >= 0.0:
        if lam < theta - M_PI:
            arg = -e_theta - e_lam + 1.0
        elif lam < 0.0:
            arg = e_theta + e_lam + 1.0
        elif lam < theta:
            arg = e_theta - e_lam - 1.0
        else:
            arg = -e_theta + e_lam - 1.0
    else:
        if lam < theta:
            arg = -e_theta + e_lam - 1.0
        elif lam < 0.0:
            arg = e_theta - e_lam - 1.0
        elif lam < theta + M_PI:
            arg = e_theta + e_lam + 1.0
        else:
            arg = -e_theta - e_lam + 1.0
    if fabs(arg) > 1.0 + CLAMP or isnan(arg):
        return NAN
    if arg > 1.0:
        arg = 1.0
    elif arg < -1.0:
        arg = -1.0
    q = 1.0 if canon(lam - theta) >= 0.0 else -1.0
    return canon(-(q * inverse(kind, p, arg)))


def round_counts(int kind, double p, double theta, uint64_t seed,
                 int64_t start, int64_t stop):
    """Outcome counts ``(pp, pm, mp, mm)`` for rounds ``start .. stop-1``."""
    cdef int64_t i
    cdef int64_t n_pp = 0, n_pm = 0, n_mp = 0, n_mm = 0, n_bad = 0
    cdef double lam_a, lam_b
    cdef double e_theta = corr(kind, p, theta)
    with nogil:
        for i in range(start, stop):
            lam_a = sample(kind, p, uniform(seed, <uint64_t>i))
            lam_b = transform(kind, p, theta, e_theta, lam_a)
            if isnan(lam_b):
                n_bad += 1
            elif lam_a >= 0.0:
                if lam_b >= 0.0:
                    n_pp += 1
                else:
                    n_pm += 1
            elif lam_b >= 0.0:
                n_mp += 1
            else:
                n_mm += 1
    if n_bad:
        from .errors import BranchConsistencyError
        raise BranchConsistencyError(f"{n_bad} rounds produced out-of-range chi arguments")
    return (n_pp, n_pm, n_mp, n_mm)


def round_lambdas(int kind, double p, double theta, uint64_t seed,
                  int64_t start, int64_t stop):
    """Hidden coordinates ``(lambda_a, lambda_b)`` as float64 arrays."""
    cdef int64_t n = stop - start
    cdef int64_t i
    out_a = np.empty(n, dtype=np.float64)
    out_b = np.empty(n, dtype=np.float64)
    cdef double[::1] a = out_a
    cdef double[::1] b = out_b
    cdef double e_theta = corr(kind, p, theta)
    with nogil:
        for i in range(n):
            a[i] = sample(kind, p, uniform(seed, <uint64_t>(start + i)))
            b[i] = transform(kind, p, theta, e_theta, a[i])
    if np.isnan(out_b).any():
        from .errors import BranchConsistencyError
        raise BranchConsistencyError("out-of-range chi argument")
    return out_a, out_b


def counter_uniform(uint64_t seed, int64_t start, int64_t stop):
    cdef int64_t n = stop - start
    cdef int64_t i
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for i in range(n):
            o[i] = uniform(seed, <uint64_t>(start + i))
    return out
