"""Extended-precision reference evaluations used by several test modules."""

import math

import mpmath as mp

from bellgeom.hidden_model import _branch_args

mp.mp.dps = 50
MP_PI = mp.pi


def _exponent(spec):
    if spec == "cosine":
        return None
    num, _, den = spec.split(":")[1].partition("/")
    return mp.mpf(num) / mp.mpf(den) if den else mp.mpf(num)


def e_mp(spec, x):
    c = mp.cos(x)
    p = _exponent(spec)
    if p is None:
        return -c
    return -mp.sign(c) * abs(c) ** p


def chi_mp(spec, e):
    e = max(mp.mpf(-1), min(mp.mpf(1), e))
    p = _exponent(spec)
    if p is None:
        return mp.acos(-e)
    return mp.acos(-mp.sign(e) * abs(e) ** (1 / p))


def _canon(x):
    return mp.fmod(mp.fmod(x + MP_PI, 2 * MP_PI) + 2 * MP_PI, 2 * MP_PI) - MP_PI


def one_sided_q(x, side):
    """Sign of canonical(x + side*0) with side in {-1, +1}."""
    x = _canon(x)
    if x == 0:
        return side
    if x == -MP_PI:
        return -side
    return 1 if x > 0 else -1


def cut_points_mp(theta):
    """Exact cut points for a float theta, plus the wrap at +-pi."""
    t = mp.mpf(theta)
    if theta >= 0:
        return [t - MP_PI, mp.mpf(0), t]
    return [t, mp.mpf(0), t + MP_PI]


def branch_l_mp(spec, theta, lam, branch, side):
    """One branch formula of the package's table, evaluated at 50 digits."""
    args = _branch_args(theta, e_mp(spec, mp.mpf(theta)), e_mp(spec, lam))
    return one_sided_q(lam - mp.mpf(theta), side) * chi_mp(spec, args[branch])


def circle_distance_mp(a, b):
    d = abs(a - b) % (2 * MP_PI)
    return float(min(d, 2 * MP_PI - d))


def max_branch_jump(spec, theta):
    """Largest circle distance between one-sided limits of -L at any cut."""
    jumps = []
    for k, c in enumerate(cut_points_mp(theta)):
        left = -branch_l_mp(spec, theta, c, k, -1)
        right = -branch_l_mp(spec, theta, c, k + 1, +1)
        jumps.append(circle_distance_mp(left, right))
    left = -branch_l_mp(spec, theta, MP_PI, 3, -1)
    right = -branch_l_mp(spec, theta, -MP_PI, 0, +1)
    jumps.append(circle_distance_mp(left, right))
    return max(jumps)


def float_sqrt_ulp_bound():
    # chi has a square-root cusp at +-1: one ulp in its argument moves it by
    # sqrt(2 * eps); two roundings at the cut give at most twice that
    return 2 * math.sqrt(2 * 2.220446049250313e-16)


def dense_grid_max(spec: str, n: int = 256) -> float:
    """Brute-force max of |F| on an n**3 lattice, one delta slice at a time."""
    import numpy as np

    from bellgeom import evaluate, make_family

    f = make_family(spec)
    t = np.linspace(-np.pi, np.pi, n, endpoint=False)
    e = evaluate(f, t)
    best = 0.0
    for d in t:
        ed = evaluate(f, t - d)
        vals = (e + ed)[:, None] + (e - ed)[None, :]
        best = max(best, float(np.abs(vals).max()))
    return best


def extremal_orbit(spec: str, tol: float = 1e-9):
    """All settings on the pi/4 lattice that attain the largest |F| there."""
    import itertools

    import numpy as np

    from bellgeom import evaluate, make_family

    f = make_family(spec)
    pts = [k * np.pi / 4 for k in range(-4, 4)]

    def F(a, b, d):
        return evaluate(f, a) + evaluate(f, b) + evaluate(f, a - d) - evaluate(f, b - d)

    vals = {q: abs(F(*q)) for q in itertools.product(pts, repeat=3)}
    top = max(vals.values())
    return top, [q for q, v in vals.items() if v > top - tol]


def measure_grid(ctx, n: int):
    """Midpoint grid of n angles, minus points within 1e-3 of a singularity or cut."""
    import numpy as np

    from bellgeom import transform
    from bellgeom.hidden_model import branch_boundaries

    lam = np.linspace(-math.pi, math.pi, n, endpoint=False) + math.pi / n
    bad = [0.0, math.pi / 2, -math.pi / 2, math.pi, *branch_boundaries(ctx.theta)]
    lam_b = transform(ctx, lam)

    def far(x, p):
        d = np.abs(x - p) % (2 * math.pi)
        return np.minimum(d, 2 * math.pi - d) > 1e-3

    mask = np.ones_like(lam, dtype=bool)
    for p in bad:
        mask &= far(lam, p) & far(lam_b, p)
    return lam[mask]


def measure_residual(ctx, n: int, h: float = 1e-6) -> float:
    """Max relative error of rho(lam_b) |d lam_b| = rho(lam_a) |d lam_a| on the grid."""
    import numpy as np

    from bellgeom import density, transform

    lam = measure_grid(ctx, n)
    step = (transform(ctx, lam + h) - transform(ctx, lam - h) + math.pi) % (2 * math.pi) - math.pi
    lhs = np.abs(density(ctx, transform(ctx, lam)) * step / (2 * h))
    rhs = density(ctx, lam)
    return float(np.max(np.abs(lhs - rhs) / rhs))
