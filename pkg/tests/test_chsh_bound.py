import math

import numpy as np
import pytest

from bellgeom import ChshQuery, chsh_value, generalized_bound, make_family, optimize_chsh
from bellgeom import small_angle_dominance, stationarity_residual, verify_bound
from bellgeom.chsh_bound import (
    canonical_representative,
    chsh_gradient,
    golden_section_max,
    lattice_search,
)
from bellgeom.errors import DomainError

from .conftest import VALID_SPECS, circle_distance
from .oracles import dense_grid_max, extremal_orbit

PI = math.pi
TSIRELSON = 2 * math.sqrt(2)
SUPER = 2 ** (11 / 6)
OPTIMUM = ChshQuery(PI / 4, -PI / 4, PI / 2)


def in_orbit(q, orbit, tol):
    return any(max(circle_distance(a, b) for a, b in zip(q.as_tuple(), o)) < tol for o in orbit)


class TestFunctional:
    def test_tsirelson_point(self, cosine):
        assert abs(chsh_value(cosine, OPTIMUM)) == pytest.approx(TSIRELSON, abs=1e-14)

    def test_origin(self, valid_family):
        assert chsh_value(valid_family, ChshQuery(0, 0, 0)) == -2.0

    def test_power_third(self, power_third):
        assert abs(chsh_value(power_third, OPTIMUM)) == pytest.approx(SUPER, abs=1e-14)

    def test_arguments_canonicalised(self, cosine):
        shifted = ChshQuery(PI / 4 + 2 * PI, -PI / 4 - 4 * PI, PI / 2 + 2 * PI)
        assert shifted.as_tuple() == pytest.approx(OPTIMUM.as_tuple(), abs=1e-14)
        assert ChshQuery(PI, 0, 0).theta1 == -PI

    def test_mirror_symmetry(self, valid_family):
        rng = np.random.default_rng(11)
        for t1, t2, d in rng.uniform(-PI, PI, (500, 3)):
            a = chsh_value(valid_family, ChshQuery(t1, t2, d))
            b = chsh_value(valid_family, ChshQuery(-t1, -t2, -d))
            assert abs(a - b) < 1e-12


class TestBound:
    def test_cosine(self, cosine):
        assert generalized_bound(cosine) == pytest.approx(TSIRELSON, abs=1e-15)

    def test_power_third(self, power_third):
        assert generalized_bound(power_third) == pytest.approx(SUPER, abs=1e-14)

    def test_power_tenth(self):
        # 4 * 2**-0.05; lattice oracle in test_against_dense_grid
        assert generalized_bound(make_family("power:0.1")) == pytest.approx(3.8637453157, abs=1e-9)

    def test_strictly_decreasing(self):
        ps = [k / 10 for k in range(1, 11)]
        vals = [generalized_bound(make_family(f"power:{p}")) for p in ps]
        assert all(a > b for a, b in zip(vals, vals[1:]))
        assert all(v < 4 for v in vals)

    def test_approaches_four(self):
        assert 4 - generalized_bound(make_family("power:1e-6")) < 1e-5

    @pytest.mark.parametrize("spec", ["cosine", "power:1/3"])
    def test_precondition(self, spec):
        from bellgeom import evaluate

        assert abs(evaluate(make_family(spec), PI / 4)) > 0.5


class TestStationarity:
    def test_extremum(self, cosine):
        assert stationarity_residual(cosine, OPTIMUM) < 1e-10

    def test_origin(self, cosine):
        assert stationarity_residual(cosine, ChshQuery(0, 0, 0)) < 1e-10

    def test_generic_point_matches_numeric_gradient(self, cosine):
        q = ChshQuery(0.3, 0.1, 0.7)
        h = 1e-6
        numeric = []
        for i in range(3):
            up = list(q.as_tuple())
            dn = list(q.as_tuple())
            up[i] += h
            dn[i] -= h
            numeric.append((chsh_value(cosine, ChshQuery(*up)) - chsh_value(cosine, ChshQuery(*dn))) / (2 * h))
        assert chsh_gradient(cosine, q) == pytest.approx(numeric, abs=1e-8)
        r = stationarity_residual(cosine, q)
        assert r > 0.1
        assert r == pytest.approx(max(abs(g) for g in numeric), abs=1e-8)

    def test_infinite_marker(self, power_third):
        assert stationarity_residual(power_third, ChshQuery(PI / 2, 0, 0)) == math.inf


class TestOptimizer:
    def test_cosine(self, cosine):
        top, orbit = extremal_orbit("cosine")
        assert top == pytest.approx(TSIRELSON, abs=1e-14)
        r = optimize_chsh(cosine, 64, 1e-10)
        assert abs(abs(r.value) - TSIRELSON) < 1e-8
        assert in_orbit(r.query, orbit, 1e-6)
        assert r.query.theta1 > 0
        assert r.stationarity_residual < 1e-4
        assert r.bound == generalized_bound(cosine)

    def test_power_third(self, power_third):
        r = optimize_chsh(power_third, 64, 1e-8)
        assert abs(abs(r.value) - SUPER) < 1e-6
        _, orbit = extremal_orbit("power:1/3")
        assert in_orbit(r.query, orbit, 1e-6)

    def test_power_half(self):
        f = make_family("power:0.5")
        r = optimize_chsh(f, 64, 1e-8)
        assert abs(abs(r.value) - 4 * 2 ** -0.25) < 1e-6
        assert 4 * 2 ** -0.25 == pytest.approx(3.3635857, abs=1e-7)

    @pytest.mark.parametrize("spec", ["power:0.5", "power:1/3"])
    def test_against_dense_grid(self, spec):
        f = make_family(spec)
        r = optimize_chsh(f, 64, 1e-8)
        grid = dense_grid_max(spec, 256)
        assert abs(r.value) >= grid - 1e-12
        assert abs(abs(r.value) - grid) < 1e-6

    def test_off_lattice_refinement(self, cosine):
        # 50 does not divide by 8, so pi/4 is not a lattice point
        start, v = lattice_search(cosine, 50)
        assert abs(v) < TSIRELSON - 1e-4
        r = optimize_chsh(cosine, 50, 1e-10)
        assert abs(abs(r.value) - TSIRELSON) < 1e-8

    def test_small_grid_rejected(self, cosine):
        with pytest.raises(DomainError):
            optimize_chsh(cosine, 15)

    def test_result_dict(self, cosine):
        r = optimize_chsh(cosine)
        d = r.to_dict(cosine, 64, 1e-10)
        assert list(d) == ["family", "bound", "max_value", "argmax", "stationarity_residual", "grid_n", "refine_tol"]
        assert d["max_value"] == 2.82842712475
        assert list(d["argmax"]) == ["theta1", "theta2", "delta"]


class TestHelpers:
    def test_golden_section(self):
        x, fx = golden_section_max(lambda t: -(t - 0.3) ** 2, -1.0, 2.0, 1e-10)
        assert x == pytest.approx(0.3, abs=1e-8)
        assert fx == pytest.approx(0.0, abs=1e-15)

    def test_canonical_representative(self):
        q = canonical_representative(ChshQuery(-PI / 4, PI / 4, -PI / 2))
        assert q.as_tuple() == pytest.approx(OPTIMUM.as_tuple())
        assert canonical_representative(OPTIMUM) is OPTIMUM


class TestVerify:
    @pytest.mark.parametrize("spec", ["cosine", "power:1/3", "power:0.1"])
    def test_never_exceeds(self, spec):
        f = make_family(spec)
        check = verify_bound(f, 200_000, seed=1)
        assert check.ok
        assert check.worst_value <= check.bound + 1e-9
        assert check.worst_value > check.bound - 0.05
        assert abs(abs(chsh_value(f, check.worst)) - check.worst_value) < 1e-12

    def test_bad_samples(self, cosine):
        with pytest.raises(DomainError):
            verify_bound(cosine, 0, 0)

    def test_detects_excess(self, cosine):
        assert not verify_bound(cosine, 100_000, 0, slack=-0.1).ok


class TestDominance:
    @pytest.mark.parametrize("spec", VALID_SPECS)
    def test_holds(self, spec):
        assert small_angle_dominance(make_family(spec), 10001)

    def test_endpoint(self, valid_family):
        from bellgeom import evaluate

        assert abs(evaluate(valid_family, 0.0)) == 1.0 > abs(evaluate(valid_family, PI / 4))
