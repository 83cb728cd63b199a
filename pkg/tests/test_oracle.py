import math

import pytest

from capax.domains import Circle, GraphDomain, LpBall, PolytopeDomain, Simplex
from capax.oracle import (
    GridSpec, OracleError, brute_area, brute_gh, lattice_ech_ellipsoid, sorted_multiset_ellipsoid,
)


def test_brute_simplex():
    res = brute_gh(Simplex((1.0, 2.0)), 4)
    assert res.value == pytest.approx(3.0, abs=1e-9)
    assert res.error < 1e-6


def test_brute_circle():
    assert brute_gh(GraphDomain(Circle()), 5).value == pytest.approx(math.sqrt(13), abs=1e-9)


def test_brute_lp_ball():
    assert brute_gh(LpBall(2, 3.0), 2).value == pytest.approx(2 / 2 ** (2 / 3), abs=1e-9)


def test_brute_limits():
    with pytest.raises(OracleError):
        brute_gh(Simplex((1.0,) * 4), 2)
    with pytest.raises(OracleError):
        brute_gh(Simplex((1.0, 1.0)), 31)


@pytest.mark.parametrize("a, ks, want", [
    (2.0, range(1, 7), [1, 2, 2, 3, 4, 4]),
    (1.0, range(1, 5), [1, 1, 2, 2]),
    (1.5, range(1, 6), [1, 1.5, 2, 3, 3]),
])
def test_sorted_multiset(a, ks, want):
    assert [sorted_multiset_ellipsoid(a, k) for k in ks] == pytest.approx(want)


@pytest.mark.parametrize("m, want", [(1, [0, 1, 1, 2, 2, 2, 3]), (2, [0, 1, 2, 2, 3, 3, 4])])
def test_lattice(m, want):
    assert [lattice_ech_ellipsoid(m, k) for k in range(7)] == pytest.approx(want)


def test_lattice_rejects_bad_input():
    with pytest.raises(ValueError):
        lattice_ech_ellipsoid(0, 1)


@pytest.mark.parametrize("dom, want", [
    (Simplex((1.0, 1.0)), 0.5),
    (GraphDomain(Circle()), math.pi / 4),
    (PolytopeDomain([(0, 0), (1, 0), (0, 1), (0.75, 0.75)]), 0.75),
])
def test_brute_area(dom, want):
    est = brute_area(dom)
    assert abs(est.value - want) <= max(est.error, 1e-9)
    assert abs(est.monte_carlo - want) <= 5 * est.mc_error


def test_gridspec_validation():
    with pytest.raises(ValueError):
        GridSpec(resolution=10)
    with pytest.raises(ValueError):
        GridSpec(min_cell=1e-3)
