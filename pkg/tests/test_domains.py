import math

import numpy as np
import pytest

from capax.domains import (
    Alpha, Arc, Box, Circle, CurveDomain, GammaEps, GraphDomain, LpBall, LpBall2, ORCurve,
    PEllipse, Polyline, PolytopeDomain, Simplex, area, fixed_point, g_p, g_p_prime, g_p_prime_fd,
    omega_r, support_max, support_min, validate, xi_of_eps,
)

CIRCLE = GraphDomain(Circle())
KITE = PolytopeDomain([(0, 0), (1, 0), (0, 1), (0.75, 0.75)])


def test_support_max_simplex():
    res = support_max(Simplex((1.0, 1.0)), (2, 3))
    assert res.value == pytest.approx(3.0, abs=1e-12)
    assert np.allclose(res.witness, (0.0, 1.0))


def test_support_max_circle():
    res = support_max(CIRCLE, (1, 1))
    assert res.value == pytest.approx(math.sqrt(2), abs=1e-12)
    assert res.witness[0] == pytest.approx(1 / math.sqrt(2), abs=1e-9)


def test_support_max_kite():
    res = support_max(KITE, (1, 2))
    assert res.value == pytest.approx(2.25, abs=1e-12)
    assert np.allclose(res.witness, (0.75, 0.75))


def test_support_min_alpha_diagonal():
    res = support_min(CurveDomain(Alpha()), (1, 1))
    assert res.value == pytest.approx(4.0, abs=1e-12)
    assert np.allclose(res.witness, (2.0, 2.0), atol=1e-7)


def test_support_min_alpha_21():
    res = support_min(CurveDomain(Alpha()), (2, 1))
    assert res.value == pytest.approx(3 * math.sqrt(3), abs=1e-10)
    t = 2 * math.pi / 3
    assert np.allclose(res.witness, Alpha().point(t), atol=1e-7)


def test_support_min_simplex():
    res = support_min(Simplex((1.0, 2.0)), (1, 1))
    assert res.value == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(res.witness, (1.0, 0.0))


def test_support_rejects_bad_vectors():
    with pytest.raises(ValueError):
        support_max(CIRCLE, (0, 0))
    with pytest.raises(ValueError):
        support_max(CIRCLE, (1, 2, 3))


@pytest.mark.parametrize("dom, want", [
    (Simplex((1.0, 1.0)), 0.5),
    (CIRCLE, math.pi / 4),
    (KITE, 0.75),
    (Box((1.0, 2.0, 3.0)), 6.0),
    (Simplex((1.0, 2.0, 3.0)), 1.0),
])
def test_area(dom, want):
    assert area(dom) == pytest.approx(want, abs=1e-10)


def test_area_alpha_matches_quadrature():
    # the region under alpha has area 2 pi (x-extent 4, symplectic normalization)
    a = area(CurveDomain(Alpha()))
    xs = np.linspace(0, 2 * np.pi, 200_001)
    pts = np.array([Alpha().point(t) for t in xs])
    shoelace = 0.5 * abs(np.sum(pts[:-1, 0] * pts[1:, 1] - pts[1:, 0] * pts[:-1, 1]))
    assert a == pytest.approx(shoelace, rel=1e-8)


@pytest.mark.parametrize("prof, want", [
    (Circle(), 1 / math.sqrt(2)),
    (PEllipse(1.0, 1.0), 0.5),
    (PEllipse(2.0, 2.0), 2 / math.sqrt(5)),
])
def test_fixed_point(prof, want):
    x = fixed_point(GraphDomain(prof))
    assert x == pytest.approx(want, abs=1e-12)
    assert abs(float(prof.f(x)) - x) <= 1e-12


def test_fixed_point_slope_minus_one():
    for prof in (Circle(), LpBall2(3.0), Arc(1.0, -0.3)):
        x = fixed_point(prof)
        assert float(prof.df(x)) == pytest.approx(-1.0, abs=1e-8)


def test_validate_circle():
    rep = validate(CIRCLE)
    assert rep.symmetric and rep.convex and rep.ok
    assert rep.smooth_boundary is False
    assert rep.smooth_boundary_symmetric_closure is True


def test_validate_box_and_kite():
    rep = validate(Box((1.0, 2.0)))
    assert rep.convex and not rep.symmetric
    assert validate(KITE).symmetric


def test_lpball_classification():
    assert LpBall(2, 3.0).convex and not LpBall(2, 3.0).concave
    assert LpBall(2, 1.5).concave and not LpBall(2, 1.5).convex
    assert LpBall(2, 2.0).convex and LpBall(2, 2.0).concave


def test_gamma_eps_endpoints():
    eps = 0.05
    xi = xi_of_eps(eps)
    assert 2 * math.sin(xi / 2) - xi * math.cos(xi / 2) == pytest.approx(eps, abs=1e-13)
    c = GammaEps(eps)
    x0, y0 = c.point(c.t_lo)
    x1, y1 = c.point(c.t_hi)
    assert x0 == pytest.approx(0.0, abs=1e-12) and y1 == pytest.approx(0.0, abs=1e-12)


def test_gamma_eps_steep_enough_for_tau_table():
    dom = CurveDomain(GammaEps(0.05))
    assert dom.slope(dom.t_lo) < -4


@pytest.mark.parametrize("p", [1.2, 1.5, 3.0, 5.0])
def test_g_p_at_zero(p):
    want = 2 * math.gamma(1 + 1 / p) ** 2 / math.gamma(1 + 2 / p)
    assert g_p(p, 0.0) == pytest.approx(want, abs=1e-6)


@pytest.mark.parametrize("p", [1.5, 3.0])
def test_g_p_vanishes_at_endpoint(p):
    assert g_p(p, 0.25 ** (1 / p)) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("p", [1.2, 1.5, 3.0])
def test_g_p_derivative_matches_differences(p):
    e = 0.25 ** (1 / p)
    for v in np.linspace(0.05, 0.9, 7) * e:
        assert g_p_prime(p, v) == pytest.approx(g_p_prime_fd(p, v), abs=1e-6)


def test_or_curve_concave_for_p_below_two():
    dom = CurveDomain(ORCurve(1.5))
    assert dom.symmetric
    assert validate(dom).ok


def test_polyline_rejects_increasing():
    with pytest.raises(ValueError):
        Polyline(((0, 1), (0.5, 1.2), (1, 0)))


def test_polytope_symmetry_flag():
    assert not PolytopeDomain([(0, 0), (1, 0), (0, 2)]).symmetric
    assert omega_r(0.6).symmetric
