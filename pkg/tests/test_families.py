import math

import numpy as np
import pytest
from scipy.integrate import quad

from capax.bumps import PerturbationSpec
from capax.domains import Arc, Circle, GraphDomain
from capax.families import (
    FamilyError, carrier_xs, circle_ivr_series, design_bump, extension, family_novolume,
    ivr_graph_bounds, ivr_polytope_bound, make_bump, novolume_base, omega_ab, symmetric_extend,
    verify_family,
)
from capax.ghcap import gh_graph_symmetric, gh_polytope

CIRCLE = GraphDomain(Circle())


def test_make_bump_integral_and_support():
    spec = make_bump((0.1, 0.3), 0.02)
    assert spec.beta_integral() == pytest.approx(0.02, abs=1e-12)
    assert spec.beta(0.05) == 0.0 and spec.beta(0.35) == 0.0
    assert spec.beta(0.2) > 0


def test_make_bump_plateau_with_lobes():
    spec = make_bump((0.0, 1.0), 0.1, plateau=(0.4, 0.6), height=1.0)
    assert spec.beta(0.5) == pytest.approx(1.0, abs=1e-12)
    assert spec.beta_integral() == pytest.approx(0.1, abs=1e-12)
    xs = np.linspace(0.0, 1.0, 2001)
    assert np.min(spec.beta(xs)) < 0


def test_bump_rejects_empty_support():
    with pytest.raises(ValueError):
        make_bump((0.3, 0.3), 0.1)


def test_spec_round_trip():
    spec = make_bump((0.1, 0.3), 0.02, amplitude=0.5)
    again = PerturbationSpec.from_dict(spec.to_dict())
    assert again.to_dict() == spec.to_dict()


def test_zero_amplitude_returns_base():
    spec = make_bump((0.1, 0.3), 0.02, amplitude=0.0)
    assert symmetric_extend(CIRCLE, spec) is CIRCLE


def test_extension_on_circle():
    spec = make_bump((0.1, 0.3), 1e-4, amplitude=0.3)
    ext = extension(CIRCLE, spec)
    f = Circle().f
    lo, hi = ext.mirror_support
    assert lo == pytest.approx(float(f(0.3)), abs=1e-12)
    assert hi == pytest.approx(float(f(0.1)), abs=1e-12)
    # the mirrored lobe encloses the same area as the original one
    assert ext.mirror_integral() == pytest.approx(ext.left_integral(), abs=1e-9)
    assert ext.involution_error() <= 1e-9


def test_extension_area_shift():
    spec = make_bump((0.1, 0.3), 1e-4, amplitude=0.3)
    dom = symmetric_extend(CIRCLE, spec)
    assert dom.area() - CIRCLE.area() == pytest.approx(6e-5, abs=1e-9)
    with pytest.raises(FamilyError):
        symmetric_extend(CIRCLE, spec.scaled(1.0))


def test_carrier_xs_cap_profile():
    xs = carrier_xs(CIRCLE, [1, 3, 5])
    assert xs[1] == 0.0
    # slope -(k-1)/(k+1) of the quarter circle
    for k in (3, 5):
        s = (k - 1) / (k + 1)
        assert xs[k] == pytest.approx(s / math.sqrt(1 + s * s), abs=1e-12)


def test_design_bump_budget_keeps_curvature():
    f = novolume_base()
    xs = carrier_xs(f, [3, 5])
    spec, dmax = design_bump(f, (xs[3], xs[5]), 0.5, nonneg=True, n_radius=10, grid=400)
    assert spec.beta_integral() == pytest.approx(0.5, abs=1e-9)
    assert dmax > 0
    dom = symmetric_extend(f, spec.scaled(0.5 * dmax))
    assert isinstance(dom, GraphDomain)


def test_novolume_rejects_large_delta():
    with pytest.raises(FamilyError):
        family_novolume(novolume_base(), 3, 1e3)


def test_novolume_preserves_capacities():
    base = novolume_base()
    dom = family_novolume(base, 3, 0.01)
    for k in range(1, 9):
        assert gh_graph_symmetric(dom, k).value == pytest.approx(gh_graph_symmetric(base, k).value, abs=1e-10)
    assert dom.area() - base.area() == pytest.approx(0.01, abs=1e-10)


def test_verify_family_zero_delta():
    rep = verify_family("mutual", k_max=6, j=1, delta=0.0)
    assert rep.capacity_residual == 0.0 and rep.area_residual == 0.0
    assert rep.ok


def test_verify_family_unknown():
    with pytest.raises(FamilyError):
        verify_family("other")


@pytest.mark.parametrize("r, want", [(2 / 3, 1.0), (0.85, 3 * 1.15 - 2 / 0.85)])
def test_ivr_polytope_bound(r, want):
    assert ivr_polytope_bound(r) == pytest.approx(want, abs=1e-12)


def test_ivr_polytope_bound_range():
    with pytest.raises(FamilyError):
        ivr_polytope_bound(0.5)


def test_omega_ab_area_ratio():
    # the bound is the area ratio of the isocapacity pair
    r = 0.85
    kite = omega_ab(r, r, r)
    big = omega_ab(r, 1.0, 3 * r - 2)
    for k in range(1, 10):
        assert gh_polytope(kite, k).value == pytest.approx(gh_polytope(big, k).value, abs=1e-12)
    assert big.area() / kite.area() == pytest.approx(ivr_polytope_bound(r, check=False), abs=1e-12)


def test_circle_ivr_series_converges():
    a = circle_ivr_series(100_000)
    b = circle_ivr_series(400_000)
    assert abs(a - b) < 1e-6
    assert a > 1.0


def test_small_ivr_bounds():
    b = ivr_graph_bounds(k_last=41)
    assert b.ratio >= 1.0
    assert b.capacity_residual <= 1e-6


def test_perturbation_integral_by_quadrature():
    spec = make_bump((0.2, 0.7), 0.03, plateau=(0.3, 0.5), height=0.1)
    val, _ = quad(lambda x: float(spec.beta(x)), 0.2, 0.7, points=[0.3, 0.5], limit=200)
    assert val == pytest.approx(0.03, abs=1e-10)


def test_arc_base_is_cap():
    assert Arc(10.0, -0.3).curvature == "cap"
