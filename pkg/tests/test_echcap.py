import math

import pytest

from capax.domains import CurveDomain, GammaEps, Simplex
from capax.echcap import (
    TABLE_LABELS, ech9_shift, ech_capacity, ech_capacity_detail, ech_from_weights,
    ech_from_weights_full, gamma_eps_table, node_at, root_node, subdivide, symmetric_tau_table,
    weight_expansion,
)
from capax.oracle import lattice_ech_ellipsoid

GAMMA = CurveDomain(GammaEps(0.05))


def test_simplex_root_and_children():
    root = root_node(Simplex((1.0, 1.0)))
    assert root.tau == pytest.approx(1.0, abs=1e-14)
    assert subdivide(root, Simplex((1.0, 1.0))) == (None, None)


def test_simplex_12_weights():
    exp = weight_expansion(Simplex((1.0, 2.0)), 2)
    assert exp.values() == pytest.approx([1.0, 1.0], abs=1e-12)


@pytest.mark.parametrize("a, k, want", [((1.0, 1.0), 3, 2.0), ((1.0, 2.0), 2, 2.0)])
def test_ech_simplex(a, k, want):
    assert ech_capacity(Simplex(a), k) == pytest.approx(want, abs=1e-12)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_ech_ellipsoid_lattice(m):
    dom = Simplex((1.0, float(m)))
    for k in range(0, 9):
        assert ech_capacity(dom, k) == pytest.approx(lattice_ech_ellipsoid(m, k), abs=1e-12)


def test_gamma_c9():
    tab = gamma_eps_table(0.05)
    val, d, _ = ech_capacity_detail(GAMMA, 9)
    assert d == (3, 1, 1, 1)
    # the three largest weights with multiplicities 3, 2 (from the pair 2/1 by symmetry) and 1
    assert val == pytest.approx(3 * tab[""] + 2 * tab["2"] + tab["22"], abs=1e-10)
    assert val == pytest.approx(14.4030066722, abs=1e-9)


def test_gamma_weight_labels():
    exp = weight_expansion(GAMMA, 7)
    assert [lab for _, lab in exp.weights[:7]] == ["", "1", "2", "11", "22", "12", "21"]


@pytest.mark.parametrize("label", ["", "2", "22", "21", "222", "221"])
def test_gamma_tau_matches_closed_form(label):
    assert node_at(GAMMA, label).tau == pytest.approx(gamma_eps_table(0.05)[label], abs=1e-9)


@pytest.mark.parametrize("eps", [0.02, 0.05, 0.1])
def test_symmetric_table_equals_subdivision(eps):
    dom = CurveDomain(GammaEps(eps))
    tab = symmetric_tau_table(dom)
    for lab in TABLE_LABELS:
        assert tab[lab] == pytest.approx(node_at(dom, lab).tau, abs=1e-9)


def test_node_at_rejects_bad_label():
    with pytest.raises(ValueError):
        node_at(GAMMA, "3")


def test_ordered_and_full_maximum_agree():
    exp = weight_expansion(GAMMA, 6)
    w = exp.values()[:6]
    for k in range(1, 7):
        assert ech_from_weights(w, k)[0] == pytest.approx(ech_from_weights_full(w, k), abs=1e-12)


def test_ech9_shift_zero_delta():
    from capax.families import blind_rho

    rho, _ = blind_rho(GAMMA)
    before, after = ech9_shift(GAMMA, rho, 0.0)
    assert before == after


def test_ech_monotone_in_k():
    vals = [ech_capacity(GAMMA, k) for k in range(0, 12)]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


def test_symmetric_table_needs_steep_start():
    from capax.domains import Circle, GraphDomain

    with pytest.raises(ValueError):
        symmetric_tau_table(GraphDomain(Circle()))


def test_gamma_table_root():
    assert gamma_eps_table(0.05)[""] == pytest.approx(3.9, abs=1e-15)
    assert gamma_eps_table(0.0)["222"] == pytest.approx(10 * math.sin(math.pi / 5) - 4 * math.sqrt(2), abs=1e-15)
