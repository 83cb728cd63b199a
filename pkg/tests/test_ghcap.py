import math

import numpy as np
import pytest

from capax.domains import Box, Circle, GraphDomain, LpBall, PolytopeDomain, Simplex, g_p
from capax.ghcap import (
    CapacityError, balanced_vector, ball_bounds, bidisk_even_closed, carriers, compositions,
    gh_general, gh_graph_symmetric, gh_lagrangian_bidisk, gh_lp_ball, gh_or_lp_bidisk,
    gh_pellipsoid, gh_polytope, gh_symmetric, jk_classify, n_compositions, transfer,
)
from capax.oracle import brute_gh, sorted_multiset_ellipsoid

CIRCLE = GraphDomain(Circle())
KITE = PolytopeDomain([(0, 0), (1, 0), (0, 1), (0.75, 0.75)])


@pytest.mark.parametrize("k, n, mode, want", [
    (7, 3, "convex", (2, 2, 3)),
    (6, 3, "convex", (2, 2, 2)),
    (4, 2, "concave", (3, 2)),
    (5, 2, "concave", (3, 3)),
    (1, 3, "concave", (1, 1, 1)),
])
def test_balanced_vector(k, n, mode, want):
    vec = balanced_vector(k, n, mode).vector
    assert vec == want
    assert sum(vec) == (k if mode == "convex" else k + n - 1)


def test_balanced_vector_rejects_bad_k():
    with pytest.raises(CapacityError):
        balanced_vector(0, 2)
    with pytest.raises(CapacityError):
        balanced_vector(3, 2, "other")


def test_compositions_count():
    for total, n in [(5, 2), (6, 3), (4, 4)]:
        assert len(list(compositions(total, n))) == n_compositions(total, n, False)
        assert len(list(compositions(total, n, True))) == n_compositions(total, n, True)


def test_box_capacity():
    assert gh_general(Box((1.0, 2.0)), 5).value == pytest.approx(5.0, abs=1e-12)


def test_ellipsoid_sequence():
    # E(1, 2) as the simplex with legs 1 and 2
    got = [gh_general(Simplex((1.0, 2.0)), k).value for k in range(1, 7)]
    assert got == pytest.approx([1, 2, 2, 3, 4, 4], abs=1e-12)
    assert got == pytest.approx([sorted_multiset_ellipsoid(2.0, k) for k in range(1, 7)], abs=1e-12)


def test_symmetric_engine_examples():
    assert gh_symmetric(LpBall(2, 4.0), 3).value == pytest.approx(math.sqrt(5), abs=1e-10)
    assert gh_symmetric(KITE, 2).value == pytest.approx(1.5, abs=1e-12)


@pytest.mark.parametrize("k, want", [(4, 2 * math.sqrt(2)), (5, math.sqrt(13)), (1, 1.0), (2, math.sqrt(2))])
def test_circle(k, want):
    assert gh_graph_symmetric(CIRCLE, k).value == pytest.approx(want, abs=1e-10)


def test_circle_carrier_point():
    rec = gh_graph_symmetric(CIRCLE, 5)
    assert sorted(rec.carrier_vector) == [2, 3]
    assert min(rec.carrier_point) == pytest.approx(2 / math.sqrt(13), abs=1e-9)
    assert rec.residual() <= 1e-12


def test_pellipsoid():
    assert gh_pellipsoid(2.0, 1.0, 3).value == pytest.approx(math.sqrt(5), abs=1e-10)


@pytest.mark.parametrize("n, p, k, want", [
    (2, 4.0, 2, math.sqrt(2)),
    (2, 1.0, 3, 1.0),
    (3, 4.0, 4, math.sqrt(6)),
])
def test_lp_ball(n, p, k, want):
    assert gh_lp_ball(n, p, k).value == pytest.approx(want, abs=1e-10)


@pytest.mark.parametrize("r, k, want", [(0.75, 3, 2.25), (0.55, 3, 2.0)])
def test_kite_polytope(r, k, want):
    P = PolytopeDomain([(0, 0), (1, 0), (0, 1), (r, r)])
    assert gh_polytope(P, k).value == pytest.approx(want, abs=1e-12)


def test_square_polytope():
    sq = PolytopeDomain([(0, 0), (1, 0), (0, 1), (1, 1)])
    assert gh_polytope(sq, 7).value == pytest.approx(7.0, abs=1e-12)


@pytest.mark.parametrize("k, want", [(1, 4.0), (3, 8.0), (2, 3 * math.sqrt(3))])
def test_lagrangian_bidisk(k, want):
    assert gh_lagrangian_bidisk(k).value == pytest.approx(want, abs=1e-10)


def test_bidisk_even_closed_form_is_an_upper_stationary_value():
    for k in (2, 4, 6):
        assert gh_lagrangian_bidisk(k).value <= bidisk_even_closed(k) + 1e-12


@pytest.mark.parametrize("p", [1.5, 3.0])
def test_or_bidisk_matches_brute(p):
    from capax.domains import CurveDomain, ORCurve

    dom = CurveDomain(ORCurve(p))
    for k in range(1, 6):
        assert gh_or_lp_bidisk(p, k).value == pytest.approx(brute_gh(dom, k).value, abs=1e-8)


def test_or_bidisk_rejects_p_two():
    with pytest.raises(CapacityError):
        gh_or_lp_bidisk(2.0, 3)


def test_g_p_endpoint():
    for p in (1.5, 3.0, 6.0):
        assert g_p(p, 0.25 ** (1 / p)) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("dom, want", [
    (CIRCLE, (1.0, math.sqrt(2))),
    (Simplex((1.0, 1.0)), (1.0, 1.0)),
    (KITE, (1.0, 1.5)),
])
def test_ball_bounds(dom, want):
    assert ball_bounds(dom) == pytest.approx(want, abs=1e-10)


def test_circle_carriers():
    cs = carriers(CIRCLE, 4)
    assert [c.k for c in cs] == [1, 2, 3, 4]
    assert cs[0].point[0] == pytest.approx(1.0, abs=1e-12) or cs[0].point[1] == pytest.approx(1.0, abs=1e-12)
    x = 1 / math.sqrt(2)
    assert cs[1].point == pytest.approx((x, x), abs=1e-9)
    assert cs[3].point == pytest.approx((x, x), abs=1e-9)


@pytest.mark.parametrize("slope, k, J", [(-1.0, 4, 2), (-1.0, 5, 2), (-1.0, 2, 1), (-3.0, 4, 3), (-0.5, 3, 1)])
def test_jk_classify(slope, k, J):
    # intervals are closed on the right: -1 at k = 4 sits at the right end of J = 2
    assert jk_classify(slope, k).J == J


def test_jk_classify_needs_k_two():
    with pytest.raises(CapacityError):
        jk_classify(-1.0, 1)


@pytest.mark.parametrize("v, mode, want", [
    ((0, 0, 5), "convex", (0, 1, 4)),
    ((2, 2, 2), "convex", (2, 2, 2)),
    ((4, 1), "concave", (3, 2)),
])
def test_transfer_examples(v, mode, want):
    assert transfer(v, mode) == want


def test_transfer_reaches_balanced():
    v = (0, 0, 0, 9)
    seen = 0
    while transfer(v) != v:
        v = transfer(v)
        seen += 1
    assert v == balanced_vector(9, 4).vector
    assert seen < 20


def test_transfer_rejects_unsorted():
    with pytest.raises(CapacityError):
        transfer((3, 1), "convex")


def test_general_matches_brute_on_simplex3():
    dom = Simplex((1.0, 2.0, 3.0))
    for k in (1, 2, 5, 8):
        assert gh_general(dom, k).value == pytest.approx(brute_gh(dom, k).value, abs=1e-9)


def test_record_residual():
    rec = gh_general(Box((1.0, 2.0)), 4)
    assert rec.residual() <= 1e-12
    assert np.sum(rec.carrier_vector) == 4
