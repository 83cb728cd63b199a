import math

import numpy as np
from hypothesis import given, strategies as st

from capax.domains import Box, Circle, GraphDomain, LpBall, PolytopeDomain, Simplex, area, support_max
from capax.echcap import ech_from_weights, ech_from_weights_full
from capax.ghcap import balanced_vector, gh_general, gh_graph_symmetric, gh_pellipsoid, gh_polytope, transfer

legs = st.floats(0.2, 5.0)
scale = st.floats(0.25, 4.0)


@given(a=st.tuples(legs, legs), s=scale, k=st.integers(1, 12))
def test_capacity_homogeneous(a, s, k):
    c = gh_general(Simplex(a), k).value
    cs = gh_general(Simplex((a[0] * s, a[1] * s)), k).value
    assert math.isclose(cs, s * c, rel_tol=1e-10)


@given(a=st.tuples(legs, legs, legs), k=st.integers(1, 10))
def test_capacity_permutation_invariant(a, k):
    c = gh_general(Box(a), k).value
    assert math.isclose(gh_general(Box(a[::-1]), k).value, c, rel_tol=1e-12)


@given(a=st.tuples(legs, legs), b=st.tuples(st.floats(0, 2), st.floats(0, 2)), k=st.integers(1, 10))
def test_capacity_monotone_under_inclusion(a, b, k):
    small = Box(a)
    big = Box((a[0] + b[0], a[1] + b[1]))
    assert gh_general(big, k).value >= gh_general(small, k).value - 1e-12


@given(p=st.floats(1.2, 8.0), k=st.integers(1, 30))
def test_capacity_nondecreasing_in_k(p, k):
    dom = LpBall(2, p)
    assert gh_general(dom, k + 1).value >= gh_general(dom, k).value - 1e-12


@given(a=st.floats(1.0, 4.0), k=st.integers(1, 25))
def test_pellipsoid_subadditive(a, k):
    # convex case: the sum of two minimizing vectors is admissible for k + 1
    c = [gh_pellipsoid(3.0, a, j).value for j in (1, k, k + 1)]
    assert c[2] <= c[0] + c[1] + 1e-10


@given(r=st.floats(0.5, 0.99), k=st.integers(1, 20))
def test_kite_between_balls(r, k):
    P = PolytopeDomain([(0, 0), (1, 0), (0, 1), (r, r)])
    c = gh_polytope(P, k).value
    # inside the square, containing the unit simplex
    assert math.ceil(k / 2) - 1e-12 <= c <= k + 1e-12


@given(v=st.lists(st.integers(0, 12), min_size=2, max_size=5))
def test_transfer_terminates_at_balanced(v):
    v = tuple(sorted(v))
    steps = 0
    while transfer(v) != v:
        w = transfer(v)
        assert sum(w) == sum(v)
        assert max(w) - min(w) <= max(v) - min(v)
        v = w
        steps += 1
        assert steps < 200
    assert v == balanced_vector(sum(v), len(v)).vector if sum(v) else True


@given(w=st.lists(st.floats(0.01, 5.0), min_size=1, max_size=5), k=st.integers(1, 6))
def test_ordered_weights_match_full_search(w, k):
    w = sorted(w, reverse=True)
    assert math.isclose(ech_from_weights(w, k)[0], ech_from_weights_full(w, k), rel_tol=1e-12, abs_tol=1e-12)


@given(theta=st.floats(0.01, math.pi / 2 - 0.01))
def test_circle_support_is_norm(theta):
    v = (math.cos(theta), math.sin(theta))
    assert math.isclose(support_max(GraphDomain(Circle()), v).value, 1.0, rel_tol=1e-10)


@given(a=st.tuples(legs, legs))
def test_simplex_area(a):
    assert math.isclose(area(Simplex(a)), 0.5 * a[0] * a[1], rel_tol=1e-12)


@given(r=st.floats(0.5, 0.99))
def test_kite_area(r):
    P = PolytopeDomain([(0, 0), (1, 0), (0, 1), (r, r)])
    assert math.isclose(area(P), r, rel_tol=1e-12)


@given(k=st.integers(1, 40))
def test_circle_capacities_grow_like_sqrt(k):
    c = gh_graph_symmetric(GraphDomain(Circle()), k).value
    assert np.sqrt(2) * k / 2 - 1e-12 <= c <= k + 1e-12
