"""Gutt-Hutchings capacities of convex and concave toric domains.

The general engine enumerates integer compositions and calls the support
oracles of ``domains``; the remaining functions are the collapsed and
closed-form evaluations for symmetric domains, graphs and the named
examples, each cross-checked against the general engine in the tests.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np
from scipy.optimize import brentq
from scipy.special import comb, gamma

from .domains import (
    Alpha, Box, ChainDomain, CurveDomain, Domain, GraphDomain, LpBall, ORCurve,
    PEllipse, PolytopeDomain, Simplex, _BRENT, g_p, g_p_prime, support_max,
    support_min, validate,
)

MAX_COMPOSITIONS = 10**7
TIE_RTOL = 1e-12


class CapacityError(ValueError):
    pass


@dataclass(frozen=True)
class CapacityRecord:
    k: int
    value: float
    carrier_vector: tuple
    carrier_point: tuple
    engine: str = "general"

    def residual(self) -> float:
        """|value - <carrier_vector, carrier_point>|."""
        return abs(self.value - float(np.dot(self.carrier_vector, self.carrier_point)))


@dataclass(frozen=True)
class BalancedVector:
    k: int
    n: int
    vector: tuple
    mode: str


@dataclass(frozen=True)
class JkClassification:
    k: int
    J: int
    slope_at_fixed_point: float


def _check_k(k):
    if int(k) != k or k < 1:
        raise CapacityError(f"k must be a positive integer, got {k}")
    return int(k)


def balanced_vector(k: int, n: int, mode: str = "convex") -> BalancedVector:
    k = _check_k(k)
    if n < 1:
        raise CapacityError("n must be positive")
    if mode == "convex":
        q, r = divmod(k, n)
        vec = (q,) * (n - r) + (q + 1,) * r
    elif mode == "concave":
        q, r = divmod(k + n - 1, n)
        vec = (q + 1,) * r + (q,) * (n - r)
    else:
        raise CapacityError(f"unknown mode {mode!r}")
    return BalancedVector(k, n, vec, mode)


def n_compositions(total: int, n: int, positive: bool) -> int:
    if positive:
        return int(comb(total - 1, n - 1, exact=True)) if total >= n else 0
    return int(comb(total + n - 1, n - 1, exact=True))


def compositions(total: int, n: int, positive: bool = False) -> Iterable[tuple]:
    """All compositions of ``total`` into n parts (weak unless ``positive``)."""
    if positive:
        for c in compositions(total - n, n, False):
            yield tuple(t + 1 for t in c)
        return
    for bars in itertools.combinations(range(total + n - 1), n - 1):
        prev = -1
        out = []
        for b in bars:
            out.append(b - prev - 1)
            prev = b
        out.append(total + n - 1 - prev - 1)
        yield tuple(out)


def _batch_values(dom: Domain, vs: np.ndarray, sense: str):
    """Support values for many vectors at once, plus the witnesses."""
    if isinstance(dom, PolytopeDomain):
        vals = vs @ dom.vertices.T
        idx = vals.argmax(axis=1) if sense == "max" else vals.argmin(axis=1)
        return vals[np.arange(len(vs)), idx], dom.vertices[idx]
    if isinstance(dom, Box) and sense == "max":
        a = np.array(dom.a)
        return vs @ a, np.broadcast_to(a, vs.shape)
    if isinstance(dom, Simplex):
        prod = vs * np.array(dom.a)
        idx = prod.argmax(axis=1) if sense == "max" else prod.argmin(axis=1)
        w = np.zeros_like(prod)
        w[np.arange(len(vs)), idx] = np.array(dom.a)[idx]
        return prod[np.arange(len(vs)), idx], w
    fn = support_max if sense == "max" else support_min
    res = [fn(dom, v) for v in vs]
    return np.array([r.value for r in res]), np.array([r.witness for r in res])


def _pick(values, vectors, points, sense):
    best = values.max() if sense == "max" else values.min()
    tol = TIE_RTOL * max(1.0, abs(best))
    cand = np.nonzero(np.abs(values - best) <= tol)[0]
    i = min(cand, key=lambda j: tuple(vectors[j]))
    return float(values[i]), tuple(int(t) for t in vectors[i]), tuple(float(t) for t in points[i])


def gh_general(dom: Domain, k: int, mode: Optional[str] = None) -> CapacityRecord:
    """c_k by the composition minimax over all integer vectors."""
    k = _check_k(k)
    n = dom.dimension
    if mode is None:
        mode = "convex" if dom.convex else ("concave" if dom.concave else None)
    if mode == "convex" and not dom.convex or mode == "concave" and not dom.concave or mode is None:
        raise CapacityError(f"{dom!r} is not {mode or 'convex or concave'}")
    positive = mode == "concave"
    total = k + n - 1 if positive else k
    count = n_compositions(total, n, positive)
    if count > MAX_COMPOSITIONS:
        raise CapacityError(f"{count} compositions exceed the enumeration cap {MAX_COMPOSITIONS}")
    sense = "max" if mode == "convex" else "min"
    best = None
    it = compositions(total, n, positive)
    while True:
        chunk = list(itertools.islice(it, 200_000))
        if not chunk:
            break
        vs = np.array(chunk, dtype=float)
        vals, pts = _batch_values(dom, vs, sense)
        # outer optimization: min over compositions for convex, max for concave
        cand = _pick(vals, np.array(chunk), np.asarray(pts), "min" if mode == "convex" else "max")
        if best is None:
            best = cand
        else:
            better = cand[0] < best[0] if mode == "convex" else cand[0] > best[0]
            tie = abs(cand[0] - best[0]) <= TIE_RTOL * max(1.0, abs(best[0]))
            if (better and not tie) or (tie and cand[1] < best[1]):
                best = cand
    return CapacityRecord(k, best[0], best[1], best[2], "general")


def _require_symmetric(dom):
    if not dom.symmetric:
        raise CapacityError(f"{dom!r} is not symmetric")


def gh_symmetric(dom: Domain, k: int) -> CapacityRecord:
    """Collapsed formula: evaluate the support function at the balanced vector."""
    k = _check_k(k)
    _require_symmetric(dom)
    if dom.convex:
        vec = balanced_vector(k, dom.dimension, "convex").vector
        res = support_max(dom, vec)
    elif dom.concave:
        vec = balanced_vector(k, dom.dimension, "concave").vector
        res = support_min(dom, vec)
    else:
        raise CapacityError(f"{dom!r} is neither convex nor concave")
    return CapacityRecord(k, res.value, vec, tuple(map(float, res.witness)), "symmetric")


def jk_classify(slope: float, k: int) -> JkClassification:
    """J with slope in I^k_J = (-(J+1)/(k-J-1), -J/(k-J)], I^k_{k-1} = (-inf, -(k-1)]."""
    k = _check_k(k)
    if k < 2:
        raise CapacityError("J_k needs k >= 2")
    if slope > 0:
        raise CapacityError(f"slope {slope} must be nonpositive")
    for j in range(k - 1):
        lo = -(j + 1) / (k - j - 1)
        hi = -j / (k - j)
        if lo < slope <= hi:
            return JkClassification(k, j, float(slope))
    return JkClassification(k, k - 1, float(slope))


def _in_class_v(g: GraphDomain, tol=1e-10) -> bool:
    prof = g.profile
    return (
        abs(g.lam - 1.0) <= tol
        and float(prof.f(0.0)) >= 1.0 - tol
        and abs(float(prof.df(0.0))) <= tol
        and float(prof.df(g.lam)) == -np.inf
        and prof.curvature == "cap"
    )


def gh_graph_convex(g: GraphDomain, k: int) -> CapacityRecord:
    """c_k for a graph in the class V by the two-candidate J_k reduction."""
    k = _check_k(k)
    if isinstance(g.profile, PEllipse) and g.profile.p == 1:
        return gh_general(Simplex((1.0, g.profile.a)), k)
    if not _in_class_v(g):
        raise CapacityError(f"{g!r} is outside the class V")
    prof = g.profile
    f0 = float(prof.f(0.0))
    if k == 1:
        cands = [(1.0, (1, 0), (1.0, 0.0)), (f0, (0, 1), (0.0, f0))]
    else:
        xf = g.fixed_point()
        J = jk_classify(float(prof.df(xf)), k).J
        cands = [(float(k), (k, 0), (1.0, 0.0)), (k * f0, (0, k), (0.0, f0))]
        for ell in sorted({min(max(J, 1), k - 1), min(max(J + 1, 1), k - 1)}):
            val, t, _, _ = g.extremize(float(ell), float(k - ell), "max")
            cands.append((float(val), (ell, k - ell), g.point(t)))
    best = min(c[0] for c in cands)
    tol = TIE_RTOL * max(1.0, best)
    val, vec, pt = min((c for c in cands if c[0] <= best + tol), key=lambda c: c[1])
    return CapacityRecord(k, val, vec, tuple(map(float, pt)), "graph-convex")


def messy_terms(g: GraphDomain, k: int) -> list:
    """c(l) = l x_l + (k-l) f(x_l) for every l in 1..k-1."""
    return [float(g.extremize(float(ell), float(k - ell), "max")[0]) for ell in range(1, k)]


def gh_graph_symmetric(g: ChainDomain, k: int) -> CapacityRecord:
    """c_k of a symmetric planar graph or curve domain via the fixed point and one root."""
    k = _check_k(k)
    if not isinstance(g, ChainDomain):
        raise CapacityError("gh_graph_symmetric needs a planar graph or curve domain")
    _require_symmetric(g)
    xs = g.fixed_point()
    y0 = g.point(g.t_lo)[1]
    if g.boundary_curvature == "cap":
        if k % 2 == 0:
            return CapacityRecord(k, k * xs, (k // 2, k // 2), (xs, xs), "graph-symmetric")
        a, b = (k - 1) // 2, (k + 1) // 2
        if k > 1 and -(k - 1) / (k + 1) < g.slope(g.t_lo):
            val, t, _, _ = g.extremize(float(a), float(b), "max")
            return CapacityRecord(k, float(val), (a, b), tuple(map(float, g.point(t))), "graph-symmetric")
        return CapacityRecord(k, b * y0, (a, b), (0.0, float(y0)), "graph-symmetric")
    if g.boundary_curvature == "cup":
        if k % 2 == 1:
            m = (k + 1) // 2
            return CapacityRecord(k, (k + 1) * xs, (m, m), (xs, xs), "graph-symmetric")
        a, b = (k + 2) // 2, k // 2
        if -k / (k + 2) < g.slope(g.t_hi):
            val, t, _, _ = g.extremize(float(a), float(b), "min")
            return CapacityRecord(k, float(val), (a, b), tuple(map(float, g.point(t))), "graph-symmetric")
        return CapacityRecord(k, b * y0, (a, b), (0.0, float(y0)), "graph-symmetric")
    raise CapacityError(f"{g!r} has no strict curvature sign")


def _log_norm(logs):
    m = max(logs)
    return m + math.log(sum(math.exp(t - m) for t in logs))


def gh_pellipsoid(p: float, a: float, k: int) -> CapacityRecord:
    """c_k(E_p(1, a)) in closed form: min(k, F) with F = min over two Hoelder terms."""
    k = _check_k(k)
    if not (p >= 1 and a >= 1):
        raise CapacityError(f"p-ellipsoid needs p >= 1 and a >= 1, got p={p}, a={a}")
    if p == 1:
        rec = gh_general(Simplex((1.0, float(a))), k)
        return CapacityRecord(k, rec.value, rec.carrier_vector, rec.carrier_point, "closed-form")
    if k == 1:
        return CapacityRecord(1, 1.0, (1, 0), (1.0, 0.0), "closed-form")
    q = p / (p - 1.0)
    log_sigma = p * math.log(a)
    slope = -math.exp(min(log_sigma, 700.0))
    J = jk_classify(slope, k).J
    cands = [(float(k), (k, 0), (1.0, 0.0))]
    if a == 1:
        cands.append((float(k), (0, k), (0.0, 1.0)))
    for ell in sorted({min(max(J, 1), k - 1), min(max(J + 1, 1), k - 1)}):
        la, lb = math.log(a * (k - ell)), math.log(ell)
        ln = _log_norm([q * la, q * lb]) / q
        val = math.exp(ln)
        x = math.exp((q - 1) * (lb - ln))
        y = a * math.exp((q - 1) * (la - ln))
        cands.append((val, (ell, k - ell), (x, y)))
    best = min(c[0] for c in cands)
    tol = TIE_RTOL * max(1.0, best)
    val, vec, pt = min((c for c in cands if c[0] <= best + tol), key=lambda c: c[1])
    return CapacityRecord(k, val, vec, pt, "closed-form")


def p_threshold(a: float, k: int, p_lo: float = 1.0, p_hi: float = 64.0, step: float = 0.01) -> Optional[float]:
    """Smallest scanned p with c_k(E_p(1,a)) = k."""
    p = p_lo
    while p <= p_hi + 1e-12:
        if gh_pellipsoid(p, a, k).value >= k - 1e-12:
            return p
        p = round(p + step, 12)
    return None


def k_below(p: float, a: float, k_max: int = 10_000) -> Optional[int]:
    """Smallest k <= k_max with c_k(E_p(1,a)) < k."""
    for k in range(1, k_max + 1):
        if gh_pellipsoid(p, a, k).value < k - 1e-12:
            return k
    return None


def _lp_norm(vec, e: float) -> float:
    v = np.asarray(vec, dtype=float)
    s = v.max() if e > 0 else v.min()
    return float(s * np.sum((v / s) ** e) ** (1.0 / e))


def gh_lp_ball(n: int, p: float, k: int) -> CapacityRecord:
    """c_k(B^n_p): the dual norm of the balanced vector."""
    k = _check_k(k)
    dom = LpBall(n, p)
    if p == 2:
        rec = gh_general(Simplex((1.0,) * n), k)
        return CapacityRecord(k, rec.value, rec.carrier_vector, rec.carrier_point, "closed-form")
    mode = "convex" if p > 2 else "concave"
    vec = balanced_vector(k, n, mode).vector
    e = p / (p - 2.0)
    val = _lp_norm(vec, e)
    wit = (support_max if p > 2 else support_min)(dom, vec).witness
    return CapacityRecord(k, val, vec, tuple(map(float, wit)), "closed-form")


def gh_polytope(P: PolytopeDomain, k: int) -> CapacityRecord:
    k = _check_k(k)
    _require_symmetric(P)
    if not P.convex:
        raise CapacityError("gh_polytope needs a convex polytope")
    vec = balanced_vector(k, P.dimension, "convex").vector
    vals = P.vertices @ np.array(vec, dtype=float)
    i = int(np.argmax(vals))
    return CapacityRecord(k, float(vals[i]), vec, tuple(map(float, P.vertices[i])), "closed-form")


_BIDISK = CurveDomain(Alpha())


def gh_lagrangian_bidisk(k: int) -> CapacityRecord:
    """Odd k: 2k + 2. Even k: minimum of <V(k), alpha> found by the curve engine."""
    k = _check_k(k)
    if k % 2 == 1:
        m = (k + 1) // 2
        return CapacityRecord(k, 2.0 * k + 2.0, (m, m), (2.0, 2.0), "closed-form")
    rec = gh_graph_symmetric(_BIDISK, k)
    return CapacityRecord(k, rec.value, rec.carrier_vector, rec.carrier_point, "engine")


def bidisk_even_closed(k: int) -> float:
    """(2k+2) sin(pi k / (2k+2)), the stationary value at t = pi k / (k+1)."""
    return (2 * k + 2) * math.sin(math.pi * k / (2 * k + 2))


def _g_root(p: float, target: float) -> float:
    e = 0.25 ** (1.0 / p)
    fn = lambda s: g_p_prime(p, s) - target
    return brentq(fn, 0.0, e, xtol=1e-14, rtol=1e-15, maxiter=300)


def gh_or_lp_bidisk(p: float, k: int) -> CapacityRecord:
    """c_k of the l^p sum of two Lagrangian discs in closed form."""
    k = _check_k(k)
    if not (p >= 1) or abs(p - 2) < 1e-9:
        raise CapacityError("p must be >= 1 and different from 2")
    g0 = g_p(p, 0.0)
    lam = 2 * math.pi * 0.25 ** (1.0 / p)
    r = math.sqrt(2.0 / p)
    if p < 2:
        if k % 2 == 0:
            return CapacityRecord(k, k * g0, (k // 2, k // 2), (g0, g0), "closed-form")
        a, b = (k - 1) // 2, (k + 1) // 2
        if k >= 1.0 / (r - 1.0):
            v = _g_root(p, -math.pi * (k + 1) / k)
            g = g_p(p, v)
            pt = (g, 2 * math.pi * v + g)
            return CapacityRecord(k, k * g + (k + 1) * math.pi * v, (a, b), pt, "closed-form")
        return CapacityRecord(k, b * lam, (a, b), (0.0, lam), "closed-form")
    if k % 2 == 1:
        m = (k + 1) // 2
        return CapacityRecord(k, (k + 1) * g0, (m, m), (g0, g0), "closed-form")
    a, b = (k + 2) // 2, k // 2
    if k >= r / (1.0 - r):
        v = _g_root(p, -math.pi * k / (k + 1))
        g = g_p(p, v)
        pt = (g, 2 * math.pi * v + g)
        return CapacityRecord(k, k * math.pi * v + (k + 1) * g, (a, b), pt, "closed-form")
    return CapacityRecord(k, b * lam, (a, b), (0.0, lam), "closed-form")


def _axis_reach(dom: Domain, direction: np.ndarray, hi: float) -> float:
    lo = 0.0
    while dom.contains(direction * hi, tol=0.0):
        lo, hi = hi, 2 * hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if dom.contains(direction * mid, tol=0.0):
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-13 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def ball_bounds(dom: Domain) -> tuple:
    """(a_sup, A_inf): largest ball inside and smallest ball containing the domain.

    A ball of capacity a has image {sum w_i <= a}; membership is tested by
    bisection along the coordinate axes and the diagonal.
    """
    n = dom.dimension
    axes = [_axis_reach(dom, np.eye(n)[i], 1.0) for i in range(n)]
    ones = np.ones(n)
    # for symmetric domains the extremal point of sum w_i lies on the diagonal
    diag = _axis_reach(dom, ones, 1.0) * n if dom.symmetric else None
    if dom.convex:
        a_sup = min(axes)
        A_inf = diag if diag is not None else support_max(dom, ones).value
    elif dom.concave:
        a_sup = diag if diag is not None else support_min(dom, ones).value
        A_inf = max(axes)
    else:
        raise CapacityError("ball bounds need a convex or concave domain")
    return float(a_sup), float(A_inf)


@dataclass(frozen=True)
class Carrier:
    k: int
    point: tuple
    label: tuple


def carriers(g: ChainDomain, k_max: int) -> list:
    """Carrier points of c_1..c_{k_max} of a symmetric planar domain."""
    return [Carrier(k, rec.carrier_point, rec.carrier_vector)
            for k in range(1, k_max + 1) for rec in [gh_graph_symmetric(g, k)]]


def transfer(v, mode: str = "convex") -> tuple:
    """One step of the transfer map towards the balanced vector."""
    v = [int(t) for t in v]
    if any(t < 0 for t in v):
        raise CapacityError("transfer needs a nonnegative vector")
    if mode == "convex":
        if any(a > b for a, b in zip(v, v[1:])):
            raise CapacityError("convex transfer needs v sorted ascending")
        if v[-1] <= v[0] + 1:
            return tuple(v)
        i = max(j for j, t in enumerate(v) if t == v[0])
        j = min(j for j, t in enumerate(v) if t == v[-1])
        v[i] += 1
        v[j] -= 1
        return tuple(v)
    if mode == "concave":
        if any(a < b for a, b in zip(v, v[1:])):
            raise CapacityError("concave transfer needs v sorted descending")
        if v[0] <= v[-1] + 1:
            return tuple(v)
        i = max(j for j, t in enumerate(v) if t == v[0])
        j = min(j for j, t in enumerate(v) if t == v[-1])
        v[i] -= 1
        v[j] += 1
        return tuple(v)
    raise CapacityError(f"unknown mode {mode!r}")
