"""Brute-force references for the capacity engines.

Nothing here calls the support oracles of ``domains``. Boundary points come
either from membership tests (bisection along rays from the origin) or, for
chain domains, from the raw parameter map, and every composition is
enumerated without any symmetry reduction.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .domains import (
    Box, ChainDomain, Domain, GraphDomain, LpBall, PolytopeDomain, Simplex,
)

MAX_COMPOSITIONS = 200_000


class OracleError(RuntimeError):
    pass


@dataclass(frozen=True)
class GridSpec:
    resolution: int = 256
    min_cell: float = 1e-10
    max_levels: int = 60
    zoom: int = 8

    def __post_init__(self):
        if self.resolution < 64:
            raise ValueError("grid resolution must be at least 64")
        if not (0 < self.min_cell <= 1e-6):
            raise ValueError("min_cell must lie in (0, 1e-6]")


@dataclass
class OracleResult:
    value: float
    error: float
    vector: tuple
    point: tuple


# ---------------------------------------------------------------------------
# membership, vectorized per domain type
# ---------------------------------------------------------------------------


def _members(dom: Domain, W: np.ndarray, tol: float = 0.0) -> np.ndarray:
    if isinstance(dom, Simplex):
        return W @ (1.0 / np.array(dom.a)) <= 1.0 + tol
    if isinstance(dom, Box):
        return np.all(W <= np.array(dom.a) + tol, axis=1)
    if isinstance(dom, LpBall):
        return np.sum(np.maximum(W, 0.0) ** dom.q, axis=1) <= 1.0 + tol
    if isinstance(dom, PolytopeDomain):
        if dom.mode == "convex":
            eq = dom._hull_equations
            return np.all(W @ eq[:, :-1].T + eq[:, -1] <= tol, axis=1)
        return np.array([dom.contains(w, tol=tol) for w in W])
    if isinstance(dom, GraphDomain):
        x = W[:, 0]
        inside = (x <= dom.lam + tol)
        y = np.asarray(dom.profile.f(np.clip(x, 0.0, dom.lam)), dtype=float)
        return inside & (W[:, 1] <= y + tol)
    return np.array([dom.contains(w, tol=tol) for w in W])


def _reach_bound(dom: Domain) -> float:
    r = 1.0
    n = dom.dimension
    while True:
        probe = np.eye(n) * r
        if not np.any(_members(dom, probe)) and not _members(dom, np.full((1, n), r / n))[0]:
            return r
        r *= 2.0
        if r > 1e12:
            raise OracleError("domain does not look bounded")


def radial(dom: Domain, dirs: np.ndarray, iters: int = 64) -> np.ndarray:
    """Boundary points along the rays through ``dirs`` (rows, nonnegative)."""
    dirs = np.asarray(dirs, dtype=float)
    hi = np.full(len(dirs), _reach_bound(dom) * math.sqrt(dom.dimension) * 4.0)
    norms = np.linalg.norm(dirs, axis=1)
    u = dirs / norms[:, None]
    lo = np.zeros(len(dirs))
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        ok = _members(dom, u * mid[:, None])
        lo = np.where(ok, mid, lo)
        hi = np.where(ok, hi, mid)
    return u * lo[:, None]


def _simplex_grid(n: int, res: int) -> np.ndarray:
    """Barycentric grid on {theta >= 0, sum theta = 1}."""
    if n == 1:
        return np.ones((1, 1))
    if n == 2:
        t = np.linspace(0.0, 1.0, res + 1)
        return np.column_stack([1.0 - t, t])
    pts = [(i, j) for i in range(res + 1) for j in range(res + 1 - i)]
    arr = np.array(pts, dtype=float) / res
    return np.column_stack([arr, 1.0 - arr.sum(axis=1)])


# ---------------------------------------------------------------------------
# boundary parametrizations: ray (any domain) and chain (planar curves)
# ---------------------------------------------------------------------------


class _RayBoundary:
    def __init__(self, dom: Domain, grid: GridSpec):
        self.dom = dom
        self.n = dom.dimension
        res = grid.resolution if self.n <= 2 else max(64, grid.resolution // 4)
        self.res = res
        self.params = _simplex_grid(self.n, res)
        self.points = radial(dom, self.params)
        self.cell = 1.0 / res

    def local(self, center: np.ndarray, half: float, m: int):
        if self.n == 2:
            t = np.clip(center[1] + np.linspace(-half, half, 2 * m + 1), 0.0, 1.0)
            P = np.column_stack([1.0 - t, t])
        else:
            offs = np.linspace(-half, half, 2 * m + 1)
            rows = []
            for da in offs:
                for db in offs:
                    a, b = center[0] + da, center[1] + db
                    a, b = max(a, 0.0), max(b, 0.0)
                    if a + b > 1.0:
                        s = a + b
                        a, b = a / s, b / s
                    rows.append((a, b, 1.0 - a - b))
            P = np.array(rows)
        return P, radial(self.dom, P)


class _ChainBoundary:
    def __init__(self, dom: ChainDomain, grid: GridSpec):
        self.dom = dom
        self.n = 2
        self.lo, self.hi = float(dom.t_lo), float(dom.t_hi)
        self.params = np.linspace(self.lo, self.hi, grid.resolution + 1)[:, None]
        self.points = self._pts(self.params[:, 0])
        self.cell = (self.hi - self.lo) / grid.resolution

    def _pts(self, ts):
        return np.array([self.dom.point(float(t)) for t in ts], dtype=float)

    def local(self, center: np.ndarray, half: float, m: int):
        ts = np.clip(center[0] + np.linspace(-half, half, 2 * m + 1), self.lo, self.hi)
        return ts[:, None], self._pts(ts)


def _boundary(dom: Domain, grid: GridSpec):
    if isinstance(dom, ChainDomain) and not isinstance(dom, GraphDomain):
        return _ChainBoundary(dom, grid)
    return _RayBoundary(dom, grid)


def _refine(bd, v: np.ndarray, idx: int, sense: str, grid: GridSpec):
    sgn = 1.0 if sense == "max" else -1.0
    center = bd.params[idx].copy()
    best_pt = bd.points[idx]
    best = float(v @ best_pt)
    half = 2.0 * bd.cell
    for _ in range(grid.max_levels):
        P, W = bd.local(center, half, grid.zoom)
        vals = W @ v
        j = int(np.argmax(sgn * vals))
        if sgn * vals[j] >= sgn * best:
            best, best_pt, center = float(vals[j]), W[j], P[j].copy()
        half /= grid.zoom / 2.0
        if half < grid.min_cell:
            break
    return best, tuple(map(float, best_pt))


def _compositions(total: int, n: int, positive: bool) -> np.ndarray:
    lo = 1 if positive else 0
    rest = total - lo * n
    if rest < 0:
        return np.zeros((0, n), dtype=int)
    out = []
    for bars in itertools.combinations(range(rest + n - 1), n - 1):
        prev, comp = -1, []
        for b in bars:
            comp.append(b - prev - 1 + lo)
            prev = b
        comp.append(rest + n - 2 - prev + lo)
        out.append(comp)
    return np.array(out, dtype=int)


def brute_gh(dom: Domain, k: int, grid: Optional[GridSpec] = None, mode: Optional[str] = None) -> OracleResult:
    """c_k by exhaustive compositions and grid-refined boundary optimization."""
    grid = grid or GridSpec()
    n = dom.dimension
    if n > 3:
        raise OracleError("brute_gh handles n <= 3")
    if k < 1 or k > 30:
        raise OracleError("brute_gh handles 1 <= k <= 30")
    if mode is None:
        mode = "convex" if dom.convex else "concave"
    if mode == "convex":
        V = _compositions(k, n, positive=False)
        sense = "max"
    else:
        V = _compositions(k + n - 1, n, positive=True)
        sense = "min"
    if len(V) > MAX_COMPOSITIONS:
        raise OracleError("too many compositions")
    bd = _boundary(dom, grid)
    vals = bd.points @ V.T.astype(float)
    if sense == "max":
        idx = np.argmax(vals, axis=0)
        coarse = vals[idx, np.arange(len(V))]
    else:
        idx = np.argmin(vals, axis=0)
        coarse = vals[idx, np.arange(len(V))]
    # a cell of the cloud moves <v, w> by at most |v| times the largest gap
    gaps = np.linalg.norm(np.diff(bd.points, axis=0), axis=1) if bd.n == 2 else None
    if gaps is not None:
        diam = float(np.max(gaps))
    else:
        diam = 4.0 * _reach_bound(dom) * bd.cell * math.sqrt(n)
    slack = np.linalg.norm(V, axis=1) * diam
    if sense == "max":
        # c = min_v max_w; coarse max is a lower bound for each v
        cut = float(np.min(coarse + slack))
        cand = np.nonzero(coarse <= cut)[0]
    else:
        cut = float(np.max(coarse - slack))
        cand = np.nonzero(coarse >= cut)[0]
    best = None
    for i in cand:
        v = V[i].astype(float)
        val, pt = _refine(bd, v, int(idx[i]), sense, grid)
        key = val if sense == "max" else -val
        if best is None or key < best[0]:
            best = (key, val, tuple(int(t) for t in V[i]), pt)
    _, val, vec, pt = best
    err = grid.min_cell * float(np.linalg.norm(V, axis=1).max()) * 10.0
    return OracleResult(float(val), err, vec, pt)


# ---------------------------------------------------------------------------
# ellipsoid sequences
# ---------------------------------------------------------------------------


def sorted_multiset_ellipsoid(a: float, k: int) -> float:
    """k-th smallest element of {1, 2, 3, ...} united with {a, 2a, 3a, ...}."""
    if k < 1 or a < 1:
        raise ValueError("needs k >= 1 and a >= 1")
    i = j = 1
    val = 0.0
    for _ in range(k):
        if i <= j * a:
            val, i = float(i), i + 1
        else:
            val, j = j * a, j + 1
    return val


def lattice_ech_ellipsoid(m: int, k: int) -> float:
    """c_k^ECH(E(1, m)): the k-th entry (from c_0 = 0) of sorted {i + m j}."""
    if m < 1 or k < 0:
        raise ValueError("needs m >= 1 and k >= 0")
    top = k + 1
    vals = sorted(i + m * j for j in range(top + 1) for i in range(top + 1) if i + m * j <= top)
    return float(vals[k])


# ---------------------------------------------------------------------------
# area
# ---------------------------------------------------------------------------


@dataclass
class AreaEstimate:
    value: float
    error: float
    monte_carlo: float
    mc_error: float


def _monte_carlo(dom: Domain, box: tuple, n: int, seed: int) -> tuple:
    rng = np.random.default_rng(seed)
    X, Y = box
    W = rng.random((n, 2)) * np.array([X, Y])
    hit = _members(dom, W) if not (isinstance(dom, ChainDomain) and not isinstance(dom, GraphDomain)) else None
    if hit is None:
        return float("nan"), float("nan")
    p = float(np.mean(hit))
    return p * X * Y, X * Y * math.sqrt(p * (1 - p) / n)


def brute_area(dom: Domain, grid: Optional[GridSpec] = None, columns: int = 200_000,
               mc_samples: int = 200_000, seed: int = 0) -> AreaEstimate:
    """Area of a planar domain by two elementary integrators.

    Chain domains: shoelace over a dense boundary polygon, error from
    halving the sampling. Other domains: column heights by bisection; the
    height is nonincreasing so left and right sums bracket the area.
    A seeded Monte-Carlo estimate is reported alongside.
    """
    if dom.dimension != 2:
        raise OracleError("brute_area handles planar domains")
    if isinstance(dom, ChainDomain) and not isinstance(dom, GraphDomain):
        def shoelace(N):
            ts = np.linspace(dom.t_lo, dom.t_hi, N + 1)
            P = np.array([dom.point(float(t)) for t in ts])
            x0, y0 = P[0]
            x1, y1 = P[-1]
            poly = np.vstack([[0.0, 0.0], [0.0, y0], P, [x1, 0.0]])
            x, y = poly[:, 0], poly[:, 1]
            return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))

        a1 = shoelace(20_000)
        a2 = shoelace(40_000)
        val = a2 + (a2 - a1) / 3.0
        return AreaEstimate(float(val), float(abs(a2 - a1)), float("nan"), float("nan"))
    X = _reach_bound(dom)
    xs = np.linspace(0.0, X, columns + 1)
    lo = np.zeros_like(xs)
    hi = np.full_like(xs, X * 4.0)
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        ok = _members(dom, np.column_stack([xs, mid]))
        lo = np.where(ok, mid, lo)
        hi = np.where(ok, hi, mid)
    h = X / columns
    # points past the right end have height 0 even if the bisection kept lo = 0
    heights = lo
    left = h * float(np.sum(heights[:-1]))
    right = h * float(np.sum(heights[1:]))
    trap = 0.5 * (left + right)
    mc, mce = _monte_carlo(dom, (X, float(heights[0]) * 1.0 + 1e-12), mc_samples, seed)
    return AreaEstimate(trap, 0.5 * (left - right), mc, mce)
