"""Symmetric perturbations of graph domains and the capacity-blind families.

Every family is built on a symmetric profile g: a bump beta supported in
(0, x(g)) is added on the left half and the right half is redefined as the
inverse of the new left half. That keeps the profile symmetric, and the
mirrored bump has the same integral as beta.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq, linprog

from .bumps import M0_TOTAL, M2_TOTAL, PerturbationSpec, m0, m1, mollifier
from .domains import (
    Arc, Circle, CurveDomain, GammaEps, GraphDomain, Perturbed, Polyline, Profile,
    PolytopeDomain, profile_fixed_point, validate,
)
from .ghcap import gh_general, gh_graph_symmetric, gh_polytope

__all__ = [
    "PerturbationSpec", "SymmetricExtension", "FamilyReport", "make_bump", "design_bump",
    "symmetric_extend", "extension", "novolume_base", "mutual_base", "carrier_xs",
    "family_novolume", "family_mutual", "family_blind", "blind_rho", "delta_max",
    "verify_family", "ivr_graph_bounds", "ivr_polytope_bound", "IvrBounds", "circle_ivr_series",
]

GRID = 10_000


class FamilyError(ValueError):
    pass


def make_bump(support, integral: float, plateau=None, height: Optional[float] = None,
              amplitude: float = 1.0, inner=None) -> PerturbationSpec:
    """Plateau-type bump. With a plateau and an integral below its mass the
    excess is removed by two negative lobes on the outer ramps."""
    return PerturbationSpec(
        support=tuple(map(float, support)), integral=float(integral),
        plateau=None if plateau is None else tuple(map(float, plateau)),
        height=None if height is None else float(height),
        amplitude=float(amplitude), inner=None if inner is None else tuple(map(float, inner)),
    )


def _profile(g) -> Profile:
    if isinstance(g, GraphDomain):
        return g.profile
    if isinstance(g, CurveDomain):
        return g.as_graph().profile
    if isinstance(g, Profile):
        return g
    raise FamilyError(f"cannot take a profile from {g!r}")


def design_bump(g, support, integral: float, plateau=None, height: Optional[float] = None,
                nonneg: bool = False, n_radius: int = 14, grid: int = 600,
                slack: float = 20.0) -> tuple:
    """Bump whose curvature is as small as possible relative to g''.

    beta'' is a combination of mollifiers of one radius r. The LP minimizes t
    subject to -t |g''| <= beta'' sign(g'') on a grid (only this side can flip
    the curvature; the other side gets the loose cap ``slack`` * t |g''|), the
    support, plateau and integral constraints, and optionally beta >= 0.
    Returns the spec and 1/t, the largest amplitude keeping the sign of g''
    on the design grid.
    """
    prof = _profile(g)
    a, b = map(float, support)
    anchored = plateau is not None and float(plateau[0]) == a
    if plateau is not None:
        c, d = map(float, plateau)
        H = float(height if height is not None else 1.0)
    else:
        c = d = None
        H = 0.0
    r = (b - a) / (2.0 * n_radius)
    step = r / 2.0
    cand = np.arange(a + r, b - r + 1e-12 * (b - a), step)
    if plateau is not None:
        keep = (cand + r <= c + 1e-12) | (cand - r >= d - 1e-12)
        cand = cand[keep]
    if anchored:
        cand = cand[cand - r >= d - 1e-12]
    m = cand
    n = len(m)
    if n < 4:
        raise FamilyError("bump support too narrow for its plateau")
    base = H if anchored else 0.0

    A_eq, b_eq = [], []
    A_eq.append(np.ones(n)); b_eq.append(0.0)
    A_eq.append(r * M0_TOTAL * (b - m)); b_eq.append(-base)
    if plateau is not None and not anchored:
        left = (m < c).astype(float)
        A_eq.append(left); b_eq.append(0.0)
        A_eq.append(r * M0_TOTAL * (c - m) * left); b_eq.append(H)
    per = 0.5 * r * ((b - m) ** 2 * M0_TOTAL + r * r * M2_TOTAL)
    A_eq.append(per); b_eq.append(float(integral) - base * (b - a))
    A_eq = np.array(A_eq)
    b_eq = np.array(b_eq)

    xs = np.linspace(a, b, grid)
    d2 = np.asarray(prof.d2f(xs), dtype=float)
    sg = 1.0 if prof.curvature == "cup" else -1.0
    curv = np.abs(d2)
    U = sg * mollifier((xs[:, None] - m[None, :]) / r)
    A_ub = [np.hstack([-U, -curv[:, None]]), np.hstack([U, -slack * curv[:, None]])]
    b_ub = [np.zeros(grid), np.zeros(grid)]
    if nonneg:
        u = (xs[:, None] - m[None, :]) / r
        V = r * ((xs[:, None] - m[None, :]) * m0(u) - r * m1(u))
        A_ub.append(np.hstack([-V, np.zeros((grid, 1))]))
        b_ub.append(np.full(grid, base))
    cost = np.zeros(n + 1)
    cost[-1] = 1.0
    res = linprog(cost, A_ub=np.vstack(A_ub), b_ub=np.concatenate(b_ub),
                  A_eq=np.hstack([A_eq, np.zeros((len(b_eq), 1))]), b_eq=b_eq,
                  bounds=[(None, None)] * n + [(0, None)], method="highs")
    if res.status != 0:
        raise FamilyError(f"bump design infeasible: {res.message}")
    w = res.x[:n]
    # the LP meets equalities only to solver tolerance; project onto them exactly
    resid = A_eq @ w - b_eq
    w = w - A_eq.T @ np.linalg.solve(A_eq @ A_eq.T, resid)
    spec = PerturbationSpec(
        support=(a, b), integral=float(integral),
        plateau=None if plateau is None else (c, d), height=None if plateau is None else H,
        shape="budget", centers=tuple(map(float, m)), radius=float(r), weights=tuple(map(float, w)),
    )
    t = float(np.max(-(U @ w) / np.maximum(curv, 1e-300)))
    return spec, (1.0 / t if t > 0 else math.inf)


@dataclass
class SymmetricExtension:
    base: Profile
    spec: PerturbationSpec
    profile: Perturbed = field(init=False)

    def __post_init__(self):
        self.profile = Perturbed(self.base, [self.spec])

    @property
    def mirror_support(self) -> tuple:
        lo, hi, _, _ = self.profile._mirrors[0]
        return (lo, hi)

    def mirror_integral(self) -> float:
        return self.profile.mirror_integral()

    def left_integral(self) -> float:
        return self.profile.left_integral()

    def involution_error(self, n: int = 1000) -> float:
        xs = np.linspace(0.0, self.profile.lam, n)
        return float(np.max(np.abs(self.profile.f(self.profile.f(xs)) - xs)))


def extension(base, spec: PerturbationSpec) -> SymmetricExtension:
    return SymmetricExtension(_profile(base), spec)


def _class_ok(dom: GraphDomain, curvature: str) -> bool:
    prof = dom.profile
    if isinstance(prof, Perturbed):
        # the mirrored half is the inverse of the left half, and for a
        # decreasing function (f^-1)'' = -f''/f'^3 has the sign of f''
        xs = np.linspace(0.0, prof.xg, GRID + 1)[1:]
        _, d1, d2 = prof._left(xs)
    else:
        xs = np.linspace(0.0, prof.lam, GRID + 1)[1:-1]
        d2 = np.asarray(prof.d2f(xs), dtype=float)
        d1 = np.asarray(prof.df(xs), dtype=float)
    if curvature == "cap":
        curv_ok = np.all(d2 < 0)
    else:
        curv_ok = np.all(d2 > 0)
    return bool(curv_ok and np.all(d1 <= 0) and np.all(np.diff(d1) * (1 if curvature == "cup" else -1) >= -1e-12))


def symmetric_extend(base, spec: PerturbationSpec, check: bool = True) -> GraphDomain:
    """GraphDomain of the symmetric extension of g + amplitude * beta."""
    prof = _profile(base)
    if spec.amplitude == 0.0:
        return base if isinstance(base, GraphDomain) else GraphDomain(prof)
    dom = GraphDomain(Perturbed(prof, [spec]))
    if check and not _class_ok(dom, prof.curvature):
        raise FamilyError("perturbation amplitude breaks the curvature sign")
    return dom


# ---------------------------------------------------------------------------
# carrier points
# ---------------------------------------------------------------------------


def _x_of_slope(prof: Profile, s: float) -> float:
    x = prof.slope_inverse(s)
    if x is not None and 0.0 <= x <= prof.lam:
        return float(x)
    xg = profile_fixed_point(prof)
    fn = lambda x: math.atan(float(prof.df(x))) - math.atan(s)
    lo = 1e-12 * prof.lam
    return float(brentq(fn, lo, xg, xtol=1e-14, rtol=1e-15))


def carrier_xs(g, ks: Sequence[int]) -> dict:
    """x_k (odd k, cap profiles) or the checked x_k (even k, cup profiles)."""
    prof = _profile(g)
    out = {}
    for k in ks:
        if prof.curvature == "cap":
            s = -(k - 1) / (k + 1)
            out[k] = 0.0 if k == 1 else _x_of_slope(prof, s)
        else:
            s = -(k + 2) / k if k > 0 else -math.inf
            out[k] = 0.0 if k == 0 else _x_of_slope(prof, s)
    return out


def novolume_base() -> GraphDomain:
    return GraphDomain(Arc(10.0, -0.3))


def mutual_base(j: int) -> GraphDomain:
    return GraphDomain(Arc(10.0, -0.1) if j % 2 else Arc(10.0, -4.0))


def _inner(lo: float, hi: float, frac: float = 0.1) -> tuple:
    pad = frac * (hi - lo)
    return (lo + pad, hi - pad)


def _novolume_spec(f, j: int):
    if j < 3 or j % 2 == 0:
        raise FamilyError("novolume needs an odd j > 1")
    xs = carrier_xs(f, [j, j + 2])
    return design_bump(f, _inner(xs[j], xs[j + 2], 0.02), 0.5, nonneg=True, n_radius=30, grid=1500)


def family_novolume(f=None, j: int = 3, delta: float = 0.01) -> GraphDomain:
    """Bump with integral 1/2 between x_j and x_{j+2}: area moves by delta."""
    f = f or novolume_base()
    spec, dmax = _novolume_spec(f, j)
    if delta > dmax:
        raise FamilyError(f"delta {delta} exceeds the admissible {dmax:.4g}")
    return symmetric_extend(f, spec.scaled(delta))


def _mutual_spec(base, j: int):
    prof = _profile(base)
    if j < 1:
        raise FamilyError("j must be positive")
    if j % 2 == 0:
        if prof.curvature != "cup":
            raise FamilyError("even j needs a concave (cup) base")
        xs = carrier_xs(base, [j - 2, j, j + 2])
        lo, hi = xs[j - 2], xs[j + 2]
        if j == 2:
            lo = 0.05 * hi
        width = min(xs[j] - lo, hi - xs[j])
        plateau = (xs[j] - 0.1 * width, xs[j] + 0.1 * width)
        return design_bump(base, _inner(lo, hi, 0.02), 0.0, plateau=plateau, height=2.0 / j)
    if prof.curvature != "cap":
        raise FamilyError("odd j needs a convex (cap) base")
    if j == 1:
        x3 = carrier_xs(base, [3])[3]
        b = 0.5 * x3
        return design_bump(base, (0.0, 0.98 * b), 0.0, plateau=(0.0, 0.15 * b), height=1.0)
    xs = carrier_xs(base, [j - 2, j, j + 2])
    lo, hi = xs[j - 2], xs[j + 2]
    if j == 3:
        lo = 0.05 * hi
    width = min(xs[j] - lo, hi - xs[j])
    plateau = (xs[j] - 0.1 * width, xs[j] + 0.1 * width)
    return design_bump(base, _inner(lo, hi, 0.02), 0.0, plateau=plateau, height=2.0 / (j + 1))


def family_mutual(base=None, j: int = 2, delta: float = 0.01) -> GraphDomain:
    """Only c_j moves, by exactly delta; area and all other c_k stay put."""
    base = base or mutual_base(j)
    spec, dmax = _mutual_spec(base, j)
    if delta > dmax:
        raise FamilyError(f"delta {delta} exceeds the admissible {dmax:.4g}")
    return symmetric_extend(base, spec.scaled(delta))


def blind_rho(h) -> tuple:
    """Signed bump near y22 (slope -3) with plateau 1 and zero integral.

    Its support stays between the slope -4 and slope -5/2 tangencies, so
    only the nodes 22/11 (up) and 222/111 (down) move.
    """
    prof = _profile(h)
    xa = _x_of_slope(prof, -3.99)
    xb = _x_of_slope(prof, -2.51)
    y22 = _x_of_slope(prof, -3.0)
    w = min(y22 - xa, xb - y22)
    return design_bump(prof, (xa, xb), 0.0, plateau=(y22 - 0.01 * w, y22 + 0.01 * w), height=1.0,
                       n_radius=60, grid=1500)


def family_blind(epsilon: float = 0.05, delta: float = 0.005) -> tuple:
    h = CurveDomain(GammaEps(epsilon))
    if not h.slope(h.t_lo) < -4:
        raise FamilyError("epsilon too large: needs h'(0) < -4")
    g = h.as_graph()
    rho, dmax = blind_rho(g)
    if delta > dmax:
        raise FamilyError(f"delta {delta} exceeds the admissible {dmax:.4g}")
    return g, symmetric_extend(g, rho.scaled(delta))


def delta_max(build: Callable[[float], GraphDomain], hi: float, iters: int = 30) -> float:
    """Largest delta in [0, hi] for which ``build`` passes class validation (bisection)."""

    def ok(d):
        try:
            build(d)
            return True
        except (FamilyError, ValueError):
            return False

    if ok(hi):
        return hi
    lo = 0.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------


@dataclass
class FamilyReport:
    name: str
    params: dict
    k_max: int
    before: list
    after: list
    expected_shift: list
    area_before: float
    area_after: float
    expected_area_shift: float
    ech9: Optional[tuple] = None
    tol: float = 1e-8
    ech_tol: float = 1e-5

    @property
    def capacity_residual(self) -> float:
        return max(abs(a - b - s) for a, b, s in zip(self.after, self.before, self.expected_shift))

    @property
    def area_residual(self) -> float:
        return abs(self.area_after - self.area_before - self.expected_area_shift)

    @property
    def ech_residual(self) -> Optional[float]:
        if self.ech9 is None:
            return None
        before, after, expected = self.ech9
        return abs(after - before - expected)

    @property
    def ok(self) -> bool:
        good = self.capacity_residual <= self.tol and self.area_residual <= self.tol
        if self.ech9 is not None:
            good = good and self.ech_residual <= self.ech_tol
        return good

    def to_dict(self) -> dict:
        out = {
            "family": self.name, "params": self.params, "k_max": self.k_max,
            "capacities_before": self.before, "capacities_after": self.after,
            "expected_shift": self.expected_shift,
            "area_before": self.area_before, "area_after": self.area_after,
            "expected_area_shift": self.expected_area_shift,
            "capacity_residual": self.capacity_residual, "area_residual": self.area_residual,
            "tolerances": {"capacity": self.tol, "area": self.tol, "ech": self.ech_tol},
            "ok": self.ok,
        }
        if self.ech9 is not None:
            out["ech9_before"], out["ech9_after"], out["ech9_expected_shift"] = self.ech9
            out["ech_residual"] = self.ech_residual
        return out


def _capacities(dom, k_max):
    return [gh_graph_symmetric(dom, k).value for k in range(1, k_max + 1)]


def verify_family(name: str, k_max: int = 30, **params) -> FamilyReport:
    """Build a family member and recompute every claimed equality."""
    delta = float(params.get("delta", 0.01))
    if name == "novolume":
        j = int(params.get("j", 3))
        before = novolume_base()
        after = family_novolume(before, j, delta)
        shift = [0.0] * k_max
        area_shift = delta
        ech = None
    elif name == "mutual":
        j = int(params.get("j", 2))
        before = mutual_base(j)
        after = family_mutual(before, j, delta)
        shift = [delta if k == j else 0.0 for k in range(1, k_max + 1)]
        area_shift = 0.0
        ech = None
    elif name == "blind":
        from .echcap import ech_capacity

        eps = float(params.get("eps", 0.05))
        before, after = family_blind(eps, delta)
        shift = [0.0] * k_max
        area_shift = 0.0
        ech = (ech_capacity(CurveDomain(GammaEps(eps)), 9), ech_capacity(after, 9), delta)
    else:
        raise FamilyError(f"unknown family {name!r}")
    return FamilyReport(
        name, {k: v for k, v in params.items()}, k_max,
        _capacities(before, k_max), _capacities(after, k_max), shift,
        before.area(), after.area(), area_shift, ech,
    )


# ---------------------------------------------------------------------------
# isocapacity volume ratio bounds
# ---------------------------------------------------------------------------


@dataclass
class IvrBounds:
    lower: Optional[PolytopeDomain]
    upper: Optional[PolytopeDomain]
    ratio: float
    error: float
    k_last: int
    capacity_residual: Optional[float] = None


def _mirror(points: list, xs: float) -> PolytopeDomain:
    """Symmetric convex polygon under the chain, closed through the origin.

    The upper chain starts horizontally, so its mirror ends with a vertical
    edge and is not the graph of a function; a vertex list handles both.
    """
    left = [p for p in points if p[0] < xs - 1e-15]
    right = [(y, x) for x, y in reversed(left)]
    return PolytopeDomain([(0.0, 0.0)] + left + [(xs, xs)] + right)


def _sym_area(points: list, xs: float) -> float:
    """Area under the symmetric closure of a left polyline ending at (xs, xs)."""
    pts = points + [(xs, xs)]
    s = 0.0
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        s += (x1 - x0) * (0.5 * (y0 + y1))
    return 2.0 * (s - 0.5 * xs * xs)


def ivr_graph_bounds(f=None, k_last: int = 4001, build_polylines: bool = True,
                     k_check: int = 25, tol: float = 1e-6) -> IvrBounds:
    """Lower and upper piecewise-linear profiles sharing every c_k with f.

    Vertices sit at the odd carriers x_k (lower) and at the crossings of the
    tangent lines there (upper). The series is cut at k_last and closed by a
    chord to the fixed point; the tail enters the error bar. With polygons
    built, c_1..c_k_check of both are recomputed by the composition formula
    and compared with those of f.
    """
    f = f or GraphDomain(Circle())
    prof = _profile(f)
    if prof.curvature != "cap":
        raise FamilyError("ivr bounds need a convex (cap) profile")
    lam = prof.lam
    xs = profile_fixed_point(prof)
    ks = list(range(3, k_last + 1, 2))
    xk = [0.0] + [_x_of_slope(prof, -(k - 1) / (k + 1)) for k in ks]
    yk = [float(prof.f(x)) for x in xk]
    sk = [float(prof.df(0.0))] + [-(k - 1) / (k + 1) for k in ks]
    lower = list(zip(xk, yk))
    upper = [(0.0, lam)]
    for i in range(1, len(xk)):
        x0, y0, s0 = xk[i - 1], yk[i - 1], sk[i - 1]
        x1, y1, s1 = xk[i], yk[i], sk[i]
        # L_{i-1} and L_i meet where y0 + s0 (x - x0) = y1 + s1 (x - x1)
        xp = (y1 - y0 + s0 * x0 - s1 * x1) / (s0 - s1)
        upper.append((xp, y0 + s0 * (xp - x0)))
    a_lo = _sym_area(lower, xs)
    a_hi = _sym_area(upper, xs)
    # alternatives bracketing the infinite constructions
    xl, yl, sl = xk[-1], yk[-1], sk[-1]
    xt = (yl - sl * xl) / (1.0 - sl)  # last tangent line meets the diagonal
    a_hi_ext = _sym_area(upper + [(xt, xt)], xt) - 0.0
    a_lo_ext = _sym_area(lower + [(xt, xt)], xt)
    ratio = a_hi / a_lo
    err = abs(a_hi_ext - a_hi) / a_lo + a_hi * abs(a_lo_ext - a_lo) / a_lo**2
    if not build_polylines:
        return IvrBounds(None, None, ratio, err, k_last)
    lo_poly, hi_poly = _mirror(lower, xs), _mirror(upper, xs)
    ref = GraphDomain(prof)
    resid = 0.0
    for k in range(1, k_check + 1):
        ck = gh_graph_symmetric(ref, k).value
        for P in (lo_poly, hi_poly):
            resid = max(resid, abs(gh_general(P, k).value - ck))
    if resid > tol:
        raise FamilyError(f"bounding polygons miss the capacities of f by {resid:.3g}")
    return IvrBounds(lo_poly, hi_poly, ratio, err, k_last, resid)


def circle_ivr_series(n_terms: int = 1_000_000) -> float:
    """The closed series for the round profile, summed directly.

    The bracketed term is a difference of quantities of size k^2, so it is
    rewritten with a^2 - b^2 = (a - b)(a + b) to avoid cancellation.
    """
    k = np.arange(1, n_terms + 1, dtype=float)
    A = np.sqrt(k**2 + (k + 1) ** 2)
    B = np.sqrt((k - 1) ** 2 + k**2)
    C = np.sqrt((k + 1) ** 2 + (k + 2) ** 2)
    num = math.sqrt(5) - 2 + np.sum(A * (-4 * k / (B + A) + (4 * k + 4) / (C + A)))
    den = np.sum((4 * k**4 + 1) ** -0.5)
    return float(num / den)


def omega_ab(r: float, a: float, b: float) -> PolytopeDomain:
    return PolytopeDomain([(0, 0), (1, 0), (0, 1), (r, r), (a, b), (b, a)])


def ivr_polytope_bound(r: float, k_max: int = 20, check: bool = True) -> float:
    """3(2 - r) - 2/r, after checking the extremal polytope shares c_1..c_k_max."""
    if not (2.0 / 3.0 <= r < 1.0):
        raise FamilyError(f"r must lie in [2/3, 1), got {r}")
    if check:
        P = PolytopeDomain([(0, 0), (1, 0), (0, 1), (r, r)])
        Q = omega_ab(r, 1.0, 3 * r - 2)
        for k in range(1, k_max + 1):
            ck, dk = gh_polytope(P, k).value, gh_polytope(Q, k).value
            if abs(ck - dk) > 1e-9 * max(1.0, ck):
                raise FamilyError(f"isocapacity check fails at k={k}: {ck} vs {dk}")
    return 3.0 * (2.0 - r) - 2.0 / r
