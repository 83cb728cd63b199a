"""Moment-map images of toric domains and the support-function oracles over them.

A domain is described by its image Omega in the closed positive orthant.
Two-dimensional domains bounded by a monotone curve (graphs of a profile or
parametric curves) are handled as *chains*: a parameter interval, a point map
and a monotone slope, which is all the support and subdivision engines need.
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.optimize import brentq, linprog
from scipy.special import gamma

from .bumps import PerturbationSpec, combined

XTOL = 1e-13
_BRENT = dict(xtol=XTOL, rtol=1e-15, maxiter=300)
_QUAD = dict(epsabs=1e-13, epsrel=1e-12, limit=400)


def _as_vec(v, n: int, allow_real: bool = True) -> np.ndarray:
    arr = np.asarray(v, dtype=float).ravel()
    if arr.size != n:
        raise ValueError(f"dimension mismatch: vector of length {arr.size} for a {n}-dimensional domain")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise ValueError(f"support vector must be finite and nonnegative, got {tuple(arr)}")
    if not np.any(arr > 0):
        raise ValueError("support vector must be nonzero")
    if not allow_real and np.any(arr != np.round(arr)):
        raise ValueError("integer vector expected")
    return arr


@dataclass(frozen=True)
class SupportResult:
    value: float
    witness: tuple
    param: Optional[float] = None


# ---------------------------------------------------------------------------
# profiles: f on [0, lam], nonincreasing, f(lam) = 0
# ---------------------------------------------------------------------------


class Profile:
    kind = "profile"

    def f(self, x):
        raise NotImplementedError

    def df(self, x):
        raise NotImplementedError

    def d2f(self, x):
        raise NotImplementedError

    @property
    def curvature(self) -> str:
        """'cap' (f'' < 0), 'cup' (f'' > 0) or 'flat' (affine)."""
        raise NotImplementedError

    @property
    def declared_symmetric(self) -> bool:
        return False

    def area(self) -> float:
        val, _ = quad(lambda x: float(self.f(x)), 0.0, self.lam, **_QUAD)
        return val

    def breakpoints(self) -> Optional[np.ndarray]:
        return None

    def slope_inverse(self, s: float) -> Optional[float]:
        """x with f'(x) = s when available in closed form."""
        return None

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class PEllipse(Profile):
    """f(x) = a (1 - x^p)^(1/p) on [0, 1]."""

    p: float
    a: float = 1.0
    kind = "pellipse"

    def __post_init__(self):
        if not (self.p > 0 and self.a > 0 and math.isfinite(self.p) and math.isfinite(self.a)):
            raise ValueError(f"invalid p-ellipse parameters p={self.p}, a={self.a}")

    @property
    def lam(self):
        return 1.0

    def f(self, x):
        x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
        return self.a * np.power(np.maximum(1.0 - x**self.p, 0.0), 1.0 / self.p)

    def df(self, x):
        x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
        p = self.p
        with np.errstate(divide="ignore", invalid="ignore"):
            u = 1.0 - x**p
            out = -self.a * x ** (p - 1.0) * u ** (1.0 / p - 1.0)
        if p > 1:
            out = np.where(x >= 1.0, -np.inf, out)
        return out

    def d2f(self, x):
        x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
        p = self.p
        with np.errstate(divide="ignore", invalid="ignore"):
            u = 1.0 - x**p
            return -self.a * (p - 1.0) * x ** (p - 2.0) * u ** (1.0 / p - 2.0)

    @property
    def curvature(self):
        if self.p == 1:
            return "flat"
        return "cap" if self.p > 1 else "cup"

    @property
    def declared_symmetric(self):
        return self.a == 1.0

    def area(self):
        return float(self.a * gamma(1 + 1 / self.p) ** 2 / gamma(1 + 2 / self.p))

    def slope_inverse(self, s):
        # f'(x) = -a x^(p-1) (1-x^p)^(1/p-1) = -a t^(p-1) with t = x/(1-x^p)^(1/p)
        if self.p == 1 or s >= 0:
            return None
        t = (-s / self.a) ** (1.0 / (self.p - 1.0))
        return float(t / (1.0 + t**self.p) ** (1.0 / self.p))

    def to_dict(self):
        return {"profile": "pellipse", "p": self.p, "a": self.a}


class Circle(PEllipse):
    kind = "circle"

    def __init__(self):
        super().__init__(2.0, 1.0)

    def __repr__(self):
        return "Circle()"

    def to_dict(self):
        return {"profile": "circle"}


class LpBall2(PEllipse):
    """Boundary of the l^p ball image, f(x) = (1 - x^(p/2))^(2/p)."""

    kind = "lpball2"

    def __init__(self, p: float):
        super().__init__(p / 2.0, 1.0)
        object.__setattr__(self, "lp", float(p))

    def __repr__(self):
        return f"LpBall2(p={self.lp})"

    def to_dict(self):
        return {"profile": "lpball2", "p": self.lp}


@dataclass(frozen=True)
class Arc(Profile):
    """Circular arc from (0, lam) to (lam, 0) with centre on the diagonal.

    ``slope0`` is f'(0). Values in (-1, 0] give a concave cap, values below
    -1 a convex cup. The profile is symmetric about the diagonal.
    """

    lam: float
    slope0: float
    kind = "arc"

    def __post_init__(self):
        if not (self.lam > 0) or not (self.slope0 <= 0) or self.slope0 == -1:
            raise ValueError(f"invalid arc parameters lam={self.lam}, slope0={self.slope0}")

    @cached_property
    def _geom(self):
        m = self.slope0 * self.lam / (1.0 + self.slope0)
        r2 = m * m + (self.lam - m) ** 2
        return m, r2, (1.0 if self.slope0 > -1 else -1.0)

    def f(self, x):
        m, r2, sg = self._geom
        x = np.clip(np.asarray(x, dtype=float), 0.0, self.lam)
        return np.maximum(m + sg * np.sqrt(np.maximum(r2 - (x - m) ** 2, 0.0)), 0.0)

    def df(self, x):
        m, r2, sg = self._geom
        x = np.clip(np.asarray(x, dtype=float), 0.0, self.lam)
        with np.errstate(divide="ignore"):
            return -sg * (x - m) / np.sqrt(np.maximum(r2 - (x - m) ** 2, 0.0))

    def d2f(self, x):
        m, r2, sg = self._geom
        x = np.clip(np.asarray(x, dtype=float), 0.0, self.lam)
        with np.errstate(divide="ignore"):
            return -sg * r2 / np.maximum(r2 - (x - m) ** 2, 0.0) ** 1.5

    @property
    def curvature(self):
        return "cap" if self._geom[2] > 0 else "cup"

    @property
    def declared_symmetric(self):
        return True

    def area(self):
        m, r2, sg = self._geom
        r = math.sqrt(r2)

        def prim(u):
            return 0.5 * (u * math.sqrt(max(r2 - u * u, 0.0)) + r2 * math.asin(max(-1.0, min(1.0, u / r))))

        return m * self.lam + sg * (prim(self.lam - m) - prim(-m))

    def slope_inverse(self, s):
        m, r2, sg = self._geom
        # -sg (x-m)/sqrt(r2-(x-m)^2) = s  =>  x - m = -sg s sqrt(r2/(1+s^2))
        return float(m - sg * s * math.sqrt(r2 / (1.0 + s * s)))

    def to_dict(self):
        return {"profile": "arc", "lam": self.lam, "slope0": self.slope0}


@dataclass(frozen=True)
class Polyline(Profile):
    points: tuple
    kind = "polyline"

    def __post_init__(self):
        pts = tuple((float(x), float(y)) for x, y in self.points)
        object.__setattr__(self, "points", pts)
        xs = np.array([p[0] for p in pts])
        ys = np.array([p[1] for p in pts])
        if len(pts) < 2 or xs[0] != 0.0 or ys[-1] != 0.0 or ys[0] <= 0:
            raise ValueError("polyline must run from (0, y0>0) to (lam, 0)")
        if np.any(np.diff(xs) <= 0) or np.any(np.diff(ys) > 0):
            raise ValueError("polyline must have increasing x and nonincreasing y")

    @property
    def xs(self):
        return np.array([p[0] for p in self.points])

    @property
    def ys(self):
        return np.array([p[1] for p in self.points])

    @property
    def lam(self):
        return self.points[-1][0]

    @cached_property
    def slopes(self):
        return np.diff(self.ys) / np.diff(self.xs)

    def f(self, x):
        return np.interp(np.asarray(x, dtype=float), self.xs, self.ys, right=0.0)

    def df(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.clip(np.searchsorted(self.xs, x, side="right") - 1, 0, len(self.slopes) - 1)
        return self.slopes[idx]

    def d2f(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    @property
    def curvature(self):
        ds = np.diff(self.slopes)
        tol = 1e-12 * max(1.0, float(np.max(np.abs(self.slopes))))
        if np.all(np.abs(ds) <= tol):
            return "flat"
        if np.all(ds <= tol):
            return "cap"
        if np.all(ds >= -tol):
            return "cup"
        return "mixed"

    @property
    def declared_symmetric(self):
        xs, ys = self.xs, self.ys
        return bool(np.allclose(self.f(ys), xs, atol=1e-10) and np.allclose(self.f(xs), ys, atol=1e-10))

    def area(self):
        # exact on the binary values of the vertices
        pts = [(Fraction(x), Fraction(y)) for x, y in self.points] + [(Fraction(self.lam), Fraction(0)), (Fraction(0), Fraction(0))]
        s = Fraction(0)
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            s += x0 * y1 - x1 * y0
        return float(abs(s) / 2)

    def breakpoints(self):
        return self.xs

    def to_dict(self):
        return {"profile": "polyline", "points": [list(p) for p in self.points]}


class CurveProfile(Profile):
    """Graph of a parametric boundary curve, x = gamma_1(t), y = gamma_2(t)."""

    kind = "curve"

    def __init__(self, curve: "Curve"):
        self.curve = curve
        t0, t1 = curve.t_lo, curve.t_hi
        self._x0 = curve.point(t0)[0]
        if abs(self._x0) > 1e-12:
            raise ValueError("curve does not start on the vertical axis")
        self.lam = curve.point(t1)[0]

    def __repr__(self):
        return f"CurveProfile({self.curve!r})"

    def __eq__(self, other):
        return isinstance(other, CurveProfile) and self.curve == other.curve

    def __hash__(self):
        return hash(("curve", self.curve))

    def t_of_x(self, x: float) -> float:
        c = self.curve
        if x <= 0:
            return c.t_lo
        if x >= self.lam:
            return c.t_hi
        return brentq(lambda t: c.point(t)[0] - x, c.t_lo, c.t_hi, **_BRENT)

    def _map(self, fn, x):
        x = np.asarray(x, dtype=float)
        out = np.array([fn(self.t_of_x(float(xi))) for xi in x.ravel()])
        return out.reshape(x.shape) if x.shape else float(out[0])

    def f(self, x):
        return self._map(lambda t: self.curve.point(t)[1], x)

    def df(self, x):
        return self._map(self.curve.slope, x)

    def d2f(self, x):
        return self._map(self.curve.curvature2, x)

    @property
    def curvature(self):
        return self.curve.curvature

    @property
    def declared_symmetric(self):
        return self.curve.declared_symmetric

    def area(self):
        return self.curve.area()

    def slope_inverse(self, s):
        t = self.curve.slope_inverse(s)
        return None if t is None else float(self.curve.point(t)[0])

    def to_dict(self):
        return {"profile": "curve", "curve": self.curve.to_dict()}


class Perturbed(Profile):
    """Symmetric profile g + (beta + mirror beta) built from a symmetric base g.

    On [0, x(g)] the profile is g + sum of bumps; on [x(g), lam] it is the
    inverse of the left half, obtained numerically inside each mirrored
    support and equal to g elsewhere.
    """

    kind = "perturbed"

    def __init__(self, base: Profile, perturbations: Sequence[PerturbationSpec]):
        if not base.declared_symmetric:
            raise ValueError("symmetric extension needs a symmetric base profile")
        self.base = base
        self.perturbations = tuple(perturbations)
        self.xg = profile_fixed_point(base)
        spans = sorted((p.a, p.b) for p in self.perturbations)
        for (a0, b0), (a1, b1) in zip(spans, spans[1:]):
            if a1 < b0:
                raise ValueError("perturbation supports overlap")
        for p in self.perturbations:
            if p.a < 0 or p.b >= self.xg:
                raise ValueError(f"perturbation support {p.support} must lie in [0, x(g)) = [0, {self.xg})")
            if p.a == 0 and not p.left_anchored and p.amplitude != 0:
                raise ValueError("a bump touching 0 must be anchored by a plateau there")
        self.lam = float(self._left(0.0)[0][0])
        self._mirrors = []
        for p in self.perturbations:
            lo = float(self._left(p.b)[0][0])
            hi = float(self._left(p.a)[0][0])
            self._mirrors.append((lo, hi, p.a, p.b))

    def __repr__(self):
        return f"Perturbed({self.base!r}, {len(self.perturbations)} bumps)"

    def _left(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        bv, b1, b2 = combined(self.perturbations, x)
        base_x = np.minimum(x, self.base.lam)
        return (np.asarray(self.base.f(base_x)) + bv,
                np.asarray(self.base.df(base_x)) + b1,
                np.asarray(self.base.d2f(base_x)) + b2)

    def _invert(self, x: float, a: float, b: float) -> float:
        fn = lambda y: float(self._left(y)[0][0]) - x
        fa, fb = fn(a), fn(b)
        if fa <= 0:
            return a
        if fb >= 0:
            return b
        return brentq(fn, a, b, **_BRENT)

    def _eval(self, x: float):
        if x <= self.xg:
            v, d1, d2 = self._left(x)
            return float(v[0]), float(d1[0]), float(d2[0])
        for lo, hi, a, b in self._mirrors:
            if lo <= x <= hi:
                y = self._invert(x, a, b)
                _, l1, l2 = self._left(y)
                l1, l2 = float(l1[0]), float(l2[0])
                return y, 1.0 / l1, -l2 / l1**3
        if x > self.base.lam:
            return 0.0, -np.inf, 0.0
        return float(self.base.f(x)), float(self.base.df(x)), float(self.base.d2f(x))

    def _map(self, i, x):
        x = np.asarray(x, dtype=float)
        out = np.array([self._eval(float(xi))[i] for xi in np.clip(x, 0.0, self.lam).ravel()])
        return out.reshape(x.shape) if x.shape else float(out[0])

    def f(self, x):
        return self._map(0, x)

    def df(self, x):
        return self._map(1, x)

    def d2f(self, x):
        return self._map(2, x)

    @property
    def curvature(self):
        return self.base.curvature

    @property
    def declared_symmetric(self):
        return True

    def slope_inverse(self, s):
        return None

    def left_integral(self) -> float:
        return sum(p.amplitude * p.beta_integral() for p in self.perturbations)

    def mirror_integral(self) -> float:
        """Integral of the mirrored part, computed from the numerical inverse."""
        total = 0.0
        for lo, hi, a, b in self._mirrors:
            if hi <= lo:
                continue
            g = lambda x: self._eval(x)[0] - (float(self.base.f(x)) if x <= self.base.lam else 0.0)
            pts = [t for t in (self.base.lam,) if lo < t < hi]
            # the integrand carries root-finding noise, so quad may report
            # roundoff; accept the result when its own error estimate is small
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", IntegrationWarning)
                val, err = quad(g, lo, hi, points=pts or None, epsabs=1e-12, epsrel=1e-10, limit=400)
            if err > 1e-9:
                raise ArithmeticError(f"mirror integral error estimate {err:.2e} too large")
            total += val
        return total

    def area(self):
        return self.base.area() + self.left_integral() + self.mirror_integral()

    def breakpoints(self):
        pts = [0.0, self.xg, self.lam]
        for lo, hi, a, b in self._mirrors:
            pts += [a, b, lo, hi]
        return np.unique(np.array(pts))

    def to_dict(self):
        return {"profile": "perturbed", "base": self.base.to_dict()}


def profile_fixed_point(prof: Profile) -> float:
    lam = prof.lam
    fn = lambda x: float(prof.f(x)) - x
    return brentq(fn, 0.0, lam, **_BRENT)


def profile_from_dict(d: dict) -> Profile:
    kind = d.get("profile")
    if kind == "circle":
        return Circle()
    if kind == "pellipse":
        return PEllipse(float(d["p"]), float(d.get("a", 1.0)))
    if kind == "lpball2":
        return LpBall2(float(d["p"]))
    if kind == "arc":
        return Arc(float(d["lam"]), float(d["slope0"]))
    if kind == "polyline":
        return Polyline(tuple(tuple(p) for p in d["points"]))
    if kind == "curve":
        return CurveProfile(curve_from_dict(d["curve"]))
    raise ValueError(f"unknown profile {kind!r}")


# ---------------------------------------------------------------------------
# parametric curves
# ---------------------------------------------------------------------------


class Curve:
    kind = "curve"
    t_lo = 0.0
    t_hi = 1.0

    def point(self, t):
        raise NotImplementedError

    def velocity(self, t):
        raise NotImplementedError

    def slope(self, t) -> float:
        raise NotImplementedError

    def dslope(self, t) -> float:
        raise NotImplementedError

    def curvature2(self, t) -> float:
        """Second derivative of the graph y(x) at the point with parameter t."""
        return self.dslope(t) / self.velocity(t)[0]

    def slope_inverse(self, s) -> Optional[float]:
        return None

    @property
    def curvature(self) -> str:
        raise NotImplementedError

    @property
    def declared_symmetric(self) -> bool:
        return True

    def area(self) -> float:
        fn = lambda t: self.point(t)[1] * self.velocity(t)[0]
        val, _ = quad(fn, self.t_lo, self.t_hi, **_QUAD)
        return val

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Alpha(Curve):
    """The Lagrangian bidisk boundary alpha(t), t in [0, 2 pi]."""

    kind = "alpha"
    shift = 0.0

    @property
    def t_lo(self):
        return 0.0

    @property
    def t_hi(self):
        return 2 * math.pi

    def point(self, t):
        s, c = math.sin(t / 2), math.cos(t / 2)
        return (2 * s - t * c - self.shift, 2 * s + (2 * math.pi - t) * c - self.shift)

    def velocity(self, t):
        s = math.sin(t / 2)
        return (0.5 * t * s, -0.5 * (2 * math.pi - t) * s)

    def slope(self, t):
        if t <= 0:
            return -np.inf
        return -(2 * math.pi - t) / t

    def dslope(self, t):
        return 2 * math.pi / (t * t)

    def curvature2(self, t):
        return (2 * math.pi / (t * t)) / (0.5 * t * math.sin(t / 2))

    def slope_inverse(self, s):
        if s >= 1:
            return None
        t = 2 * math.pi / (1.0 - s)
        return t if self.t_lo <= t <= self.t_hi else None

    @property
    def curvature(self):
        return "cup"

    def area(self):
        fn = lambda t: self.point(t)[1] * self.velocity(t)[0]
        val, _ = quad(fn, self.t_lo, self.t_hi, **_QUAD)
        return val

    def to_dict(self):
        return {"curve": "alpha"}


def xi_of_eps(eps: float) -> float:
    fn = lambda x: 2 * math.sin(x / 2) - x * math.cos(x / 2) - eps
    return brentq(fn, 0.0, math.pi, **_BRENT)


@dataclass(frozen=True)
class GammaEps(Alpha):
    """alpha(t) - (eps, eps), cut to the orthant: t in [xi, 2 pi - xi]."""

    eps: float = 0.05
    kind = "gamma_eps"

    def __post_init__(self):
        if not (0 < self.eps < 2):
            raise ValueError(f"eps must lie in (0, 2), got {self.eps}")

    @property
    def shift(self):
        return self.eps

    @cached_property
    def xi(self):
        return xi_of_eps(self.eps)

    @property
    def t_lo(self):
        return self.xi

    @property
    def t_hi(self):
        return 2 * math.pi - self.xi

    def to_dict(self):
        return {"curve": "gamma_eps", "eps": self.eps}


_GP_SMALL = 1e-6
# below this p the u = r^p form also resolves small v (checked against mpmath);
# above it the narrow peak near r = v escapes it and the r form is better
_GP_U_FORM_P = 2.0


@lru_cache(maxsize=200_000)
def _gp_parts(p: float, v: float):
    """(g_p(v), g_p'(v)) by quadrature with r = r1 + (r2-r1)(1-cos th)/2."""
    e = 0.25 ** (1.0 / p)
    if v >= e:
        return 0.0, -math.pi * math.sqrt(2.0 / p)
    if v > 0.5 * e or (0.0 < v and p < _GP_U_FORM_P and v**p > 1e-280):
        return _gp_parts_upper(p, v)
    if 0.0 < v < _GP_SMALL:
        # the derivative quadrature is unreliable this close to 0; interpolate
        # between the limit -pi and the value at _GP_SMALL
        g = _gp_parts_raw(p, v, derivative=False)[0]
        d_small = _gp_parts(p, _GP_SMALL)[1]
        return g, -math.pi + (d_small + math.pi) * v / _GP_SMALL
    return _gp_parts_raw(p, v)


def _gp_parts_raw(p: float, v: float, derivative: bool = True):
    if v == 0.0:
        r1, r2 = 0.0, 1.0
    else:
        root = math.sqrt(0.25 - v**p)
        r1 = (v**p / (0.5 + root)) ** (1.0 / p)
        r2 = (0.5 + root) ** (1.0 / p)
    half = 0.5 * (r2 - r1)

    def radicand(r):
        return r * r * max(1.0 - r**p, 0.0) ** (2.0 / p) - v * v

    def g_int(th):
        r = r1 + half * (1.0 - math.cos(th))
        if r <= 0:
            return half * math.sin(th) * 1.0
        return 2.0 * math.sqrt(max(radicand(r), 0.0)) / r * half * math.sin(th)

    def dg_int(th):
        r = r1 + half * (1.0 - math.cos(th))
        rad = radicand(r)
        if rad <= 0:
            return 0.0
        return -2.0 * v / (r * math.sqrt(rad)) * half * math.sin(th)

    # for small v the integrand switches on within a few r1 of r1
    brk = [math.acos(1.0 - m * r1 / half) for m in (1.0, 10.0, 100.0, 1000.0) if 0 < m * r1 / half < 1.0]
    brk = brk or None
    g, _ = quad(g_int, 0.0, math.pi, points=brk, epsabs=1e-15, epsrel=1e-13, limit=400)
    if v == 0.0:
        dg = -math.pi
    elif not derivative:
        dg = float("nan")
    else:
        # the radicand loses digits next to the radial roots for small v, so
        # quad cannot reach its target; accept it when its own estimate is small
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegrationWarning)
            dg, err = quad(dg_int, 0.0, math.pi, points=brk, epsabs=1e-15, epsrel=1e-13, limit=400)
        if err > 1e-5:
            raise ArithmeticError(f"g_p' quadrature error {err:.3g} at p={p}, v={v}")
    return g, dg


def _gp_parts_upper(p: float, v: float):
    """Same integrals in u = r^p, for v near 4^(-1/p) where the radial roots merge.

    With u = u1 + (u2 - u1)(1 - cos th)/2 one has u(1-u) - v^p = h^2 sin^2 th
    exactly, so the radicand is formed without cancellation.
    """
    vp = v**p
    if vp == 0.0:
        raise ValueError(f"v^p underflows for p={p}; use a smaller p")
    h = math.sqrt(0.25 - vp)
    u1 = vp / (0.5 + h)

    def parts(th):
        s = math.sin(th)
        u = u1 + 2.0 * h * math.sin(0.5 * th) ** 2
        a_minus_v = v * math.expm1(math.log1p(h * h * s * s / vp) / p)
        rad = a_minus_v * (a_minus_v + 2.0 * v)
        r = u ** (1.0 / p)
        dr = u ** (1.0 / p - 1.0) * h * s / p
        return r, rad, dr

    def g_int(th):
        r, rad, dr = parts(th)
        return 2.0 * math.sqrt(rad) / r * dr

    def dg_int(th):
        r, rad, dr = parts(th)
        if rad <= 0:
            return 0.0
        return -2.0 * v / (r * math.sqrt(rad)) * dr

    # for small v the integrands live where u is a few multiples of u1
    brk = [2.0 * math.asin(math.sqrt(m * u1 / (2.0 * h))) for m in (1.0, 10.0, 1e2, 1e3, 1e4, 1e6)
           if m * u1 < 2.0 * h]
    brk = brk or None
    # the targets sit at the roundoff floor; quad may say so, its estimate decides
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        g, eg = quad(g_int, 0.0, math.pi, points=brk, epsabs=1e-15, epsrel=1e-13, limit=400)
        dg, ed = quad(dg_int, 0.0, math.pi, points=brk, epsabs=1e-15, epsrel=1e-13, limit=400)
    if max(eg, ed) > 1e-7:
        raise ArithmeticError(f"g_p quadrature error {max(eg, ed):.3g} at p={p}, v={v}")
    return g, dg


def g_p(p: float, v: float) -> float:
    return _gp_parts(float(p), abs(float(v)))[0]


def g_p_prime(p: float, v: float) -> float:
    return _gp_parts(float(p), abs(float(v)))[1]


def g_p_prime_fd(p: float, v: float, rel: float = 1e-6) -> float:
    """Central difference cross-check for the analytic derivative."""
    h = rel * max(abs(v), 1e-3)
    return (g_p(p, v + h) - g_p(p, v - h)) / (2 * h)


@dataclass(frozen=True)
class ORCurve(Curve):
    """Boundary of the moment image of the l^p sum of Lagrangian discs.

    Parametrized by v in [-e, e], e = 4^(-1/p); v <= 0 traces the upper
    branch (g(|v|), 2 pi |v| + g(|v|)), v >= 0 the lower branch.
    """

    p: float
    kind = "or_curve"

    def __post_init__(self):
        if not (self.p >= 1) or abs(self.p - 2.0) < 1e-9:
            raise ValueError(f"OR curve needs p >= 1, p != 2, got {self.p}")

    @property
    def t_lo(self):
        return -(0.25 ** (1.0 / self.p))

    @property
    def t_hi(self):
        return 0.25 ** (1.0 / self.p)

    def point(self, t):
        s = abs(t)
        g = g_p(self.p, s)
        if t <= 0:
            return (g, 2 * math.pi * s + g)
        return (2 * math.pi * s + g, g)

    def velocity(self, t):
        dg = g_p_prime(self.p, abs(t))
        if t <= 0:
            return (-dg, -(2 * math.pi + dg))
        return (2 * math.pi + dg, dg)

    def slope(self, t):
        dg = g_p_prime(self.p, abs(t))
        if t <= 0:
            return 1.0 + 2 * math.pi / dg
        return dg / (2 * math.pi + dg)

    def dslope(self, t):
        h = 1e-6
        return (self.slope(min(t + h, self.t_hi)) - self.slope(max(t - h, self.t_lo))) / (2 * h)

    @property
    def curvature(self):
        return "cap" if self.p < 2 else "cup"

    def area(self):
        fn = lambda t: self.point(t)[1] * self.velocity(t)[0]
        val, _ = quad(fn, self.t_lo, self.t_hi, points=[0.0], epsabs=1e-11, epsrel=1e-10, limit=200)
        return val

    def to_dict(self):
        return {"curve": "or_curve", "p": self.p}


def curve_from_dict(d: dict) -> Curve:
    kind = d.get("curve")
    if kind == "alpha":
        return Alpha()
    if kind == "gamma_eps":
        return GammaEps(float(d["eps"]))
    if kind == "or_curve":
        return ORCurve(float(d["p"]))
    raise ValueError(f"unknown curve {kind!r}")


# ---------------------------------------------------------------------------
# domains
# ---------------------------------------------------------------------------


class Domain:
    dimension: int = 2
    kind = "domain"

    @property
    def convex(self) -> bool:
        raise NotImplementedError

    @property
    def concave(self) -> bool:
        raise NotImplementedError

    @property
    def symmetric(self) -> bool:
        raise NotImplementedError

    def _support_max(self, v: np.ndarray) -> SupportResult:
        raise NotImplementedError(f"support_max is not defined for {self!r}")

    def _support_min(self, v: np.ndarray) -> SupportResult:
        raise NotImplementedError(f"support_min is not defined for {self!r}")

    def area(self) -> float:
        raise NotImplementedError

    def contains(self, w, tol: float = 1e-12) -> bool:
        raise NotImplementedError


class ChainDomain(Domain):
    """Two-dimensional domain under a monotone boundary chain t -> (x, y)."""

    dimension = 2

    t_lo: float
    t_hi: float

    def point(self, t) -> tuple:
        raise NotImplementedError

    def slope(self, t) -> float:
        raise NotImplementedError

    def vertex_params(self) -> Optional[np.ndarray]:
        return None

    def slope_inverse(self, s) -> Optional[float]:
        return None

    @property
    def boundary_curvature(self) -> str:
        raise NotImplementedError

    def extremize(self, v1: float, v2: float, sense: str, t0=None, t1=None):
        """Optimize v1 x + v2 y over the chain restricted to [t0, t1].

        Returns (value, t_star, t_a, t_b) where [t_a, t_b] is the set of
        optimal parameters (a single point unless a flat piece is optimal).
        """
        t0 = self.t_lo if t0 is None else t0
        t1 = self.t_hi if t1 is None else t1
        better = (lambda a, b: a > b) if sense == "max" else (lambda a, b: a < b)
        obj = lambda t: v1 * self.point(t)[0] + v2 * self.point(t)[1]
        verts = self.vertex_params()
        if verts is not None:
            cand = [t0] + [t for t in verts if t0 < t < t1] + [t1]
            vals = [obj(t) for t in cand]
            best = max(vals) if sense == "max" else min(vals)
            tol = 1e-12 * max(1.0, abs(best))
            hit = [t for t, val in zip(cand, vals) if abs(val - best) <= tol]
            return best, hit[0], hit[0], hit[-1]
        cand = [t0, t1]
        if v2 > 0 and v1 > 0:
            target = -v1 / v2
            ts = self.slope_inverse(target)
            if ts is not None and t0 < ts < t1:
                cand.append(ts)
            elif ts is None:
                at = math.atan(target)
                res = lambda t: math.atan(self.slope(t)) - at
                r0, r1 = res(t0), res(t1)
                if r0 * r1 < 0:
                    cand.append(brentq(res, t0, t1, **_BRENT))
        best_t = None
        best = None
        for t in cand:
            val = obj(t)
            if best is None or better(val, best):
                best, best_t = val, t
        return best, best_t, best_t, best_t

    def _support(self, v, sense):
        val, t, _, _ = self.extremize(float(v[0]), float(v[1]), sense)
        return SupportResult(float(val), tuple(map(float, self.point(t))), float(t))

    def _support_max(self, v):
        if not self.convex:
            raise ValueError("support_max over a non-convex chain domain")
        return self._support(v, "max")

    def _support_min(self, v):
        if not self.concave:
            raise ValueError("support_min over a non-concave chain domain")
        return self._support(v, "min")

    def fixed_point(self) -> float:
        fn = lambda t: self.point(t)[0] - self.point(t)[1]
        t = brentq(fn, self.t_lo, self.t_hi, **_BRENT)
        return float(self.point(t)[0])


class GraphDomain(ChainDomain):
    kind = "graph"

    def __init__(self, profile: Profile):
        self.profile = profile
        self.t_lo = 0.0
        self.t_hi = float(profile.lam)

    def __repr__(self):
        return f"GraphDomain({self.profile!r})"

    def __eq__(self, other):
        return isinstance(other, GraphDomain) and self.profile == other.profile

    def __hash__(self):
        return hash(("graph", self.profile))

    @property
    def lam(self) -> float:
        return float(self.profile.lam)

    def f(self, x):
        return self.profile.f(x)

    def df(self, x):
        return self.profile.df(x)

    def point(self, t):
        return (float(t), float(self.profile.f(t)))

    def slope(self, t):
        return float(self.profile.df(t))

    def slope_inverse(self, s):
        return self.profile.slope_inverse(s)

    def vertex_params(self):
        if isinstance(self.profile, Polyline):
            return self.profile.xs
        return None

    @property
    def boundary_curvature(self):
        return self.profile.curvature

    @property
    def convex(self):
        return self.profile.curvature in ("cap", "flat")

    @property
    def concave(self):
        return self.profile.curvature in ("cup", "flat")

    @cached_property
    def symmetric(self):
        if not self.profile.declared_symmetric:
            return False
        xs = np.linspace(0.0, self.lam, 201)
        return bool(np.max(np.abs(self.profile.f(self.profile.f(xs)) - xs)) <= 1e-8 * max(1.0, self.lam))

    def area(self):
        return float(self.profile.area())

    def contains(self, w, tol=1e-12):
        x, y = map(float, w)
        if x < -tol or y < -tol or x > self.lam + tol:
            return False
        return y <= float(self.profile.f(min(max(x, 0.0), self.lam))) + tol

    def fixed_point(self):
        return profile_fixed_point(self.profile)


class CurveDomain(ChainDomain):
    kind = "curve"

    def __init__(self, curve: Curve):
        self.curve = curve
        self.t_lo = float(curve.t_lo)
        self.t_hi = float(curve.t_hi)

    def __repr__(self):
        return f"CurveDomain({self.curve!r})"

    def __eq__(self, other):
        return isinstance(other, CurveDomain) and self.curve == other.curve

    def __hash__(self):
        return hash(("curvedom", self.curve))

    def point(self, t):
        return self.curve.point(t)

    def slope(self, t):
        return self.curve.slope(t)

    def slope_inverse(self, s):
        return self.curve.slope_inverse(s)

    @property
    def boundary_curvature(self):
        return self.curve.curvature

    @property
    def convex(self):
        return self.curve.curvature == "cap"

    @property
    def concave(self):
        return self.curve.curvature == "cup"

    @property
    def symmetric(self):
        return self.curve.declared_symmetric

    @property
    def lam(self) -> float:
        return float(self.point(self.t_hi)[0])

    def area(self):
        return float(self.curve.area())

    def as_graph(self) -> GraphDomain:
        return GraphDomain(CurveProfile(self.curve))

    def contains(self, w, tol=1e-12):
        x, y = map(float, w)
        if x < -tol or y < -tol or x > self.lam + tol:
            return False
        t = brentq(lambda t: self.point(t)[0] - min(max(x, 0.0), self.lam), self.t_lo, self.t_hi, **_BRENT)
        return y <= self.point(t)[1] + tol


@dataclass(frozen=True, eq=True)
class Simplex(Domain):
    """{w >= 0 : sum w_i / a_i <= 1}, the image of the ellipsoid E(a)."""

    a: tuple
    kind = "simplex"

    def __post_init__(self):
        a = tuple(float(t) for t in self.a)
        if len(a) < 1 or any(not (t > 0 and math.isfinite(t)) for t in a):
            raise ValueError(f"invalid simplex semi-axes {self.a}")
        object.__setattr__(self, "a", a)

    @property
    def dimension(self):
        return len(self.a)

    convex = True
    concave = True

    @property
    def symmetric(self):
        return len(set(self.a)) == 1

    def _support_max(self, v):
        vals = v * np.array(self.a)
        i = int(np.argmax(vals))
        w = np.zeros(self.dimension)
        w[i] = self.a[i]
        return SupportResult(float(vals[i]), tuple(map(float, w)))

    def _support_min(self, v):
        vals = v * np.array(self.a)
        i = int(np.argmin(vals))
        w = np.zeros(self.dimension)
        w[i] = self.a[i]
        return SupportResult(float(vals[i]), tuple(map(float, w)))

    def area(self):
        return float(np.prod(self.a) / math.factorial(self.dimension))

    def contains(self, w, tol=1e-12):
        w = np.asarray(w, dtype=float)
        return bool(np.all(w >= -tol) and np.sum(w / np.array(self.a)) <= 1 + tol)

    def as_graph(self) -> GraphDomain:
        if self.dimension != 2:
            raise ValueError("only planar simplices have a graph form")
        return GraphDomain(Polyline(((0.0, self.a[1]), (self.a[0], 0.0))))


@dataclass(frozen=True, eq=True)
class Box(Domain):
    """Product of intervals, the image of the polydisk P(a)."""

    a: tuple
    kind = "box"

    def __post_init__(self):
        a = tuple(float(t) for t in self.a)
        if len(a) < 1 or any(not (t > 0 and math.isfinite(t)) for t in a):
            raise ValueError(f"invalid box sides {self.a}")
        object.__setattr__(self, "a", a)

    @property
    def dimension(self):
        return len(self.a)

    convex = True
    concave = False

    @property
    def symmetric(self):
        return len(set(self.a)) == 1

    def _support_max(self, v):
        return SupportResult(float(v @ np.array(self.a)), tuple(map(float, self.a)))

    def area(self):
        return float(np.prod(self.a))

    def contains(self, w, tol=1e-12):
        w = np.asarray(w, dtype=float)
        return bool(np.all(w >= -tol) and np.all(w <= np.array(self.a) + tol))


@dataclass(frozen=True, eq=True)
class LpBall(Domain):
    """{w >= 0 : sum w_i^(p/2) <= 1}, the image of the l^p unit ball."""

    n: int
    p: float
    kind = "lpball"

    def __post_init__(self):
        if self.n < 1 or not (self.p > 0) or not math.isfinite(self.p):
            raise ValueError(f"invalid l^p ball n={self.n}, p={self.p}")

    @property
    def dimension(self):
        return self.n

    @property
    def convex(self):
        return self.p >= 2

    @property
    def concave(self):
        return self.p <= 2

    symmetric = True

    @property
    def q(self):
        return self.p / 2.0

    def _dual(self, v, sense):
        if self.p == 2:
            i = int(np.argmax(v) if sense == "max" else np.argmin(v))
            w = np.zeros(self.n)
            w[i] = 1.0
            return SupportResult(float(v[i]), tuple(map(float, w)))
        qs = self.p / (self.p - 2.0)
        if sense == "min" and np.any(v == 0):
            i = int(np.argmin(v))
            w = np.zeros(self.n)
            w[i] = 1.0
            return SupportResult(0.0, tuple(map(float, w)))
        pos = v[v > 0]
        scale = float(pos.max() if qs > 0 else pos.min())
        with np.errstate(under="ignore"):
            r = v / scale
            norm = scale * float(np.sum(np.where(v > 0, r, 0.0) ** qs if qs > 0 else r**qs)) ** (1.0 / qs)
            w = np.where(v > 0, (v / norm) ** (qs - 1.0), 0.0)
        return SupportResult(norm, tuple(map(float, w)))

    def _support_max(self, v):
        if not self.convex:
            raise ValueError("support_max needs p >= 2")
        return self._dual(v, "max")

    def _support_min(self, v):
        if not self.concave:
            raise ValueError("support_min needs p <= 2")
        return self._dual(v, "min")

    def area(self):
        q = self.q
        return float(gamma(1 + 1 / q) ** self.n / gamma(1 + self.n / q))

    def contains(self, w, tol=1e-12):
        w = np.asarray(w, dtype=float)
        return bool(np.all(w >= -tol) and np.sum(np.maximum(w, 0.0) ** self.q) <= 1 + tol)

    def as_graph(self) -> GraphDomain:
        if self.n != 2:
            raise ValueError("only planar l^p balls have a graph form")
        return GraphDomain(LpBall2(self.p))


class PolytopeDomain(Domain):
    """Polytope image given by vertices.

    ``mode="convex"``: Omega = conv(V). ``mode="concave"``: Omega is the part
    of the orthant outside the interior of conv(V) + R^n_{>=0}.
    """

    kind = "polytope"

    def __init__(self, vertices, mode: str = "convex"):
        V = np.array(vertices, dtype=float)
        if V.ndim != 2 or V.shape[0] < 1:
            raise ValueError("vertices must be a nonempty list of points")
        if not np.all(np.isfinite(V)) or np.any(V < 0):
            raise ValueError("polytope vertices must be finite points of the orthant")
        if mode not in ("convex", "concave"):
            raise ValueError(f"unknown polytope mode {mode!r}")
        self.vertices = V
        self.mode = mode
        self.dimension = V.shape[1]

    def __repr__(self):
        return f"PolytopeDomain({self.vertices.tolist()}, mode={self.mode!r})"

    def __eq__(self, other):
        return (isinstance(other, PolytopeDomain) and self.mode == other.mode
                and self.vertices.shape == other.vertices.shape and np.array_equal(self.vertices, other.vertices))

    def __hash__(self):
        return hash((self.mode, self.vertices.tobytes()))

    @property
    def convex(self):
        return self.mode == "convex"

    @property
    def concave(self):
        return self.mode == "concave"

    @cached_property
    def symmetric(self):
        V = self.vertices
        key = lambda pts: sorted(map(tuple, np.round(pts, 12)))
        base = key(V)
        for perm in itertools.permutations(range(self.dimension)):
            if key(V[:, perm]) != base:
                return False
        return True

    def _support_max(self, v):
        if not self.convex:
            raise ValueError("support_max over a concave polytope")
        vals = self.vertices @ v
        i = int(np.argmax(vals))
        return SupportResult(float(vals[i]), tuple(map(float, self.vertices[i])))

    def _support_min(self, v):
        if not self.concave:
            raise ValueError("support_min over a convex polytope")
        vals = self.vertices @ v
        i = int(np.argmin(vals))
        return SupportResult(float(vals[i]), tuple(map(float, self.vertices[i])))

    def chain(self) -> np.ndarray:
        """Boundary chain of a planar polytope from the y-axis to the x-axis."""
        if self.dimension != 2:
            raise ValueError("chain only defined in dimension 2")
        from scipy.spatial import ConvexHull

        V = self.vertices
        if self.concave:
            big = 4.0 * V.max() + 1.0
            pts = np.vstack([V, V + [big, 0.0], V + [0.0, big]])
        else:
            pts = np.vstack([V, [[0.0, 0.0]]])
        hull = pts[ConvexHull(pts).vertices]  # counterclockwise
        on_y = [i for i, p in enumerate(hull) if abs(p[0]) <= 1e-14]
        on_x = [i for i, p in enumerate(hull) if abs(p[1]) <= 1e-14]
        if not on_y or not on_x:
            raise ValueError("polytope does not meet both axes")
        if self.concave:
            # ccw along the lower-left boundary: from the y-axis down to the x-axis
            i0 = min(on_y, key=lambda i: hull[i][1])
            i1 = min(on_x, key=lambda i: hull[i][0])
        else:
            # ccw from the x-axis intercept up to the y-axis intercept
            i0 = max(on_x, key=lambda i: hull[i][0])
            i1 = max(on_y, key=lambda i: hull[i][1])
        out = [hull[i0]]
        i = i0
        while i != i1:
            i = (i + 1) % len(hull)
            out.append(hull[i])
        out = np.array(out)
        if self.convex:
            out = out[::-1]
        return out

    def as_graph(self) -> GraphDomain:
        pts = self.chain()
        if pts[0][0] != 0 or pts[-1][1] != 0:
            raise ValueError("polytope chain does not reach both axes")
        return GraphDomain(Polyline(tuple(map(tuple, pts))))

    def area(self):
        if self.dimension == 2:
            if self.concave:
                return self.as_graph().area()
            from scipy.spatial import ConvexHull

            pts = np.vstack([self.vertices, [[0.0, 0.0]]])
            hull = pts[ConvexHull(pts).vertices]
            fr = [(Fraction(x), Fraction(y)) for x, y in hull]
            s = sum((x0 * y1 - x1 * y0 for (x0, y0), (x1, y1) in zip(fr, fr[1:] + fr[:1])), Fraction(0))
            return float(abs(s) / 2)
        if self.concave:
            raise ValueError("area of concave polytopes is implemented in dimension 2 only")
        from scipy.spatial import ConvexHull

        return float(ConvexHull(self.vertices).volume)

    @cached_property
    def _hull_equations(self):
        from scipy.spatial import ConvexHull

        pts = np.vstack([self.vertices, np.zeros((1, self.dimension))])
        return ConvexHull(pts).equations

    def contains(self, w, tol=1e-12):
        w = np.asarray(w, dtype=float)
        if np.any(w < -tol):
            return False
        V = self.vertices
        m = V.shape[0]
        if self.convex:
            eq = self._hull_equations
            return bool(np.all(eq[:, :-1] @ w + eq[:, -1] <= tol))
        # w outside int(conv V + orthant): no l with sum l = 1 and V^T l < w
        # componentwise; maximize the slack s in V^T l + s <= w
        c = np.zeros(m + 1)
        c[-1] = -1.0
        A_ub = np.hstack([V.T, np.ones((self.dimension, 1))])
        A_eq = np.concatenate([np.ones(m), [0.0]])[None, :]
        res = linprog(c, A_ub=A_ub, b_ub=w, A_eq=A_eq, b_eq=[1.0],
                      bounds=[(0, None)] * m + [(None, None)], method="highs")
        return res.status == 0 and -res.fun <= tol


def omega_r(r: float) -> PolytopeDomain:
    """The kite {(0,0), (1,0), (0,1), (r,r)}."""
    return PolytopeDomain([[0, 0], [1, 0], [0, 1], [r, r]])


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------


def support_max(dom: Domain, v) -> SupportResult:
    vv = _as_vec(v, dom.dimension)
    return dom._support_max(vv)


def support_min(dom: Domain, v) -> SupportResult:
    vv = _as_vec(v, dom.dimension)
    return dom._support_min(vv)


def area(dom: Domain) -> float:
    return float(dom.area())


def fixed_point(g) -> float:
    if isinstance(g, Profile):
        return profile_fixed_point(g)
    if isinstance(g, ChainDomain):
        return g.fixed_point()
    raise ValueError(f"fixed point needs a planar graph or curve, got {g!r}")


@dataclass
class ValidationReport:
    convex: bool
    concave: bool
    symmetric: bool
    curvature_ok: bool
    smooth_boundary: Optional[bool] = None
    smooth_boundary_symmetric_closure: Optional[bool] = None
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.curvature_ok and (self.convex or self.concave)


def _graph_checks(prof: Profile, n: int = 10_000) -> dict:
    lam = prof.lam
    xs = np.linspace(0.0, lam, n + 1)
    ys = np.asarray(prof.f(xs), dtype=float)
    d2 = ys[:-2] - 2 * ys[1:-1] + ys[2:]
    scale = max(1.0, float(np.max(np.abs(ys)))) * 1e-12
    out = {
        "f0": float(ys[0]),
        "f_lam": float(ys[-1]),
        "nonincreasing": bool(np.all(np.diff(ys) <= scale)),
        "max_second_difference": float(d2.max()),
        "min_second_difference": float(d2.min()),
    }
    cur = prof.curvature
    if cur == "cap":
        out["curvature_ok"] = bool(np.all(d2 <= scale))
    elif cur == "cup":
        out["curvature_ok"] = bool(np.all(d2 >= -scale))
    elif cur == "flat":
        out["curvature_ok"] = bool(np.all(np.abs(d2) <= scale))
    else:
        out["curvature_ok"] = False
    inner = xs[1:-1]
    slopes = np.asarray(prof.df(inner), dtype=float)
    ok_slopes = np.isfinite(slopes)
    if cur == "cap":
        out["curvature_ok"] &= bool(np.all(np.diff(slopes[ok_slopes]) <= 1e-12 * max(1.0, np.max(np.abs(slopes[ok_slopes])))))
    elif cur == "cup":
        out["curvature_ok"] &= bool(np.all(np.diff(slopes[ok_slopes]) >= -1e-12 * max(1.0, np.max(np.abs(slopes[ok_slopes])))))
    if prof.declared_symmetric:
        grid = np.linspace(0.0, lam, 1001)
        out["involution_error"] = float(np.max(np.abs(np.asarray(prof.f(np.asarray(prof.f(grid)))) - grid)))
    return out


def validate(dom: Domain) -> ValidationReport:
    if isinstance(dom, GraphDomain):
        prof = dom.profile
        det = _graph_checks(prof)
        s0 = float(prof.df(0.0))
        s1 = float(prof.df(prof.lam))
        finite_nonzero = lambda s: math.isfinite(s) and s < 0
        # the boundary of X is smooth if both slopes are finite and nonzero
        smooth = finite_nonzero(s0) and finite_nonzero(s1)
        # after reflecting in the axes a horizontal tangent at 0 matched by a
        # vertical one at lam also closes up smoothly
        closure = (finite_nonzero(s0) or s0 == 0) and (finite_nonzero(s1) or s1 == -np.inf)
        closure = closure and not (finite_nonzero(s0) != finite_nonzero(s1))
        det.update(slope_at_0=s0, slope_at_lam=s1)
        sym = dom.symmetric and det.get("involution_error", 1.0) <= 1e-8 * max(1.0, prof.lam)
        return ValidationReport(
            convex=dom.convex and det["curvature_ok"],
            concave=dom.concave and det["curvature_ok"],
            symmetric=bool(sym),
            curvature_ok=det["curvature_ok"] and det["nonincreasing"] and abs(det["f_lam"]) <= 1e-9 and det["f0"] > 0,
            smooth_boundary=bool(smooth),
            smooth_boundary_symmetric_closure=bool(closure),
            details=det,
        )
    if isinstance(dom, CurveDomain):
        c = dom.curve
        ts = np.linspace(c.t_lo, c.t_hi, 2001)
        pts = np.array([c.point(t) for t in ts])
        mono = bool(np.all(np.diff(pts[:, 0]) > 0) and np.all(np.diff(pts[:, 1]) < 0))
        sl = np.array([c.slope(t) for t in ts[1:-1]])
        if c.curvature == "cup":
            ok = bool(np.all(np.diff(sl) >= -1e-12))
        else:
            ok = bool(np.all(np.diff(sl) <= 1e-12))
        ends = abs(pts[0, 0]) <= 1e-10 and abs(pts[-1, 1]) <= 1e-10
        return ValidationReport(
            convex=dom.convex and ok, concave=dom.concave and ok, symmetric=dom.symmetric,
            curvature_ok=ok and mono and bool(ends),
            details={"monotone": mono, "endpoints_on_axes": bool(ends)},
        )
    if isinstance(dom, LpBall):
        return ValidationReport(dom.convex, dom.concave, True, True)
    if isinstance(dom, (Simplex, Box)):
        return ValidationReport(dom.convex, dom.concave, dom.symmetric, True)
    if isinstance(dom, PolytopeDomain):
        return ValidationReport(dom.convex, dom.concave, dom.symmetric, True)
    raise ValueError(f"cannot validate {dom!r}")
