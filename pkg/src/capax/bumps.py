"""Smooth compactly supported bumps built from the exp(-1/(1-u^2)) mollifier.

Everything here is evaluated with a fixed 128-node Gauss-Legendre rule on
[-1, u]; for this integrand that is accurate to a few ulps of the total
mass, which is all the perturbation machinery needs.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

_GL_X, _GL_W = np.polynomial.legendre.leggauss(128)


def mollifier(w):
    w = np.asarray(w, dtype=float)
    out = np.zeros_like(w)
    inside = np.abs(w) < 1.0
    wi = w[inside]
    out[inside] = np.exp(-1.0 / (1.0 - wi * wi))
    return out


def mollifier_d1(w):
    w = np.asarray(w, dtype=float)
    out = np.zeros_like(w)
    inside = np.abs(w) < 1.0
    wi = w[inside]
    one = 1.0 - wi * wi
    out[inside] = np.exp(-1.0 / one) * (-2.0 * wi / (one * one))
    return out


def _partial_moment(u, power: int):
    """int_{-1}^{u} w^power phi(w) dw, vectorized over u."""
    u = np.clip(np.asarray(u, dtype=float), -1.0, 1.0)
    out = np.zeros_like(u)
    # only |u| < 1 needs quadrature; beyond it the moment is 0 or the total
    inside = np.abs(u) < 1.0
    if power == 0 or power % 2 == 0:
        full = u >= 1.0
        if np.any(full):
            out[full] = _TOTALS[power] if power in _TOTALS else _raw_moment(np.array(1.0), power)
    ui = u[inside]
    if ui.size:
        out[inside] = _raw_moment(ui, power)
    return out


def _raw_moment(u, power):
    half = 0.5 * (u + 1.0)
    nodes = -1.0 + half[..., None] * (_GL_X + 1.0)
    vals = mollifier(nodes)
    if power:
        vals = vals * nodes**power
    return half * (vals @ _GL_W)


_TOTALS = {}


M0_TOTAL = float(_raw_moment(np.array(1.0), 0))
M2_TOTAL = float(_raw_moment(np.array(1.0), 2))
_TOTALS.update({0: M0_TOTAL, 2: M2_TOTAL})


def m0(u):
    return _partial_moment(u, 0)


def m1(u):
    return _partial_moment(u, 1)


# smooth step S: [0,1] -> [0,1] with S(t) + S(1-t) = 1 and all derivatives
# vanishing at both ends


def step(t):
    return m0(2.0 * np.asarray(t, dtype=float) - 1.0) / M0_TOTAL


def step_d1(t):
    return 2.0 * mollifier(2.0 * np.asarray(t, dtype=float) - 1.0) / M0_TOTAL


def step_d2(t):
    return 4.0 * mollifier_d1(2.0 * np.asarray(t, dtype=float) - 1.0) / M0_TOTAL


def _plateau_parts(x, a, c, d, b):
    """Plateau function equal to 1 on [c,d], 0 outside (a,b), and its derivatives."""
    x = np.asarray(x, dtype=float)
    v = np.zeros_like(x)
    d1 = np.zeros_like(x)
    d2 = np.zeros_like(x)
    mid = (x >= c) & (x <= d)
    v[mid] = 1.0
    if c > a:
        left = (x > a) & (x < c)
        t = (x[left] - a) / (c - a)
        v[left] = step(t)
        d1[left] = step_d1(t) / (c - a)
        d2[left] = step_d2(t) / (c - a) ** 2
    if b > d:
        right = (x > d) & (x < b)
        t = (b - x[right]) / (b - d)
        v[right] = step(t)
        d1[right] = -step_d1(t) / (b - d)
        d2[right] = step_d2(t) / (b - d) ** 2
    return v, d1, d2


def plateau_integral(a, c, d, b) -> float:
    # each ramp integrates to half its width because S(t) + S(1-t) = 1
    return (d - c) + 0.5 * (c - a) + 0.5 * (b - d)


@dataclass(frozen=True)
class PerturbationSpec:
    """A smooth bump beta on [a, b] scaled by ``amplitude``.

    ``shape="plateau"`` is beta = H*P + C*(Q - P) where P is the plateau
    function of the declared plateau and Q a wider plateau function with the
    same support; C is fixed by the integral. ``shape="budget"`` is a bump
    whose second derivative is a weighted sum of mollifiers (see
    ``families.design_bump``); ``centers``, ``radius`` and ``weights`` then
    carry that expansion.
    """

    support: tuple
    integral: float
    plateau: Optional[tuple] = None
    height: Optional[float] = None
    amplitude: float = 1.0
    shape: str = "plateau"
    inner: Optional[tuple] = None
    centers: Optional[tuple] = None
    radius: Optional[float] = None
    weights: Optional[tuple] = None
    _coef: float = field(default=0.0, init=False, repr=False, compare=False)

    def __post_init__(self):
        a, b = map(float, self.support)
        if not (b > a):
            raise ValueError(f"empty bump support {self.support}")
        if self.shape == "plateau":
            self._init_plateau(a, b)
        elif self.shape == "budget":
            if self.centers is None or self.weights is None or self.radius is None:
                raise ValueError("budget bump needs centers, radius and weights")
            if len(self.centers) != len(self.weights):
                raise ValueError("centers and weights differ in length")
        else:
            raise ValueError(f"unknown bump shape {self.shape!r}")

    def _init_plateau(self, a, b):
        if self.plateau is None:
            # plain positive bump with the default middle-third plateau
            w = (b - a) / 3.0
            c, d = a + w, b - w
            object.__setattr__(self, "_coef", self.integral / plateau_integral(a, c, d, b))
            return
        c, d = map(float, self.plateau)
        if not (a <= c <= d <= b) or (c == a and d == b):
            raise ValueError(f"plateau {self.plateau} must sit inside support {self.support}")
        qc, qd = self._inner_plateau(a, c, d, b)
        ip = plateau_integral(a, c, d, b)
        iq = plateau_integral(a, qc, qd, b)
        h = float(self.height if self.height is not None else 1.0)
        if iq - ip <= 1e-15 * (b - a):
            if abs(self.integral - h * ip) > 1e-12:
                raise ValueError("no room for compensating lobes")
            object.__setattr__(self, "_coef", 0.0)
            return
        object.__setattr__(self, "_coef", (self.integral - h * ip) / (iq - ip))

    def _inner_plateau(self, a, c, d, b):
        if self.inner is not None:
            return tuple(map(float, self.inner))
        # Q ramps over the outer half of each P ramp
        return (a + 0.5 * (c - a) if c > a else a, b - 0.5 * (b - d) if d < b else b)

    @property
    def a(self) -> float:
        return float(self.support[0])

    @property
    def b(self) -> float:
        return float(self.support[1])

    @property
    def left_anchored(self) -> bool:
        return self.plateau is not None and float(self.plateau[0]) == self.a

    def scaled(self, amplitude: float) -> "PerturbationSpec":
        kw = {k: getattr(self, k) for k in (
            "support", "integral", "plateau", "height", "shape", "inner",
            "centers", "radius", "weights")}
        return PerturbationSpec(amplitude=float(amplitude), **kw)

    # -- evaluation of the unscaled bump beta -------------------------------

    def _parts(self, x):
        x = np.asarray(x, dtype=float)
        if self.shape == "budget":
            return self._budget_parts(x)
        a, b = self.a, self.b
        if self.plateau is None:
            w = (b - a) / 3.0
            v, d1, d2 = _plateau_parts(x, a, a + w, b - w, b)
            return self._coef * v, self._coef * d1, self._coef * d2
        c, d = map(float, self.plateau)
        qc, qd = self._inner_plateau(a, c, d, b)
        pv, p1, p2 = _plateau_parts(x, a, c, d, b)
        qv, q1, q2 = _plateau_parts(x, a, qc, qd, b)
        h = float(self.height if self.height is not None else 1.0)
        k = self._coef
        return h * pv + k * (qv - pv), h * p1 + k * (q1 - p1), h * p2 + k * (q2 - p2)

    def _budget_parts(self, x):
        flat = np.atleast_1d(x).ravel()
        m = np.asarray(self.centers, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        r = float(self.radius)
        base = float(self.height) if self.left_anchored else 0.0
        v = np.empty_like(flat)
        d1 = np.empty_like(flat)
        d2 = np.empty_like(flat)
        for s in range(0, flat.size, 256):
            xs = flat[s:s + 256]
            u = (xs[:, None] - m[None, :]) / r
            mm0 = m0(u)
            mm1 = m1(u)
            phi = mollifier(u)
            v[s:s + 256] = base + (r * ((xs[:, None] - m) * mm0 - r * mm1)) @ w
            d1[s:s + 256] = (r * mm0) @ w
            d2[s:s + 256] = phi @ w
        inside = (flat >= self.a) & (flat <= self.b)
        v = np.where(inside, v, 0.0)
        d1 = np.where(inside, d1, 0.0)
        d2 = np.where(inside, d2, 0.0)
        shape = np.shape(x)
        return v.reshape(shape), d1.reshape(shape), d2.reshape(shape)

    def beta(self, x):
        return self._parts(x)[0]

    def value(self, x):
        """amplitude * beta(x)."""
        return self.amplitude * self._parts(x)[0]

    def d1(self, x):
        return self.amplitude * self._parts(x)[1]

    def d2(self, x):
        return self.amplitude * self._parts(x)[2]

    def beta_integral(self) -> float:
        """Exact integral of the unscaled bump."""
        if self.shape == "plateau":
            return float(self.integral)
        a, b = self.a, self.b
        r = float(self.radius)
        m = np.asarray(self.centers, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        base = float(self.height) if self.left_anchored else 0.0
        # int_a^b (b - s)^2/2 phi_i(s) ds for each dictionary element
        per = 0.5 * r * ((b - m) ** 2 * M0_TOTAL + r * r * M2_TOTAL)
        return base * (b - a) + float(per @ w)

    def to_dict(self) -> dict:
        out = {
            "support": [self.a, self.b],
            "plateau": None if self.plateau is None else [float(t) for t in self.plateau],
            "height": None if self.height is None else float(self.height),
            "integral": float(self.integral),
            "amplitude": float(self.amplitude),
            "shape": self.shape,
        }
        if self.inner is not None:
            out["inner"] = [float(t) for t in self.inner]
        if self.shape == "budget":
            out["centers"] = [float(t) for t in self.centers]
            out["radius"] = float(self.radius)
            out["weights"] = [float(t) for t in self.weights]
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "PerturbationSpec":
        allowed = {"support", "plateau", "height", "integral", "amplitude", "shape",
                   "inner", "centers", "radius", "weights"}
        extra = set(d) - allowed
        if extra:
            raise ValueError(f"unknown perturbation fields: {sorted(extra)}")
        tup = lambda v: None if v is None else tuple(float(t) for t in v)
        return cls(
            support=tup(d["support"]),
            integral=float(d["integral"]),
            plateau=tup(d.get("plateau")),
            height=None if d.get("height") is None else float(d["height"]),
            amplitude=float(d.get("amplitude", 1.0)),
            shape=d.get("shape", "plateau"),
            inner=tup(d.get("inner")),
            centers=tup(d.get("centers")),
            radius=None if d.get("radius") is None else float(d["radius"]),
            weights=tup(d.get("weights")),
        )


def combined(specs: Sequence[PerturbationSpec], x):
    """Sum of amplitude * (beta, beta', beta'') over several bumps."""
    x = np.asarray(x, dtype=float)
    v = np.zeros_like(x)
    d1 = np.zeros_like(x)
    d2 = np.zeros_like(x)
    for s in specs:
        if s.amplitude == 0.0:
            continue
        pv, p1, p2 = s._parts(x)
        v = v + s.amplitude * pv
        d1 = d1 + s.amplitude * p1
        d2 = d2 + s.amplitude * p2
    return v, d1, d2
