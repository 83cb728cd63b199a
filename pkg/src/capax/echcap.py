"""Weight expansions of concave toric domains in R^4 and their ECH capacities.

A subdivision node never materializes its region. It keeps two affine
functionals X(x, y) = a1 x + b1 y - c1 and Y(x, y) = a2 x + b2 y - c2 of the
base coordinates together with a parameter window of the base boundary;
the node's region is the image of the part of the base domain over that
window under (x, y) -> (X, Y). Then tau = min over the window of X + Y, and
both children are again of this form.
"""
from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

from .domains import (
    ChainDomain, CurveDomain, GraphDomain, LpBall, Perturbed, PolytopeDomain, Simplex,
)

EMPTY_TOL = 1e-14
DEPTH_CAP = 64
FALLBACK_DEPTH = 12


class MonotonicityError(AssertionError):
    pass


@dataclass(frozen=True)
class WeightNode:
    label: str
    X: tuple
    Y: tuple
    window: tuple
    tau: float = float("nan")
    t_star: tuple = (float("nan"), float("nan"))

    @property
    def functional(self) -> tuple:
        return (self.X[0] + self.Y[0], self.X[1] + self.Y[1])

    @property
    def offset(self) -> float:
        return self.X[2] + self.Y[2]

    @property
    def depth(self) -> int:
        return len(self.label)


@dataclass
class WeightExpansion:
    weights: list
    complete_to: int
    nodes: dict = field(default_factory=dict, repr=False)

    def values(self) -> list:
        return [w for w, _ in self.weights]

    def by_label(self, label: str) -> float:
        return self.nodes[label].tau


def as_chain(dom) -> ChainDomain:
    if isinstance(dom, ChainDomain):
        if not dom.concave:
            raise ValueError(f"{dom!r} is not a concave planar domain")
        return dom
    if isinstance(dom, (Simplex, LpBall, PolytopeDomain)) and dom.dimension == 2 and dom.concave:
        return dom.as_graph()
    raise ValueError(f"{dom!r} is not a concave planar domain")


def _window_empty(dom: ChainDomain, t0: float, t1: float) -> bool:
    scale = max(1.0, abs(dom.t_hi - dom.t_lo))
    return t1 - t0 <= 1e-12 * scale


def tau(node: WeightNode, dom) -> WeightNode:
    """Return the node with tau and the minimizing parameter range filled in."""
    chain = as_chain(dom)
    A, B = node.functional
    val, _, ta, tb = chain.extremize(float(A), float(B), "min", *node.window)
    return WeightNode(node.label, node.X, node.Y, node.window, float(val - node.offset), (ta, tb))


def root_node(dom) -> WeightNode:
    chain = as_chain(dom)
    return tau(WeightNode("", (1, 0, 0.0), (0, 1, 0.0), (chain.t_lo, chain.t_hi)), chain)


def subdivide(node: WeightNode, dom) -> tuple:
    """(child1, child2); child1 lies away from the vertical axis. Empty sides give None."""
    chain = as_chain(dom)
    t = node.tau
    ta, tb = node.t_star
    t0, t1 = node.window
    X, Y = node.X, node.Y
    s = (X[0] + Y[0], X[1] + Y[1], X[2] + Y[2] + t)
    child1 = child2 = None
    if t > EMPTY_TOL:
        if not _window_empty(chain, tb, t1):
            c = tau(WeightNode(node.label + "1", s, Y, (tb, t1)), chain)
            child1 = c if c.tau > EMPTY_TOL else None
        if not _window_empty(chain, t0, ta):
            c = tau(WeightNode(node.label + "2", X, s, (t0, ta)), chain)
            child2 = c if c.tau > EMPTY_TOL else None
    return child1, child2


def node_at(dom, label: str) -> Optional[WeightNode]:
    """Walk the subdivision tree along ``label``; None if that node is empty."""
    chain = as_chain(dom)
    node = root_node(chain)
    for ch in label:
        if ch not in "12":
            raise ValueError(f"labels are words in 1 and 2, got {label!r}")
        c1, c2 = subdivide(node, chain)
        node = c1 if ch == "1" else c2
        if node is None:
            return None
    return node


def _exhaustive(chain, depth: int) -> list:
    out = []
    frontier = [root_node(chain)]
    for _ in range(depth + 1):
        nxt = []
        for node in frontier:
            out.append(node)
            for c in subdivide(node, chain):
                if c is not None:
                    nxt.append(c)
        frontier = nxt
    return out


def weight_expansion(dom, m: int) -> WeightExpansion:
    """Best-first concave subdivision until the m largest weights are certain."""
    if m < 1:
        raise ValueError("m must be positive")
    chain = as_chain(dom)
    root = root_node(chain)
    counter = itertools.count()
    heap = [(-root.tau, next(counter), root)]
    emitted = []
    nodes = {}
    try:
        while heap:
            neg, _, node = heap[0]
            if len(emitted) >= m and -neg < emitted[m - 1][0] * (1 - 1e-12):
                break
            heapq.heappop(heap)
            emitted.append((node.tau, node.label))
            nodes[node.label] = node
            if node.depth >= DEPTH_CAP:
                continue
            for c in subdivide(node, chain):
                if c is None:
                    continue
                if c.tau > node.tau * (1 + 1e-12) + 1e-15:
                    raise MonotonicityError(f"child {c.label} tau {c.tau} exceeds parent {node.tau}")
                heapq.heappush(heap, (-c.tau, next(counter), c))
    except MonotonicityError:
        all_nodes = _exhaustive(chain, FALLBACK_DEPTH)
        all_nodes.sort(key=lambda n: (-n.tau, n.label))
        nodes = {n.label: n for n in all_nodes}
        emitted = [(n.tau, n.label) for n in all_nodes]
    emitted.sort(key=lambda w: (-w[0], w[1]))
    return WeightExpansion(emitted, m, nodes)


TABLE_LABELS = ("", "2", "22", "21", "222", "221", "212", "211")


def symmetric_tau_table(h) -> dict:
    """The eight leading tau values of a symmetric concave graph in closed form.

    Each value is A y + B h(y) minus a fixed combination of earlier values,
    at the point y where h'(y) = -A/B. Needs h'(0) < -4.
    """
    chain = as_chain(h)
    if not chain.symmetric:
        raise ValueError("symmetric_tau_table needs a symmetric domain")
    if not chain.slope(chain.t_lo) < -4:
        raise ValueError("needs h'(0) < -4 so that every tangency exists")

    def edge(A, B):
        return chain.extremize(float(A), float(B), "min")[0]

    t0 = edge(1, 1)
    t2 = edge(2, 1) - t0
    t22 = edge(3, 1) - t0 - t2
    t21 = edge(3, 2) - 2 * t0 - t2
    t222 = edge(4, 1) - t0 - t2 - t22
    t221 = edge(5, 2) - 2 * t0 - 2 * t2 - t22
    t212 = edge(5, 3) - 3 * t0 - 2 * t2 - t21
    t211 = edge(4, 3) - 3 * t0 - t2 - t21
    return {"": t0, "2": t2, "22": t22, "21": t21, "222": t222, "221": t221, "212": t212, "211": t211}


def gamma_eps_table(eps: float) -> dict:
    """Exact tau values for the shifted bidisk curve."""
    s3, s2 = math.sqrt(3), math.sqrt(2)
    return {
        "": 4 - 2 * eps,
        "2": 3 * s3 - 4 - eps,
        "22": 4 * s2 - 3 * s3 - eps,
        "21": 10 * math.sin(3 * math.pi / 5) - 3 * s3 - 4,
        "222": 10 * math.sin(math.pi / 5) - 4 * s2 - eps,
        "221": 14 * math.sin(2 * math.pi / 7) - 3 * s3 - 4 * s2,
        "212": 16 * math.sin(3 * math.pi / 8) - 3 * s3 - 10 * math.sin(3 * math.pi / 5) + eps,
        "211": 14 * math.sin(3 * math.pi / 7) - 4 - 10 * math.sin(3 * math.pi / 5) + eps,
    }


def _d_vectors(k: int, length: int):
    """Nonincreasing d with sum d(d+1)/2 <= k, of at most ``length`` entries."""

    def rec(prefix, budget, cap):
        yield prefix
        if len(prefix) == length:
            return
        for d in range(min(cap, int((math.isqrt(8 * budget + 1) - 1) // 2)), 0, -1):
            yield from rec(prefix + (d,), budget - d * (d + 1) // 2, d)

    yield from rec((), k, k)


def ech_from_weights(weights, k: int) -> tuple:
    """(value, d) maximizing sum d_i w_i under sum d_i(d_i+1)/2 <= k."""
    w = sorted((float(x) for x in weights), reverse=True)[:k]
    best, best_d = 0.0, ()
    for d in _d_vectors(k, len(w)):
        val = sum(di * wi for di, wi in zip(d, w))
        if val > best + 1e-13 * max(1.0, best):
            best, best_d = val, d
    return best, best_d


def ech_from_weights_full(weights, k: int) -> float:
    """Same maximum without the ordering restriction (for cross-checks at small k)."""
    w = list(weights)[:k]
    dmax = int((math.isqrt(8 * k + 1) - 1) // 2)
    best = 0.0
    for d in itertools.product(range(dmax + 1), repeat=len(w)):
        if sum(x * (x + 1) // 2 for x in d) <= k:
            best = max(best, sum(x * y for x, y in zip(d, w)))
    return best


def ech_capacity_detail(dom, k: int, expansion: Optional[WeightExpansion] = None) -> tuple:
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return 0.0, (), []
    exp = expansion or weight_expansion(dom, k)
    vals = exp.values()
    val, d = ech_from_weights(vals, k)
    return val, d, vals


def ech_capacity(dom, k: int) -> float:
    return ech_capacity_detail(dom, k)[0]


def _graph_form(h) -> GraphDomain:
    if isinstance(h, GraphDomain):
        return h
    if isinstance(h, CurveDomain):
        return h.as_graph()
    raise ValueError("needs a graph or curve domain")


def ech9_shift(h, rho, delta: float) -> tuple:
    """(c_9 before, c_9 after) the symmetric shift h -> h + delta (rho + mirror rho)."""
    g = _graph_form(h)
    before = ech_capacity(h, 9)
    if delta == 0:
        return before, before
    after_dom = GraphDomain(Perturbed(g.profile, [rho.scaled(delta)]))
    return before, ech_capacity(after_dom, 9)
