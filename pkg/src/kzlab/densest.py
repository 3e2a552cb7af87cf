"""Maximum subgraph density: exhaustive subset scan and parametric max-flow."""
from __future__ import annotations

import enum
from collections import deque
from fractions import Fraction

import numpy as np

from . import _accel
from .config import cap
from .errors import CapExceeded, DomainError
from .graph import Graph, density


class DensestMode(str, enum.Enum):
    BRUTE_FORCE = "brute"
    FLOW = "flow"


class BalanceClass(str, enum.Enum):
    STRICTLY_BALANCED = "strictly_balanced"
    BALANCED = "balanced"
    UNBALANCED = "unbalanced"


def _mask_vertices(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def subset_table(g: Graph, max_vertices: int | None = None):
    """Edge counts and sizes of every induced subgraph, indexed by vertex bitmask."""
    limit = cap(max_vertices, "brute_force_vertices")
    if g.n > limit:
        raise CapExceeded("brute-force subset scan", g.n, limit)
    masks = np.array(g.masks, dtype=np.int64) if g.n else np.zeros(0, dtype=np.int64)
    return _accel.subset_edge_counts(masks), _accel.subset_sizes(g.n)


def _brute_force(g: Graph, max_vertices: int | None):
    edges, sizes = subset_table(g, max_vertices)
    n = g.n
    best = None
    for v in range(1, n + 1):
        emax = int(edges[sizes == v].max())
        r = Fraction(emax, v)
        if best is None or r > best:
            best = r
    # smallest cardinality first, then lexicographically smallest vertex tuple
    for v in range(1, n + 1):
        if (best * v).denominator != 1:
            continue
        target = int(best * v)
        hits = np.flatnonzero((sizes == v) & (edges == target))
        if hits.size:
            return best, min(_mask_vertices(int(m)) for m in hits)
    raise AssertionError("unreachable")


# --- Dinic max-flow on integer capacities --------------------------------------


class _FlowNetwork:
    def __init__(self, size: int):
        self.size = size
        self.head = [[] for _ in range(size)]
        self.to: list[int] = []
        self.cap: list[int] = []

    def add(self, u: int, v: int, c: int) -> None:
        self.head[u].append(len(self.to))
        self.to.append(v)
        self.cap.append(c)
        self.head[v].append(len(self.to))
        self.to.append(u)
        self.cap.append(0)

    def max_flow(self, s: int, t: int) -> int:
        flow = 0
        to, capa, head = self.to, self.cap, self.head
        while True:
            level = [-1] * self.size
            level[s] = 0
            q = deque([s])
            while q:
                u = q.popleft()
                for eid in head[u]:
                    if capa[eid] > 0 and level[to[eid]] < 0:
                        level[to[eid]] = level[u] + 1
                        q.append(to[eid])
            if level[t] < 0:
                return flow
            it = [0] * self.size

            def dfs(u, f):
                if u == t:
                    return f
                while it[u] < len(head[u]):
                    eid = head[u][it[u]]
                    w = to[eid]
                    if capa[eid] > 0 and level[w] == level[u] + 1:
                        got = dfs(w, min(f, capa[eid]))
                        if got:
                            capa[eid] -= got
                            capa[eid ^ 1] += got
                            return got
                    it[u] += 1
                return 0

            while True:
                f = dfs(s, 1 << 62)
                if not f:
                    break
                flow += f

    def reachable(self, s: int) -> set[int]:
        seen = {s}
        stack = [s]
        while stack:
            u = stack.pop()
            for eid in self.head[u]:
                w = self.to[eid]
                if self.cap[eid] > 0 and w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen


def _denser_than(g: Graph, c: Fraction):
    """Vertex set S with e(S) - c|S| > 0 maximising that excess, or None.

    Max-weight closure on the edge/vertex incidence network, scaled by the
    denominator of ``c`` so that all capacities are integers.
    """
    p, q = c.numerator, c.denominator
    m = g.e
    edges = g.sorted_edges
    s, t = 0, 1
    net = _FlowNetwork(2 + m + g.n)
    big = q * m + 1
    for i, (a, b) in enumerate(edges):
        node = 2 + i
        net.add(s, node, q)
        net.add(node, 2 + m + a, big)
        net.add(node, 2 + m + b, big)
    for u in range(g.n):
        net.add(2 + m + u, t, p)
    cut = net.max_flow(s, t)
    if q * m - cut <= 0:
        return None
    side = net.reachable(s)
    return tuple(sorted(u for u in range(g.n) if 2 + m + u in side))


def _flow(g: Graph):
    n = g.n
    m = g.e
    cands = sorted({Fraction(e, v) for v in range(1, n + 1) for e in range(0, min(m, v * (v - 1) // 2) + 1)})
    # rho_max is the smallest candidate c with no subgraph denser than c
    lo, hi = 0, len(cands) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _denser_than(g, cands[mid]) is None:
            hi = mid
        else:
            lo = mid + 1
    best = cands[lo]
    if lo == 0:
        return best, (0,)
    witness = _denser_than(g, cands[lo - 1])
    return best, witness


def max_density_subgraph(g: Graph, mode: DensestMode | str = DensestMode.FLOW, max_vertices: int | None = None):
    """``(rho_max, witness)`` over induced subgraphs.

    The brute-force witness is the lexicographically smallest among the
    smallest-cardinality maximisers; the flow witness is the inclusion-minimal
    maximiser found by the min cut just below ``rho_max``.
    """
    if g.n == 0:
        raise DomainError("max density of the empty graph is undefined")
    mode = DensestMode(mode)
    if mode is DensestMode.BRUTE_FORCE:
        return _brute_force(g, max_vertices)
    return _flow(g)


def max_density(g: Graph, max_vertices: int | None = None) -> Fraction:
    """rho_max, choosing the faster exact route for the size."""
    if g.n <= 16:
        return _brute_force(g, max_vertices or 16)[0]
    return _flow(g)[0]


def balance_class(g: Graph, max_vertices: int | None = None) -> BalanceClass:
    density(g)
    edges, sizes = subset_table(g, max_vertices)
    full = (1 << g.n) - 1
    # compare e(S)/|S| against e/n without division
    num = edges[1:full] * g.n
    den = sizes[1:full] * g.e
    if np.any(num > den):
        return BalanceClass.UNBALANCED
    if np.any(num == den):
        return BalanceClass.BALANCED
    return BalanceClass.STRICTLY_BALANCED


def is_strictly_balanced(g: Graph) -> bool:
    return balance_class(g) is BalanceClass.STRICTLY_BALANCED


def has_subgraph_at_least(g: Graph, c) -> bool:
    """Whether some nonempty subgraph has density >= ``c`` (one max-flow, exact)."""
    c = Fraction(c)
    if g.n == 0:
        return False
    if c <= 0:
        return True
    if g.n <= 12:
        edges, sizes = subset_table(g)
        return bool(np.any(edges[1:] * c.denominator >= sizes[1:] * c.numerator))
    # densities e/v with v <= n that fall below c do so by at least 1/(q n)
    return _denser_than(g, c - Fraction(1, 2 * c.denominator * g.n)) is not None
