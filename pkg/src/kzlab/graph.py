"""Finite simple undirected graphs on vertices 0..n-1."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError

INF = float("inf")


def _norm(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset

    def __post_init__(self):
        if self.n < 0:
            raise DomainError("negative vertex count")
        for e in self.edges:
            u, v = e
            if not (0 <= u < v < self.n):
                raise DomainError(f"bad edge {e!r} for n={self.n}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]] = ()) -> Graph:
        es = set()
        for u, v in edges:
            if u == v:
                raise DomainError(f"loop at {u}")
            es.add(_norm(int(u), int(v)))
        return cls(int(n), frozenset(es))

    # --- standard families -------------------------------------------------
    @classmethod
    def empty(cls, n: int) -> Graph:
        return cls(n, frozenset())

    @classmethod
    def complete(cls, n: int) -> Graph:
        return cls(n, frozenset((u, v) for u in range(n) for v in range(u + 1, n)))

    @classmethod
    def path(cls, n: int) -> Graph:
        """Path on ``n`` vertices 0-1-...-(n-1)."""
        return cls(n, frozenset((i, i + 1) for i in range(n - 1)))

    @classmethod
    def cycle(cls, n: int) -> Graph:
        if n < 3:
            raise DomainError("cycle needs at least 3 vertices")
        return cls.from_edges(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def star(cls, leaves: int) -> Graph:
        return cls(leaves + 1, frozenset((0, i) for i in range(1, leaves + 1)))

    # --- basic accessors ----------------------------------------------------
    @property
    def v(self) -> int:
        return self.n

    @property
    def e(self) -> int:
        return len(self.edges)

    @cached_property
    def adj(self) -> tuple[frozenset, ...]:
        nb = [set() for _ in range(self.n)]
        for u, v in self.edges:
            nb[u].add(v)
            nb[v].add(u)
        return tuple(frozenset(s) for s in nb)

    @cached_property
    def masks(self) -> tuple[int, ...]:
        out = [0] * self.n
        for u, v in self.edges:
            out[u] |= 1 << v
            out[v] |= 1 << u
        return tuple(out)

    @cached_property
    def sorted_edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self.edges))

    def degree(self, u: int) -> int:
        return len(self.adj[u])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.bool_)
        if self.edges:
            es = np.array(self.sorted_edges, dtype=np.int64)
            a[es[:, 0], es[:, 1]] = True
            a[es[:, 1], es[:, 0]] = True
        return a

    # --- derived graphs -----------------------------------------------------
    def induced(self, vertices: Iterable[int]) -> Graph:
        """Induced subgraph, relabelled so that the i-th listed vertex becomes i."""
        vs = list(vertices)
        pos = {u: i for i, u in enumerate(vs)}
        if len(pos) != len(vs):
            raise DomainError("repeated vertex in induced()")
        es = []
        for i, u in enumerate(vs):
            for w in self.adj[u]:
                j = pos.get(w)
                if j is not None and i < j:
                    es.append((i, j))
        return Graph(len(vs), frozenset(es))

    def edges_within(self, vertices: Iterable[int]) -> int:
        s = set(vertices)
        return sum(1 for u in s for w in self.adj[u] if w in s) // 2

    def relabel(self, perm: Sequence[int]) -> Graph:
        """Vertex ``u`` becomes ``perm[u]``."""
        return Graph(self.n, frozenset(_norm(perm[u], perm[v]) for u, v in self.edges))

    def add_edges(self, edges: Iterable[Sequence[int]]) -> Graph:
        return Graph.from_edges(self.n, list(self.edges) + [tuple(e) for e in edges])

    def add_vertices(self, count: int, edges: Iterable[Sequence[int]] = ()) -> Graph:
        return Graph.from_edges(self.n + count, list(self.edges) + [tuple(e) for e in edges])

    def disjoint_union(self, other: Graph) -> Graph:
        k = self.n
        return Graph(self.n + other.n, self.edges | {(u + k, v + k) for u, v in other.edges})

    def is_subgraph_of(self, other: Graph) -> bool:
        """Labelled containment: same ids, edges a subset."""
        return self.n <= other.n and self.edges <= other.edges

    def components(self) -> list[list[int]]:
        seen = [False] * self.n
        out = []
        for s in range(self.n):
            if seen[s]:
                continue
            comp = []
            seen[s] = True
            stack = [s]
            while stack:
                u = stack.pop()
                comp.append(u)
                for w in self.adj[u]:
                    if not seen[w]:
                        seen[w] = True
                        stack.append(w)
            out.append(sorted(comp))
        return out

    def is_connected(self) -> bool:
        return self.n <= 1 or len(self.components()) == 1

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={list(self.sorted_edges)})"


def density(g: Graph) -> Fraction:
    """e(g)/v(g) as an exact rational."""
    if g.n == 0:
        raise DomainError("density of the empty graph is undefined")
    return Fraction(g.e, g.n)


# --- distances ---------------------------------------------------------------


def bfs_distances(g: Graph, sources: Iterable[int], blocked: frozenset | set = frozenset()) -> dict[int, int]:
    """Multi-source BFS; vertices in ``blocked`` are never entered."""
    dist = {}
    q = deque()
    for s in sources:
        if s not in dist:
            dist[s] = 0
            q.append(s)
    while q:
        u = q.popleft()
        du = dist[u] + 1
        for w in g.adj[u]:
            if w not in dist and w not in blocked:
                dist[w] = du
                q.append(w)
    return dist


def distance(q: Graph, x: int, w: Iterable[int]) -> float:
    """Length of a shortest path from ``x`` to the set ``w``; ``inf`` if none."""
    ws = set(w)
    if x in ws:
        raise DomainError(f"vertex {x} lies in the target set")
    if not ws:
        return INF
    d = bfs_distances(q, ws).get(x)
    return INF if d is None else d


def set_distance(q: Graph, w1: Iterable[int], w2: Iterable[int]) -> float:
    a, b = set(w1), set(w2)
    if a & b:
        raise DomainError("sets overlap")
    if not a or not b:
        return INF
    dist = bfs_distances(q, b)
    ds = [dist[x] for x in a if x in dist]
    return min(ds) if ds else INF
