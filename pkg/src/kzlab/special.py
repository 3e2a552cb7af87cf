"""m-extensions of types 1-3, the family H_m, m-decompositions and the density lemma.

Type 1 attaches a short cycle at one old vertex ``x1``: either a cycle through
``x1`` itself (``t1 = 0``) or a cycle on the new vertices joined to ``x1`` by a
single edge. Type 2 joins two distinct old vertices by a path of new
vertices. Type 3 adds edges only. Every type keeps ``rho_max < m/(m-1)``.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Union


from .canon import canonical_form
from .config import cap
from .densest import has_subgraph_at_least, max_density, subset_table
from .errors import CapExceeded, DomainError
from .graph import Graph, bfs_distances
from .io import from_graph6


@dataclass(frozen=True)
class Type1:
    t1: int
    t2: int
    x1: int


@dataclass(frozen=True)
class Type2:
    t: int
    x1: int
    x2: int


@dataclass(frozen=True)
class Type3:
    added_edges: tuple


MExtension = Union[Type1, Type2, Type3]


def density_bound(m: int) -> Fraction:
    if m < 2:
        raise DomainError(f"m must be at least 2, got {m}")
    return Fraction(m, m - 1)


def _below_bound(g: Graph, m: int) -> bool:
    return not has_subgraph_at_least(g, density_bound(m))


def classify_m_extension(g: Graph, h: Graph, m: int) -> MExtension | None:
    """Recognise ``g`` as an m-extension of ``h``; ``h`` occupies vertices ``0..h.n-1``."""
    if h.n > g.n or not h.edges <= g.edges:
        raise DomainError("h is not a labelled subgraph of g")
    new_edges = g.edges - h.edges
    t = g.n - h.n
    if not new_edges:
        return None
    if t == 0:
        if m >= 2 and _below_bound(g, m):
            return Type3(tuple(sorted(new_edges)))
        return None
    if len(new_edges) != t + 1:
        return None
    if any(v < h.n for _, v in new_edges):
        return None
    deg: dict[int, int] = {}
    nb: dict[int, list[int]] = {}
    for u, v in new_edges:
        for a, b in ((u, v), (v, u)):
            deg[a] = deg.get(a, 0) + 1
            nb.setdefault(a, []).append(b)
    old = sorted(u for u in deg if u < h.n)
    if any(deg.get(y, 0) == 0 for y in range(h.n, g.n)):
        return None
    kind: MExtension | None = None
    if len(old) == 2 and m >= 2 and t <= m - 1:
        x1, x2 = old
        if deg[x1] == 1 and deg[x2] == 1 and all(deg[y] == 2 for y in range(h.n, g.n)):
            # walk from x1 and make sure we arrive at x2 having seen every new vertex
            prev, cur, seen = x1, nb[x1][0], 0
            while cur >= h.n:
                seen += 1
                nxt = [w for w in nb[cur] if w != prev]
                prev, cur = cur, nxt[0]
            if cur == x2 and seen == t:
                kind = Type2(t, x1, x2)
    elif len(old) == 1 and m >= 3 and t <= m - 1:
        x1 = old[0]
        if deg[x1] == 2 and t >= 2 and all(deg[y] == 2 for y in range(h.n, g.n)):
            prev, cur, seen = x1, nb[x1][0], 0
            while cur != x1:
                seen += 1
                nxt = [w for w in nb[cur] if w != prev]
                prev, cur = cur, nxt[0]
            if seen == t:
                kind = Type1(0, t, x1)
        elif deg[x1] == 1 and t >= 3:
            y1 = nb[x1][0]
            if deg[y1] == 3 and all(deg[y] == 2 for y in range(h.n, g.n) if y != y1):
                ring = [w for w in nb[y1] if w != x1]
                prev, cur, seen = y1, ring[0], 1
                while cur != y1:
                    seen += 1
                    nxt = [w for w in nb[cur] if w != prev]
                    prev, cur = cur, nxt[0]
                if seen == t:
                    kind = Type1(1, t - 1, x1)
    if kind is not None and _below_bound(g, m):
        return kind
    return None


# --- appendage search inside a host ------------------------------------------------


def iter_appendages(host: Graph, inside: frozenset | set, m: int, attach=None) -> Iterator[tuple]:
    """Type-1/2 appendages of the labelled subgraph on ``inside``, drawn from ``host``.

    Yields ``(kind, new_vertices, new_edges)``; density is not checked here.
    ``attach`` restricts the attachment vertex ``x1``.
    """
    starts = sorted(inside) if attach is None else sorted(set(attach) & set(inside))
    adj = host.adj
    for x1 in starts:
        path: list[int] = []
        on_path: set[int] = set()

        def rec():
            t = len(path)
            last = path[-1]
            if m >= 2:
                for x2 in sorted(adj[last] & inside):
                    if x2 > x1:
                        es = [(x1, path[0])] + list(zip(path, path[1:])) + [(last, x2)]
                        yield Type2(t, x1, x2), tuple(path), tuple(tuple(sorted(e)) for e in es)
            if m >= 3 and t >= 2 and x1 in adj[last] and path[0] < last:
                es = [(x1, path[0])] + list(zip(path, path[1:])) + [(last, x1)]
                yield Type1(0, t, x1), tuple(path), tuple(tuple(sorted(e)) for e in es)
            if m >= 3 and t >= 3 and path[0] in adj[last] and path[1] < last:
                es = [(x1, path[0])] + list(zip(path, path[1:])) + [(last, path[0])]
                yield Type1(1, t - 1, x1), tuple(path), tuple(tuple(sorted(e)) for e in es)
            if t < m - 1:
                for w in sorted(adj[last]):
                    if w not in inside and w not in on_path:
                        path.append(w)
                        on_path.add(w)
                        yield from rec()
                        path.pop()
                        on_path.discard(w)

        for y1 in sorted(adj[x1]):
            if y1 in inside:
                continue
            path.append(y1)
            on_path.add(y1)
            yield from rec()
            path.pop()
            on_path.discard(y1)


def _abstract_children(g: Graph, m: int, v_max: int) -> Iterator[Graph]:
    n = g.n
    for t in range(1, m):
        if n + t > v_max:
            break
        chain = [(n + i, n + i + 1) for i in range(t - 1)]
        for x1 in range(n):
            if m >= 3 and t >= 2:
                yield g.add_vertices(t, chain + [(x1, n), (x1, n + t - 1)])
            if m >= 3 and t >= 3:
                yield g.add_vertices(t, chain + [(x1, n), (n + t - 1, n)])
            for x2 in range(x1 + 1, n):
                yield g.add_vertices(t, chain + [(x1, n), (n + t - 1, x2)])
    for u in range(n):
        for v in range(u + 1, n):
            if not g.has_edge(u, v):
                yield g.add_edges([(u, v)])


def enumerate_Hm(m: int, v_max: int, max_vertices: int | None = None) -> list[Graph]:
    """Members of H_m on at most ``v_max`` vertices, canonically labelled.

    Closure of the single vertex under m-extensions; type-3 steps are taken one
    edge at a time, which reaches the same graphs because every intermediate
    graph is a subgraph of the final one. Ordered by (v, e, canonical form).
    """
    if m < 3:
        raise DomainError("H_m is defined for m >= 3")
    limit = cap(max_vertices, "hm_vertices")
    if v_max > limit:
        raise CapExceeded("enumerate_Hm", v_max, limit)
    seen: dict[bytes, None] = {canonical_form(Graph.empty(1)): None}
    frontier = [Graph.empty(1)]
    bound = density_bound(m)
    while frontier:
        nxt = []
        for g in frontier:
            for child in _abstract_children(g, m, v_max):
                if has_subgraph_at_least(child, bound):
                    continue
                key = canonical_form(child, max_vertices=limit)
                if key not in seen:
                    seen[key] = None
                    nxt.append(child)
        frontier = nxt
    members = [from_graph6(k) for k in seen]
    keyed = sorted(zip(seen, members), key=lambda kv: (kv[1].n, kv[1].e, kv[0]))
    return [g for _, g in keyed]


# --- decompositions -----------------------------------------------------------------


@dataclass(frozen=True)
class Step:
    kind: MExtension
    vertices: tuple
    edges: tuple


@dataclass(frozen=True)
class MDecomposition:
    m: int
    base: int
    steps: tuple
    final: Type3 | None = None

    @property
    def t(self) -> int:
        return len(self.steps)

    def satisfies_lemma_hypothesis(self) -> bool:
        return (self.t == 1 and self.final is not None) or self.t >= 2

    def prefixes(self) -> list[tuple[frozenset, frozenset]]:
        """Vertex and edge sets of G_0, G_1, ..., G_t."""
        vs = frozenset([self.base])
        es: frozenset = frozenset()
        out = [(vs, es)]
        for st in self.steps:
            vs = vs | set(st.vertices)
            es = es | set(st.edges)
            out.append((vs, es))
        return out


def m_decomposition(g: Graph, m: int, max_vertices: int | None = None) -> MDecomposition | None:
    """One m-decomposition of ``g``, or ``None`` when ``g`` is not in H_m."""
    if m < 3:
        raise DomainError("H_m is defined for m >= 3")
    if g.n == 0:
        raise DomainError("empty graph")
    limit = cap(max_vertices, "hm_vertices")
    if g.n > limit:
        raise CapExceeded("m_decomposition", g.n, limit)
    if g.n == 1:
        return MDecomposition(m, 0, ())
    if not g.is_connected() or has_subgraph_at_least(g, density_bound(m)):
        return None
    everything = frozenset(range(g.n))
    dead: set[frozenset] = set()

    # reachability of the full vertex set depends only on the vertex set, not on edges used
    def rec(inside: frozenset):
        if inside == everything:
            return []
        if inside in dead:
            return None
        for kind, vs, es in iter_appendages(g, inside, m):
            rest = rec(inside | set(vs))
            if rest is not None:
                return [Step(kind, vs, es)] + rest
        dead.add(inside)
        return None

    for base in range(g.n):
        steps = rec(frozenset([base]))
        if steps is not None:
            used = set()
            for st in steps:
                used |= set(st.edges)
            extra = tuple(sorted(g.edges - used))
            return MDecomposition(m, base, tuple(steps), Type3(extra) if extra else None)
    return None


# --- the density lemma -----------------------------------------------------------


def eta(rho, m: int) -> int:
    """(m-1)(n0+1)+1 where n0 is the least natural n with mn/((m-1)n+1) > rho."""
    rho = Fraction(rho)
    bound = density_bound(m)
    if not 1 < rho < bound:
        raise DomainError(f"rho={rho} must lie strictly between 1 and {bound}")
    slack = m - rho * (m - 1)
    n0 = max(1, math.floor(rho / slack) + 1)

    def curve(n):
        return Fraction(m * n, (m - 1) * n + 1)

    assert curve(n0) > rho and (n0 == 1 or curve(n0 - 1) <= rho)
    return (m - 1) * (n0 + 1) + 1


def eta_bruteforce(rho, m: int, members: list[Graph]) -> int:
    """Research mode, non-normative: the least eta that works on the given members.

    Smallest ``e`` such that every member on more than ``e`` vertices has a
    subgraph on at most ``e`` vertices with density above ``rho``.
    """
    rho = Fraction(rho)
    best_small = {}
    for g in members:
        edges, sizes = subset_table(g)
        # smallest subset size carrying density > rho
        ok = edges * rho.denominator > sizes * rho.numerator
        ok[0] = False
        best_small[id(g)] = int(sizes[ok].min()) if ok.any() else None
    top = max((g.n for g in members), default=1)
    for e in range(1, top + 1):
        if all(best_small[id(g)] is not None and best_small[id(g)] <= e for g in members if g.n > e):
            return e
    return top


def lemma1_witness(rho_max, m: int) -> tuple[int, int] | None:
    """Natural (a, b) with b <= m and rho_max = 1 + 1/(m-1+b/a), or None."""
    r = Fraction(rho_max)
    if r <= 1:
        return None
    x = 1 / (r - 1) - (m - 1)
    if x <= 0 or x.numerator > m:
        return None
    return x.denominator, x.numerator


class LemmaViolation(AssertionError):
    pass


def verify_lemma1_property1(g: Graph, m: int, decomposition: MDecomposition | None = None) -> tuple[int, int]:
    dec = decomposition or m_decomposition(g, m)
    if dec is None:
        raise DomainError("graph is not in H_m")
    if not dec.satisfies_lemma_hypothesis():
        raise DomainError(f"decomposition has t={dec.t} and no final type-3 step")
    rho = max_density(g)
    w = lemma1_witness(rho, m)
    if w is None:
        raise LemmaViolation(f"rho_max={rho} has no representation with b <= {m}")
    a, b = w
    assert rho == 1 + 1 / (m - 1 + Fraction(b, a))
    return w


# --- sampling and local search ----------------------------------------------------


@dataclass
class GrownMember:
    graph: Graph
    steps: list = field(default_factory=list)


def sample_Hm_member(m: int, v_min: int, v_max: int, rng: random.Random, type3_prob: float = 0.2,
                     max_tries: int = 10_000) -> GrownMember:
    """Random member of H_m with ``v_min <= v <= v_max`` grown by random extensions.

    ``steps`` lists the vertex count after each type-1/2 step, so prefixes
    G_i are induced on ``range(steps[i])``.
    """
    bound = density_bound(m)
    for _ in range(max_tries):
        g = Graph.empty(1)
        steps = [1]
        stuck = 0
        while g.n < v_min and stuck < 200:
            room = min(m - 1, v_max - g.n)
            t = rng.randint(1, room)
            kinds = ["t2"] if g.n >= 2 else []
            if m >= 3 and t >= 2:
                kinds.append("cyc")
            if m >= 3 and t >= 3:
                kinds.append("lol")
            if not kinds:
                stuck += 1
                continue
            kind = rng.choice(kinds)
            n = g.n
            chain = [(n + i, n + i + 1) for i in range(t - 1)]
            x1 = rng.randrange(n)
            if kind == "t2":
                x2 = rng.choice([u for u in range(n) if u != x1])
                child = g.add_vertices(t, chain + [(x1, n), (n + t - 1, x2)])
            elif kind == "cyc":
                child = g.add_vertices(t, chain + [(x1, n), (x1, n + t - 1)])
            else:
                child = g.add_vertices(t, chain + [(x1, n), (n + t - 1, n)])
            if has_subgraph_at_least(child, bound):
                stuck += 1
                continue
            g = child
            steps.append(g.n)
        if not v_min <= g.n <= v_max:
            continue
        if rng.random() < type3_prob:
            non = [(u, v) for u in range(g.n) for v in range(u + 1, g.n) if not g.has_edge(u, v)]
            rng.shuffle(non)
            for e in non[:5]:
                child = g.add_edges([e])
                if not has_subgraph_at_least(child, bound):
                    g = child
                    break
        return GrownMember(g, steps)
    raise RuntimeError("could not grow a member in the requested size range")


@dataclass(frozen=True)
class HmSubgraph:
    vertices: tuple
    edges: frozenset

    def graph(self) -> Graph:
        pos = {u: i for i, u in enumerate(self.vertices)}
        return Graph.from_edges(len(self.vertices), [(pos[a], pos[b]) for a, b in self.edges])


def max_Hm_subgraph_at(host: Graph, x: int, m: int, radius: int | None = None,
                       max_states: int = 200_000) -> HmSubgraph:
    """A largest subgraph of ``host`` through ``x`` isomorphic to a member of H_m.

    Decomposition states are explored from every base vertex within
    ``radius`` of ``x`` (default: the whole component). Type-3 edges are added
    greedily in sorted order while the density bound allows. Ties: canonical
    form, then smallest vertex tuple.
    """
    if not 0 <= x < host.n:
        raise DomainError(f"{x} is not a vertex of the host")
    if m < 3:
        # below m = 3 nothing can be attached to a lone vertex
        return HmSubgraph((x,), frozenset())
    bound = density_bound(m)
    near = bfs_distances(host, [x])
    bases = sorted(u for u, d in near.items() if radius is None or d <= radius)
    best_vs: dict[frozenset, frozenset] = {frozenset([x]): frozenset()}
    explored = 0
    for base in bases:
        seen: set[frozenset] = set()
        stack = [(frozenset([base]), frozenset())]
        while stack:
            inside, es = stack.pop()
            if inside in seen:
                continue
            seen.add(inside)
            explored += 1
            if explored > max_states:
                raise CapExceeded("max_Hm_subgraph_at states", explored, max_states)
            if x in inside and inside not in best_vs:
                best_vs[inside] = es
            for _, vs, new in iter_appendages(host, inside, m):
                nxt_in = inside | set(vs)
                if nxt_in in seen:
                    continue
                nxt_es = es | set(new)
                sub = _labelled(nxt_in, nxt_es)
                if has_subgraph_at_least(sub, bound):
                    continue
                stack.append((nxt_in, nxt_es))
    top = max(len(s) for s in best_vs)
    cands = []
    for inside, es in best_vs.items():
        if len(inside) != top:
            continue
        es = set(es)
        for e in sorted(_induced_edges(host, inside)):
            if e in es:
                continue
            trial = es | {e}
            if not has_subgraph_at_least(_labelled(inside, trial), bound):
                es = trial
        vt = tuple(sorted(inside))
        sub = HmSubgraph(vt, frozenset(es))
        cands.append((canonical_form(sub.graph(), max_vertices=max(12, len(vt))), vt, sub))
    cands.sort(key=lambda c: (c[0], c[1]))
    return cands[0][2]


def _induced_edges(host: Graph, inside) -> list[tuple[int, int]]:
    s = set(inside)
    return [(u, v) for u in s for v in host.adj[u] if v in s and u < v]


def _labelled(inside, es) -> Graph:
    vs = sorted(inside)
    pos = {u: i for i, u in enumerate(vs)}
    return Graph.from_edges(len(vs), [(pos[a], pos[b]) for a, b in es])
