"""Colour refinement, canonical labelling, isomorphism and automorphism search.

All searches individualise-and-refine over equitable partitions. The
canonical labelling search prunes with twin transpositions and with the
automorphisms it discovers from equal leaf certificates.
"""
from __future__ import annotations

from typing import Iterator, Sequence

from .config import cap
from .errors import CapExceeded
from .graph import Graph
from .io import to_graph6_bytes


def _rank(values: Sequence) -> list[int]:
    order = {v: i for i, v in enumerate(sorted(set(values)))}
    return [order[v] for v in values]


def refine(masks: Sequence[int], colors: Sequence) -> list[int]:
    """Coarsest equitable refinement of ``colors``; colours are ranked 0..c-1."""
    cols = _rank(colors)
    n = len(cols)
    k = max(cols) + 1 if n else 0
    while True:
        sigs = []
        for v in range(n):
            cnt = [0] * k
            m = masks[v]
            while m:
                low = m & -m
                cnt[cols[low.bit_length() - 1]] += 1
                m ^= low
            sigs.append((cols[v], tuple(cnt)))
        new = _rank(sigs)
        k2 = max(new) + 1 if n else 0
        if k2 == k:
            return new
        cols, k = new, k2


def _individualize(cols: Sequence[int], chosen) -> list[int]:
    return [2 * c + (0 if u in chosen else 1) for u, c in enumerate(cols)]


class _Orbits:
    def __init__(self, n: int):
        self.p = list(range(n))

    def find(self, x: int) -> int:
        while self.p[x] != x:
            self.p[x] = self.p[self.p[x]]
            x = self.p[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.p[max(ra, rb)] = min(ra, rb)


def canonical_labeling(g: Graph, colors: Sequence[int] | None = None, max_vertices: int | None = None):
    """Return ``(order, certificate)``; ``order[i]`` is the vertex placed at position ``i``."""
    n = g.n
    limit = cap(max_vertices, "canonical_vertices")
    if n > limit:
        raise CapExceeded("canonical_form", n, limit)
    masks = g.masks
    init = list(colors) if colors is not None else [0] * n
    best: dict = {"cert": None, "order": None}
    autos: list[list[int]] = []

    def leaf(order):
        pos = [0] * n
        for i, u in enumerate(order):
            pos[u] = i
        rows = []
        for u in order:
            m = masks[u]
            r = 0
            while m:
                low = m & -m
                r |= 1 << pos[low.bit_length() - 1]
                m ^= low
            rows.append(r)
        cert = (tuple(init[u] for u in order), tuple(rows))
        if best["cert"] is None or cert < best["cert"]:
            best["cert"], best["order"] = cert, list(order)
        elif cert == best["cert"]:
            gamma = [0] * n
            for a, b in zip(order, best["order"]):
                gamma[a] = b
            autos.append(gamma)

    def search(cols, prefix):
        cols = refine(masks, cols)
        k = max(cols) + 1 if n else 0
        if k == n:
            order = [0] * n
            for u, c in enumerate(cols):
                order[c] = u
            leaf(order)
            return
        sizes = [0] * k
        for c in cols:
            sizes[c] += 1
        target = next(c for c in range(k) if sizes[c] > 1)
        cell = [u for u in range(n) if cols[u] == target]
        explored: list[int] = []
        for v in cell:
            if any((masks[u] & ~(1 << v)) == (masks[v] & ~(1 << u)) for u in explored):
                continue
            if explored and autos:
                orb = _Orbits(n)
                for gam in autos:
                    if all(gam[p] == p for p in prefix):
                        for a in range(n):
                            orb.union(a, gam[a])
                roots = {orb.find(u) for u in explored}
                if orb.find(v) in roots:
                    continue
            search(_individualize(cols, (v,)), prefix + [v])
            explored.append(v)

    if n:
        search(init, [])
        return best["order"], best["cert"]
    return [], ((), ())


def canonical_form(g: Graph, colors: Sequence[int] | None = None, max_vertices: int | None = None) -> bytes:
    """Byte string equal for two (coloured) graphs iff they are isomorphic."""
    order, _ = canonical_labeling(g, colors, max_vertices)
    perm = [0] * g.n
    for i, u in enumerate(order):
        perm[u] = i
    out = to_graph6_bytes(g.relabel(perm))
    if colors is not None:
        out += b"|" + ",".join(str(colors[u]) for u in order).encode()
    return out


def canonical_hex(g: Graph, colors: Sequence[int] | None = None) -> str:
    return canonical_form(g, colors).hex()


def find_isomorphism(
    g: Graph,
    h: Graph,
    g_colors: Sequence | None = None,
    h_colors: Sequence | None = None,
    fixed: Sequence[tuple[int, int]] = (),
) -> dict[int, int] | None:
    """An isomorphism ``g -> h`` extending ``fixed`` and respecting colours, or ``None``."""
    if g.n != h.n or g.e != h.e:
        return None
    n = g.n
    if n == 0:
        return {}
    um = list(g.masks) + [m << n for m in h.masks]
    gc = list(g_colors) if g_colors is not None else [0] * n
    hc = list(h_colors) if h_colors is not None else [0] * n
    init = [(0, c) for c in gc] + [(0, c) for c in hc]
    for j, (a, b) in enumerate(fixed):
        if gc[a] != hc[b]:
            return None
        init[a] = init[n + b] = (1, j)

    def rec(cols):
        cols = refine(um, cols)
        k = max(cols) + 1
        left = [0] * k
        right = [0] * k
        for u in range(n):
            left[cols[u]] += 1
            right[cols[n + u]] += 1
        if left != right:
            return None
        if k == n:
            where = {cols[n + u]: u for u in range(n)}
            mapping = {u: where[cols[u]] for u in range(n)}
            for a, b in g.edges:
                if not h.has_edge(mapping[a], mapping[b]):
                    return None
            return mapping
        target = next(c for c in range(k) if left[c] > 1)
        u = next(x for x in range(n) if cols[x] == target)
        for w in range(n):
            if cols[n + w] == target:
                r = rec(_individualize(cols, (u, n + w)))
                if r is not None:
                    return r
        return None

    return rec(init)


def are_isomorphic(g: Graph, h: Graph) -> bool:
    return find_isomorphism(g, h) is not None


def automorphism_count(g: Graph, colors: Sequence | None = None, max_vertices: int | None = None) -> int:
    """Order of the (colour-preserving) automorphism group via a stabiliser chain."""
    n = g.n
    limit = cap(max_vertices, "automorphism_vertices")
    if n > limit:
        raise CapExceeded("automorphism_count", n, limit)
    base = list(colors) if colors is not None else [0] * n
    fixed: list[tuple[int, int]] = []
    total = 1
    for v in range(n):
        cols = list(base)
        cols = [(0, c) for c in cols]
        for j, (a, _) in enumerate(fixed):
            cols[a] = (1, j)
        cols = refine(g.masks, cols)
        if max(cols) + 1 == n:
            break
        same = [w for w in range(n) if w != v and cols[w] == cols[v]]
        orbit = 1
        for w in same:
            if find_isomorphism(g, g, base, base, fixed + [(v, w)]) is not None:
                orbit += 1
        total *= orbit
        fixed.append((v, v))
    return total


# --- subgraph monomorphisms ----------------------------------------------------


def _pattern_order(pattern: Graph, first: Sequence[int] = ()) -> list[int]:
    order = list(first)
    placed = set(order)
    remaining = set(range(pattern.n)) - placed
    while remaining:
        frontier = [u for u in remaining if pattern.adj[u] & placed]
        pool = frontier or list(remaining)
        u = max(pool, key=lambda x: (len(pattern.adj[x] & placed), pattern.degree(x), -x))
        order.append(u)
        placed.add(u)
        remaining.discard(u)
    return order


def iter_monomorphisms(
    host: Graph,
    pattern: Graph,
    fixed: dict[int, int] | None = None,
    allowed: set | frozenset | None = None,
    induced: bool = False,
) -> Iterator[dict[int, int]]:
    """Injective maps pattern -> host preserving edges (and non-edges when ``induced``).

    ``fixed`` pre-assigns some pattern vertices; ``allowed`` restricts the images
    of the remaining ones.
    """
    fixed = dict(fixed or {})
    order = _pattern_order(pattern, list(fixed))
    start = len(fixed)
    mapping = dict(fixed)
    used = set(fixed.values())
    hadj = host.adj
    padj = pattern.adj
    prev = [[w for w in order[:i] if w in padj[order[i]]] for i in range(len(order))]
    nonprev = [[w for w in order[:i] if w not in padj[order[i]]] for i in range(len(order))]

    for a, b in pattern.edges:
        if a in fixed and b in fixed and not host.has_edge(fixed[a], fixed[b]):
            return
    if induced:
        for a in fixed:
            for b in fixed:
                if a < b and b not in padj[a] and host.has_edge(fixed[a], fixed[b]):
                    return

    all_vertices = range(host.n)

    def rec(i):
        if i == len(order):
            yield dict(mapping)
            return
        u = order[i]
        nbrs = prev[i]
        if nbrs:
            cand = set(hadj[mapping[nbrs[0]]])
            for w in nbrs[1:]:
                cand &= hadj[mapping[w]]
            cand = sorted(cand)
        else:
            cand = all_vertices
        du = len(padj[u])
        for x in cand:
            if x in used or (allowed is not None and x not in allowed) or len(hadj[x]) < du:
                continue
            if induced and any(mapping[w] in hadj[x] for w in nonprev[i]):
                continue
            mapping[u] = x
            used.add(x)
            yield from rec(i + 1)
            used.discard(x)
            del mapping[u]

    yield from rec(start)


def count_copies(host: Graph, pattern: Graph, max_pattern: int | None = None) -> int:
    """Number of (not necessarily induced) subgraphs of ``host`` isomorphic to ``pattern``."""
    limit = cap(max_pattern, "pattern_vertices")
    if pattern.n > limit:
        raise CapExceeded("count_copies", pattern.n, limit)
    if pattern.n > host.n:
        return 0
    total = sum(1 for _ in iter_monomorphisms(host, pattern))
    return total // automorphism_count(pattern)


def contains_subgraph(host: Graph, pattern: Graph) -> bool:
    if pattern.n > host.n:
        return False
    return next(iter_monomorphisms(host, pattern), None) is not None
