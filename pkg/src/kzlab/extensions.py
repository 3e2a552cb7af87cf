"""Rooted extension pairs (G, H): exponents, safe/rigid/neutral classes, extension counts.

A :class:`RootedPair` stores G with its roots as vertices ``0..k-1``; H is the
subgraph of G induced on the roots.
"""
from __future__ import annotations

import enum
import itertools
import json
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .canon import automorphism_count, canonical_form, iter_monomorphisms
from .config import cap
from .densest import subset_table
from .errors import CapExceeded, DomainError
from .graph import Graph
from .io import from_graph6, to_graph6


@dataclass(frozen=True)
class RootedPair:
    g: Graph
    k: int

    def __post_init__(self):
        if not 1 <= self.k < self.g.n:
            raise DomainError(f"root count {self.k} must satisfy 1 <= k < v(G)={self.g.n}")

    @property
    def roots(self) -> range:
        return range(self.k)

    @property
    def v_ext(self) -> int:
        return self.g.n - self.k

    @property
    def e_ext(self) -> int:
        return sum(1 for u, v in self.g.edges if v >= self.k)

    def without_root_edges(self) -> Graph:
        return Graph(self.g.n, frozenset((u, v) for u, v in self.g.edges if v >= self.k))

    def colors(self) -> list[int]:
        return [i + 1 for i in range(self.k)] + [0] * self.v_ext

    def canonical_key(self) -> bytes:
        """Root-order-respecting isomorphism class, ignoring edges inside the roots."""
        return canonical_form(self.without_root_edges(), self.colors())

    def to_record(self) -> dict:
        return {"graph": to_graph6(self.g), "roots": self.k}

    @classmethod
    def from_record(cls, rec: dict) -> RootedPair:
        return cls(from_graph6(rec["graph"]), int(rec["roots"]))


# --- standard pairs used throughout ------------------------------------------------


def pendant_edge() -> RootedPair:
    return RootedPair(Graph.from_edges(2, [(0, 1)]), 1)


def pendant_path(length: int) -> RootedPair:
    """A path with ``length`` new vertices hung on a single root."""
    return RootedPair(Graph.path(length + 1), 1)


def common_neighbor() -> RootedPair:
    """One new vertex joined to both of two roots."""
    return RootedPair(Graph.from_edges(3, [(0, 2), (1, 2)]), 2)


# --- exponents and classes ----------------------------------------------------


def _check_alpha(alpha) -> Fraction:
    a = Fraction(alpha)
    if not 0 < a <= 1:
        raise DomainError(f"alpha must lie in (0, 1], got {a}")
    return a


def f_alpha(pair: RootedPair, alpha) -> Fraction:
    a = _check_alpha(alpha)
    return pair.v_ext - a * pair.e_ext


class PairClass(str, enum.Enum):
    SAFE = "safe"
    RIGID = "rigid"
    NEUTRAL = "neutral"
    NONE = "none"


@dataclass(frozen=True)
class PairFlags:
    safe: bool
    rigid: bool
    neutral: bool

    @property
    def cls(self) -> PairClass:
        if self.safe:
            return PairClass.SAFE
        if self.rigid:
            return PairClass.RIGID
        if self.neutral:
            return PairClass.NEUTRAL
        return PairClass.NONE


def pair_flags(pair: RootedPair, alpha, max_vertices: int | None = None) -> PairFlags:
    """All three class conditions.

    For a fixed vertex set between H and G the extreme value of f over
    subgraphs is reached by keeping every available edge, so only induced
    intermediate graphs are scanned. Intermediate graphs on the full vertex
    set with fewer edges satisfy the strict inequalities automatically.
    """
    a = _check_alpha(alpha)
    limit = cap(max_vertices, "pair_vertices")
    if pair.g.n > limit:
        raise CapExceeded("classify_pair", pair.g.n, limit)
    g, k = pair.g, pair.k
    edges, _ = subset_table(g, max_vertices=limit)
    root_mask = (1 << k) - 1
    e_root = int(edges[root_mask])
    extra = g.n - k
    full_u = (1 << extra) - 1
    total_e = g.e - e_root

    def ext_e(u_mask: int) -> int:
        return int(edges[root_mask | (u_mask << k)]) - e_root

    safe = True
    rigid = True
    inner_positive = True
    for u in range(0, full_u + 1):
        size = bin(u).count("1")
        e_u = ext_e(u)
        if u:
            if size - a * e_u <= 0:
                safe = False
                if u != full_u:
                    inner_positive = False
        if u != full_u:
            # f(G, S) with S induced on roots + U
            if (extra - size) - a * (total_e - e_u) >= 0:
                rigid = False
    f_full = extra - a * total_e
    touches = all(any(w >= k for w in g.adj[r]) for r in range(k))
    neutral = touches and inner_positive and f_full == 0
    return PairFlags(safe, rigid, neutral)


def classify_pair(pair: RootedPair, alpha, max_vertices: int | None = None) -> PairClass:
    return pair_flags(pair, alpha, max_vertices).cls


# --- extension counting -------------------------------------------------------------


def _check_roots(host: Graph, pair: RootedPair, roots: Sequence[int]) -> tuple[int, ...]:
    roots = tuple(int(r) for r in roots)
    if len(roots) != pair.k:
        raise DomainError(f"expected {pair.k} roots, got {len(roots)}")
    if len(set(roots)) != len(roots):
        raise DomainError("roots are not distinct")
    for r in roots:
        if not 0 <= r < host.n:
            raise DomainError(f"root {r} not a vertex of the host")
    return roots


def _exact_pattern(pair: RootedPair, host: Graph, roots: Sequence[int]) -> Graph:
    # copy the host's root-root adjacency so that an induced embedding is exactly an exact extension
    es = [(u, v) for u, v in pair.g.edges if v >= pair.k]
    es += [(i, j) for i in range(pair.k) for j in range(i + 1, pair.k) if host.has_edge(roots[i], roots[j])]
    return Graph.from_edges(pair.g.n, es)


def iter_extensions(
    host: Graph,
    pair: RootedPair,
    roots: Sequence[int],
    exact: bool = False,
    allowed: Iterable[int] | None = None,
):
    """Distinct vertex sets W (as sorted tuples) carrying a (G,H)-extension of the roots."""
    roots = _check_roots(host, pair, roots)
    fixed = {i: r for i, r in enumerate(roots)}
    pattern = _exact_pattern(pair, host, roots) if exact else pair.without_root_edges()
    allow = None if allowed is None else set(allowed) - set(roots)
    seen = set()
    for mp in iter_monomorphisms(host, pattern, fixed=fixed, allowed=allow, induced=exact):
        w = tuple(sorted(mp[u] for u in range(pair.k, pair.g.n)))
        if w not in seen:
            seen.add(w)
            yield w


def count_extensions(host: Graph, pair: RootedPair, roots: Sequence[int], exact: bool = False) -> int:
    """N_(G,H)(roots): the number of subsets W admitting an extension numbering."""
    return sum(1 for _ in iter_extensions(host, pair, roots, exact))


def _has_exact_extension(host: Graph, kt: RootedPair, troots: Sequence[int], allowed: set) -> bool:
    return next(iter_extensions(host, kt, troots, exact=True, allowed=allowed), None) is not None


def is_maximal(
    host: Graph,
    gtilde: Iterable[int],
    htilde: Iterable[int],
    kt: RootedPair,
    graph_level: bool = False,
) -> bool:
    """(K,T)-maximality of (G~, H~) in ``host``; ``graph_level`` drops the H~ restriction.

    For every |V(T)|-subset T~ of G~ (not inside H~) and every numbering of
    it, no exact (K,T)-extension of T~ may use only vertices outside G~ that
    have no edge to G~ minus T~.
    """
    gt = set(gtilde)
    ht = set(htilde)
    if not ht <= gt:
        raise DomainError("H~ must be contained in G~")
    if not graph_level and ht == gt:
        raise DomainError("H~ must be a proper subgraph of G~")
    if kt.k > len(gt):
        raise DomainError(f"|V(T)|={kt.k} exceeds |V(G~)|={len(gt)}")
    outside = set(range(host.n)) - gt
    for tt in itertools.combinations(sorted(gt), kt.k):
        if not graph_level and set(tt) <= ht:
            continue
        rest = gt - set(tt)
        blocked = set()
        for u in rest:
            blocked |= host.adj[u]
        allowed = outside - blocked
        if len(allowed) < kt.v_ext:
            continue
        for order in itertools.permutations(tt):
            if _has_exact_extension(host, kt, order, allowed):
                return False
    return True


def count_maximal_extensions(
    host: Graph,
    pair: RootedPair,
    roots: Sequence[int],
    kt: RootedPair,
    alpha=None,
) -> int:
    """Exact (G,H)-extensions of the roots that are (K,T)-maximal in ``host``."""
    if alpha is not None and classify_pair(kt, alpha) is not PairClass.RIGID:
        warnings.warn(f"(K,T) is not rigid at alpha={Fraction(alpha)}", stacklevel=2)
    roots = _check_roots(host, pair, roots)
    count = 0
    for w in iter_extensions(host, pair, roots, exact=True):
        if is_maximal(host, set(roots) | set(w), roots, kt):
            count += 1
    return count


@dataclass(frozen=True)
class ExtensionScale:
    scale: float
    first_moment: float


def expected_extension_scale(n: int, alpha, pair: RootedPair) -> ExtensionScale:
    """``N**f_alpha`` together with ``(N-k)_v * p**e / a_root`` at ``p = N**-alpha``.

    ``a_root`` counts automorphisms of G fixing every root.
    """
    a = Fraction(alpha)
    f = pair.v_ext - a * pair.e_ext
    scale = float(n) ** float(f)
    p = float(n) ** (-float(a))
    falling = math.prod(range(n - pair.k, n - pair.k - pair.v_ext, -1)) if n - pair.k >= pair.v_ext else 0
    aut = automorphism_count(pair.without_root_edges(), pair.colors())
    return ExtensionScale(scale, falling * p ** pair.e_ext / aut)


# --- catalogues --------------------------------------------------------------------


def enumerate_pairs(max_vertices: int, root_counts: Iterable[int]) -> list[RootedPair]:
    """All pairs up to root-order-respecting isomorphism, without root-root edges."""
    out = {}
    for k in sorted(set(root_counts)):
        for n in range(k + 1, max_vertices + 1):
            slots = [(u, v) for u in range(n) for v in range(u + 1, n) if v >= k]
            for bits in range(1 << len(slots)):
                es = [slots[i] for i in range(len(slots)) if bits >> i & 1]
                pair = RootedPair(Graph(n, frozenset(es)), k)
                out.setdefault(pair.canonical_key(), pair)
    return [out[key] for key in sorted(out)]


def dump_catalog(pairs: Iterable[RootedPair]) -> str:
    return "\n".join(json.dumps(p.to_record(), sort_keys=True) for p in pairs) + "\n"


def load_catalog(text: str) -> list[RootedPair]:
    return [RootedPair.from_record(json.loads(ln)) for ln in text.splitlines() if ln.strip()]
