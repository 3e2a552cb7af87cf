"""Executable Duplicator (Conservator) and Spoiler (Novator) strategies.

The Conservator strategy is a checked partial strategy: every object whose
existence a random graph would supply with high probability is searched for
explicitly, and :class:`StrategyPreconditionFailed` is raised when it is
missing. Witness subgraphs are kept as vertex sets and compared as induced
subgraphs.

The Novator strategy wins on a graph containing two short cycles glued at a
vertex against a graph where no vertex carries both kinds of cycle.
"""
from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .canon import canonical_form, contains_subgraph, iter_monomorphisms
from .densest import has_subgraph_at_least
from .errors import DomainError, StrategyPreconditionFailed
from .extensions import PairClass, RootedPair, classify_pair, is_maximal
from .game import LEFT, RIGHT, GamePosition
from .graph import Graph, bfs_distances, set_distance
from .sparseness import CEIL, FLOOR_PLUS_ONE, chain_length
from .special import density_bound, eta, iter_appendages, max_Hm_subgraph_at

# --- path helpers -----------------------------------------------------------------


def _simple_paths(q: Graph, start: int, maxlen: int, avoid=frozenset()):
    """Simple paths (as vertex lists) leaving ``start`` with 1..maxlen edges, never entering ``avoid``."""
    path = [start]
    on = {start}

    def rec():
        if len(path) > 1:
            yield list(path)
        if len(path) - 1 == maxlen:
            return
        for w in sorted(q.adj[path[-1]]):
            if w in on or w in avoid:
                continue
            path.append(w)
            on.add(w)
            yield from rec()
            path.pop()
            on.discard(w)

    yield from rec()


def path_of_length_exists(q: Graph, a: int, b: int, length: int) -> bool:
    """Whether a simple path with exactly ``length`` edges joins ``a`` and ``b``."""
    if length == 0:
        return a == b
    if a == b:
        return False
    path = [a]
    on = {a}

    def rec() -> bool:
        if len(path) - 1 == length:
            return path[-1] == b
        for w in q.adj[path[-1]]:
            if w in on or (w == b and len(path) < length):
                continue
            path.append(w)
            on.add(w)
            if rec():
                return True
            path.pop()
            on.discard(w)
        return False

    return rec()


def has_short_cycle_through(q: Graph, v: int, max_len: int, avoid=frozenset()) -> bool:
    """A cycle of length 3..max_len through ``v`` that avoids ``avoid``."""
    for p in _simple_paths(q, v, max_len - 1, avoid):
        if len(p) >= 3 and v in q.adj[p[-1]]:
            return True
    return False


def has_type1_extension(q: Graph, x: int, m: int) -> bool:
    """Whether ``q`` holds an m-extension of type 1 of the lone vertex ``x``.

    That is a cycle of length at most ``m`` through ``x``, or a cycle of
    length at most ``m - 1`` avoiding ``x`` through one of its neighbours.
    Both shapes have density at most 1, so the density ceiling never binds.
    """
    if m < 3:
        return False
    if has_short_cycle_through(q, x, m):
        return True
    return any(has_short_cycle_through(q, y, m - 1, avoid={x}) for y in q.adj[x])


def has_type12_extension(q: Graph, w: set | frozenset, m: int) -> bool:
    """Whether some subgraph of ``q`` is an m-extension of type 1 or 2 of ``q[w]``."""
    if m < 2:
        return False
    w = frozenset(w)
    bound = density_bound(m)
    base = [(a, b) for a in w for b in q.adj[a] if b in w and a < b]
    for _, vs, es in iter_appendages(q, w, m):
        verts = sorted(w | set(vs))
        pos = {u: i for i, u in enumerate(verts)}
        g = Graph.from_edges(len(verts), [(pos[a], pos[b]) for a, b in base + list(es)])
        if not has_subgraph_at_least(g, bound):
            return True
    return False


# --- the (k, i, r)-property ---------------------------------------------------------


@dataclass
class KirReport:
    ok: bool
    failures: list = field(default_factory=list)


def size_bound(rho, k: int, i: int, mode: str = CEIL) -> int:
    return eta(rho, 2 ** (k - 1)) + (i - 1) * (chain_length(rho, mode) + 1)


def check_kir_property(q: Graph, subgraphs: Sequence, k: int, i: int, r: int, rho, mode: str = CEIL) -> KirReport:
    """The four bullets of the (k, i, r)-property for the induced subgraphs on ``subgraphs``."""
    if not 1 <= r <= i <= k:
        raise DomainError(f"need 1 <= r <= i <= k, got r={r}, i={i}, k={k}")
    ws = [frozenset(s) for s in subgraphs]
    if len(ws) != r:
        raise DomainError(f"expected {r} subgraphs, got {len(ws)}")
    fails = []
    for a, b in itertools.combinations(range(r), 2):
        if ws[a] & ws[b]:
            fails.append({"bullet": "disjoint", "pair": [a, b]})
        elif set_distance(q, ws[a], ws[b]) <= 2 ** (k - i):
            fails.append({"bullet": "distance", "pair": [a, b]})
    for j, w in enumerate(ws):
        if has_type12_extension(q, w, 2 ** (k - i)):
            fails.append({"bullet": "extension", "witness": j})
    total = len(frozenset().union(*ws)) if ws else 0
    if total > size_bound(rho, k, i, mode):
        fails.append({"bullet": "size", "size": total})
    return KirReport(not fails, fails)


# --- witness families ---------------------------------------------------------------


@dataclass
class WitnessFamily:
    left: list = field(default_factory=list)
    right: list = field(default_factory=list)
    phi: dict = field(default_factory=dict)

    @property
    def r(self) -> int:
        return len(self.left)

    def sets(self, side: int) -> list:
        return self.left if side == LEFT else self.right

    def union(self, side: int) -> frozenset:
        return frozenset().union(*self.sets(side)) if self.left else frozenset()

    def mapping(self, side: int) -> dict:
        """Map from ``side`` to the other side."""
        return dict(self.phi) if side == LEFT else {b: a for a, b in self.phi.items()}

    def index_of(self, side: int, v: int) -> int:
        for j, s in enumerate(self.sets(side)):
            if v in s:
                return j
        raise KeyError(v)

    def add(self, side: int, j: int | None, xs, ys, pairs: dict) -> None:
        """Grow witness ``j`` (or append a new one) by ``xs`` on ``side`` and ``ys`` opposite."""
        xs, ys = frozenset(xs), frozenset(ys)
        lx, rx = (xs, ys) if side == LEFT else (ys, xs)
        if j is None:
            self.left.append(lx)
            self.right.append(rx)
        else:
            self.left[j] = self.left[j] | lx
            self.right[j] = self.right[j] | rx
        for a, b in pairs.items():
            if side == LEFT:
                self.phi[a] = b
            else:
                self.phi[b] = a


def family_isomorphism_holds(g: Graph, h: Graph, fam: WitnessFamily, pebbles=()) -> bool:
    """(I) and (III): pebbles inside the unions and phi an induced isomorphism mapping pebble to pebble."""
    ul, ur = fam.union(LEFT), fam.union(RIGHT)
    if set(fam.phi) != ul or set(fam.phi.values()) != ur or len(ul) != len(ur):
        return False
    for jl, jr in zip(fam.left, fam.right):
        if {fam.phi[v] for v in jl} != set(jr):
            return False
    for a, b in pebbles:
        if fam.phi.get(a) != b:
            return False
    items = sorted(fam.phi.items())
    for x, (a, b) in enumerate(items):
        for c, d in items[x + 1:]:
            if g.has_edge(a, c) != h.has_edge(b, d):
                return False
    return True


# --- rigid catalogues built from appendages ---------------------------------------------


@functools.lru_cache(maxsize=None)
def appendage_pairs(m: int) -> tuple[RootedPair, ...]:
    """Rooted pairs (K1, K2) where K1 is a type-1 or type-2 m-appendage over its attachment roots."""
    out = {}
    for t in range(1, m):
        chain = [(1 + i, 2 + i) for i in range(t - 1)]
        if m >= 3 and t >= 2:
            p = RootedPair(Graph.from_edges(t + 1, chain + [(0, 1), (0, t)]), 1)
            out.setdefault(p.canonical_key(), p)
        if m >= 3 and t >= 3:
            p = RootedPair(Graph.from_edges(t + 1, chain + [(0, 1), (t, 1)]), 1)
            out.setdefault(p.canonical_key(), p)
        shifted = [(a + 1, b + 1) for a, b in chain]
        p = RootedPair(Graph.from_edges(t + 2, shifted + [(0, 2), (t + 1, 1)]), 2)
        out.setdefault(p.canonical_key(), p)
    return tuple(out[key] for key in sorted(out))


@functools.lru_cache(maxsize=None)
def two_root_rigid_pairs(max_vertices: int, alpha: Fraction) -> tuple[RootedPair, ...]:
    from .extensions import enumerate_pairs

    if max_vertices < 3:
        return ()
    return tuple(p for p in enumerate_pairs(max_vertices, [2]) if classify_pair(p, alpha) is PairClass.RIGID)


def _all_maximal(q: Graph, gt, ht, catalog) -> bool:
    return all(is_maximal(q, gt, ht, kt) for kt in catalog)


# --- the Conservator ------------------------------------------------------------------


class Conservator:
    """Duplicator strategy keeping a witness family; call it on a position awaiting a reply."""

    def __init__(self, g: Graph, h: Graph, k: int, rho, check_invariants: bool = True,
                 chain_mode: str = FLOOR_PLUS_ONE, size_mode: str = CEIL):
        self.g, self.h, self.k = g, h, k
        self.rho = Fraction(rho)
        if not 1 < self.rho < density_bound(2 ** (k - 1)):
            raise DomainError(f"rho={self.rho} outside the admissible interval for k={k}")
        self.alpha = 1 / self.rho
        self.family = WitnessFamily()
        self.check_invariants = check_invariants
        self.chain_mode = chain_mode
        self.size_mode = size_mode
        self.notes: list = []

    def graph(self, side: int) -> Graph:
        return self.g if side == LEFT else self.h

    def __call__(self, pos: GamePosition) -> int:
        move, self.family = conservator_move(self, pos)
        return move


def _fail(step: str, detail: str):
    raise StrategyPreconditionFailed(step, detail)


def _first_round(st: Conservator, side: int, x: int):
    qx, qy = st.graph(side), st.graph(1 - side)
    m = 2 ** (st.k - 1)
    sx = max_Hm_subgraph_at(qx, x, m).vertices
    order = [x] + [v for v in sx if v != x]
    pattern = qx.induced(order)
    for emb in iter_monomorphisms(qy, pattern, induced=True):
        ys = frozenset(emb.values())
        if st.k > 1 and has_type12_extension(qy, ys, m):
            continue
        fam = WitnessFamily()
        fam.add(side, None, order, ys, {order[i]: emb[i] for i in range(len(order))})
        return emb[0], fam, {"case": "first", "witness_size": len(order)}
    _fail("round 1", f"no induced copy of the H-subgraph at {x} without {m}-extensions")


def _case2(st: Conservator, side: int, x: int, i: int, fam: WitnessFamily):
    qx, qy = st.graph(side), st.graph(1 - side)
    ux, uy = fam.union(side), fam.union(1 - side)
    d = 2 ** (st.k - 1 - i)
    chains = [p for p in _simple_paths(qx, x, d, avoid=frozenset()) if p[-1] in ux and not (set(p[:-1]) & ux)]
    if len(chains) != 1:
        _fail("case 2", f"{len(chains)} chains of length <= {d} join {x} to the witnesses")
    chain = chains[0]
    anchor = chain[-1]
    fresh = list(reversed(chain[:-1]))
    l = fam.index_of(side, anchor)
    roots = sorted(ux)
    f = fam.mapping(side)
    pattern = qx.induced(roots + fresh)
    fixed = {j: f[v] for j, v in enumerate(roots)}
    allowed = set(range(qy.n)) - uy
    catalog = two_root_rigid_pairs(d, st.alpha)
    dist_x = len(chain) - 1
    for emb in iter_monomorphisms(qy, pattern, fixed=fixed, allowed=allowed, induced=True):
        imgs = [emb[len(roots) + j] for j in range(len(fresh))]
        y = imgs[-1]
        if bfs_distances(qy, uy).get(y) != dist_x:
            continue
        if not _all_maximal(qy, uy | set(imgs), uy, catalog):
            continue
        fam.add(side, l, fresh, imgs, dict(zip(fresh, imgs)))
        return y, fam, {"case": 2, "chain": dist_x, "witness": l}
    _fail("case 2", f"no maximal exact copy of the length-{dist_x} chain in the reply graph")


def _case3(st: Conservator, side: int, x: int, i: int, fam: WitnessFamily):
    qx, qy = st.graph(side), st.graph(1 - side)
    uy = fam.union(1 - side)
    m = 2 ** (st.k - 1 - i)
    sx = max_Hm_subgraph_at(qx, x, m).vertices
    order = [x] + [v for v in sx if v != x]
    length = chain_length(st.rho, st.chain_mode)
    # pattern: root 0, chain 0..length, then the copy glued at vertex ``length``
    body = qx.induced(order)
    nb = len(order)
    relabel = {0: length}
    for j in range(1, nb):
        relabel[j] = length + j
    edges = [(j, j + 1) for j in range(length)] + [(relabel[a], relabel[b]) for a, b in body.edges]
    pattern = Graph.from_edges(length + nb, edges)
    catalog = [p for p in appendage_pairs(m) if classify_pair(p, st.alpha) is PairClass.RIGID]
    allowed = set(range(qy.n)) - uy
    for anchor in sorted(uy):
        for emb in iter_monomorphisms(qy, pattern, fixed={0: anchor}, allowed=allowed, induced=True):
            y = emb[length]
            copy = [emb[length + j] for j in range(nb)]
            if bfs_distances(qy, uy).get(y) != length:
                continue
            if any(qy.adj[v] & uy for v in copy):
                continue
            gt = {emb[j] for j in range(pattern.n)}
            if not _all_maximal(qy, gt, {anchor}, catalog):
                continue
            fam.add(side, None, order, copy, dict(zip(order, copy)))
            return y, fam, {"case": 3, "witness_size": nb, "anchor": anchor}
    _fail("case 3", f"no chain of length {length} ending in a maximal copy of the H-subgraph at {x}")


def conservator_move(state: Conservator, pos: GamePosition):
    """One Duplicator reply; returns ``(vertex, updated family)``."""
    if pos.pending is None:
        raise DomainError("position is not awaiting a Duplicator reply")
    side, x = pos.pending
    i = len(pos.pebbles)
    fam = WitnessFamily(list(state.family.left), list(state.family.right), dict(state.family.phi))
    if i == 0 or fam.r == 0:
        y, fam, note = _first_round(state, side, x)
    else:
        ux = fam.union(side)
        qx = state.graph(side)
        if x in ux:
            y, note = fam.mapping(side)[x], {"case": 1}
        else:
            near = bfs_distances(qx, ux).get(x)
            if near is not None and near <= 2 ** (state.k - 1 - i):
                y, fam, note = _case2(state, side, x, i, fam)
            else:
                y, fam, note = _case3(state, side, x, i, fam)
    note.update(round=i + 1, r=fam.r)
    state.notes.append(note)
    if state.check_invariants:
        pair = (x, y) if side == LEFT else (y, x)
        pebbles = list(pos.pebbles) + [pair]
        if not family_isomorphism_holds(state.g, state.h, fam, pebbles):
            _fail(f"round {i + 1}", "witness map is not an induced isomorphism carrying pebbles to pebbles")
        if i + 1 < state.k:
            for s in (LEFT, RIGHT):
                rep = check_kir_property(state.graph(s), fam.sets(s), state.k, i + 1, fam.r, state.rho, state.size_mode)
                if not rep.ok:
                    _fail(f"round {i + 1}", f"(k,i,r)-property fails on side {s}: {rep.failures}")
    return y, fam


# --- the Novator and the counterexample -------------------------------------------------


@dataclass(frozen=True)
class CounterexampleConfig:
    k: int
    beta: int
    c1_len: int | None = None
    c2_len: int | None = None

    def lengths(self) -> tuple[int, int]:
        total = 2 ** (self.k - 1) + self.beta - 1
        if self.c1_len is None and self.c2_len is None:
            # largest admissible first cycle
            for c1 in range(min(2 ** (self.k - 1), total - 3), 2, -1):
                c2 = total - c1
                if 3 <= c2 < c1 and c2 <= 2 ** (self.k - 1) - 1:
                    return c1, c2
            raise DomainError(f"no admissible cycle lengths for k={self.k}, beta={self.beta}")
        c1, c2 = self.c1_len, self.c2_len
        if c1 is None or c2 is None:
            raise DomainError("give both cycle lengths or neither")
        if c1 + c2 != total:
            raise DomainError(f"cycle lengths must add up to {total}")
        if not (3 <= c2 < c1 <= 2 ** (self.k - 1) and c2 <= 2 ** (self.k - 1) - 1):
            raise DomainError(f"inadmissible cycle lengths ({c1}, {c2})")
        return c1, c2

    def __post_init__(self):
        if self.k < 2 or self.beta < 1:
            raise DomainError("need k >= 2 and a natural beta")
        self.lengths()


def x_graph(cfg: CounterexampleConfig) -> Graph:
    """Two cycles sharing vertex 0: the first on 0..c1-1, the second through c1..c1+c2-2."""
    c1, c2 = cfg.lengths()
    es = [(i, (i + 1) % c1) for i in range(c1)]
    second = [0] + list(range(c1, c1 + c2 - 1))
    es += [(second[i], second[(i + 1) % c2]) for i in range(c2)]
    return Graph.from_edges(c1 + c2 - 1, es)


def counterexample_alpha(cfg: CounterexampleConfig) -> Fraction:
    """alpha with 1/alpha equal to the density of the glued cycles."""
    x = x_graph(cfg)
    return Fraction(x.n, x.e)


def has_L1(g: Graph, cfg: CounterexampleConfig) -> bool:
    return contains_subgraph(g, x_graph(cfg))


def has_L2(g: Graph, cfg: CounterexampleConfig) -> bool:
    c1, c2 = cfg.lengths()
    return not any(has_type1_extension(g, x, c1) and has_type1_extension(g, x, c2) for x in range(g.n))


def build_counterexample(cfg: CounterexampleConfig, h: Graph | None = None, pad: int = 0):
    g = x_graph(cfg)
    if pad:
        g = g.add_vertices(pad)
    if h is None:
        h = Graph.path(2 ** cfg.k)
    if not has_L1(g, cfg):
        raise StrategyPreconditionFailed("build", "g lacks the glued cycles")
    if not has_L2(h, cfg):
        raise StrategyPreconditionFailed("build", "h has a vertex carrying both cycle extensions")
    return g, h


class NovatorT2:
    """Spoiler strategy for the glued-cycles counterexample; Spoiler always picks in ``g``."""

    def __init__(self, g: Graph, h: Graph, cfg: CounterexampleConfig, side: int = LEFT):
        if not has_L1(g, cfg):
            raise StrategyPreconditionFailed("L1", "Spoiler's graph has no copy of the glued cycles")
        if not has_L2(h, cfg):
            raise StrategyPreconditionFailed("L2", "the other graph has a vertex with both cycle extensions")
        self.g, self.h, self.cfg, self.side = g, h, cfg, side
        self.cycles: tuple[list, list] | None = None
        self.chain: list | None = None
        self.ends: tuple[int, int] | None = None
        self.notes: list = []

    def _locate(self):
        c1, c2 = self.cfg.lengths()
        x = x_graph(self.cfg)
        emb = next(iter_monomorphisms(self.g, x))
        first = [emb[i] for i in range(c1)]
        second = [emb[0]] + [emb[i] for i in range(c1, c1 + c2 - 1)]
        return first, second

    def _fresh(self, pos: GamePosition):
        used = set(pos.pebbled(self.side))
        return next((self.side, v) for v in range(self.g.n) if v not in used)

    def _reply(self, pos: GamePosition, j: int) -> int:
        return pos.pebbles[j][1 - self.side]

    def _pick(self, pos: GamePosition, chain: list, ends: tuple[int, int]):
        self.chain, self.ends = chain, ends
        n = len(chain) - 1
        if n <= 1:
            # the two chain ends are adjacent while their replies are not: already won
            self.notes.append({"round": len(pos.pebbles) + 1, "novator": "won"})
            return self._fresh(pos)
        j = min(range(1, n), key=lambda t: (abs(t - (n - t)), t))
        self.notes.append({"round": len(pos.pebbles) + 1, "novator": "bisect", "chain": n})
        return self.side, chain[j]

    def __call__(self, pos: GamePosition):
        i = len(pos.pebbles)
        if i == 0:
            self.cycles = self._locate()
            self.notes.append({"round": 1, "novator": "shared vertex"})
            return self.side, self.cycles[0][0]
        if i == 1:
            c1, c2 = self.cfg.lengths()
            y1 = self._reply(pos, 0)
            if not has_type1_extension(self.h, y1, c1):
                cyc = self.cycles[0]
            elif not has_type1_extension(self.h, y1, c2):
                cyc = self.cycles[1]
            else:
                raise StrategyPreconditionFailed("round 2", f"reply {y1} carries both cycle extensions")
            half = len(cyc) // 2
            a = cyc[: half + 1]
            b = [cyc[0]] + list(reversed(cyc[half:]))
            self.cycles = (a, b)
            self.notes.append({"round": 2, "novator": "farthest", "cycle": len(cyc)})
            return self.side, cyc[half]
        if i == 2:
            a, b = self.cycles
            y1, y2 = self._reply(pos, 0), self._reply(pos, 1)
            missing = [c for c in (a, b) if not path_of_length_exists(self.h, y1, y2, len(c) - 1)]
            if not missing:
                raise StrategyPreconditionFailed("round 3", "both chains between the first replies exist")
            return self._pick(pos, min(missing, key=len), (0, 1))
        # split the tracked chain at the previous pick
        chain, (ia, ib) = self.chain, self.ends
        n = len(chain) - 1
        if n <= 1:
            return self._fresh(pos)
        j = min(range(1, n), key=lambda t: (abs(t - (n - t)), t))
        ic = i - 1
        ya, yb, yc = self._reply(pos, ia), self._reply(pos, ib), self._reply(pos, ic)
        first, second = chain[: j + 1], chain[j:]
        options = []
        if not path_of_length_exists(self.h, ya, yc, len(first) - 1):
            options.append((len(first), first, (ia, ic)))
        if not path_of_length_exists(self.h, yc, yb, len(second) - 1):
            options.append((len(second), second, (ic, ib)))
        if not options:
            raise StrategyPreconditionFailed(f"round {i + 1}", "both halves of the tracked chain exist")
        _, sub, ends = min(options, key=lambda o: o[0])
        return self._pick(pos, sub, ends)


def novator_t2_move(state: NovatorT2, pos: GamePosition, cfg: CounterexampleConfig | None = None):
    """Functional form: ``(move, state)``."""
    return state(pos), state
