"""Sparseness certificate: parameters and deterministic checks of its two properties."""
from __future__ import annotations

import functools
import itertools
import json
import math
import random
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

from .canon import canonical_form, contains_subgraph
from .densest import max_density
from .errors import CapExceeded, DomainError
from .extensions import (
    PairClass,
    RootedPair,
    classify_pair,
    enumerate_pairs,
    is_maximal,
    iter_extensions,
)
from .graph import Graph
from .io import from_graph6, to_graph6
from .special import density_bound, eta, lemma1_witness

CEIL = "ceil"
FLOOR_PLUS_ONE = "floor+1"


def chain_length(rho, mode: str = CEIL) -> int:
    """ceil(1/(rho-1)) or floor(1/(rho-1)) + 1; they differ only when 1/(rho-1) is whole."""
    x = 1 / (Fraction(rho) - 1)
    if mode == CEIL:
        return math.ceil(x)
    if mode == FLOOR_PLUS_ONE:
        return math.floor(x) + 1
    raise DomainError(f"unknown rounding mode {mode!r}")


@dataclass(frozen=True)
class SparsenessParams:
    n1: int
    n2: int
    n3: int
    n4: int
    rho: Fraction
    k: int
    eta: int

    def to_dict(self) -> dict:
        d = asdict(self)
        d["rho"] = str(self.rho)
        return d


def sparseness_params(rho, k: int, mode: str = CEIL) -> SparsenessParams:
    if k < 2:
        raise DomainError("k must be at least 2")
    rho = Fraction(rho)
    m = 2 ** (k - 1)
    bound = density_bound(m)
    if not 1 < rho < bound:
        raise DomainError(f"rho={rho} must lie strictly between 1 and {bound}")
    hit = lemma1_witness(rho, m)
    if hit is not None:
        a, b = hit
        raise DomainError(f"rho={rho} is excluded: rho = 1 + 1/({m - 1} + {b}/{a})")
    e = eta(rho, m)
    step = chain_length(rho, mode) + 1
    return SparsenessParams(e + (k - 1) * step, e + (k - 2) * step, 2 ** (k - 2) + 1, 2, rho, k, e)


# --- catalogues -------------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def graph_catalog(max_vertices: int) -> tuple[Graph, ...]:
    """Every graph on 1..max_vertices vertices up to isomorphism, in (v, e, canonical) order.

    Built by vertex augmentation: each graph on n vertices is some graph on
    n-1 vertices plus one new vertex joined to a subset.
    """
    if max_vertices > 7:
        raise CapExceeded("graph_catalog", max_vertices, 7)
    out: list[Graph] = []
    layer = {canonical_form(Graph.empty(1)): Graph.empty(1)} if max_vertices >= 1 else {}
    out.extend(layer.values())
    for n in range(2, max_vertices + 1):
        nxt = {}
        for g in layer.values():
            for bits in range(1 << (n - 1)):
                child = g.add_vertices(1, [(u, n - 1) for u in range(n - 1) if bits >> u & 1])
                nxt.setdefault(canonical_form(child), child)
        out.extend(nxt[key] for key in nxt)
        layer = nxt
    keyed = [(g.n, g.e, canonical_form(g), g) for g in out]
    keyed.sort(key=lambda t: t[:3])
    return tuple(from_graph6(t[2]) for t in keyed)


def safe_catalog(max_vertices: int, alpha, max_roots: int) -> list[RootedPair]:
    ks = range(1, min(max_roots, max_vertices - 1) + 1)
    return [p for p in enumerate_pairs(max_vertices, ks) if classify_pair(p, alpha) is PairClass.SAFE]


def rigid_catalog(max_vertices: int, alpha, max_roots: int) -> list[RootedPair]:
    ks = range(1, min(max_roots, max_vertices - 1) + 1)
    return [p for p in enumerate_pairs(max_vertices, ks) if classify_pair(p, alpha) is PairClass.RIGID]


# --- reports ----------------------------------------------------------------------


@dataclass
class PropertyResult:
    passed: bool
    witness: dict | None = None
    checked: dict = field(default_factory=dict)


@dataclass
class SparsenessReport:
    property1: PropertyResult | None = None
    property2: PropertyResult | None = None

    @property
    def passed(self) -> bool:
        parts = [p for p in (self.property1, self.property2) if p is not None]
        return all(p.passed for p in parts)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def check_property1(g: Graph, n1: int, rho, pattern_cap: int) -> PropertyResult:
    """Small patterns below density rho must occur in ``g``; patterns above must not."""
    rho = Fraction(rho)
    checked = {"pattern_cap": pattern_cap, "n1": n1, "rho": str(rho), "override": pattern_cap > n1}
    required = forbidden = 0
    for k in graph_catalog(min(pattern_cap, max(n1, pattern_cap))):
        r = max_density(k) if k.e else Fraction(0)
        if r < rho:
            required += 1
            if not contains_subgraph(g, k):
                checked.update(required=required, forbidden=forbidden)
                return PropertyResult(False, {"pattern": to_graph6(k), "rho_max": str(r), "expected": "present"}, checked)
        elif r > rho:
            forbidden += 1
            if contains_subgraph(g, k):
                checked.update(required=required, forbidden=forbidden)
                return PropertyResult(False, {"pattern": to_graph6(k), "rho_max": str(r), "expected": "absent"}, checked)
    checked.update(required=required, forbidden=forbidden)
    return PropertyResult(True, None, checked)


def _placements(g: Graph, k: int, samples: int | None, rng: random.Random, exhaustive_limit: int):
    if g.n < k:
        return []
    if samples is None or g.n <= exhaustive_limit:
        return list(itertools.permutations(range(g.n), k))
    return [tuple(rng.sample(range(g.n), k)) for _ in range(samples)]


def has_maximal_extension(g: Graph, pair: RootedPair, roots: Sequence[int], kt: RootedPair) -> bool:
    for w in iter_extensions(g, pair, roots, exact=True):
        if is_maximal(g, set(roots) | set(w), roots, kt):
            return True
    return False


def check_property2(
    g: Graph,
    params: SparsenessParams,
    pair_v_cap: int = 3,
    root_samples: int | None = None,
    seed: int = 0,
    safe_pairs: Sequence[RootedPair] | None = None,
    rigid_pairs: Sequence[RootedPair] | None = None,
    exhaustive_limit: int = 30,
) -> PropertyResult:
    """Every safe pair at every placement has an exact extension maximal for each rigid pair.

    Catalogues default to every 1/rho-safe pair with at most
    ``min(pair_v_cap, n1)`` vertices and ``n2`` roots, and every 1/rho-rigid
    pair within ``(n3, n4)``. Placements are exhaustive up to
    ``exhaustive_limit`` host vertices, otherwise ``root_samples`` seeded draws.
    """
    alpha = 1 / Fraction(params.rho)
    if safe_pairs is None:
        safe_pairs = safe_catalog(min(pair_v_cap, params.n1), alpha, params.n2)
    if rigid_pairs is None:
        rigid_pairs = rigid_catalog(params.n3, alpha, params.n4)
    rng = random.Random(seed)
    exhaustive = root_samples is None or g.n <= exhaustive_limit
    checked = {
        "pair_v_cap": pair_v_cap,
        "safe_pairs": len(safe_pairs),
        "rigid_pairs": len(rigid_pairs),
        "placements": "exhaustive" if exhaustive else f"sampled:{root_samples}:seed={seed}",
    }
    for pair in safe_pairs:
        for roots in _placements(g, pair.k, root_samples, rng, exhaustive_limit):
            for kt in rigid_pairs:
                if not has_maximal_extension(g, pair, roots, kt):
                    witness = {"pair": pair.to_record(), "placement": list(roots), "rigid": kt.to_record()}
                    return PropertyResult(False, witness, checked)
    return PropertyResult(True, None, checked)


def recheck_property2_witness(g: Graph, witness: dict) -> bool:
    """True when the recorded failure reproduces."""
    pair = RootedPair.from_record(witness["pair"])
    kt = RootedPair.from_record(witness["rigid"])
    return not has_maximal_extension(g, pair, witness["placement"], kt)


def recheck_property1_witness(g: Graph, witness: dict) -> bool:
    k = from_graph6(witness["pattern"])
    present = contains_subgraph(g, k)
    return present if witness["expected"] == "absent" else not present


def check_sparseness(g: Graph, params: SparsenessParams, pattern_cap: int = 4, **kw) -> SparsenessReport:
    return SparsenessReport(
        check_property1(g, params.n1, params.rho, pattern_cap),
        check_property2(g, params, **kw),
    )
