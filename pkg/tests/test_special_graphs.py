import itertools
import random
from fractions import Fraction

import networkx as nx
import pytest

from kzlab.densest import max_density
from kzlab.errors import CapExceeded, DomainError
from kzlab.graph import Graph
from kzlab.canon import are_isomorphic, canonical_form, iter_monomorphisms
from kzlab.special import (
    LemmaViolation,
    MDecomposition,
    Type1,
    Type2,
    Type3,
    classify_m_extension,
    density_bound,
    enumerate_Hm,
    eta,
    eta_bruteforce,
    lemma1_witness,
    m_decomposition,
    max_Hm_subgraph_at,
    sample_Hm_member,
    verify_lemma1_property1,
)

F = Fraction
K3 = Graph.complete(3)


def naive_rho_max(edges, n) -> Fraction:
    best = F(0)
    for r in range(1, n + 1):
        for s in itertools.combinations(range(n), r):
            ss = set(s)
            best = max(best, F(sum(1 for u, v in edges if u in ss and v in ss), r))
    return best


def naive_closure(m: int, v_max: int) -> list[nx.Graph]:
    """H_m by literal closure with networkx isomorphism for deduplication."""
    bound = F(m, m - 1)

    def ok(g: nx.Graph) -> bool:
        return naive_rho_max(list(g.edges), g.number_of_nodes()) < bound

    found: list[nx.Graph] = []

    def add(g):
        if not ok(g):
            return False
        for h in found:
            if h.number_of_nodes() == g.number_of_nodes() and h.number_of_edges() == g.number_of_edges():
                if nx.is_isomorphic(g, h):
                    return False
        found.append(g)
        return True

    start = nx.empty_graph(1)
    found.append(start)
    queue = [start]
    while queue:
        g = queue.pop()
        n = g.number_of_nodes()
        kids = []
        for t in range(1, m):
            if n + t > v_max:
                break
            new = list(range(n, n + t))
            for x1 in range(n):
                for x2 in range(n):
                    if x2 != x1:
                        c = g.copy()
                        nx.add_path(c, [x1] + new + [x2])
                        kids.append(c)
                if t >= 2:
                    c = g.copy()
                    nx.add_cycle(c, [x1] + new)
                    kids.append(c)
                if t >= 3:
                    c = g.copy()
                    nx.add_cycle(c, new)
                    c.add_edge(x1, n)
                    kids.append(c)
        for u, v in itertools.combinations(range(n), 2):
            if not g.has_edge(u, v):
                c = g.copy()
                c.add_edge(u, v)
                kids.append(c)
        for c in kids:
            if add(c):
                queue.append(c)
    return found


@pytest.fixture(scope="module")
def h9():
    return {m: enumerate_Hm(m, 9) for m in (3, 4, 5)}


# --- classification ---------------------------------------------------------------


def test_classify_triangle_on_vertex():
    assert classify_m_extension(K3, Graph.empty(1), 4) == Type1(0, 2, 0)


def test_classify_path_between_two_vertices():
    g = Graph.from_edges(3, [(0, 2), (2, 1)])
    assert classify_m_extension(g, Graph.empty(2), 3) == Type2(1, 0, 1)


def test_classify_chord_at_density_bound_is_rejected():
    c4 = Graph.cycle(4)
    assert classify_m_extension(c4.add_edges([(0, 2)]), c4, 5) is None
    # with more room the chord is a type-3 step
    assert classify_m_extension(c4.add_edges([(0, 2)]), c4, 4) == Type3(((0, 2),))


def test_classify_lollipop():
    g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 1)])
    assert classify_m_extension(g, Graph.empty(1), 4) == Type1(1, 2, 0)
    # the ring needs t <= m - 1
    assert classify_m_extension(g, Graph.empty(1), 3) is None


def test_classify_rejects_non_subgraph():
    with pytest.raises(DomainError):
        classify_m_extension(Graph.path(3), Graph.complete(3), 4)


def test_classify_rejects_long_cycle():
    assert classify_m_extension(Graph.cycle(5), Graph.empty(1), 4) is None
    assert classify_m_extension(Graph.cycle(5), Graph.empty(1), 5) == Type1(0, 4, 0)


def test_density_bound():
    assert density_bound(4) == F(4, 3)
    with pytest.raises(DomainError):
        density_bound(1)


# --- enumeration -----------------------------------------------------------------------


def test_enumerate_small_cases():
    assert enumerate_Hm(4, 1) == [Graph.empty(1)]
    assert any(are_isomorphic(g, K3) for g in enumerate_Hm(4, 3))


@pytest.mark.parametrize("m", [3, 4, 5])
def test_enumeration_matches_naive_closure(m):
    ours = enumerate_Hm(m, 6)
    ref = naive_closure(m, 6)
    assert len(ours) == len(ref)
    keys = {canonical_form(Graph.from_edges(g.number_of_nodes(), g.edges)) for g in ref}
    assert keys == {canonical_form(g) for g in ours}


def test_enumeration_counts_are_stable(h9):
    assert len(enumerate_Hm(4, 7)) == 63
    assert {m: len(v) for m, v in h9.items()} == {3: 2051, 4: 422, 5: 218}


def test_members_respect_density_bound(h9):
    for m, members in h9.items():
        assert all(max_density(g) < density_bound(m) for g in members)


def test_enumeration_is_ordered_and_deterministic():
    a, b = enumerate_Hm(4, 7), enumerate_Hm(4, 7)
    assert a == b
    assert [(g.n, g.e) for g in a] == sorted((g.n, g.e) for g in a)


def test_enumeration_cap():
    with pytest.raises(CapExceeded):
        enumerate_Hm(4, 13)
    with pytest.raises(DomainError):
        enumerate_Hm(2, 5)


# --- decompositions ---------------------------------------------------------------------


def test_decomposition_examples():
    assert m_decomposition(Graph.empty(1), 4).t == 0
    d = m_decomposition(K3, 4)
    assert d.t == 1 and d.steps[0].kind == Type1(0, 2, d.base) and d.final is None
    assert m_decomposition(Graph.complete(4), 4) is None


def decomposition_is_valid(g: Graph, d: MDecomposition) -> bool:
    prefixes = d.prefixes()
    if prefixes[0][0] != {d.base}:
        return False
    for (vs0, es0), (vs1, es1), st in zip(prefixes, prefixes[1:], d.steps):
        order = sorted(vs0) + list(st.vertices)
        pos = {u: i for i, u in enumerate(order)}
        big = Graph.from_edges(len(order), [(pos[a], pos[b]) for a, b in es1])
        small = Graph.from_edges(len(vs0), [(pos[a], pos[b]) for a, b in es0])
        if classify_m_extension(big, small, d.m) is None:
            return False
    used = prefixes[-1][1]
    extra = set(g.edges) - used
    if prefixes[-1][0] != set(range(g.n)):
        return False
    return extra == set(d.final.added_edges) if d.final else not extra


def test_every_member_decomposes(h9):
    for m in (3, 4, 5):
        for g in enumerate_Hm(m, 8):
            d = m_decomposition(g, m)
            assert d is not None and decomposition_is_valid(g, d)


def test_non_members_have_no_decomposition():
    assert m_decomposition(Graph.path(2).disjoint_union(Graph.empty(1)), 4) is None
    # a 6-cycle needs a cycle step with five new vertices
    assert m_decomposition(Graph.cycle(6), 4) is None
    assert m_decomposition(Graph.cycle(6), 6) is not None


# --- eta and the density identity ----------------------------------------------------------------


def test_eta_examples():
    assert eta(F(7, 5), 3) == 19
    assert eta(F(3, 2), 2) == 6
    with pytest.raises(DomainError):
        eta(F(3, 2), 3)
    with pytest.raises(DomainError):
        eta(1, 3)


def test_eta_grows_towards_the_bound():
    vals = [eta(F(3, 2) - F(1, q), 3) for q in (10, 100, 1000)]
    assert vals == sorted(vals) and vals[-1] > 1000


def test_eta_threshold_by_direct_evaluation():
    for m in (3, 4, 5):
        for q in range(2, 40):
            rho = 1 + F(1, m - 1) - F(1, q * (m - 1))
            if not 1 < rho < F(m, m - 1):
                continue
            n0 = (eta(rho, m) - 1) // (m - 1) - 1
            curve = lambda n: F(m * n, (m - 1) * n + 1)
            assert curve(n0) > rho
            assert n0 == 1 or curve(n0 - 1) <= rho


def test_eta_bruteforce_never_exceeds_eta(h9):
    rho = F(7, 5)
    assert eta_bruteforce(rho, 3, h9[3]) <= eta(rho, 3)


def test_lemma_examples():
    c4_chord = Graph.cycle(4).add_edges([(0, 2)])
    assert max_density(c4_chord) == F(5, 4)
    assert verify_lemma1_property1(c4_chord, 3) == (1, 2)
    bowtie = Graph.from_edges(5, [(0, 1), (1, 2), (0, 2), (0, 3), (3, 4), (0, 4)])
    assert verify_lemma1_property1(bowtie, 4) == (1, 2)


def test_lemma_hypothesis_is_enforced():
    with pytest.raises(DomainError):
        verify_lemma1_property1(K3, 4)
    with pytest.raises(DomainError):
        verify_lemma1_property1(Graph.complete(4), 4)


def test_lemma1_witness_reproduces_value():
    for m in (3, 4, 5):
        for a in range(1, 8):
            for b in range(1, m + 1):
                r = 1 + 1 / (m - 1 + F(b, a))
                a2, b2 = lemma1_witness(r, m)
                assert 1 + 1 / (m - 1 + F(b2, a2)) == r and b2 <= m
    assert lemma1_witness(F(3, 2), 3) is None
    assert lemma1_witness(1, 3) is None


def test_lemma_violation_type():
    assert issubclass(LemmaViolation, AssertionError)


# --- sampling ------------------------------------------------------------------------------


def test_sampled_members_are_members():
    rng = random.Random(1)
    for _ in range(15):
        gm = sample_Hm_member(3, 7, 10, rng)
        g = gm.graph
        assert 7 <= g.n <= 10
        assert gm.steps[0] == 1 and gm.steps[-1] == g.n
        assert max_density(g) < F(3, 2)
        assert m_decomposition(g, 3) is not None


def test_sampling_is_seeded():
    a = sample_Hm_member(4, 9, 12, random.Random(5)).graph
    b = sample_Hm_member(4, 9, 12, random.Random(5)).graph
    assert a == b


# --- largest member through a vertex -------------------------------------------------------


def test_max_subgraph_trivial():
    assert max_Hm_subgraph_at(Graph.empty(1), 0, 4).vertices == (0,)


def test_max_subgraph_triangle_with_tail():
    # the degree-one end of the tail cannot be produced by any step,
    # but a lollipop based at 3 covers everything else
    host = Graph.from_edges(5, [(0, 1), (1, 2), (0, 2), (0, 3), (3, 4)])
    best = max_Hm_subgraph_at(host, 0, 4)
    assert best.vertices == (0, 1, 2, 3)
    assert best.edges == host.edges - {(3, 4)}
    assert m_decomposition(host, 4) is None


def test_max_subgraph_in_k5_spans_all_vertices():
    # two triangles through x already fit, so {x} alone is never optimal
    best = max_Hm_subgraph_at(Graph.complete(5), 0, 4)
    assert len(best.vertices) == 5
    assert max_density(best.graph()) < F(4, 3)
    assert m_decomposition(best.graph(), 4) is not None


def test_max_subgraph_is_a_subgraph_and_member():
    rng = random.Random(2)
    for _ in range(10):
        host = sample_Hm_member(4, 6, 9, rng).graph
        host = host.add_edges([(0, host.n - 1)]) if not host.has_edge(0, host.n - 1) else host
        best = max_Hm_subgraph_at(host, 0, 4)
        assert 0 in best.vertices
        assert best.edges <= host.edges
        assert m_decomposition(best.graph(), 4) is not None


def test_max_subgraph_below_m3_is_the_vertex():
    assert max_Hm_subgraph_at(K3, 1, 2).vertices == (1,)
