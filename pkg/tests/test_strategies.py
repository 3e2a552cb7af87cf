import random
from fractions import Fraction

import pytest

from kzlab.errors import DomainError, StrategyPreconditionFailed
from kzlab.game import (
    LEFT,
    RIGHT,
    Winner,
    apply_move,
    lowest_id_duplicator,
    minimax_duplicator,
    minimax_spoiler,
    new_game,
    partial_isomorphism_holds,
    play,
    replay,
    solve,
)
from kzlab.graph import Graph, set_distance
from kzlab.strategies import (
    Conservator,
    CounterexampleConfig,
    NovatorT2,
    WitnessFamily,
    appendage_pairs,
    build_counterexample,
    check_kir_property,
    conservator_move,
    counterexample_alpha,
    family_isomorphism_holds,
    has_L1,
    has_L2,
    has_type1_extension,
    has_type12_extension,
    novator_t2_move,
    path_of_length_exists,
    size_bound,
    x_graph,
)
from kzlab.suites import conservator_suite, named_graph, spider

F = Fraction
RHO = F(29, 23)


def far_triangle_host() -> Graph:
    # a triangle, then a long tail: everything attached to the triangle is a path
    return Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)]).disjoint_union(Graph.path(10))


# --- path helpers ------------------------------------------------------------------


def test_exact_length_paths():
    c6 = Graph.cycle(6)
    assert path_of_length_exists(c6, 0, 3, 3)
    assert not path_of_length_exists(c6, 0, 3, 2)
    assert path_of_length_exists(c6, 0, 1, 5)
    assert not path_of_length_exists(Graph.path(4), 0, 3, 1)


def test_type1_extension_detection():
    assert has_type1_extension(Graph.cycle(4), 0, 4)
    assert not has_type1_extension(Graph.cycle(5), 0, 4)
    lolly = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 1)])
    assert has_type1_extension(lolly, 0, 4)
    assert not has_type1_extension(lolly, 0, 3)
    assert not has_type1_extension(Graph.path(6), 2, 8)


def test_type12_extension_detection():
    host = Graph.path(5)
    assert not has_type12_extension(host, {0, 4}, 3)
    assert has_type12_extension(host, {0, 4}, 4)
    assert not has_type12_extension(far_triangle_host(), {0, 1, 2}, 8)


# --- (k, i, r)-property ----------------------------------------------------------


def test_kir_isolated_triangle():
    rep = check_kir_property(far_triangle_host(), [{0, 1, 2}], 4, 1, 1, F(25, 23))
    assert rep.ok, rep.failures


def test_kir_distance_bullet():
    q = Graph.path(9)
    rep = check_kir_property(q, [{0}, {2}], 4, 3, 2, F(25, 23))
    assert set_distance(q, {0}, {2}) == 2
    assert any(f["bullet"] == "distance" for f in rep.failures)


def test_kir_extension_bullet():
    # two pendant paths joined back form a type-2 appendage of length 2
    q = Graph.from_edges(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 0)])
    rep = check_kir_property(q, [{0, 1, 2}], 4, 2, 1, F(25, 23))
    assert [f["bullet"] for f in rep.failures] == ["extension"]


def test_kir_size_bullet_and_domain():
    q = Graph.path(200)
    big = set(range(0, 200, 1))
    rep = check_kir_property(q, [big], 3, 3, 1, F(29, 23))
    assert any(f["bullet"] == "size" for f in rep.failures)
    assert size_bound(F(29, 23), 3, 3) < 200
    with pytest.raises(DomainError):
        check_kir_property(q, [{0}], 3, 1, 2, F(29, 23))


# --- witness families --------------------------------------------------------------


def test_witness_family_bookkeeping():
    fam = WitnessFamily()
    fam.add(LEFT, None, [0, 1], [5, 6], {0: 5, 1: 6})
    fam.add(RIGHT, 0, [7], [2], {7: 2})
    assert fam.r == 1
    assert fam.union(LEFT) == {0, 1, 2} and fam.union(RIGHT) == {5, 6, 7}
    assert fam.mapping(RIGHT)[7] == 2
    assert fam.index_of(RIGHT, 6) == 0
    with pytest.raises(KeyError):
        fam.index_of(LEFT, 9)


def test_family_isomorphism_check():
    g, h = Graph.path(3), Graph.path(3)
    fam = WitnessFamily([frozenset({0, 1, 2})], [frozenset({0, 1, 2})], {0: 2, 1: 1, 2: 0})
    assert family_isomorphism_holds(g, h, fam, [(0, 2)])
    assert not family_isomorphism_holds(g, h, fam, [(0, 0)])
    bad = WitnessFamily([frozenset({0, 1, 2})], [frozenset({0, 1, 2})], {0: 1, 1: 0, 2: 2})
    assert not family_isomorphism_holds(g, h, bad)


def test_appendage_pairs():
    pairs = appendage_pairs(4)
    kinds = {(p.k, p.g.n, p.g.e) for p in pairs}
    # cycles through the root, lollipops, and connecting paths with 1..3 inner vertices
    assert (1, 3, 3) in kinds and (1, 4, 4) in kinds and (1, 4, 4) in kinds
    assert {(2, 3, 2), (2, 4, 3), (2, 5, 4)} <= kinds


# --- Conservator ----------------------------------------------------------------------


def test_conservator_identity_first_round():
    g = spider([4, 4, 3])
    cons = Conservator(g, g, 3, RHO)
    pos = apply_move(new_game(g, g, 3), (LEFT, 0))
    y, fam = conservator_move(cons, pos)
    assert y == 0
    assert family_isomorphism_holds(g, g, fam, [(0, y)])
    assert cons.notes[-1]["case"] == "first"


def test_conservator_case1_reuses_phi():
    # a triangle with a long tail: the first witness is the lollipop around the triangle
    g = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)]).add_vertices(8, [(2, 3)] + [(i, i + 1) for i in range(3, 10)])
    cons = Conservator(g, g, 3, RHO)
    pos = apply_move(new_game(g, g, 3), (LEFT, 0))
    pos = apply_move(pos, cons(pos))
    fam_before = cons.family
    assert fam_before.union(LEFT) == {0, 1, 2, 3}
    pos = apply_move(pos, (RIGHT, 3))
    assert cons(pos) == fam_before.mapping(RIGHT)[3]
    assert cons.notes[-1]["case"] == 1
    assert cons.family.phi == fam_before.phi


def test_conservator_cases_recorded_in_trace():
    g, h = named_graph("P12"), named_graph("P12")
    _, s = solve(g, h, 3)
    seen = set()
    completed = 0
    rng = random.Random(0)
    for _ in range(30):
        def spoiler(pos, r=rng):
            opts = [(sd, v) for sd in (LEFT, RIGHT) for v in range(pos.graph(sd).n) if v not in pos.pebbled(sd)]
            return r.choice(opts)

        try:
            tr = play(g, h, 3, spoiler, Conservator(g, h, 3, RHO))
        except StrategyPreconditionFailed:
            # a checked strategy may refuse on a small host; it must never lose silently
            continue
        completed += 1
        assert tr.winner is Winner.DUPLICATOR and tr.forfeit is None
        seen |= {n["case"] for n in tr.trace}
    assert completed >= 10
    assert {"first", 2, 3} <= seen


def test_conservator_case3_reply_distance():
    g = named_graph("P12")
    cons = Conservator(g, g, 3, RHO)
    pos = apply_move(new_game(g, g, 3), (LEFT, 0))
    pos = apply_move(pos, cons(pos))
    pos = apply_move(pos, (LEFT, 11))
    y = cons(pos)
    note = cons.notes[-1]
    assert note["case"] == 3
    from kzlab.graph import bfs_distances
    from kzlab.sparseness import FLOOR_PLUS_ONE, chain_length
    first_y = pos.pebbles[0][1]
    assert bfs_distances(g, [first_y])[y] >= chain_length(RHO, FLOOR_PLUS_ONE)


def test_conservator_refuses_dense_mismatch():
    g, h = Graph.cycle(3).disjoint_union(Graph.path(6)), Graph.path(9)
    cons = Conservator(g, h, 3, RHO)
    pos = apply_move(new_game(g, h, 3), (LEFT, 0))
    with pytest.raises(StrategyPreconditionFailed):
        cons(pos)


def test_conservator_rho_domain():
    with pytest.raises(DomainError):
        Conservator(Graph.path(3), Graph.path(3), 3, F(4, 3))


def test_conservator_suite_is_sound():
    suite = conservator_suite()
    assert len(suite) >= 20
    for name, g, h in suite[:8]:
        w, s = solve(g, h, 3)
        assert w is Winner.DUPLICATOR, name
        tr = play(g, h, 3, minimax_spoiler(s), Conservator(g, h, 3, RHO))
        assert tr.winner is Winner.DUPLICATOR and tr.forfeit is None, name


# --- counterexample -------------------------------------------------------------------


def test_config_lengths():
    assert CounterexampleConfig(4, 1).lengths() == (5, 3)
    assert CounterexampleConfig(4, 3, 6, 4).lengths() == (6, 4)
    with pytest.raises(DomainError):
        CounterexampleConfig(4, 1, 6, 2)
    with pytest.raises(DomainError):
        CounterexampleConfig(4, 3, 5, 5)
    with pytest.raises(DomainError):
        CounterexampleConfig(4, 0)


def test_x_graph_shape():
    cfg = CounterexampleConfig(4, 1)
    x = x_graph(cfg)
    assert (x.n, x.e) == (7, 8)
    assert x.degree(0) == 4 and all(x.degree(v) == 2 for v in range(1, 7))
    assert counterexample_alpha(cfg) == F(7, 8)


def test_l1_examples():
    cfg = CounterexampleConfig(4, 1)
    x = x_graph(cfg)
    assert has_L1(x, cfg)
    assert not has_L1(spider([3, 3, 3]), cfg)
    assert has_L1(x.add_vertices(3), cfg)


def test_l2_examples():
    cfg = CounterexampleConfig(4, 1)
    assert not has_L2(x_graph(cfg), cfg)
    assert has_L2(spider([4, 5]), cfg)
    assert has_L2(Graph.cycle(5), cfg)
    assert has_L2(Graph.path(16), cfg)


def all_k4_configs():
    out = []
    for beta in range(1, 9):
        total = 7 + beta
        for c1 in range(3, 9):
            c2 = total - c1
            try:
                out.append(CounterexampleConfig(4, beta, c1, c2))
            except DomainError:
                pass
    return out


@pytest.mark.parametrize("cfg", all_k4_configs(), ids=lambda c: f"b{c.beta}-{c.c1_len}-{c.c2_len}")
def test_novator_wins_every_k4_config(cfg):
    g, h = build_counterexample(cfg)
    assert has_L1(g, cfg) and has_L2(h, cfg)
    w, s = solve(g, h, 4, max_vertices=16)
    assert w is Winner.SPOILER
    tr = play(g, h, 4, NovatorT2(g, h, cfg), minimax_duplicator(s))
    assert tr.winner is Winner.SPOILER and tr.rounds_played <= 4
    assert replay(tr) is Winner.SPOILER


def test_novator_against_simple_duplicator_and_padding():
    cfg = CounterexampleConfig(4, 1)
    g, h = build_counterexample(cfg, pad=2)
    tr = play(g, h, 4, NovatorT2(g, h, cfg), lowest_id_duplicator)
    assert tr.winner is Winner.SPOILER


def test_novator_round_two_is_farthest_on_first_cycle():
    cfg = CounterexampleConfig(4, 1)
    g, h = build_counterexample(cfg)
    nov = NovatorT2(g, h, cfg)
    pos = new_game(g, h, 4)
    move, nov = novator_t2_move(nov, pos)
    assert move == (LEFT, 0)
    pos = apply_move(apply_move(pos, move), 3)
    (side, v), _ = novator_t2_move(nov, pos)
    # path vertex 3 has no short cycle, so the 5-cycle is used and its farthest vertex is 2 steps away
    assert side == LEFT and v in (2, 3)
    assert nov.notes[-1] == {"round": 2, "novator": "farthest", "cycle": 5}


def test_novator_refuses_two_copies():
    cfg = CounterexampleConfig(4, 1)
    x = x_graph(cfg)
    with pytest.raises(StrategyPreconditionFailed, match="L2"):
        NovatorT2(x, x, cfg)
    with pytest.raises(StrategyPreconditionFailed):
        build_counterexample(cfg, h=x)
