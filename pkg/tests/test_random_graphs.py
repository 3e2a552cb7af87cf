import math
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from fractions import Fraction

import numpy as np
import pytest

from kzlab import _accel
from kzlab.errors import CapExceeded, DomainError
from kzlab.graph import Graph
from kzlab.random_graphs import (
    GnpSpec,
    McEstimate,
    TrialError,
    alpha_to_p,
    contains_k4,
    contains_triangle,
    dump_jsonl,
    generator,
    monte_carlo,
    sample_adjacency,
    sample_gnp,
    triangle_free,
    wilson_interval,
)


def test_alpha_to_p_examples():
    assert alpha_to_p(100, Fraction(1, 2)) == pytest.approx(0.1)
    assert alpha_to_p(1, Fraction(3, 7)) == 1.0
    assert alpha_to_p(500, Fraction(2, 3)) == pytest.approx(0.015874, abs=1e-6)
    with pytest.raises(DomainError):
        alpha_to_p(10, 0)


def test_spec_validation():
    with pytest.raises(DomainError):
        GnpSpec(5, 1.5, 0)
    with pytest.raises(CapExceeded):
        sample_adjacency(GnpSpec(50, 0.1, 0), max_vertices=10)


def test_extreme_probabilities():
    assert sample_gnp(GnpSpec(30, 0.0, 1)).e == 0
    assert sample_gnp(GnpSpec(30, 1.0, 1)) == Graph.complete(30)


def test_pinned_edge_count():
    g = sample_gnp(GnpSpec(1000, 0.01, 12345))
    assert g.e == 4877
    assert 4455 <= g.e <= 5445


def test_stream_matches_a_single_flat_draw():
    spec = GnpSpec(40, 0.3, 99, (4,))
    flat = generator(99, (4,)).random(40 * 39 // 2) < 0.3
    iu, ju = np.triu_indices(40, 1)
    expect = {(int(a), int(b)) for a, b, x in zip(iu, ju, flat) if x}
    assert set(sample_gnp(spec).edges) == expect


def test_same_spec_same_graph():
    a = sample_adjacency(GnpSpec(200, 0.05, 7, (3,)))
    b = sample_adjacency(GnpSpec(200, 0.05, 7, (3,)))
    assert np.array_equal(a, b)
    assert not np.array_equal(a, sample_adjacency(GnpSpec(200, 0.05, 7, (4,))))


def test_edge_count_unbiased():
    n, p = 200, 0.05
    counts = [sample_gnp(GnpSpec(n, p, 3, (t,))).e for t in range(200)]
    mean = sum(counts) / len(counts)
    pairs = n * (n - 1) / 2
    se = math.sqrt(pairs * p * (1 - p) / len(counts))
    assert abs(mean - p * pairs) < 3 * se


def naive_triangle(a: np.ndarray) -> bool:
    n = a.shape[0]
    nb = [set(np.flatnonzero(a[i]).tolist()) for i in range(n)]
    return any(nb[u] & nb[v] for u in range(n) for v in nb[u] if v > u)


def naive_k4(a: np.ndarray) -> bool:
    n = a.shape[0]
    nb = [set(np.flatnonzero(a[i]).tolist()) for i in range(n)]
    for u in range(n):
        for v in nb[u]:
            common = nb[u] & nb[v]
            if any(nb[w] & common for w in common):
                return True
    return False


@pytest.mark.parametrize("seed", range(12))
def test_predicates_against_naive(seed):
    a = sample_adjacency(GnpSpec(60, 0.06 + 0.02 * seed, seed))
    assert contains_triangle(a) == naive_triangle(a) == (not triangle_free(a))
    assert contains_k4(a) == naive_k4(a)


@pytest.mark.parametrize("seed", range(6))
def test_numpy_and_numba_kernels_agree(seed):
    a = sample_adjacency(GnpSpec(80, 0.08, seed))
    assert _accel.has_triangle_numpy(a) == naive_triangle(a)
    assert _accel.has_k4_numpy(a) == naive_k4(a)
    masks = np.array([int(sum(1 << j for j in np.flatnonzero(r[:14]).tolist())) for r in a[:14]], dtype=np.int64)
    ref = _accel.subset_edge_counts_numpy(masks)
    if _accel.HAVE_NUMBA:
        assert _accel.has_triangle_numba(a) == naive_triangle(a)
        assert _accel.has_k4_numba(a) == naive_k4(a)
        assert np.array_equal(_accel.subset_edge_counts_numba(masks), ref)


def test_always_true():
    est = monte_carlo("always", 10, 0.5, 25, 1)
    assert est.frequency == 1.0 and est.successes == 25


def test_wilson_interval_reference_values():
    # reference values from the closed form evaluated independently
    lo, hi = wilson_interval(0, 10)
    assert lo == 0.0 and hi == pytest.approx(0.27753279, rel=1e-6)
    lo, hi = wilson_interval(50, 100)
    assert (lo, hi) == pytest.approx((0.40383153, 0.59616847), rel=1e-6)
    assert wilson_interval(0, 0) == (0.0, 1.0)


def test_wilson_matches_statsmodels():
    sm = pytest.importorskip("statsmodels.stats.proportion")
    for s, t in [(3, 17), (90, 100), (412, 1000)]:
        assert wilson_interval(s, t) == pytest.approx(sm.proportion_confint(s, t, method="wilson"), rel=1e-9)


def test_monte_carlo_records_and_domain():
    rec = []
    est = monte_carlo("contains_k3", 30, 0.1, 5, 17, records=rec)
    assert [r["trial"] for r in rec] == list(range(5))
    assert rec[0]["seed"] == [17, 0] and rec[0]["predicate_id"] == "contains_k3"
    assert sum(r["outcome"] for r in rec) == est.successes
    with pytest.raises(DomainError):
        monte_carlo("always", 10, 0.5, 0, 1)


def test_parallel_equals_serial():
    serial = monte_carlo("triangle_free", 80, 0.03, 30, 5)
    with ThreadPoolExecutor(3) as ex:
        threaded = monte_carlo("triangle_free", 80, 0.03, 30, 5, executor=ex)
    with ProcessPoolExecutor(2) as ex:
        procs = monte_carlo("triangle_free", 80, 0.03, 30, 5, executor=ex)
    assert serial == threaded == procs


def _boom(a):
    if a.sum() > 0:
        raise ValueError("boom")
    return True


def test_predicate_error_names_trial():
    with pytest.raises(TrialError) as info:
        monte_carlo(_boom, 20, 0.5, 3, 0)
    assert info.value.trial == 0


def test_estimate_serialisation():
    est = McEstimate(4, 1, 0.25, (0.1, 0.5))
    assert est.to_dict() == {"trials": 4, "successes": 1, "frequency": 0.25, "ci95": [0.1, 0.5]}
    assert dump_jsonl([{"b": 1, "a": 2}]) == '{"a": 2, "b": 1}\n'


def test_triangle_free_limit_at_inverse_n():
    # at p = 1/N the triangle count tends to Poisson(1/6), so P(no triangle) -> e^(-1/6)
    n = 500
    est = monte_carlo("triangle_free", n, 1 / n, 1000, 7)
    assert abs(est.frequency - math.exp(-1 / 6)) <= 0.05
    assert est.ci95[0] <= math.exp(-1 / 6) + 0.05
