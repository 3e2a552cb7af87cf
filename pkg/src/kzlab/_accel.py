"""Hot numeric kernels.

Each kernel has a numba ``@njit`` version and a pure-numpy version with the
same signature. The numba path is used when numba imports cleanly and the
environment variable ``KZLAB_NUMBA`` is not set to ``0``.
"""
from __future__ import annotations

import os

import numpy as np

_WANT_NUMBA = os.environ.get("KZLAB_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")

try:
    if not _WANT_NUMBA:
        raise ImportError("numba disabled by KZLAB_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    HAVE_NUMBA = False


# ---------------------------------------------------------------------------
# subset edge counts: e(G[S]) for every vertex subset S encoded as a bitmask


def subset_edge_counts_numpy(adj_masks: np.ndarray) -> np.ndarray:
    n = adj_masks.shape[0]
    counts = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        lo = np.arange(1 << i, dtype=np.int64)
        # vertices above i are never set in lo, so only neighbours below i count
        gained = np.bitwise_count(lo & np.int64(adj_masks[i])).astype(np.int64)
        counts[(1 << i):(1 << (i + 1))] = counts[: 1 << i] + gained
    return counts


def subset_sizes(n: int) -> np.ndarray:
    return np.bitwise_count(np.arange(1 << n, dtype=np.int64)).astype(np.int64)


if HAVE_NUMBA:

    @njit(cache=True)
    def _popcount(x):
        c = 0
        while x:
            x &= x - 1
            c += 1
        return c

    @njit(cache=True)
    def subset_edge_counts_numba(adj_masks):
        n = adj_masks.shape[0]
        counts = np.zeros(1 << n, dtype=np.int64)
        for i in range(n):
            base = 1 << i
            a = adj_masks[i]
            for lo in range(base):
                counts[base + lo] = counts[lo] + _popcount(lo & a)
        return counts

    @njit(cache=True)
    def has_triangle_numba(adj):
        n = adj.shape[0]
        for u in range(n):
            for v in range(u + 1, n):
                if adj[u, v]:
                    for w in range(v + 1, n):
                        if adj[u, w] and adj[v, w]:
                            return True
        return False

    @njit(cache=True)
    def has_k4_numba(adj):
        n = adj.shape[0]
        common = np.empty(n, dtype=np.int64)
        for u in range(n):
            for v in range(u + 1, n):
                if not adj[u, v]:
                    continue
                m = 0
                for w in range(v + 1, n):
                    if adj[u, w] and adj[v, w]:
                        common[m] = w
                        m += 1
                for a in range(m):
                    for b in range(a + 1, m):
                        if adj[common[a], common[b]]:
                            return True
        return False


def has_triangle_numpy(adj: np.ndarray) -> bool:
    a = adj.astype(np.int64)
    return bool(np.any((a @ a) * a))


def has_k4_numpy(adj: np.ndarray) -> bool:
    us, vs = np.nonzero(np.triu(adj, 1))
    for u, v in zip(us.tolist(), vs.tolist()):
        common = np.flatnonzero(adj[u] & adj[v])
        if common.size > 1 and adj[np.ix_(common, common)].any():
            return True
    return False


if HAVE_NUMBA:
    subset_edge_counts = subset_edge_counts_numba
    has_triangle = has_triangle_numba
    has_k4 = has_k4_numba
else:
    subset_edge_counts = subset_edge_counts_numpy
    has_triangle = has_triangle_numpy
    has_k4 = has_k4_numpy

BACKEND = "numba" if HAVE_NUMBA else "numpy"
