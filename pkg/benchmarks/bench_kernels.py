"""Time the numba kernels against their numpy twins.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Both variants are imported from ``kzlab._accel`` regardless of
``KZLAB_NUMBA``; the numba side is skipped when numba is unavailable.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from kzlab import _accel
from kzlab.random_graphs import GnpSpec, sample_adjacency


def best_of(fn, args, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def masks_for(n: int, seed: int) -> np.ndarray:
    a = sample_adjacency(GnpSpec(n, 0.4, seed))
    return np.array([sum(1 << j for j in np.flatnonzero(row).tolist()) for row in a], dtype=np.int64)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    cases = []
    for n in (14, 18, 20):
        cases.append((f"subset_edge_counts n={n}", "subset_edge_counts", (masks_for(n, n),)))
    for n in (300, 1000):
        # triangle-free draws force a full scan
        a = sample_adjacency(GnpSpec(n, 1 / n, 7))
        a = a & ~((a.astype(np.int64) @ a.astype(np.int64)) > 0)
        cases.append((f"has_triangle n={n} (scan)", "has_triangle", (a,)))
        cases.append((f"has_k4 n={n} (scan)", "has_k4", (a,)))

    print(f"{'kernel':34s} {'numpy s':>10s} {'numba s':>10s} {'speedup':>8s}")
    for label, name, call in cases:
        np_fn = getattr(_accel, f"{name}_numpy")
        t_np = best_of(np_fn, call, args.repeat)
        if _accel.HAVE_NUMBA:
            nb_fn = getattr(_accel, f"{name}_numba")
            a, b = nb_fn(*call), np_fn(*call)
            assert np.array_equal(a, b), f"{label}: backends disagree"
            t_nb = best_of(nb_fn, call, args.repeat)
            print(f"{label:34s} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:8.1f}x")
        else:
            print(f"{label:34s} {t_np:10.4f} {'n/a':>10s} {'':>8s}")


if __name__ == "__main__":
    main()
