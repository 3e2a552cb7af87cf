"""Seeded G(N, p) sampling and a reproducible Monte-Carlo harness.

Generator discipline: every graph is drawn from numpy's PCG64 seeded by
``SeedSequence(entropy=seed, spawn_key=spawn_key)``. Monte-Carlo trial ``t``
under master seed ``s`` uses ``spawn_key=(t,)``. Pairs ``(i, j)`` with
``i < j`` are visited in row-major order and pair ``(i, j)`` is an edge iff the
next ``Generator.random()`` double is ``< p``.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np

from . import _accel
from .errors import CapExceeded, DomainError
from .graph import Graph

MAX_VERTICES = 20_000


@dataclass(frozen=True)
class GnpSpec:
    n: int
    p: float
    seed: int
    spawn_key: tuple = ()

    def __post_init__(self):
        if not 0 <= self.p <= 1:
            raise DomainError(f"p={self.p} is not a probability")
        if self.n < 0:
            raise DomainError("n must be non-negative")


def alpha_to_p(n: int, alpha) -> float:
    if n < 1:
        raise DomainError("n must be at least 1")
    a = Fraction(alpha)
    if not 0 < a <= 1:
        raise DomainError(f"alpha must lie in (0, 1], got {a}")
    return float(n) ** (-float(a))


def generator(seed: int, spawn_key: tuple = ()) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=spawn_key)))


def sample_adjacency(spec: GnpSpec, max_vertices: int = MAX_VERTICES) -> np.ndarray:
    """Boolean adjacency matrix of one G(n, p) draw."""
    n = spec.n
    if n > max_vertices:
        raise CapExceeded("sample_gnp", n, max_vertices)
    rng = generator(spec.seed, spec.spawn_key)
    a = np.zeros((n, n), dtype=bool)
    # one row at a time consumes the stream exactly like a single flat draw
    for i in range(n - 1):
        a[i, i + 1:] = rng.random(n - 1 - i) < spec.p
    return a | a.T


def sample_gnp(spec: GnpSpec, max_vertices: int = MAX_VERTICES) -> Graph:
    a = sample_adjacency(spec, max_vertices)
    iu, ju = np.nonzero(np.triu(a, 1))
    return Graph(spec.n, frozenset(zip(iu.tolist(), ju.tolist())))


# --- predicates -----------------------------------------------------------------


def contains_triangle(a: np.ndarray) -> bool:
    return _accel.has_triangle(a)


def triangle_free(a: np.ndarray) -> bool:
    return not _accel.has_triangle(a)


def contains_k4(a: np.ndarray) -> bool:
    return _accel.has_k4(a)


def always(a: np.ndarray) -> bool:
    return True


PREDICATES: dict[str, Callable[[np.ndarray], bool]] = {
    "contains_k3": contains_triangle,
    "triangle_free": triangle_free,
    "contains_k4": contains_k4,
    "always": always,
}


# --- estimates ------------------------------------------------------------------


@dataclass(frozen=True)
class McEstimate:
    trials: int
    successes: int
    frequency: float
    ci95: tuple

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ci95"] = list(self.ci95)
        return d


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054) -> tuple[float, float]:
    if trials == 0:
        return (0.0, 1.0)
    f = successes / trials
    denom = 1 + z * z / trials
    centre = (f + z * z / (2 * trials)) / denom
    half = z * math.sqrt(f * (1 - f) / trials + z * z / (4 * trials * trials)) / denom
    return (max(0.0, centre - half), min(1.0, centre + half))


class TrialError(RuntimeError):
    def __init__(self, trial: int, cause: BaseException):
        super().__init__(f"predicate failed on trial {trial}: {cause!r}")
        self.trial = trial


def _run_trial(args) -> bool:
    predicate, n, p, master_seed, t = args
    a = sample_adjacency(GnpSpec(n, p, master_seed, (t,)))
    try:
        return bool(predicate(a))
    except Exception as exc:
        raise TrialError(t, exc) from exc


def monte_carlo(
    predicate: Callable[[np.ndarray], bool] | str,
    n: int,
    p: float,
    trials: int,
    master_seed: int,
    executor=None,
    records: list | None = None,
) -> McEstimate:
    """Fraction of ``trials`` independent draws on which ``predicate`` holds.

    ``predicate`` receives the boolean adjacency matrix. Passing an
    ``executor`` (anything with ``map``) parallelises trials without changing
    the result. When ``records`` is a list, one dict per trial is appended.
    """
    if trials < 1:
        raise DomainError("trials must be at least 1")
    pid = predicate if isinstance(predicate, str) else getattr(predicate, "__name__", "predicate")
    fn = PREDICATES[predicate] if isinstance(predicate, str) else predicate
    jobs = [(fn, n, p, master_seed, t) for t in range(trials)]
    outcomes = list(executor.map(_run_trial, jobs)) if executor is not None else [_run_trial(j) for j in jobs]
    wins = sum(outcomes)
    if records is not None:
        for t, out in enumerate(outcomes):
            records.append({"trial": t, "seed": [master_seed, t], "n": n, "p": p, "predicate_id": pid, "outcome": out})
    return McEstimate(trials, wins, wins / trials, wilson_interval(wins, trials))


def dump_jsonl(rows: Iterable[dict]) -> str:
    return "".join(json.dumps(r, sort_keys=True) + "\n" for r in rows)
