"""Curated synthetic instances shared by the CLI and the test suite."""
from __future__ import annotations

from .graph import Graph


def spider(legs) -> Graph:
    """Paths of the given lengths glued at vertex 0."""
    es = []
    n = 1
    for length in legs:
        prev = 0
        for _ in range(length):
            es.append((prev, n))
            prev = n
            n += 1
    return Graph.from_edges(n, es)


# sparse pairs on which the checked Duplicator strategy runs to completion for k = 3, rho = 29/23
_CONSERVATOR_SUITE = [
    ("C10", "C11"), ("C10", "C12"), ("C11", "C12"), ("C12", "C12"),
    ("P10", "P10"), ("P10", "P11"), ("P10", "P12"), ("P10", "P8"), ("P10", "P9"),
    ("P11", "P11"), ("P11", "P12"), ("P11", "P9"), ("P12", "P12"), ("P12", "P9"), ("P9", "P9"),
    ("S2,4,5", "S4,4,2"), ("S3,3,5", "S4,4,3"), ("S3,3,5", "S5,5"), ("S3,4,4", "S3,4,4"),
    ("S3,4,4", "S4,4,3"), ("S3,4,4", "S5,5"), ("S4,4,2", "S4,4,2"), ("S4,4,3", "S4,4,3"),
    ("S4,4,3", "S5,5"), ("S5,5", "S5,5"), ("S5,5,1", "S5,5,1"),
]


def named_graph(name: str) -> Graph:
    kind, rest = name[0], name[1:]
    if kind == "C":
        return Graph.cycle(int(rest))
    if kind == "P":
        return Graph.path(int(rest))
    if kind == "S":
        return spider(int(x) for x in rest.split(","))
    raise ValueError(f"unknown graph name {name!r}")


def conservator_suite() -> list[tuple[str, Graph, Graph]]:
    return [(f"{a}|{b}", named_graph(a), named_graph(b)) for a, b in _CONSERVATOR_SUITE]
