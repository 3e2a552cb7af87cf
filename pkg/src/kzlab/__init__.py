"""Exact tools for first-order zero-one k-laws of sparse random graphs.

Graphs, densest subgraphs, rooted extensions, the families H_m, sparseness
certificates, seeded G(N, p) experiments, the Ehrenfeucht game and the two
game strategies.
"""
from ._accel import BACKEND
from .errors import CapExceeded, DomainError, StrategyPreconditionFailed
from .graph import Graph, density

__version__ = "0.1.0"

__all__ = ["BACKEND", "CapExceeded", "DomainError", "Graph", "StrategyPreconditionFailed", "__version__", "density"]
