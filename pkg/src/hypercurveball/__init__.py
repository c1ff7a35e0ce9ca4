"""Degree-preserving randomization of hypergraphs.

Hypercurveball trades and hyperedge shuffles, exact verification of their
stationary distributions on small spaces, and mixing-time benchmarks.
"""

from ._jit import BACKEND
from .core import (
    DegreeSequence,
    Hypergraph,
    SpaceSpec,
    canonicalize,
    classify_edges,
    degree_stats,
    degrees,
    in_space,
    stub_count,
)
from .sampling import sample
from .shuffles import hyperedge_shuffle, run_shuffle, simple_shuffle
from .trades import hypertrade, hypertrade_nodeg, hypertrade_simple, run_hypercurveball

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DegreeSequence",
    "Hypergraph",
    "SpaceSpec",
    "canonicalize",
    "classify_edges",
    "degree_stats",
    "degrees",
    "hyperedge_shuffle",
    "hypertrade",
    "hypertrade_nodeg",
    "hypertrade_simple",
    "in_space",
    "run_hypercurveball",
    "run_shuffle",
    "sample",
    "simple_shuffle",
    "stub_count",
]
