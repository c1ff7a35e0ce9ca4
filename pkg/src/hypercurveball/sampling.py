"""One entry point for running either chain, picking the fastest available path.

Unconstrained spaces run on the compiled stub-row kernels; constrained spaces
need rejection checks and go through the Python drivers.
"""

from __future__ import annotations

from .core import Hypergraph, SpaceSpec, in_space
from .kernels import run_pair_chain, stub_rows, to_hypergraph
from .shuffles import run_shuffle
from .trades import run_hypercurveball

METHODS = ("trade", "shuffle")


def _check(H0: Hypergraph, spec: SpaceSpec, method: str):
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}")
    if H0.directed != spec.directed:
        raise ValueError("directedness of hypergraph and space differ")
    if not in_space(H0, spec):
        raise ValueError(f"initial hypergraph is not in {spec.name}")


def sample(H0: Hypergraph, spec: SpaceSpec, method: str, steps: int, seed: int,
           use_kernel: bool | None = None) -> Hypergraph:
    """Run ``steps`` steps of ``method`` from ``H0`` and return the end state."""
    _check(H0, spec, method)
    if use_kernel is None:
        use_kernel = spec.unconstrained
    if use_kernel:
        if not spec.unconstrained:
            raise ValueError("kernel path only handles unconstrained spaces")
        rows = stub_rows(H0, by="node" if method == "trade" else "edge")
        if steps > 0 and rows.n_rows < 2:
            raise ValueError("need at least two rows to pair")
        run_pair_chain(rows, steps, seed)
        return to_hypergraph(rows, H0.node_names)
    runner = run_hypercurveball if method == "trade" else run_shuffle
    return runner(H0, spec, steps, seed)
