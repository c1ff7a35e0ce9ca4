"""Hyperedge-shuffle baseline: repartition the contents of two hyperedges."""

from __future__ import annotations

from collections import Counter

from .core import Hypergraph, SpaceSpec, in_space
from .trades import ChainState, Observer, TradeOutcome, make_rng, pick_pair, uniform_split


def _edge_pair(H: Hypergraph, e: int, f: int, edges=None):
    if e == f:
        raise ValueError("a shuffle needs two distinct hyperedges")
    if not (0 <= e < H.n_edges and 0 <= f < H.n_edges):
        raise ValueError("unknown hyperedge label")
    edges = H.edges() if edges is None else edges
    return edges[e], edges[f]


def _shuffle_contents(a, b, directed: bool, rng):
    if directed:
        t1, t2 = uniform_split(a[0] + b[0], sum(a[0].values()), rng)
        h1, h2 = uniform_split(a[1] + b[1], sum(a[1].values()), rng)
        return (t1, h1), (t2, h2)
    return uniform_split(a + b, sum(a.values()), rng)


def hyperedge_shuffle(H: Hypergraph, e: int, f: int, rng, edges=None) -> TradeOutcome:
    """Split ``e + f`` uniformly at stub level into parts of sizes |e| and |f|.

    Directed hyperedges shuffle tails and heads independently. ``first`` and
    ``second`` in the outcome are the new contents of ``e`` and ``f``.
    """
    a, b = _edge_pair(H, e, f, edges)
    first, second = _shuffle_contents(a, b, H.directed, rng)
    return TradeOutcome(True, first, second)


def simple_shuffle(H: Hypergraph, e: int, f: int, a: int, b: int, side: str = "tail") -> Hypergraph:
    """Exchange one incidence: node ``a`` leaves ``e`` for ``f`` and ``b`` the reverse.

    For directed hypergraphs ``side`` selects whether the exchange happens in
    the tails or the heads.
    """
    edges = H.edges()
    ce, cf = edges[e], edges[f]
    if H.directed:
        k = {"tail": 0, "head": 1}[side]
        ce, cf = ce[k], cf[k]
    if ce[a] < 1 or cf[b] < 1:
        raise ValueError("simple shuffle needs a in e and b in f (same role)")
    if e == f:
        raise ValueError("a shuffle needs two distinct hyperedges")
    ce[a] -= 1
    ce[b] += 1
    cf[b] -= 1
    cf[a] += 1
    new_edges = []
    for edge in edges:
        if H.directed:
            new_edges.append((list((+edge[0]).elements()), list((+edge[1]).elements())))
        else:
            new_edges.append(list((+edge).elements()))
    return Hypergraph.from_edges(new_edges, H.directed, n_nodes=H.n_nodes, node_names=H.node_names)


def shuffle_checks(spec: SpaceSpec) -> frozenset:
    """Every forbidden type is rejected after the proposal."""
    checks = set()
    if not spec.allow_degenerate:
        checks.add("d")
    if not spec.allow_multi:
        checks.add("m")
    if spec.directed and not spec.allow_self_loops:
        checks.add("s")
    return frozenset(checks)


def run_shuffle(H0: Hypergraph, spec: SpaceSpec, N: int, rng=None,
                observer: Observer | None = None, full_check: bool = False) -> Hypergraph:
    """Perform ``N`` hyperedge-shuffle steps from ``H0`` inside ``spec``.

    Each step picks an unordered pair of distinct hyperedge labels uniformly;
    proposals that create a forbidden type among the two shuffled hyperedges
    are rejected and still count as a step.
    """
    rng = make_rng(rng)
    if H0.directed != spec.directed:
        raise ValueError("directedness of hypergraph and space differ")
    if not in_space(H0, spec):
        raise ValueError(f"initial hypergraph is not in {spec.name}")
    if N > 0 and H0.n_edges < 2:
        raise ValueError("need at least two hyperedges")
    checks = shuffle_checks(spec)
    state = ChainState(H0, "m" in checks)
    for step in range(1, N + 1):
        e, f = pick_pair(H0.n_edges, rng)
        new_e, new_f = _shuffle_contents(state.edges[e], state.edges[f], H0.directed, rng)
        new_edges = {e: new_e, f: new_f}
        ok = not state.violates(new_edges, checks)
        if full_check:
            cand = list(state.edges)
            cand[e], cand[f] = new_e, new_f
            if H0.directed:
                cand_edges = [(list(t.elements()), list(h.elements())) for t, h in cand]
            else:
                cand_edges = [list(c.elements()) for c in cand]
            full = in_space(Hypergraph.from_edges(cand_edges, H0.directed, n_nodes=H0.n_nodes), spec)
            if ok != full:
                raise AssertionError("local rejection check disagrees with full scan")
        if ok:
            state.commit_shuffle(e, f, new_e, new_f)
        if observer is not None:
            observer(step, state.H)
    return state.H


def transpose(H: Hypergraph) -> Hypergraph:
    """Swap the roles of nodes and hyperedges of an undirected hypergraph."""
    if H.directed:
        raise ValueError("transpose is defined for undirected hypergraphs")
    return Hypergraph([Counter(e) for e in H.edges()], H.n_nodes, False)
