"""Hypercurveball moves and the sampling driver.

The three trade variants repartition the incidence multisets of two nodes:

* :func:`hypertrade` splits ``I_v + I_w`` uniformly at stub level;
* :func:`hypertrade_nodeg` keeps shared labels fixed and splits only the
  symmetric difference as sets, so no degenerate hyperedge is created;
* :func:`hypertrade_simple` additionally pins pairs of labels that would
  become multi-hyperedges if they ended up at the same node.

Spaces the trade variants cannot respect directly are handled by proposing a
trade and rejecting it if it introduces a forbidden hyperedge type. A rejected
trade still counts as a step.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import Hypergraph, SpaceSpec, edge_key, in_space

Observer = Callable[[int, Hypergraph], None]


def make_rng(seed=None) -> np.random.Generator:
    """Seedable stream used by the pure-Python samplers."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass
class TradeOutcome:
    """Result of one pair move; ``first``/``second`` are the two new multisets.

    For trades these are the incidence multisets of the two nodes, for
    shuffles the contents of the two hyperedges (pairs when directed).
    """

    accepted: bool
    first: object
    second: object


def uniform_split(combined: Counter, k: int, rng) -> tuple[Counter, Counter]:
    """Split a multiset into parts of size ``k`` and ``|combined| - k``.

    Every one of the C(n, k) stub-level splits is equally likely, so a
    multiset outcome has probability proportional to its number of stub
    splits.
    """
    stubs = sorted(combined.elements())
    n = len(stubs)
    if not 0 <= k <= n:
        raise ValueError(f"cannot take {k} items from a multiset of size {n}")
    if k == 0 or k == n:
        whole = Counter(stubs)
        return (whole, Counter()) if k == n else (Counter(), whole)
    order = rng.permutation(n)
    first = Counter(stubs[i] for i in order[:k])
    second = Counter(stubs[i] for i in order[k:])
    return first, second


def _sides(H: Hypergraph, v: int, w: int):
    if v == w:
        raise ValueError("a trade needs two distinct nodes")
    if not (0 <= v < H.n_nodes and 0 <= w < H.n_nodes):
        raise ValueError("unknown node")
    Iv, Iw = H.incidence(v), H.incidence(w)
    return (list(zip(Iv, Iw)) if H.directed else [(Iv, Iw)])


def _pack_sides(H: Hypergraph, parts):
    if H.directed:
        return TradeOutcome(True, (parts[0][0], parts[1][0]), (parts[0][1], parts[1][1]))
    return TradeOutcome(True, parts[0][0], parts[0][1])


def hypertrade(H: Hypergraph, v: int, w: int, rng) -> TradeOutcome:
    """Unrestricted trade: tails first, then heads for directed hypergraphs."""
    parts = []
    for I, J in _sides(H, v, w):
        parts.append(uniform_split(I + J, sum(I.values()), rng))
    return _pack_sides(H, parts)


def _check_simple_sets(I: Counter, J: Counter):
    if any(m > 1 for m in I.values()) or any(m > 1 for m in J.values()):
        raise ValueError("degenerate hyperedge at a traded node; use hypertrade instead")


def _split_free(I_only, J_only, k, rng):
    pool = sorted(I_only | J_only)
    order = rng.permutation(len(pool)) if pool else []
    chosen = [pool[i] for i in order]
    return chosen[:k], chosen[k:]


def _nodeg_side(I: Counter, J: Counter, rng):
    _check_simple_sets(I, J)
    shared = set(I) & set(J)
    I_only = set(I) - shared
    J_only = set(J) - shared
    a, b = _split_free(I_only, J_only, len(I_only), rng)
    return Counter(list(shared) + a), Counter(list(shared) + b)


def hypertrade_nodeg(H: Hypergraph, v: int, w: int, rng) -> TradeOutcome:
    """Trade that never places a label twice at one node."""
    return _pack_sides(H, [_nodeg_side(I, J, rng) for I, J in _sides(H, v, w)])


def potential_multi_pairs(edges, I: Counter, J: Counter, v: int, w: int) -> list[tuple[int, int]]:
    """Label pairs (x at v only, y at w only) that agree on every other node.

    Such a pair would become a multi-hyperedge if both labels landed at the
    same traded node.
    """
    shared = set(I) & set(J)
    by_sig_v: dict = {}
    by_sig_w: dict = {}
    for x in set(I) - shared:
        sig = frozenset(u for u in edges[x] if u != v)
        if sig in by_sig_v:
            raise ValueError(f"labels {by_sig_v[sig]} and {x} are already multi-hyperedges")
        by_sig_v[sig] = x
    for y in set(J) - shared:
        sig = frozenset(u for u in edges[y] if u != w)
        if sig in by_sig_w:
            raise ValueError(f"labels {by_sig_w[sig]} and {y} are already multi-hyperedges")
        by_sig_w[sig] = y
    return sorted((x, by_sig_w[s]) for s, x in by_sig_v.items() if s in by_sig_w)


def _simple_trade(edges, I: Counter, J: Counter, v: int, w: int, rng):
    _check_simple_sets(I, J)
    pairs = potential_multi_pairs(edges, I, J, v, w)
    shared = set(I) & set(J)
    first, second = list(shared), list(shared)
    pinned = set()
    for x, y in pairs:
        pinned.update((x, y))
        if rng.random() < 0.5:
            first.append(x)
            second.append(y)
        else:
            first.append(y)
            second.append(x)
    I_free = set(I) - shared - pinned
    J_free = set(J) - shared - pinned
    a, b = _split_free(I_free, J_free, len(I_free), rng)
    return Counter(first + a), Counter(second + b)


def hypertrade_simple(H: Hypergraph, v: int, w: int, rng) -> TradeOutcome:
    """Trade for undirected spaces without degenerate and multi-hyperedges."""
    if H.directed:
        raise ValueError("hypertrade_simple is defined for undirected hypergraphs only")
    (I, J), = _sides(H, v, w)
    first, second = _simple_trade(H.edges(), I, J, v, w, rng)
    return TradeOutcome(True, first, second)


def trade_variant(spec: SpaceSpec) -> str:
    """Name of the trade proposal used for a space: 'full', 'nodeg' or 'simple'."""
    if not spec.directed and not spec.allow_degenerate and not spec.allow_multi:
        return "simple"
    return "full" if spec.allow_degenerate else "nodeg"


def trade_checks(spec: SpaceSpec) -> frozenset:
    """Hyperedge types the driver must reject after a trade proposal.

    Mirrors the space-to-algorithm table: degeneracy is always handled by the
    proposal itself; self-loops and multi-hyperedges are checked afterwards
    where the proposal cannot avoid them.
    """
    checks = set()
    if spec.directed and not spec.allow_self_loops:
        checks.add("s")
    if not spec.allow_multi and trade_variant(spec) != "simple":
        checks.add("m")
    return frozenset(checks)


class ChainState:
    """Mutable working copy of a hypergraph with both incidence and edge views.

    ``H`` is updated in place and is what observers receive.
    """

    def __init__(self, H0: Hypergraph, track_multi: bool):
        self.H = H0.copy()
        self.directed = H0.directed
        self.edges = self.H.edges()
        self.sigs = Counter(edge_key(e, self.directed) for e in self.edges) if track_multi else None

    # -- candidate construction -------------------------------------------------
    def edges_after_trade(self, v, w, new_v, new_w) -> dict:
        """New contents of every label touched by giving v/w the new multisets."""
        out = {}
        if self.directed:
            old_v, old_w = self.H.incidence(v), self.H.incidence(w)
            labels = set(old_v[0]) | set(old_v[1]) | set(old_w[0]) | set(old_w[1])
            for e in labels:
                t, h = Counter(self.edges[e][0]), Counter(self.edges[e][1])
                for side, c in ((0, t), (1, h)):
                    c[v] = new_v[side][e]
                    c[w] = new_w[side][e]
                out[e] = (+t, +h)
        else:
            labels = set(self.H.incidence(v)) | set(self.H.incidence(w))
            for e in labels:
                c = Counter(self.edges[e])
                c[v] = new_v[e]
                c[w] = new_w[e]
                out[e] = +c
        return out

    def violates(self, new_edges: dict, checks) -> bool:
        for e, edge in new_edges.items():
            parts = edge if self.directed else (edge,)
            if "d" in checks and any(m >= 2 for p in parts for m in p.values()):
                return True
            if "s" in checks and edge[0] == edge[1]:
                return True
        if "m" in checks:
            new_keys = Counter(edge_key(edge, self.directed) for edge in new_edges.values())
            old_keys = Counter(edge_key(self.edges[e], self.directed) for e in new_edges)
            for k, c in new_keys.items():
                if c > 1 or self.sigs[k] - old_keys[k] > 0:
                    return True
        return False

    # -- commits ----------------------------------------------------------------
    def _commit_edges(self, new_edges: dict):
        if self.sigs is not None:
            for e, edge in new_edges.items():
                self.sigs[edge_key(self.edges[e], self.directed)] -= 1
                self.sigs[edge_key(edge, self.directed)] += 1
            self.sigs = +self.sigs
        for e, edge in new_edges.items():
            self.edges[e] = edge

    def commit_trade(self, v, w, new_v, new_w, new_edges):
        self._commit_edges(new_edges)
        inc = self.H._inc
        if self.directed:
            inc[v] = (Counter(new_v[0]), Counter(new_v[1]))
            inc[w] = (Counter(new_w[0]), Counter(new_w[1]))
        else:
            inc[v] = Counter(new_v)
            inc[w] = Counter(new_w)

    def commit_shuffle(self, e, f, new_e, new_f):
        old = {e: self.edges[e], f: self.edges[f]}
        self._commit_edges({e: new_e, f: new_f})
        inc = self.H._inc
        for label, edge in ((e, new_e), (f, new_f)):
            before = old[label]
            if self.directed:
                for side in (0, 1):
                    for u in set(before[side]) | set(edge[side]):
                        m = edge[side][u]
                        if m:
                            inc[u][side][label] = m
                        else:
                            inc[u][side].pop(label, None)
            else:
                for u in set(before) | set(edge):
                    m = edge[u]
                    if m:
                        inc[u][label] = m
                    else:
                        inc[u].pop(label, None)


def _propose_trade(state: ChainState, variant: str, v: int, w: int, rng):
    H = state.H
    if variant == "full":
        out = hypertrade(H, v, w, rng)
    elif variant == "nodeg":
        out = hypertrade_nodeg(H, v, w, rng)
    else:
        (I, J), = _sides(H, v, w)
        first, second = _simple_trade(state.edges, I, J, v, w, rng)
        out = TradeOutcome(True, first, second)
    return out


def pick_pair(n: int, rng) -> tuple[int, int]:
    """Uniform unordered pair of distinct indices from ``range(n)``."""
    a = int(rng.integers(n))
    b = int(rng.integers(n - 1))
    if b >= a:
        b += 1
    return a, b


def run_hypercurveball(H0: Hypergraph, spec: SpaceSpec, N: int, rng=None,
                       observer: Observer | None = None, full_check: bool = False) -> Hypergraph:
    """Perform ``N`` trade steps from ``H0`` inside the space ``spec``.

    Each step picks an unordered pair of distinct nodes uniformly, proposes a
    trade with the variant suited to the space and rejects it if it creates a
    forbidden hyperedge type. ``observer(step, H)`` is called after every step
    with the live working hypergraph (do not mutate it). ``full_check``
    re-validates each decision with a full scan of the candidate hypergraph.
    """
    rng = make_rng(rng)
    if H0.directed != spec.directed:
        raise ValueError("directedness of hypergraph and space differ")
    if not in_space(H0, spec):
        raise ValueError(f"initial hypergraph is not in {spec.name}")
    if N > 0 and H0.n_nodes < 2:
        raise ValueError("need at least two nodes")
    variant = trade_variant(spec)
    checks = trade_checks(spec)
    state = ChainState(H0, "m" in checks)
    for step in range(1, N + 1):
        v, w = pick_pair(H0.n_nodes, rng)
        out = _propose_trade(state, variant, v, w, rng)
        new_edges = state.edges_after_trade(v, w, out.first, out.second)
        ok = not state.violates(new_edges, checks)
        if full_check:
            cand = state.H.copy()
            cand._inc[v], cand._inc[w] = out.first, out.second
            if ok != in_space(cand, spec):
                raise AssertionError("local rejection check disagrees with full scan")
        if ok:
            state.commit_trade(v, w, out.first, out.second, new_edges)
        if observer is not None:
            observer(step, state.H)
    return state.H
