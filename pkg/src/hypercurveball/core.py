"""Hypergraph data model, hyperedge types, canonical forms and degree statistics.

A hypergraph is stored by its node incidence multisets: for every node ``v`` a
:class:`collections.Counter` mapping edge label -> multiplicity of ``v`` in
that edge (directed hypergraphs keep a ``(tail, head)`` pair of counters).
Edge labels are dense integers ``0..n_edges-1`` and carry no meaning beyond
telling hyperedges apart; the edge view is derived on demand.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

Multiset = Counter


@dataclass(frozen=True)
class SpaceSpec:
    """Which hyperedge types a hypergraph space allows.

    Self-loops only exist for directed hypergraphs; the flag is ignored for
    undirected specs.
    """

    directed: bool = False
    allow_self_loops: bool = False
    allow_degenerate: bool = False
    allow_multi: bool = False

    @classmethod
    def parse(cls, flags: str, directed: bool = False) -> "SpaceSpec":
        """Build a spec from a subset of ``"sdm"`` (e.g. ``"dm"``, ``""``)."""
        flags = flags.strip().lower()
        bad = set(flags) - set("sdm")
        if bad:
            raise ValueError(f"unknown space flags: {''.join(sorted(bad))!r}")
        if "s" in flags and not directed:
            raise ValueError("self-loops ('s') are only defined for directed hypergraphs")
        return cls(directed, "s" in flags, "d" in flags, "m" in flags)

    @property
    def flags(self) -> str:
        out = ""
        if self.directed and self.allow_self_loops:
            out += "s"
        if self.allow_degenerate:
            out += "d"
        if self.allow_multi:
            out += "m"
        return out

    @property
    def unconstrained(self) -> bool:
        return self.allow_degenerate and self.allow_multi and (
            self.allow_self_loops or not self.directed)

    @property
    def name(self) -> str:
        kind = "dir" if self.directed else "undir"
        return f"H_{{{','.join(self.flags)}}}({kind})"

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class DegreeSequence:
    """Node and edge degrees; directed entries are ``(tail, head)`` pairs."""

    node_degrees: tuple
    edge_degrees: tuple
    directed: bool = False

    def __post_init__(self):
        if self.directed:
            for i in (0, 1):
                if sum(d[i] for d in self.node_degrees) != sum(d[i] for d in self.edge_degrees):
                    side = "tail" if i == 0 else "head"
                    raise ValueError(f"{side} degree sums of nodes and edges differ")
        elif sum(self.node_degrees) != sum(self.edge_degrees):
            raise ValueError("node and edge degree sums differ")

    @property
    def total(self) -> int:
        """Total number of incidences (tail plus head when directed)."""
        if self.directed:
            return sum(t + h for t, h in self.node_degrees)
        return sum(self.node_degrees)

    def canonical(self) -> "DegreeSequence":
        """Sorted copy, ignoring node and edge order."""
        return DegreeSequence(tuple(sorted(self.node_degrees)),
                              tuple(sorted(self.edge_degrees)), self.directed)

    def __str__(self) -> str:
        def fmt(seq):
            if self.directed:
                return ",".join(f"{t}:{h}" for t, h in seq)
            return ",".join(str(d) for d in seq)
        return f"{fmt(self.node_degrees)}|{fmt(self.edge_degrees)}"


@dataclass(frozen=True)
class EdgeTypeReport:
    self_loop_labels: tuple
    degenerate_labels: tuple
    multi_edge_groups: tuple  # tuple of label tuples, each of size >= 2

    @property
    def clean(self) -> bool:
        return not (self.self_loop_labels or self.degenerate_labels or self.multi_edge_groups)


class Hypergraph:
    """Incidence-set representation of an (optionally directed) hypergraph."""

    __slots__ = ("directed", "n_edges", "node_names", "_inc")

    def __init__(self, incidence, n_edges: int, directed: bool = False,
                 node_names: Sequence[str] | None = None):
        self.directed = directed
        self.n_edges = int(n_edges)
        if directed:
            self._inc = [(Counter(t), Counter(h)) for t, h in incidence]
        else:
            self._inc = [Counter(i) for i in incidence]
        for inc in self._inc:
            for c in (inc if directed else (inc,)):
                for e, m in c.items():
                    if not 0 <= e < self.n_edges or m < 1:
                        raise ValueError(f"bad incidence entry {e}:{m}")
        if node_names is not None:
            node_names = list(node_names)
            if len(node_names) != len(self._inc):
                raise ValueError("node_names length does not match node count")
        self.node_names = node_names
        sizes = self.edge_degrees()
        empty = [e for e, s in enumerate(sizes) if (sum(s) if directed else s) == 0]
        if empty:
            raise ValueError(f"empty hyperedge label(s): {empty}")

    @classmethod
    def from_edges(cls, edges: Iterable, directed: bool = False, n_nodes: int | None = None,
                   node_names: Sequence[str] | None = None) -> "Hypergraph":
        """Build from hyperedges given as node-index lists (``(tail, head)`` when directed).

        Repeating a node inside an edge encodes its multiplicity.
        """
        edges = list(edges)
        top = -1
        for e in edges:
            for part in (e if directed else (e,)):
                for v in part:
                    top = max(top, v)
        if n_nodes is None:
            n_nodes = len(node_names) if node_names is not None else top + 1
        if top >= n_nodes:
            raise ValueError("edge references a node outside the node range")
        if directed:
            inc = [(Counter(), Counter()) for _ in range(n_nodes)]
            for label, (tail, head) in enumerate(edges):
                for v in tail:
                    inc[v][0][label] += 1
                for v in head:
                    inc[v][1][label] += 1
        else:
            inc = [Counter() for _ in range(n_nodes)]
            for label, e in enumerate(edges):
                for v in e:
                    inc[v][label] += 1
        return cls(inc, len(edges), directed, node_names)

    @property
    def n_nodes(self) -> int:
        return len(self._inc)

    def incidence(self, v: int):
        """Incidence multiset of node ``v`` (pair of multisets when directed)."""
        return self._inc[v]

    def edges(self) -> list:
        """Derived edge view: per label a Counter node -> multiplicity (pairs when directed)."""
        if self.directed:
            out = [(Counter(), Counter()) for _ in range(self.n_edges)]
            for v, (t, h) in enumerate(self._inc):
                for e, m in t.items():
                    out[e][0][v] = m
                for e, m in h.items():
                    out[e][1][v] = m
        else:
            out = [Counter() for _ in range(self.n_edges)]
            for v, inc in enumerate(self._inc):
                for e, m in inc.items():
                    out[e][v] = m
        return out

    def node_degrees(self) -> list:
        if self.directed:
            return [(sum(t.values()), sum(h.values())) for t, h in self._inc]
        return [sum(i.values()) for i in self._inc]

    def edge_degrees(self) -> list:
        if self.directed:
            out = [[0, 0] for _ in range(self.n_edges)]
            for t, h in self._inc:
                for e, m in t.items():
                    out[e][0] += m
                for e, m in h.items():
                    out[e][1] += m
            return [tuple(x) for x in out]
        out = [0] * self.n_edges
        for inc in self._inc:
            for e, m in inc.items():
                out[e] += m
        return out

    def copy(self) -> "Hypergraph":
        return Hypergraph(self._inc, self.n_edges, self.directed, self.node_names)

    def name_of(self, v: int) -> str:
        return self.node_names[v] if self.node_names is not None else f"v{v}"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return (self.directed == other.directed and self.n_edges == other.n_edges
                and self._inc == other._inc)

    def __repr__(self) -> str:
        kind = "directed " if self.directed else ""
        return f"<{kind}Hypergraph |V|={self.n_nodes} |E|={self.n_edges}>"


def degrees(H: Hypergraph) -> DegreeSequence:
    return DegreeSequence(tuple(H.node_degrees()), tuple(H.edge_degrees()), H.directed)


def edge_key(edge, directed: bool) -> tuple:
    """Sorted ``(node, multiplicity)`` serialization of one derived hyperedge."""
    if directed:
        return (tuple(sorted(edge[0].items())), tuple(sorted(edge[1].items())))
    return tuple(sorted(edge.items()))


def classify_edges(H: Hypergraph) -> EdgeTypeReport:
    loops, degen = [], []
    groups: dict = {}
    for label, edge in enumerate(H.edges()):
        parts = edge if H.directed else (edge,)
        if any(m >= 2 for part in parts for m in part.values()):
            degen.append(label)
        if H.directed and edge[0] == edge[1]:
            loops.append(label)
        groups.setdefault(edge_key(edge, H.directed), []).append(label)
    multi = tuple(sorted(tuple(g) for g in groups.values() if len(g) >= 2))
    return EdgeTypeReport(tuple(loops), tuple(degen), multi)


def in_space(H: Hypergraph, spec: SpaceSpec) -> bool:
    if H.directed != spec.directed:
        raise ValueError("directedness of hypergraph and space differ")
    report = classify_edges(H)
    if report.degenerate_labels and not spec.allow_degenerate:
        return False
    if report.multi_edge_groups and not spec.allow_multi:
        return False
    if spec.directed and report.self_loop_labels and not spec.allow_self_loops:
        return False
    return True


def canonicalize(H: Hypergraph) -> tuple:
    """Label-free normal form: the sorted tuple of serialized hyperedges."""
    return tuple(sorted(edge_key(e, H.directed) for e in H.edges()))


def from_canonical(state: tuple, n_nodes: int, directed: bool = False,
                   node_names: Sequence[str] | None = None) -> Hypergraph:
    """Representative hypergraph of a canonical state (labels in sorted order)."""
    if directed:
        edges = [([v for v, m in t for _ in range(m)], [v for v, m in h for _ in range(m)])
                 for t, h in state]
    else:
        edges = [[v for v, m in e for _ in range(m)] for e in state]
    return Hypergraph.from_edges(edges, directed, n_nodes=n_nodes, node_names=node_names)


def stub_count(H: Hypergraph) -> int:
    """Number of stub-labeled configurations realizing the unlabeled hypergraph ``H``.

    Nodes' degree units are distinguishable stubs; hyperedges are unlabeled, so
    identical hyperedges are divided out once per full (directed) edge.
    """
    num = 1
    for d in H.node_degrees():
        for x in (d if H.directed else (d,)):
            num *= math.factorial(x)
    den = 1
    for edge in H.edges():
        for part in (edge if H.directed else (edge,)):
            for m in part.values():
                den *= math.factorial(m)
    for g in Counter(canonicalize(H)).values():
        den *= math.factorial(g)
    q, r = divmod(num, den)
    assert r == 0
    return q


@dataclass(frozen=True)
class DegreeStats:
    count: int
    mean: float
    median: float
    expected_min_pair: float | None
    f_min: float | None


@dataclass(frozen=True)
class DirectedDegreeStats:
    tail: DegreeStats
    head: DegreeStats
    f_min: float | None = field(default=None)

    @property
    def count(self) -> int:
        return self.tail.count

    @property
    def expected_min_pair(self) -> float | None:
        """Tail/head average, used when comparing node and edge sides."""
        if self.tail.expected_min_pair is None or self.head.expected_min_pair is None:
            return None
        return 0.5 * (self.tail.expected_min_pair + self.head.expected_min_pair)


def expected_min_pair(seq: Sequence[int]) -> float:
    """E[min(d_i, d_j)] over two distinct items drawn without replacement."""
    n = len(seq)
    if n < 2:
        raise ValueError("need at least two degrees")
    s = sorted(seq)
    # k-th smallest is the minimum of every pair with a later element
    total = sum(d * (n - 1 - k) for k, d in enumerate(s))
    return total / (n * (n - 1) / 2)


def f_min(seq: Sequence[int]) -> float:
    """Minimal number of pair moves touching every incidence: n * mean / (2 E[min])."""
    emin = expected_min_pair(seq)
    if emin == 0:
        raise ValueError("expected minimum degree is zero; f_min undefined")
    return sum(seq) / (2.0 * emin)


def median(seq: Sequence[int]) -> float:
    s = sorted(seq)
    n = len(s)
    if n == 0:
        raise ValueError("empty sequence")
    mid = n // 2
    if n % 2:
        return float(s[mid])
    return 0.5 * (s[mid - 1] + s[mid])


def degree_stats(seq: Sequence[int]) -> DegreeStats:
    """Count, mean, median, E[min of two] and f_min of a scalar degree sequence.

    The last two are ``None`` when undefined (fewer than two items, or a zero
    expected minimum for f_min).
    """
    seq = list(seq)
    if not seq:
        raise ValueError("empty degree sequence")
    n = len(seq)
    emin = expected_min_pair(seq) if n >= 2 else None
    fm = sum(seq) / (2.0 * emin) if emin else None
    return DegreeStats(n, sum(seq) / n, median(seq), emin, fm)


def directed_degree_stats(seq: Sequence[tuple]) -> DirectedDegreeStats:
    tail = degree_stats([t for t, _ in seq])
    head = degree_stats([h for _, h in seq])
    fm = None
    if tail.f_min is not None and head.f_min is not None:
        fm = 0.5 * (tail.f_min + head.f_min)
    return DirectedDegreeStats(tail, head, fm)


def side_stats(seq: Sequence, directed: bool):
    return directed_degree_stats(seq) if directed else degree_stats(seq)
