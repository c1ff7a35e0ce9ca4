"""Artificial benchmark hypergraphs, a plain-text hypergraph format, and degree reports.

File format: one hyperedge per line, whitespace-separated node names, a
repeated name meaning multiplicity. Directed lines split tail and head with a
single ``->`` token. ``#`` starts a comment line; ``# nodes: a b c`` declares
the node order (and nodes that appear in no hyperedge).
"""

from __future__ import annotations

import csv
from collections import Counter
from pathlib import Path

from .core import Hypergraph, classify_edges, side_stats


# ---------------------------------------------------------------------------
# artificial datasets
# ---------------------------------------------------------------------------

def _edge(*terms) -> list:
    """``_edge((2, 5), (1, 7))`` is the hyperedge {2 v5, v7}; zero multiplicities are dropped."""
    out = []
    for mult, v in terms:
        out += [v] * mult
    return out


def _dataset_1() -> list:
    E = []
    for i in range(3):
        E += [_edge((2, i))] * 8
    E.append(_edge((2, 3)))
    for i in range(4):
        E.append(_edge((14, 3 + i), (16, 7 + 8 * i)))
    for i in range(3):
        E.append(_edge((2, 4 + i), (16, 14 + 8 * i), (12, 47 + i)))
    for j in range(3):
        for i in range(6):
            E.append(_edge((16, 8 * (j + 1) + i), (2 * i, 29 + j + 3 * i), (14 - 2 * i, 32 + j + 3 * i)))
    E.append(_edge((30, 50)))
    return E


def _dataset_23(small: int, block: int, big: int) -> list:
    """Datasets 2 and 3 share one construction.

    ``small`` degree-1 nodes fall into blocks of ``block`` nodes; ``small``
    further nodes get degree ``big`` = 2*block - 1 and so does one last node.
    """
    E = [list(range(block * i, block * i + block)) for i in range(small // block)]
    E += [_edge((block, small + i)) for i in range(small)]
    k = block - 1
    for j in range(small // block):
        for i in range(k):
            E.append(_edge((k, small + i + k * j), (1, 2 * small - 1 - j)))
    E.append(_edge((big, 2 * small)))
    return E


_EXPECTED = {
    1: ({16: 50, 30: 1}, {2: 25, 30: 26}),
    2: ({1: 500, 99: 501}, {50: 1000, 99: 1}),
    3: ({1: 250, 49: 251}, {25: 500, 49: 1}),
}


def gen_artificial(which: int) -> Hypergraph:
    """One of the three artificial benchmark hypergraphs (degenerate hyperedges included)."""
    if which == 1:
        edges = _dataset_1()
    elif which == 2:
        edges = _dataset_23(500, 50, 99)
    elif which == 3:
        edges = _dataset_23(250, 25, 49)
    else:
        raise ValueError("artificial dataset must be 1, 2 or 3")
    H = Hypergraph.from_edges(edges)
    nodes, hedges = _EXPECTED[which]
    assert Counter(H.node_degrees()) == nodes, "node degrees differ from the construction"
    assert Counter(H.edge_degrees()) == hedges, "edge degrees differ from the construction"
    return H


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------

class HypergraphFormatError(ValueError):
    def __init__(self, line: int, msg: str):
        super().__init__(f"line {line}: {msg}")
        self.line = line


def parse_hypergraph(text: str, directed: bool = False) -> Hypergraph:
    names: list = []
    index: dict = {}

    def node(tok):
        if tok not in index:
            index[tok] = len(names)
            names.append(tok)
        return index[tok]

    edges = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.lower().startswith("nodes:"):
                for tok in body[6:].split():
                    if tok in index:
                        raise HypergraphFormatError(ln, f"node {tok!r} declared twice")
                    node(tok)
            continue
        toks = line.split()
        if directed:
            if toks.count("->") != 1:
                raise HypergraphFormatError(ln, "directed hyperedge needs exactly one '->'")
            k = toks.index("->")
            tail, head = toks[:k], toks[k + 1:]
            if not tail and not head:
                raise HypergraphFormatError(ln, "empty hyperedge")
            edges.append(([node(t) for t in tail], [node(t) for t in head]))
        else:
            if "->" in toks:
                raise HypergraphFormatError(ln, "'->' in an undirected hypergraph")
            edges.append([node(t) for t in toks])
    if not edges:
        raise HypergraphFormatError(0, "no hyperedges")
    return Hypergraph.from_edges(edges, directed, n_nodes=len(names), node_names=names)


def read_hypergraph(path, directed: bool = False) -> Hypergraph:
    return parse_hypergraph(Path(path).read_text(), directed)


def format_hypergraph(H: Hypergraph) -> str:
    """Normalized text: node header, then one line per hyperedge label, tokens in node order."""
    names = [H.name_of(v) for v in range(H.n_nodes)]
    bad = [n for n in names if not n or n == "->" or n.startswith("#") or any(c.isspace() for c in n)]
    if bad:
        raise ValueError(f"node names not representable in the text format: {bad[:3]}")

    def side(c: Counter) -> list:
        return [names[v] for v in sorted(c) for _ in range(c[v])]

    lines = ["# nodes: " + " ".join(names)]
    for e in H.edges():
        if H.directed:
            lines.append(" ".join(side(e[0]) + ["->"] + side(e[1])))
        else:
            lines.append(" ".join(side(e)))
    return "\n".join(lines) + "\n"


def write_hypergraph(H: Hypergraph, path) -> None:
    Path(path).write_text(format_hypergraph(H))


# ---------------------------------------------------------------------------
# statistics
# ---------------------------------------------------------------------------

STATS_COLUMNS = ("dataset", "side", "role", "count", "mean", "median", "expected_min", "f_min")


def _fmt(x) -> str:
    return "" if x is None else f"{x:.2f}"


def stats_rows(H: Hypergraph, dataset: str = "") -> list[tuple]:
    """Table rows (nodes, hyperedges) with count, mean, median and E[min] per role.

    Directed hypergraphs yield one row per side and role (tail, head).
    """
    rows = []
    for side, seq in (("nodes", H.node_degrees()), ("edges", H.edge_degrees())):
        st = side_stats(seq, H.directed)
        parts = [("tail", st.tail), ("head", st.head)] if H.directed else [("all", st)]
        for role, s in parts:
            rows.append((dataset, side, role, s.count, _fmt(s.mean), _fmt(s.median),
                         _fmt(s.expected_min_pair), _fmt(s.f_min)))
    return rows


def stats_report(H: Hypergraph, dataset: str = "", fh=None) -> str | None:
    """CSV degree report followed by edge-type counts as comment lines."""
    import io

    out = io.StringIO() if fh is None else fh
    w = csv.writer(out, lineterminator="\n")
    w.writerow(STATS_COLUMNS)
    w.writerows(stats_rows(H, dataset))
    rep = classify_edges(H)
    out.write(f"# self_loops={len(rep.self_loop_labels)} degenerate={len(rep.degenerate_labels)} "
              f"multi_groups={len(rep.multi_edge_groups)}\n")
    return out.getvalue() if fh is None else None
