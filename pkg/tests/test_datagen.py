from collections import Counter

import pytest

from hypercurveball.core import degrees
from hypercurveball.datagen import (
    HypergraphFormatError,
    format_hypergraph,
    gen_artificial,
    parse_hypergraph,
    read_hypergraph,
    stats_report,
    stats_rows,
    write_hypergraph,
)


@pytest.mark.parametrize("which,n,m,total", [(1, 51, 51, 830), (2, 1001, 1001, 50099), (3, 501, 501, 12549)])
def test_artificial_sizes(which, n, m, total):
    H = gen_artificial(which)
    d = degrees(H)
    assert (H.n_nodes, H.n_edges, d.total) == (n, m, total)


def test_artificial_deterministic():
    assert gen_artificial(3) == gen_artificial(3)


def test_unknown_dataset():
    with pytest.raises(ValueError):
        gen_artificial(4)


@pytest.mark.parametrize("which,node_row,edge_row", [
    (1, ("51", "16.27", "16.00", "16.00"), ("51", "16.27", "30.00", "9.14")),
    (2, ("1001", "50.05", "99.00", "25.52"), ("1001", "50.05", "50.00", "50.00")),
    (3, ("501", "25.05", "49.00", "13.02"), ("501", "25.05", "25.00", "25.00")),
])
def test_stats_rows(which, node_row, edge_row):
    rows = stats_rows(gen_artificial(which), f"artificial_{which}")
    assert [r[1:3] for r in rows] == [("nodes", "all"), ("edges", "all")]
    assert tuple(str(x) for x in rows[0][3:7]) == node_row
    assert tuple(str(x) for x in rows[1][3:7]) == edge_row


def test_stats_report_directed():
    H = parse_hypergraph("H2 H2 O2 -> H2O H2O\nH2O -> H2\n", directed=True)
    text = stats_report(H, "water")
    lines = text.splitlines()
    assert lines[0] == "dataset,side,role,count,mean,median,expected_min,f_min"
    assert [ln.split(",")[1:3] for ln in lines[1:5]] == [
        ["nodes", "tail"], ["nodes", "head"], ["edges", "tail"], ["edges", "head"]]
    assert lines[-1] == "# self_loops=0 degenerate=1 multi_groups=0"


class TestParse:
    def test_undirected_multiplicity(self):
        H = parse_hypergraph("a b b c\n")
        assert H.edges()[0] == Counter({0: 1, 1: 2, 2: 1})
        assert [H.name_of(v) for v in range(3)] == ["a", "b", "c"]

    def test_directed(self):
        H = parse_hypergraph("H2 H2 O2 -> H2O H2O\n", directed=True)
        tail, head = H.edges()[0]
        assert tail == Counter({0: 2, 1: 1}) and head == Counter({2: 2})

    def test_header_and_comments(self):
        H = parse_hypergraph("# nodes: z y x\n# a comment\n\nx y\n")
        assert H.n_nodes == 3 and list(H.node_degrees()) == [0, 1, 1]

    def test_empty_side_allowed(self):
        H = parse_hypergraph("-> a\n", directed=True)
        assert H.edges()[0][0] == Counter()

    @pytest.mark.parametrize("text,directed,line", [
        ("a b\nc -> d\n", False, 2),
        ("a b\n", True, 1),
        ("a -> b -> c\n", True, 1),
        ("a -> b\n->\n", True, 2),
        ("# nodes: a a\na\n", False, 1),
        ("# only comments\n", False, 0),
    ])
    def test_errors_carry_line(self, text, directed, line):
        with pytest.raises(HypergraphFormatError) as exc:
            parse_hypergraph(text, directed)
        assert exc.value.line == line


@pytest.mark.parametrize("directed,text", [
    (False, "# nodes: a b c d\na b b\nc\na d\n"),
    (True, "# nodes: p q r\np p -> q\n-> r\nq -> p r\n"),
])
def test_roundtrip(tmp_path, directed, text):
    H = parse_hypergraph(text, directed)
    assert format_hypergraph(H) == text
    path = tmp_path / "h.txt"
    write_hypergraph(H, path)
    assert read_hypergraph(path, directed) == H


def test_roundtrip_artificial():
    H = gen_artificial(1)
    assert parse_hypergraph(format_hypergraph(H)) == H


def test_unrepresentable_names():
    H = parse_hypergraph("a b\n")
    H2 = type(H).from_edges([[0, 1]], node_names=["a b", "c"])
    with pytest.raises(ValueError):
        format_hypergraph(H2)
