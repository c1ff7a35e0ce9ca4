from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from hypercurveball.chainlab import (
    CapExceeded,
    any_of,
    chain_diagnostics,
    degree_sequences,
    differ,
    empirical_distribution,
    enumerate_constrained_partitions,
    enumerate_space,
    partition_key,
    sequential_partition_bias,
    split_across,
    stationary,
    transition_matrix,
    uniformity_verdict,
)
from hypercurveball.core import DegreeSequence, Hypergraph, SpaceSpec, in_space, stub_count

from oracles import stub_matching_counts, trade_split_distribution

TWO = DegreeSequence((2, 2), (2, 2))
AB_AB = (((0, 1), (1, 1)), ((0, 1), (1, 1)))
AA_BB = (((0, 2),), ((1, 2),))
TRIANGLE = DegreeSequence(((1, 1),) * 3, ((1, 1),) * 3, directed=True)


class TestEnumerate:
    @pytest.mark.parametrize("flags,n", [("", 0), ("m", 1), ("d", 1), ("dm", 2)])
    def test_two_by_two(self, flags, n):
        assert len(enumerate_space(TWO, SpaceSpec.parse(flags))) == n

    def test_states_and_counts(self):
        sp = enumerate_space(TWO, SpaceSpec.parse("dm"))
        states = dict(zip(sp.states, sp.stub_counts))
        assert states == {AB_AB: 2, AA_BB: 1}

    def test_single_state(self):
        assert len(enumerate_space(DegreeSequence((1, 1), (2,)), SpaceSpec.parse(""))) == 1

    def test_cap(self):
        d = DegreeSequence((9, 9), (9, 9))
        with pytest.raises(CapExceeded):
            enumerate_space(d, SpaceSpec.parse("dm"))

    def test_matrix_cap(self):
        d = DegreeSequence((2,) * 6, (2,) * 6)
        with pytest.raises(CapExceeded):
            enumerate_space(d, SpaceSpec.parse("dm"), matrix_cap=100)

    def test_direction_mismatch(self):
        with pytest.raises(ValueError):
            enumerate_space(TWO, SpaceSpec.parse("dm", True))

    def test_directed_states_in_space(self):
        d = DegreeSequence(((1, 1), (1, 1), (1, 0)), ((1, 1), (2, 1)), directed=True)
        for flags in ("", "s", "dm", "sdm"):
            spec = SpaceSpec.parse(flags, True)
            sp = enumerate_space(d, spec)
            for i in range(len(sp)):
                H = sp.hypergraph(i)
                assert in_space(H, spec)
                assert stub_count(H) == sp.stub_counts[i]


class TestStubOracle:
    @pytest.mark.parametrize("d", [
        DegreeSequence((2, 2), (2, 2)),
        DegreeSequence((3, 2, 1), (2, 2, 2)),
        DegreeSequence((2, 2, 2, 2), (4, 4)),
        DegreeSequence((1, 1, 1, 1), (2, 2)),
    ])
    def test_small_undirected(self, d):
        brute = stub_matching_counts(d.node_degrees, d.edge_degrees)
        sp = enumerate_space(d, SpaceSpec.parse("dm"))
        assert dict(zip(sp.states, sp.stub_counts)) == brute

    def test_small_directed(self):
        d = DegreeSequence(((1, 1), (1, 2), (1, 0)), ((2, 1), (1, 2)), directed=True)
        brute = stub_matching_counts(d.node_degrees, d.edge_degrees, directed=True)
        sp = enumerate_space(d, SpaceSpec.parse("sdm", True))
        assert dict(zip(sp.states, sp.stub_counts)) == brute


class TestTransitions:
    def test_two_state_trade(self):
        sp = enumerate_space(TWO, SpaceSpec.parse("dm"))
        P = transition_matrix(sp, "trade").P
        i, j = sp.states.index(AB_AB), sp.states.index(AA_BB)
        assert P[i, j] == pytest.approx(1 / 3)
        assert P[j, i] == pytest.approx(2 / 3)

    def test_exact_mode(self):
        sp = enumerate_space(TWO, SpaceSpec.parse("dm"))
        T = transition_matrix(sp, "trade", exact=True)
        i, j = sp.states.index(AB_AB), sp.states.index(AA_BB)
        assert T.exact[i][j] == Fraction(1, 3)
        st = stationary(T)
        assert st.exact[i] == Fraction(2, 3)

    def test_exact_limit(self):
        sp = enumerate_space(DegreeSequence((2,) * 5, (2,) * 5), SpaceSpec.parse("dm"))
        assert len(sp) > 64
        with pytest.raises(ValueError):
            transition_matrix(sp, "trade", exact=True)

    def test_triangle(self):
        sp = enumerate_space(TRIANGLE, SpaceSpec.parse("", True))
        assert len(sp) == 2
        T = transition_matrix(sp, "trade").P
        S = transition_matrix(sp, "shuffle").P
        assert T[0, 1] > 0 and T[1, 0] > 0
        assert S[0, 1] == 0 and S[1, 0] == 0

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            transition_matrix(enumerate_space(TWO, SpaceSpec.parse("dm")), "swap")

    @pytest.mark.parametrize("method", ["trade", "shuffle"])
    @pytest.mark.parametrize("flags", ["", "d", "m", "dm"])
    def test_regular_and_aperiodic(self, method, flags):
        d = DegreeSequence((2, 2, 1, 1), (2, 2, 2))
        sp = enumerate_space(d, SpaceSpec.parse(flags))
        if not len(sp):
            pytest.skip("empty space")
        diag = chain_diagnostics(transition_matrix(sp, method))
        assert diag.min_diagonal > 0
        assert diag.row_sum_error < 1e-12
        assert diag.stub_column_sum_error < 1e-9


class TestStationary:
    def test_two_state(self):
        sp = enumerate_space(TWO, SpaceSpec.parse("dm"))
        st = stationary(transition_matrix(sp, "trade"))
        i = sp.states.index(AB_AB)
        assert st.pi[i] == pytest.approx(2 / 3, abs=1e-12)

    def test_fixed_point(self):
        d = DegreeSequence((2, 2, 2), (3, 3))
        T = transition_matrix(enumerate_space(d, SpaceSpec.parse("dm")), "trade")
        st = stationary(T)
        assert np.abs(st.pi @ T.P - st.pi).max() <= 1e-12

    def test_doubly_stochastic(self):
        P = np.array([[0.5, 0.25, 0.25], [0.25, 0.5, 0.25], [0.25, 0.25, 0.5]])
        assert stationary(P).pi == pytest.approx([1 / 3] * 3)

    def test_identity_is_disconnected(self):
        st = stationary(np.eye(3))
        assert st.scc_count == 3 and len(st.classes) == 3
        assert np.allclose(st.pi @ np.eye(3), st.pi)

    def test_not_stochastic(self):
        with pytest.raises(ValueError):
            stationary(np.array([[0.5, 0.4], [0.5, 0.5]]))


class TestVerdicts:
    def test_two_state_uniform(self):
        v = uniformity_verdict(TWO, SpaceSpec.parse("dm"))
        assert v.status == "uniform" and v.n_states == 2
        assert v.flat_deviation == pytest.approx(1 / 3)

    def test_triangle(self):
        spec = SpaceSpec.parse("", True)
        v = uniformity_verdict(TRIANGLE, spec, "trade")
        assert v.status == "uniform"
        assert v.pi == pytest.approx([0.5, 0.5])
        assert uniformity_verdict(TRIANGLE, spec, "shuffle").status == "disconnected"

    def test_disconnected_example(self):
        v = uniformity_verdict(DegreeSequence((2, 2, 2), (2, 2, 2)), SpaceSpec.parse("d"), "trade")
        assert v.status == "disconnected" and v.scc_count > 1

    def test_empty_space(self):
        with pytest.raises(ValueError):
            uniformity_verdict(TWO, SpaceSpec.parse(""))


def test_degree_sequences_sorted_and_bounded():
    seqs = degree_sequences(3, 3, 2, False)
    assert seqs == sorted(seqs, key=lambda d: (d.total, len(d.node_degrees), len(d.edge_degrees),
                                               d.node_degrees, d.edge_degrees))
    assert all(max(d.node_degrees) <= 2 and max(d.edge_degrees) <= 2 for d in seqs)
    assert DegreeSequence((2, 2), (2, 2)) in seqs


class TestPartitions:
    COMBINED = Counter("xxyaabz")
    CONS = (differ("x", "y"), differ("a", "b"))

    def test_counts_by_x(self):
        splits = enumerate_constrained_partitions(self.COMBINED, 3, self.CONS)
        by_x = Counter(s.multiset()["x"] for s in splits)
        assert [by_x[0], by_x[1], by_x[2]] == [3, 3, 2]

    def test_no_constraints_cover_all_stub_splits(self):
        splits = enumerate_constrained_partitions(self.COMBINED, 3)
        assert sum(s.weight for s in splits) == 35

    def test_unsatisfiable(self):
        never = lambda parts: False  # noqa: E731
        assert enumerate_constrained_partitions(self.COMBINED, 3, [never]) == []

    def test_sequential_bias(self):
        d = sequential_partition_bias(self.COMBINED, 3, self.CONS, list("xyabz"))
        assert d[partition_key("xxa")] == Fraction(1, 6)
        assert d[partition_key("xxb")] == Fraction(1, 6)
        others = [p for k, p in d.items() if k not in (partition_key("xxa"), partition_key("xxb"))]
        assert len(others) == 6 and all(p == Fraction(1, 9) for p in others)

    def test_other_order(self):
        d = sequential_partition_bias(self.COMBINED, 3, self.CONS, list("ayxbz"))
        assert d[partition_key("aax")] == Fraction(1, 6)
        assert d[partition_key("aay")] == Fraction(1, 6)
        assert sum(d.values()) == 1

    def test_sequential_without_constraints_is_not_stub_uniform(self):
        # choosing copy counts uniformly overweights single-stub outcomes
        d = sequential_partition_bias(Counter("aabb"), 2)
        assert d[partition_key("ab")] == Fraction(1, 3)

    def test_directed_reorientation_example(self):
        c = [Counter("xyz"), Counter("xya")]
        d = sequential_partition_bias(c, (2, 1), [split_across("x"), split_across("y")], list("xyza"))
        assert d[partition_key("xy", "a")] == Fraction(1, 4)
        assert d[partition_key("yz", "x")] == Fraction(1, 2)

    def test_directed_multi_example(self):
        c = [Counter("xyabm"), Counter("xyabn")]
        cons = [any_of(differ("x", "y", 0), differ("x", "y", 1)),
                any_of(differ("a", "b", 0), differ("a", "b", 1))]
        d = sequential_partition_bias(c, (2, 3), cons, list("xyabmn"))
        assert d[partition_key("xa", "abn")] == Fraction(1, 24)
        assert sum(d.values()) == 1

    def test_stub_weights_match_conditioned_uniform_split(self):
        # weighting by stub counts equals a uniform stub split conditioned on the constraints
        I, J = Counter({"x": 1, "a": 1, "z": 1}), Counter({"x": 1, "y": 1, "a": 1, "b": 1})
        cons = (differ("x", "y"), differ("a", "b"))
        raw = trade_split_distribution(I, J)
        kept = {f: p for (f, _), p in raw.items() if all(c((Counter(dict(f)),)) for c in cons)}
        norm = sum(kept.values())
        splits = enumerate_constrained_partitions(I + J, 3, cons)
        total = sum(s.weight for s in splits)
        assert {s.part[0]: s.weight / total for s in splits} == pytest.approx(
            {f: p / norm for f, p in kept.items()})


class TestEmpirical:
    def test_two_state_frequencies(self):
        H = Hypergraph.from_edges([[0, 1], [0, 1]])
        r = empirical_distribution(H, SpaceSpec.parse("dm"), "trade", 4000, 20, seed=1)
        assert r.frequencies[r.space.locate(H)] == pytest.approx(2 / 3, abs=0.03)
        again = empirical_distribution(H, SpaceSpec.parse("dm"), "trade", 4000, 20, seed=1)
        assert np.array_equal(r.counts, again.counts)

    def test_single_state(self):
        H = Hypergraph.from_edges([[0, 1]])
        r = empirical_distribution(H, SpaceSpec.parse("dm"), "trade", 10, 5)
        assert r.frequencies.tolist() == [1.0] and r.p_value == 1.0

    def test_constrained_directed_matches_exact(self):
        H = Hypergraph.from_edges([([0], [1, 2]), ([1], [2]), ([2], [0])], directed=True)
        r = empirical_distribution(H, SpaceSpec.parse("", True), "trade", 3000, 25, seed=2)
        assert r.p_value > 0.001
