import io
import math

import numpy as np
import pytest

from hypercurveball.core import Hypergraph, SpaceSpec
from hypercurveball.mixbench import (
    FitResult,
    MixCurve,
    compare_curves,
    double_exponential,
    estimate_mixing_time,
    fit_double_exponential,
    fit_loglog_scaling,
    perturbation_degree,
    predict_faster,
    predict_from_stats,
    read_curves,
    run_mixing_experiment,
    write_fits,
)
from hypercurveball.shuffles import simple_shuffle

G = Hypergraph.from_edges([[0, 1], [1, 2], [2, 3], [0, 3], [0, 2], [1, 3]])


def curve(x, y, method="trade", std=None, runs=20):
    x = np.asarray(x)
    y = np.asarray(y, dtype=float)
    return MixCurve(x, y, np.zeros_like(y) if std is None else np.asarray(std), runs, method)


class TestPerturbation:
    def test_zero_on_self(self):
        assert perturbation_degree(G, G) == 0

    def test_one_simple_shuffle(self):
        H = simple_shuffle(G, 0, 2, 0, 3)
        assert perturbation_degree(G, H) == pytest.approx(2 / 12)

    def test_symmetric(self):
        H = simple_shuffle(G, 0, 2, 0, 3)
        assert perturbation_degree(G, H) == perturbation_degree(H, G)

    def test_full_rewire_is_one(self):
        a = Hypergraph.from_edges([[0, 0], [1, 1]])
        b = Hypergraph.from_edges([[1, 1], [0, 0]])
        assert perturbation_degree(a, b) == 1

    def test_directed_joint_normalizer(self):
        a = Hypergraph.from_edges([([0], [1]), ([1], [0])], directed=True)
        b = Hypergraph.from_edges([([1], [1]), ([0], [0])], directed=True)
        # only tails differ: 4 of 2 * 4 stubs
        assert perturbation_degree(a, b) == 0.5

    def test_mismatched_inputs(self):
        with pytest.raises(ValueError):
            perturbation_degree(G, Hypergraph.from_edges([[0, 1, 2]]))
        with pytest.raises(ValueError):
            perturbation_degree(Hypergraph.from_edges([[0, 1], [2]]), Hypergraph.from_edges([[0], [1, 2]]))


class TestMixingEstimate:
    def test_planted_exponential(self):
        x = np.arange(0, 5001, 5)
        est = estimate_mixing_time(curve(x, 0.8 - 0.5 * np.exp(-x / 100)))
        exact = 100 * math.log(0.5 / (0.02 * 0.8))
        assert exact <= est.step <= exact + 5

    def test_constant(self):
        assert estimate_mixing_time(curve(range(50), [0.3] * 50)).step == 0

    def test_still_rising(self):
        x = np.arange(100)
        est = estimate_mixing_time(curve(x, x / 100))
        assert not est.mixed and est.tail_slope > 0.01

    def test_band_monotone(self):
        x = np.arange(0, 3000, 10)
        c = curve(x, 0.6 - 0.4 * np.exp(-x / 200) - 0.1 * np.exp(-x / 40))
        steps = [estimate_mixing_time(c, band=b).step for b in (0.005, 0.01, 0.02, 0.05, 0.1)]
        assert steps == sorted(steps, reverse=True)

    def test_noisy_plateau_never_in_band(self):
        y = np.array([0.0] * 10 + [0.5, 0.7] * 10)
        assert not estimate_mixing_time(curve(np.arange(30), y), tail_frac=0.2, band=0.01).mixed

    def test_empty(self):
        with pytest.raises(ValueError):
            estimate_mixing_time(curve([], []))


class TestCompare:
    def test_faster_and_separated(self):
        x = np.arange(0, 2000, 10)
        fast = curve(x, 0.8 - 0.8 * np.exp(-x / 50), std=np.full(len(x), 0.01))
        slow = curve(x, 0.8 - 0.8 * np.exp(-x / 300), "shuffle", std=np.full(len(x), 0.01))
        cmp = compare_curves(slow, fast)
        assert cmp.faster == "trade" and cmp.separated and cmp.gap > 0

    def test_step_mismatch(self):
        with pytest.raises(ValueError):
            compare_curves(curve([0, 1], [0, 1]), curve([0, 2], [0, 1]))


class TestFits:
    def test_planted_recovery(self):
        x = np.linspace(0, 2000, 500)
        truth = (0.7, 0.4, 0.01, 0.1, 0.002)
        fit = fit_double_exponential(x, double_exponential(x, *truth))
        got = (fit.L, fit.a, fit.b, fit.c, fit.d)
        for g, t in zip(got, truth):
            assert abs(g - t) <= 1e-4 * abs(t)
        assert fit.rmse < 1e-10 and fit.mixing_time is not None

    def test_constant_data(self):
        x = np.arange(50.0)
        fit = fit_double_exponential(x, np.full(50, 0.25))
        assert fit.rmse == pytest.approx(0, abs=1e-12)
        assert fit(x) == pytest.approx(np.full(50, 0.25))

    def test_extrapolated_flag(self):
        x = np.linspace(0, 100, 200)
        fit = fit_double_exponential(x, double_exponential(x, 0.5, 0.3, 0.05, 0.2, 0.004))
        assert fit.extrapolated and fit.mixing_time > 100

    def test_too_few_points(self):
        with pytest.raises(ValueError):
            fit_double_exponential(np.arange(5.0), np.arange(5.0))

    def test_write_fits(self):
        buf = io.StringIO()
        write_fits([FitResult(1.0, 0.5, 0.1, 0.2, 0.01, 0.0, None, False).row("d1", "trade")], buf)
        lines = buf.getvalue().splitlines()
        assert lines[0].startswith("dataset,method,L")
        assert lines[1].endswith(",,false")


class TestLogLog:
    def test_exact_power_law(self):
        xs = [2.0, 5.0, 13.0, 40.0, 100.0]
        slope, icpt = fit_loglog_scaling([(x, 5.46 * x ** 1.07) for x in xs])
        assert abs(slope - 1.07) <= 1e-10
        assert abs(icpt - math.log(5.46)) <= 1e-10

    def test_two_points(self):
        slope, icpt = fit_loglog_scaling([(1.0, 3.0), (math.e, 3.0 * math.e ** 2)])
        assert slope == pytest.approx(2) and icpt == pytest.approx(math.log(3))

    @pytest.mark.parametrize("pts", [[(1, 2)], [(0, 1), (1, 2)], [(1, -1), (2, 2)]])
    def test_bad_input(self, pts):
        with pytest.raises(ValueError):
            fit_loglog_scaling(pts)


class TestPredict:
    def test_stats(self):
        assert predict_from_stats(2.34, 1.08) == "hypercurveball"
        assert predict_from_stats(1.01, 4.32) == "shuffle"
        assert predict_from_stats(3.0, 3.0) == "tie"

    def test_star_versus_matching(self):
        # high-degree nodes, size-one edges: trades move more
        H = Hypergraph.from_edges([[0]] * 5 + [[1]] * 5)
        assert predict_faster(H) == "hypercurveball"
        assert predict_faster(Hypergraph.from_edges([[0, 1, 2, 3], [0, 1, 2, 3]])) == "shuffle"

    def test_directed_averages_sides(self):
        H = Hypergraph.from_edges([([0, 0], [1]), ([1, 1], [0])], directed=True)
        # nodes (2,1),(2,1) -> 1.5 each side average; edges (2,1),(2,1) -> same
        assert predict_faster(H) == "tie"

    def test_too_small(self):
        with pytest.raises(ValueError):
            predict_faster(Hypergraph.from_edges([[0, 1]]))


class TestExperiment:
    def test_shape_and_start(self):
        c = run_mixing_experiment(G, SpaceSpec.parse("dm"), "trade", 100, runs=3, record_every=10, seed=4)
        assert c.steps.tolist() == list(range(0, 101, 10))
        assert c.mean[0] == 0 and np.all((c.mean >= 0) & (c.mean <= 1))

    def test_deterministic(self):
        a = run_mixing_experiment(G, SpaceSpec.parse("dm"), "shuffle", 80, runs=2, seed=1)
        b = run_mixing_experiment(G, SpaceSpec.parse("dm"), "shuffle", 80, runs=2, seed=1)
        assert a.to_csv() == b.to_csv()

    def test_kernel_and_observer_paths_share_shape(self):
        spec = SpaceSpec.parse("dm")
        a = run_mixing_experiment(G, spec, "trade", 60, runs=1, seed=3, use_kernel=True)
        b = run_mixing_experiment(G, spec, "trade", 60, runs=1, seed=3, use_kernel=False)
        # both paths stay in [0, 1] and start at zero; trajectories use different move encodings
        assert a.mean[0] == b.mean[0] == 0 and len(a) == len(b)

    def test_constrained_space(self):
        c = run_mixing_experiment(G, SpaceSpec.parse(""), "trade", 50, runs=2, record_every=5)
        assert len(c) == 11

    def test_zero_steps(self):
        c = run_mixing_experiment(G, SpaceSpec.parse("dm"), "trade", 0)
        assert c.mean.tolist() == [0.0]

    def test_bad_args(self):
        with pytest.raises(ValueError):
            run_mixing_experiment(G, SpaceSpec.parse("dm"), "swap", 10)
        with pytest.raises(ValueError):
            run_mixing_experiment(Hypergraph.from_edges([[0, 0], [1, 1]]), SpaceSpec.parse("m"), "trade", 10)

    def test_csv_roundtrip(self):
        c = run_mixing_experiment(G, SpaceSpec.parse("dm"), "trade", 40, runs=2, record_every=4, seed=2,
                                  dataset="toy")
        [back] = read_curves(io.StringIO(c.to_csv()))
        assert back.dataset == "toy" and back.method == "trade" and back.runs == 2
        assert np.array_equal(back.steps, c.steps)
        assert np.array_equal(back.mean, c.mean) and np.array_equal(back.std, c.std)

    def test_read_curves_missing_column(self):
        with pytest.raises(ValueError):
            read_curves(io.StringIO("step,mean\n0,0\n"))
