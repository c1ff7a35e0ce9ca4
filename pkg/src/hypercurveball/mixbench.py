"""Perturbation degree, mixing curves, mixing-time estimates and curve fits."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import brentq, least_squares

from .core import Hypergraph, SpaceSpec, expected_min_pair, in_space
from .kernels import run_pair_chain_recorded, stub_rows
from .shuffles import run_shuffle
from .trades import run_hypercurveball

CURVE_COLUMNS = ("step", "mean", "std", "method", "dataset", "runs", "seed")
FIT_COLUMNS = ("dataset", "method", "L", "a", "b", "c", "d", "rmse", "mixing_time", "extrapolated")


# ---------------------------------------------------------------------------
# perturbation degree
# ---------------------------------------------------------------------------

def _edge_sizes(H: Hypergraph) -> list:
    if H.directed:
        return [(sum(t.values()), sum(h.values())) for t, h in H.edges()]
    return [sum(e.values()) for e in H.edges()]


def perturbation_numerator(G: Hypergraph, H: Hypergraph) -> int:
    """Sum over labels and nodes of |m_e(v) - m_e~(v)| (tails and heads summed)."""
    if G.directed != H.directed:
        raise ValueError("cannot compare directed and undirected hypergraphs")
    if G.n_nodes != H.n_nodes or G.n_edges != H.n_edges:
        raise ValueError("hypergraphs differ in node or hyperedge labels")
    if _edge_sizes(G) != _edge_sizes(H):
        raise ValueError("same-label hyperedges differ in degree")
    total = 0
    for eg, eh in zip(G.edges(), H.edges()):
        pairs = zip(eg, eh) if G.directed else [(eg, eh)]
        for a, b in pairs:
            for v in set(a) | set(b):
                total += abs(a[v] - b[v])
    return total


def perturbation_degree(G: Hypergraph, H: Hypergraph) -> float:
    """Share of incidences of ``H`` that moved relative to ``G``, in [0, 1].

    Hyperedges are matched by label. Directed hypergraphs add tail and head
    differences and normalize by twice the total number of stubs.
    """
    num = perturbation_numerator(G, H)
    stubs = sum(sum(s) if G.directed else s for s in _edge_sizes(G))
    return num / (2 * stubs) if stubs else 0.0


# ---------------------------------------------------------------------------
# mixing curves
# ---------------------------------------------------------------------------

@dataclass
class MixCurve:
    steps: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    runs: int
    method: str
    dataset: str = ""
    seed: int = 0

    def __len__(self) -> int:
        return len(self.steps)

    def rows(self):
        for s, m, sd in zip(self.steps, self.mean, self.std):
            yield (int(s), repr(float(m)), repr(float(sd)), self.method, self.dataset, self.runs, self.seed)

    def to_csv(self, fh=None, header: bool = True) -> str | None:
        out = io.StringIO() if fh is None else fh
        w = csv.writer(out, lineterminator="\n")
        if header:
            w.writerow(CURVE_COLUMNS)
        w.writerows(self.rows())
        return out.getvalue() if fh is None else None


def read_curves(fh) -> list[MixCurve]:
    """Parse curve CSV (as written by :meth:`MixCurve.to_csv`), one curve per (dataset, method)."""
    groups: dict = {}
    reader = csv.DictReader(fh)
    missing = set(CURVE_COLUMNS) - set(reader.fieldnames or ())
    if missing:
        raise ValueError(f"curve CSV lacks columns {sorted(missing)}")
    for i, row in enumerate(reader, start=2):
        try:
            key = (row["dataset"], row["method"])
            g = groups.setdefault(key, {"steps": [], "mean": [], "std": [],
                                        "runs": int(row["runs"]), "seed": int(row["seed"])})
            g["steps"].append(int(row["step"]))
            g["mean"].append(float(row["mean"]))
            g["std"].append(float(row["std"]))
        except (TypeError, ValueError) as exc:
            raise ValueError(f"line {i}: {exc}") from None
    return [MixCurve(np.array(g["steps"]), np.array(g["mean"]), np.array(g["std"]),
                     g["runs"], method, dataset, g["seed"])
            for (dataset, method), g in groups.items()]


def derive_seeds(seed: int, n: int) -> list[int]:
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(n)]


def _one_run(args) -> np.ndarray:
    H0, spec, method, steps, record_every, seed, use_kernel = args
    if use_kernel:
        rows = stub_rows(H0, by="node" if method == "trade" else "edge")
        if steps == 0:
            return np.zeros(1)
        nums = run_pair_chain_recorded(rows, steps, record_every, seed)
        return nums / (2 * rows.total)
    trace = [0.0]

    def observe(step, H):
        if step % record_every == 0:
            trace.append(perturbation_degree(H0, H))

    runner = run_hypercurveball if method == "trade" else run_shuffle
    runner(H0, spec, steps, seed, observer=observe)
    return np.array(trace)


def run_mixing_experiment(H0: Hypergraph, spec: SpaceSpec, method: str, steps: int,
                          runs: int = 1, record_every: int = 1, seed: int = 0,
                          dataset: str = "", jobs: int = 1,
                          use_kernel: bool | None = None) -> MixCurve:
    """Average perturbation-degree trajectories of ``runs`` independent chains."""
    if method not in ("trade", "shuffle"):
        raise ValueError("method must be 'trade' or 'shuffle'")
    if runs < 1 or steps < 0 or record_every < 1:
        raise ValueError("need runs >= 1, steps >= 0, record_every >= 1")
    if H0.directed != spec.directed or not in_space(H0, spec):
        raise ValueError(f"initial hypergraph is not in {spec.name}")
    if use_kernel is None:
        use_kernel = spec.unconstrained
    tasks = [(H0, spec, method, steps, record_every, s, use_kernel) for s in derive_seeds(seed, runs)]
    if jobs > 1 and runs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(jobs) as pool:
            traces = list(pool.map(_one_run, tasks))
    else:
        traces = [_one_run(t) for t in tasks]
    data = np.vstack(traces)
    recorded = np.arange(data.shape[1]) * record_every
    std = data.std(axis=0, ddof=1) if runs > 1 else np.zeros(data.shape[1])
    return MixCurve(recorded, data.mean(axis=0), std, runs, method, dataset, seed)


# ---------------------------------------------------------------------------
# mixing-time estimates
# ---------------------------------------------------------------------------

@dataclass
class MixingEstimate:
    step: int | None        # None: curve still rising, not mixed
    L: float
    tail_slope: float       # relative rise of the fitted line across the tail window

    @property
    def mixed(self) -> bool:
        return self.step is not None


def estimate_mixing_time(curve: MixCurve, tail_frac: float = 0.1, band: float = 0.02,
                         slope_tol: float = 0.01) -> MixingEstimate:
    """First recorded step within ``band * L`` of the plateau ``L``.

    ``L`` is the mean of the last ``tail_frac`` of the points. If a line fitted
    to that tail still rises by more than ``slope_tol * L`` across it, or no
    point falls inside the band, the curve is reported as not mixed.
    """
    if len(curve) == 0:
        raise ValueError("empty curve")
    k = max(1, int(math.ceil(tail_frac * len(curve))))
    xs, ys = curve.steps[-k:].astype(float), curve.mean[-k:]
    L = float(ys.mean())
    rise = 0.0
    if k >= 2 and xs[-1] > xs[0] and L > 0:
        slope = np.polyfit(xs, ys, 1)[0]
        rise = float(slope * (xs[-1] - xs[0]) / L)
    if rise > slope_tol:
        return MixingEstimate(None, L, rise)
    hit = np.flatnonzero(np.abs(curve.mean - L) <= band * abs(L))
    if not len(hit):
        # a noisy plateau can straddle L without any point inside the band
        return MixingEstimate(None, L, rise)
    return MixingEstimate(int(curve.steps[hit[0]]), L, rise)


@dataclass
class Comparison:
    faster: str | None          # method name, or None if neither curve mixed
    step: int | None            # mixing step of the faster curve
    gap: float                  # mean(faster) - mean(slower) at that step
    z: float                    # gap over the standard error of the difference

    @property
    def separated(self) -> bool:
        """Gap outside the 95% band of the difference of means."""
        return self.z > 1.96


def compare_curves(first: MixCurve, second: MixCurve, tail_frac: float = 0.1,
                   band: float = 0.02) -> Comparison:
    """Which curve mixes first, and is it clearly above the other at that point?"""
    if not np.array_equal(first.steps, second.steps):
        raise ValueError("curves must share recorded steps")
    est = [estimate_mixing_time(c, tail_frac, band) for c in (first, second)]
    if not any(e.mixed for e in est):
        return Comparison(None, None, 0.0, 0.0)
    order = sorted((e.step, i) for i, e in enumerate(est) if e.mixed)
    step, i = order[0]
    fast, slow = (first, second) if i == 0 else (second, first)
    k = int(np.flatnonzero(fast.steps == step)[0])
    gap = float(fast.mean[k] - slow.mean[k])
    se = math.sqrt(fast.std[k] ** 2 / fast.runs + slow.std[k] ** 2 / slow.runs)
    z = gap / se if se > 0 else (math.inf if gap > 0 else 0.0)
    return Comparison(fast.method, step, gap, z)


# ---------------------------------------------------------------------------
# fits
# ---------------------------------------------------------------------------

@dataclass
class FitResult:
    L: float
    a: float
    b: float
    c: float
    d: float
    rmse: float
    mixing_time: float | None
    extrapolated: bool
    converged: bool = True

    def __call__(self, x):
        return double_exponential(np.asarray(x, dtype=float), self.L, self.a, self.b, self.c, self.d)

    def row(self, dataset: str = "", method: str = "") -> tuple:
        mt = "" if self.mixing_time is None else repr(self.mixing_time)
        return (dataset, method, repr(self.L), repr(self.a), repr(self.b), repr(self.c),
                repr(self.d), repr(self.rmse), mt, str(self.extrapolated).lower())


def double_exponential(x, L, a, b, c, d):
    return L - a * np.exp(-b * x) - c * np.exp(-d * x)


def _linear_part(x, y, b, d):
    A = np.column_stack([np.ones_like(x), -np.exp(-b * x), -np.exp(-d * x)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return coef


def _crossing(fit: FitResult, band: float) -> float | None:
    """First x >= 0 where |f(x) - L| <= band * L."""
    if fit.L <= 0:
        return None
    g = lambda x: abs(fit.a * math.exp(-fit.b * x) + fit.c * math.exp(-fit.d * x)) - band * fit.L  # noqa: E731
    if g(0.0) <= 0:
        return 0.0
    hi = 1.0 / min(fit.b, fit.d)
    while g(hi) > 0:
        hi *= 2
        if hi > 1e300:
            return None
    grid = np.linspace(0.0, hi, 4097)
    vals = np.array([g(x) for x in grid])
    i = int(np.flatnonzero(vals <= 0)[0])
    return float(brentq(g, grid[i - 1], grid[i], xtol=1e-12, rtol=1e-15))


def fit_double_exponential(curve_or_x, y=None, band: float = 0.02, n_starts: int = 16) -> FitResult:
    """Least-squares fit of ``L - a exp(-b x) - c exp(-d x)`` with deterministic multi-start.

    Rates are optimized in log space so they stay positive; the result is
    ordered so that ``b >= d``. Starts are log-spaced (b, d) pairs with the
    linear coefficients solved exactly for each pair.
    """
    if y is None:
        x = np.asarray(curve_or_x.steps, dtype=float)
        y = np.asarray(curve_or_x.mean, dtype=float)
    else:
        x = np.asarray(curve_or_x, dtype=float)
        y = np.asarray(y, dtype=float)
    if len(x) < 10 or len(x) != len(y):
        raise ValueError("need at least 10 (x, y) points")
    span = float(x.max() - x.min()) or 1.0
    side = int(round(math.sqrt(n_starts)))
    rates = np.geomspace(0.5 / span, 500.0 / span, 2 * side)
    starts = [(bb, dd) for bb in rates[side:] for dd in rates[:side]]

    def resid(theta):
        L, a, lb, c, ld = theta
        return double_exponential(x, L, a, math.exp(lb), c, math.exp(ld)) - y

    best = None
    for b0, d0 in starts:
        L0, a0, c0 = _linear_part(x, y, b0, d0)
        try:
            sol = least_squares(resid, [L0, a0, math.log(b0), c0, math.log(d0)], method="lm",
                                xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=20000)
        except (ValueError, FloatingPointError):
            continue
        if not np.all(np.isfinite(sol.x)):
            continue
        L, a, lb, c, ld = sol.x
        b, d = math.exp(lb), math.exp(ld)
        if b < d:
            a, b, c, d = c, d, a, b
        rmse = float(np.sqrt(np.mean(sol.fun ** 2)))
        cand = (rmse, b, FitResult(float(L), float(a), b, float(c), d, rmse, None, False, bool(sol.success)))
        if best is None or (cand[0], cand[1]) < (best[0], best[1]):
            best = cand
    if best is None:
        nan = float("nan")
        return FitResult(nan, nan, nan, nan, nan, nan, None, False, converged=False)
    fit = best[2]
    fit.mixing_time = _crossing(fit, band)
    fit.extrapolated = fit.mixing_time is not None and fit.mixing_time > float(x.max())
    return fit


def write_fits(rows: Iterable[tuple], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(FIT_COLUMNS)
    w.writerows(rows)


def fit_loglog_scaling(points: Sequence[tuple]) -> tuple[float, float]:
    """Least-squares line through (ln f_min, ln mixing_time); returns (slope, intercept)."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2 or pts.shape[1] != 2:
        raise ValueError("need at least two (f_min, mixing_time) pairs")
    if (pts <= 0).any():
        raise ValueError("log-log fit needs positive values")
    slope, intercept = np.polyfit(np.log(pts[:, 0]), np.log(pts[:, 1]), 1)
    return float(slope), float(intercept)


# ---------------------------------------------------------------------------
# which method mixes faster
# ---------------------------------------------------------------------------

def predict_from_stats(node_min: float, edge_min: float) -> str:
    if math.isclose(node_min, edge_min, rel_tol=1e-12, abs_tol=1e-12):
        return "tie"
    return "hypercurveball" if node_min > edge_min else "shuffle"


def _side_min(seq, directed: bool) -> float:
    if directed:
        return (expected_min_pair([t for t, _ in seq]) + expected_min_pair([h for _, h in seq])) / 2
    return expected_min_pair(seq)


def predict_faster(H: Hypergraph) -> str:
    """Guess the faster-mixing method from the expected minimum degree of two nodes vs. two hyperedges."""
    if H.n_nodes < 2 or H.n_edges < 2:
        raise ValueError("need at least two nodes and two hyperedges")
    return predict_from_stats(_side_min(H.node_degrees(), H.directed),
                              _side_min(H.edge_degrees(), H.directed))
