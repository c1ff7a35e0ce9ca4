"""Exact analysis of the trade and shuffle Markov chains on small spaces.

States are stored as tuples of incidence-matrix columns (one column per
hyperedge, one entry per node; directed columns hold the tail entries followed
by the head entries). Sorting the columns gives a label-free canonical state.

Both chains are reversible with respect to the stub count of a state, so the
stub-weighted distribution is the uniformity target; the chain can only fail
to reach it by falling apart into several communicating classes.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

from .core import DegreeSequence, Hypergraph, SpaceSpec, canonicalize, from_canonical
from .trades import trade_checks, trade_variant

DEFAULT_DEGREE_CAP = 16
DEFAULT_MATRIX_CAP = 50_000
VERDICT_TOL = 1e-9
EXACT_STATE_LIMIT = 64


class CapExceeded(ValueError):
    """The requested space is too large for exhaustive enumeration."""


# ---------------------------------------------------------------------------
# state spaces
# ---------------------------------------------------------------------------

def _row_fillings(total: int, caps: Sequence[int], limit: int) -> Iterator[tuple]:
    """All vectors x with sum ``total`` and ``0 <= x[i] <= min(caps[i], limit)``."""
    n = len(caps)
    bounds = [min(c, limit) for c in caps]
    suffix = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] + bounds[i]
    x = [0] * n

    def rec(i, left):
        if i == n:
            if left == 0:
                yield tuple(x)
            return
        lo = max(0, left - suffix[i + 1])
        for val in range(lo, min(bounds[i], left) + 1):
            x[i] = val
            yield from rec(i + 1, left - val)
        x[i] = 0

    yield from rec(0, total)


def _matrices(row_sums: Sequence[int], col_sums: Sequence[int], limit: int) -> Iterator[tuple]:
    """Nonnegative integer matrices (as row tuples) with the given margins."""
    if sum(row_sums) != sum(col_sums):
        return
    n = len(row_sums)
    rows: list = []

    def rec(i, caps):
        if i == n:
            if not any(caps):
                yield tuple(rows)
            return
        for r in _row_fillings(row_sums[i], caps, limit):
            rows.append(r)
            yield from rec(i + 1, [c - x for c, x in zip(caps, r)])
            rows.pop()

    yield from rec(0, list(col_sums))


def _columns(rows: tuple, n_edges: int) -> list:
    return [tuple(r[e] for r in rows) for e in range(n_edges)]


def cols_in_space(cols: Sequence[tuple], n_nodes: int, spec: SpaceSpec) -> bool:
    if not spec.allow_degenerate and any(x >= 2 for c in cols for x in c):
        return False
    if spec.directed and not spec.allow_self_loops:
        if any(c[:n_nodes] == c[n_nodes:] for c in cols):
            return False
    if not spec.allow_multi and len(set(cols)) != len(cols):
        return False
    return True


def cols_stub_count(cols: Sequence[tuple], n_nodes: int, directed: bool) -> int:
    """Stub count of a state given by its columns (see :func:`core.stub_count`)."""
    width = 2 * n_nodes if directed else n_nodes
    num = 1
    for i in range(width):
        num *= math.factorial(sum(c[i] for c in cols))
    den = 1
    for c in cols:
        for x in c:
            den *= math.factorial(x)
    for g in Counter(cols).values():
        den *= math.factorial(g)
    return num // den


def cols_to_hypergraph(cols: Sequence[tuple], n_nodes: int, directed: bool) -> Hypergraph:
    if directed:
        edges = [([v for v in range(n_nodes) for _ in range(c[v])],
                  [v for v in range(n_nodes) for _ in range(c[n_nodes + v])]) for c in cols]
    else:
        edges = [[v for v in range(n_nodes) for _ in range(c[v])] for c in cols]
    return Hypergraph.from_edges(edges, directed, n_nodes=n_nodes)


def hypergraph_to_cols(H: Hypergraph) -> tuple:
    """Canonical column tuple of a hypergraph."""
    n = H.n_nodes
    cols = []
    for edge in H.edges():
        if H.directed:
            cols.append(tuple(edge[0][v] for v in range(n)) + tuple(edge[1][v] for v in range(n)))
        else:
            cols.append(tuple(edge[v] for v in range(n)))
    return tuple(sorted(cols))


@dataclass
class StateSpace:
    """All canonical states of a degree sequence inside one hypergraph space."""

    degrees: DegreeSequence
    spec: SpaceSpec
    cols: list          # canonical column tuples, sorted
    stub_counts: list   # python ints
    index: dict = field(repr=False, default_factory=dict)

    @property
    def n_nodes(self) -> int:
        return len(self.degrees.node_degrees)

    @property
    def n_edges(self) -> int:
        return len(self.degrees.edge_degrees)

    def __len__(self) -> int:
        return len(self.cols)

    @property
    def states(self) -> list:
        """Canonical states in the form returned by :func:`core.canonicalize`."""
        return [canonicalize(self.hypergraph(i)) for i in range(len(self))]

    def hypergraph(self, i: int) -> Hypergraph:
        return cols_to_hypergraph(self.cols[i], self.n_nodes, self.degrees.directed)

    def target(self) -> np.ndarray:
        """Stub-weighted uniform distribution over the states."""
        w = np.array([float(c) for c in self.stub_counts])
        return w / w.sum()

    def locate(self, H: Hypergraph) -> int:
        return self.index[hypergraph_to_cols(H)]


def enumerate_space(d: DegreeSequence, spec: SpaceSpec, degree_cap: int = DEFAULT_DEGREE_CAP,
                    matrix_cap: int = DEFAULT_MATRIX_CAP) -> StateSpace:
    """Enumerate every canonical hypergraph with degrees ``d`` in ``spec``'s space."""
    if d.directed != spec.directed:
        raise ValueError("directedness of degree sequence and space differ")
    if d.total > degree_cap:
        raise CapExceeded(f"total degree {d.total} exceeds cap {degree_cap}")
    n, m = len(d.node_degrees), len(d.edge_degrees)
    limit = 10 ** 9 if spec.allow_degenerate else 1
    seen: set = set()
    examined = 0

    def bump():
        nonlocal examined
        examined += 1
        if examined > matrix_cap:
            raise CapExceeded(f"more than {matrix_cap} incidence matrices")

    if d.directed:
        tails = [t for t, _ in d.node_degrees], [t for t, _ in d.edge_degrees]
        heads = [h for _, h in d.node_degrees], [h for _, h in d.edge_degrees]
        head_cols = [_columns(M, m) for M in _matrices(*heads, limit)]
        # label permutations that keep every (tail, head) edge degree fixed act on
        # both matrices at once; one tail matrix per orbit is enough
        groups: dict = {}
        for e, deg in enumerate(d.edge_degrees):
            groups.setdefault(deg, []).append(e)
        tail_reps = {}
        for M in _matrices(*tails, limit):
            tc = _columns(M, m)
            key = tuple(tuple(sorted(tc[e] for e in g)) for g in groups.values())
            tail_reps.setdefault(key, tc)
        for tc in tail_reps.values():
            for hc in head_cols:
                bump()
                cols = [tc[e] + hc[e] for e in range(m)]
                if cols_in_space(cols, n, spec):
                    seen.add(tuple(sorted(cols)))
    else:
        for M in _matrices(d.node_degrees, d.edge_degrees, limit):
            bump()
            cols = _columns(M, m)
            if cols_in_space(cols, n, spec):
                seen.add(tuple(sorted(cols)))
    ordered = sorted(seen)
    counts = [cols_stub_count(c, n, d.directed) for c in ordered]
    return StateSpace(d, spec, ordered, counts, {c: i for i, c in enumerate(ordered)})


# ---------------------------------------------------------------------------
# proposals
# ---------------------------------------------------------------------------

@lru_cache(maxsize=1 << 16)
def _weighted_splits(a: tuple, b: tuple) -> tuple[list, int]:
    """Stub-level splits of a+b giving the first part size sum(a).

    Returns ``(outcomes, total)`` with outcomes ``(new_a, new_b, weight)``.
    """
    c = [x + y for x, y in zip(a, b)]
    k = sum(a)
    out = []
    for x in _row_fillings(k, c, 10 ** 9):
        w = 1
        for ce, xe in zip(c, x):
            w *= math.comb(ce, xe)
        out.append((x, tuple(ce - xe for ce, xe in zip(c, x)), w))
    return out, math.comb(sum(c), k)


@lru_cache(maxsize=1 << 16)
def _nodeg_splits(a: tuple, b: tuple) -> tuple[list, int]:
    if any(x > 1 for x in a) or any(x > 1 for x in b):
        raise ValueError("degenerate entry under a non-degenerate trade")
    free = [i for i, (x, y) in enumerate(zip(a, b)) if x + y == 1]
    shared = [i for i, (x, y) in enumerate(zip(a, b)) if x + y == 2]
    k = sum(a) - len(shared)
    out = []
    for pick in itertools.combinations(free, k):
        na = [0] * len(a)
        nb = [0] * len(a)
        for i in shared:
            na[i] = nb[i] = 1
        for i in free:
            if i in pick:
                na[i] = 1
            else:
                nb[i] = 1
        out.append((tuple(na), tuple(nb), 1))
    return out, math.comb(len(free), k)


def _simple_splits(rows: list, v: int, w: int) -> tuple[list, int]:
    a, b = rows[v], rows[w]
    if any(x > 1 for x in a) or any(x > 1 for x in b):
        raise ValueError("degenerate entry under a simple trade")
    m = len(a)
    others = [r for i, r in enumerate(rows) if i not in (v, w)]
    sig = lambda e: tuple(r[e] for r in others)  # noqa: E731
    only_a = [e for e in range(m) if a[e] == 1 and b[e] == 0]
    only_b = [e for e in range(m) if b[e] == 1 and a[e] == 0]
    shared = [e for e in range(m) if a[e] == 1 and b[e] == 1]
    sb = {}
    for y in only_b:
        sb.setdefault(sig(y), []).append(y)
    pairs = []
    for x in only_a:
        ys = sb.get(sig(x), [])
        if len(ys) > 1:
            raise ValueError("hyperedge in two potential multi pairs")
        if ys:
            pairs.append((x, ys[0]))
    pinned = {e for p in pairs for e in p}
    free = [e for e in only_a + only_b if e not in pinned]
    k = sum(a) - len(shared) - len(pairs)
    out = []
    for orient in itertools.product((0, 1), repeat=len(pairs)):
        for pick in itertools.combinations(sorted(free), k):
            na = [0] * m
            nb = [0] * m
            for e in shared:
                na[e] = nb[e] = 1
            for (x, y), o in zip(pairs, orient):
                if o == 0:
                    na[x] = nb[y] = 1
                else:
                    na[y] = nb[x] = 1
            for e in free:
                if e in pick:
                    na[e] = 1
                else:
                    nb[e] = 1
            out.append((tuple(na), tuple(nb), 1))
    return out, (2 ** len(pairs)) * math.comb(len(free), k)


def _combine_sides(side_results):
    """Cartesian product of per-side outcomes; weights and totals multiply.

    Each combined outcome is returned transposed, as one tuple per edge holding
    the new (first, second) entries of every side in order.
    """
    total = 1
    for _, t in side_results:
        total *= t
    combos = []
    for parts in itertools.product(*[o for o, _ in side_results]):
        w = 1
        for _, _, pw in parts:
            w *= pw
        per_edge = tuple(zip(*[x for p in parts for x in p[:2]]))
        combos.append((per_edge, w))
    return combos, total


@lru_cache(maxsize=1 << 16)
def _cached_outcomes(variant: str, sides: tuple):
    split = _weighted_splits if variant == "full" else _nodeg_splits
    return _combine_sides([split(a, b) for a, b in sides])


def _apply(cols, positions, combos, n_pairs, total):
    """Yield (canonical key, weight, denominator) for each combined outcome."""
    bases = [list(c) for c in cols]
    den = total * n_pairs
    for per_edge, weight in combos:
        new_cols = []
        for base, vals in zip(bases, per_edge):
            for p, x in zip(positions, vals):
                base[p] = x
            new_cols.append(tuple(base))
        new_cols.sort()
        yield tuple(new_cols), weight, den


def _trade_moves(cols: tuple, n: int, spec: SpaceSpec):
    """Yield (canonical key, probability numerator, denominator) per trade proposal."""
    width = 2 if spec.directed else 1
    variant = trade_variant(spec)
    pairs = list(itertools.combinations(range(n), 2))
    rows_by_side = [[tuple(c[s * n + v] for c in cols) for v in range(n)] for s in range(width)]
    for v, w in pairs:
        if variant == "simple":
            combos, total = _combine_sides([_simple_splits(rows_by_side[0], v, w)])
        else:
            sides = tuple((rows[v], rows[w]) for rows in rows_by_side)
            combos, total = _cached_outcomes(variant, sides)
        positions = [p for s in range(width) for p in (s * n + v, s * n + w)]
        yield from _apply(cols, positions, combos, len(pairs), total)


def _shuffle_moves(cols: tuple, n: int, spec: SpaceSpec):
    width = 2 if spec.directed else 1
    m = len(cols)
    pairs = list(itertools.combinations(range(m), 2))
    for e, f in pairs:
        sides = tuple((cols[e][s * n:(s + 1) * n], cols[f][s * n:(s + 1) * n]) for s in range(width))
        combos, total = _cached_outcomes("full", sides)
        den = total * len(pairs)
        rest = [c for i, c in enumerate(cols) if i != e and i != f]
        for (ce, cf), weight in _shuffle_pairs(combos, n, width):
            key = sorted(rest + [ce, cf])
            yield tuple(key), weight, den


def _shuffle_pairs(combos, n, width):
    # per_edge here is indexed by node within a side: (first_s0, second_s0, first_s1, ...)
    for per_node, weight in combos:
        ce = tuple(per_node[v][2 * s] for s in range(width) for v in range(n))
        cf = tuple(per_node[v][2 * s + 1] for s in range(width) for v in range(n))
        yield (ce, cf), weight


# ---------------------------------------------------------------------------
# transition matrices and stationary distributions
# ---------------------------------------------------------------------------

@dataclass
class TransitionMatrix:
    P: np.ndarray               # float64 row-stochastic matrix
    method: str
    space: StateSpace | None = None
    exact: list | None = None   # Fraction entries when built in exact mode

    def __len__(self) -> int:
        return self.P.shape[0]


def transition_matrix(space: StateSpace, method: str = "trade", exact: bool = False) -> TransitionMatrix:
    """Exact one-step transition matrix of a chain on an enumerated space.

    Every node pair (trade) or edge pair (shuffle) and every stub split is
    enumerated; proposals leaving the space are rejected onto the diagonal.
    """
    if method not in ("trade", "shuffle"):
        raise ValueError("method must be 'trade' or 'shuffle'")
    if len(space) == 0:
        raise ValueError("empty state space")
    if exact and len(space) > EXACT_STATE_LIMIT:
        raise ValueError(f"exact mode supports at most {EXACT_STATE_LIMIT} states")
    n, S = space.n_nodes, len(space)
    spec = space.spec
    rows_count = n if method == "trade" else space.n_edges
    acc = [dict() for _ in range(S)]
    if rows_count >= 2:
        moves = _trade_moves if method == "trade" else _shuffle_moves
        allowed_checks = trade_checks(spec) if method == "trade" else None
        for i, cols in enumerate(space.cols):
            row = acc[i]
            for key, num, den in moves(cols, n, spec):
                j = space.index.get(key)
                if j is None:
                    if allowed_checks is not None:
                        _assert_rejection_type(key, n, spec, allowed_checks)
                    j = i
                if exact:
                    row[j] = row.get(j, 0) + Fraction(num, den)
                else:
                    row[j] = row.get(j, 0.0) + num / den
    else:
        for i in range(S):
            acc[i][i] = Fraction(1) if exact else 1.0
    P = np.zeros((S, S))
    for i, row in enumerate(acc):
        for j, p in row.items():
            P[i, j] = float(p)
    exact_rows = None
    if exact:
        exact_rows = [[acc[i].get(j, Fraction(0)) for j in range(S)] for i in range(S)]
    return TransitionMatrix(P, method, space, exact_rows)


def _assert_rejection_type(cols, n, spec, checks):
    """A rejected trade must violate only types the driver actually checks."""
    relaxed = SpaceSpec(spec.directed,
                        spec.allow_self_loops or "s" in checks,
                        spec.allow_degenerate,
                        spec.allow_multi or "m" in checks)
    if not cols_in_space(cols, n, relaxed):
        raise AssertionError("trade proposal created a type its variant should exclude")


@dataclass
class Stationary:
    pi: np.ndarray              # a fixed point (equal mix of the closed classes)
    classes: list               # state-index arrays of the closed classes
    scc_count: int
    residual: float
    exact: list | None = None   # Fractions when computed exactly (single class)


def _check_stochastic(P: np.ndarray):
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ValueError("transition matrix must be square")
    if (P < -1e-15).any() or np.abs(P.sum(axis=1) - 1).max() > 1e-9:
        raise ValueError("matrix is not row-stochastic")


def _class_stationary(Q: np.ndarray, tol: float, max_iter: int = 100_000) -> tuple[np.ndarray, float]:
    k = Q.shape[0]
    if k == 1:
        return np.ones(1), 0.0
    A = (Q - np.eye(k)).T
    A[-1, :] = 1.0
    rhs = np.zeros(k)
    rhs[-1] = 1.0
    try:
        x = np.linalg.solve(A, rhs)
        x = np.clip(x, 0, None)
        x /= x.sum()
    except np.linalg.LinAlgError:
        x = np.full(k, 1.0 / k)
    # power iteration polish; a positive diagonal makes the chain aperiodic
    res = np.abs(x @ Q - x).max()
    it = 0
    while res > tol and it < max_iter:
        x = x @ Q
        x /= x.sum()
        res = np.abs(x @ Q - x).max()
        it += 1
    return x, float(res)


def _exact_solve(Q: list) -> list:
    k = len(Q)
    A = [[Q[j][i] - (1 if i == j else 0) for j in range(k)] for i in range(k)]
    A[-1] = [Fraction(1)] * k
    b = [Fraction(0)] * (k - 1) + [Fraction(1)]
    for col in range(k):
        piv = next(r for r in range(col, k) if A[r][col] != 0)
        A[col], A[piv] = A[piv], A[col]
        b[col], b[piv] = b[piv], b[col]
        for r in range(k):
            if r != col and A[r][col] != 0:
                f = A[r][col] / A[col][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
                b[r] -= f * b[col]
    return [b[i] / A[i][i] for i in range(k)]


def stationary(T: TransitionMatrix | np.ndarray, tol: float = 1e-12) -> Stationary:
    """Stationary distribution(s) of a row-stochastic matrix.

    Each closed communicating class gets its own fixed vector; ``pi`` is their
    equal mixture, which is itself a fixed point.
    """
    P = T.P if isinstance(T, TransitionMatrix) else np.asarray(T, dtype=float)
    _check_stochastic(P)
    S = P.shape[0]
    adj = (P > 0).astype(np.int8)
    n_scc, labels = connected_components(adj, directed=True, connection="strong")
    closed = []
    for c in range(n_scc):
        members = np.flatnonzero(labels == c)
        out_mass = P[np.ix_(members, np.flatnonzero(labels != c))].sum() if n_scc > 1 else 0.0
        if out_mass == 0:
            closed.append(members)
    pi = np.zeros(S)
    worst = 0.0
    for members in closed:
        x, res = _class_stationary(P[np.ix_(members, members)], tol)
        pi[members] += x / len(closed)
        worst = max(worst, res)
    exact = None
    if isinstance(T, TransitionMatrix) and T.exact is not None and n_scc == 1:
        exact = _exact_solve(T.exact)
    return Stationary(pi, closed, int(n_scc), worst, exact)


@dataclass
class Diagnostics:
    min_diagonal: float
    row_sum_error: float
    stub_column_sum_error: float    # regularity at stub level
    canonical_column_sums: np.ndarray


def chain_diagnostics(T: TransitionMatrix) -> Diagnostics:
    """Aperiodicity and regularity checks of a transition matrix.

    Canonical states lump ``N(S)`` stub configurations each, so regularity of
    the stub-level chain reads ``sum_S N(S) P(S, S') / N(S') == 1``.
    """
    P = T.P
    w = np.array([float(c) for c in T.space.stub_counts])
    stub_cols = (w @ P) / w
    return Diagnostics(float(np.diag(P).min()),
                       float(np.abs(P.sum(axis=1) - 1).max()),
                       float(np.abs(stub_cols - 1).max()),
                       P.sum(axis=0))


# ---------------------------------------------------------------------------
# verdicts
# ---------------------------------------------------------------------------

@dataclass
class UniformityVerdict:
    status: str                 # uniform | biased | disconnected
    max_deviation: float        # max |pi / pi* - 1| against the stub-weighted target
    flat_deviation: float       # same against the flat distribution over states
    scc_count: int
    n_states: int
    pi: np.ndarray = field(repr=False, default=None)
    target: np.ndarray = field(repr=False, default=None)

    @property
    def uniform(self) -> bool:
        return self.status == "uniform"


def verdict_for(space: StateSpace, method: str, tol: float = VERDICT_TOL,
                exact: bool = False) -> UniformityVerdict:
    if len(space) == 0:
        raise ValueError("empty state space")
    T = transition_matrix(space, method, exact=exact)
    st = stationary(T)
    target = space.target()
    if st.exact is not None:
        tot = sum(space.stub_counts)
        dev = float(max(abs(p / Fraction(c, tot) - 1) for p, c in zip(st.exact, space.stub_counts)))
    else:
        dev = float(np.max(np.abs(st.pi / target - 1)))
    flat = float(np.max(np.abs(st.pi * len(space) - 1)))
    if st.scc_count > 1:
        status = "disconnected"
    elif dev <= tol:
        status = "uniform"
    else:
        status = "biased"
    return UniformityVerdict(status, dev, flat, st.scc_count, len(space), st.pi, target)


def uniformity_verdict(d: DegreeSequence, spec: SpaceSpec, method: str = "trade",
                       tol: float = VERDICT_TOL, exact: bool = False, **caps) -> UniformityVerdict:
    """Does the chain's stationary distribution equal the stub-weighted target?"""
    return verdict_for(enumerate_space(d, spec, **caps), method, tol, exact)


# ---------------------------------------------------------------------------
# counterexample search
# ---------------------------------------------------------------------------

def _sorted_tuples(values: Sequence, length: int) -> Iterator[tuple]:
    return itertools.combinations_with_replacement(values, length)


def degree_sequences(max_nodes: int, max_edges: int, max_degree: int, directed: bool,
                     degree_cap: int = DEFAULT_DEGREE_CAP) -> list[DegreeSequence]:
    """Canonical degree sequences within the bounds, smallest total degree first.

    Every node and hyperedge has positive degree; directed bounds apply to
    tail and head degrees separately, and a directed hyperedge may have an
    empty tail or head (but not both).
    """
    if directed:
        vals = [(t, h) for t in range(max_degree + 1) for h in range(max_degree + 1) if t + h > 0]
    else:
        vals = list(range(1, max_degree + 1))
    out = []
    for n in range(2, max_nodes + 1):
        node_seqs = list(_sorted_tuples(vals, n))
        for m in range(1, max_edges + 1):
            edge_seqs = list(_sorted_tuples(vals, m))
            by_sum: dict = {}
            for es in edge_seqs:
                key = (sum(t for t, _ in es), sum(h for _, h in es)) if directed else sum(es)
                by_sum.setdefault(key, []).append(es)
            for ns in node_seqs:
                key = (sum(t for t, _ in ns), sum(h for _, h in ns)) if directed else sum(ns)
                total = sum(key) if directed else key
                if total > degree_cap:
                    continue
                for es in by_sum.get(key, ()):
                    out.append(DegreeSequence(ns, es, directed))
    out.sort(key=lambda d: (d.total, len(d.node_degrees), len(d.edge_degrees),
                            d.node_degrees, d.edge_degrees))
    return out


@dataclass
class SearchResult:
    degrees: DegreeSequence
    spec: SpaceSpec
    method: str
    verdict: UniformityVerdict


def _verdicts_for_sequence(args):
    d, specs, methods, tol, caps = args
    out = []
    for spec in specs:
        if spec.directed != d.directed:
            continue
        try:
            space = enumerate_space(d, spec, **caps)
        except CapExceeded:
            continue
        if len(space) == 0:
            continue
        for method in methods:
            out.append(SearchResult(d, spec, method, verdict_for(space, method, tol)))
    return out


def search_verdicts(max_nodes: int, max_edges: int, max_degree: int,
                    spaces: Iterable[SpaceSpec], methods: Iterable[str] = ("trade",),
                    tol: float = VERDICT_TOL, jobs: int = 1, **caps) -> Iterator[SearchResult]:
    """Yield a verdict for every (degree sequence, space, method) within bounds.

    Spaces that exceed the enumeration caps are skipped. Results come in a
    deterministic order (smallest sequences first) regardless of ``jobs``.
    """
    spaces = list(spaces)
    methods = list(methods)
    dirs = sorted({s.directed for s in spaces})
    seqs = []
    for directed in dirs:
        seqs += degree_sequences(max_nodes, max_edges, max_degree, directed,
                                 caps.get("degree_cap", DEFAULT_DEGREE_CAP))
    seqs.sort(key=lambda d: (d.total, d.directed, len(d.node_degrees), len(d.edge_degrees),
                             d.node_degrees, d.edge_degrees))
    tasks = ((d, spaces, methods, tol, caps) for d in seqs)
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(jobs) as pool:
            for batch in pool.map(_verdicts_for_sequence, tasks, chunksize=8):
                yield from batch
    else:
        for t in tasks:
            yield from _verdicts_for_sequence(t)


def bias_search(max_nodes: int, max_edges: int, max_degree: int,
                spaces: Iterable[SpaceSpec], methods: Iterable[str] = ("trade",),
                limit: int | None = None, **kw) -> list[SearchResult]:
    """Every non-uniform verdict within the bounds (at most ``limit`` of them)."""
    hits = []
    for r in search_verdicts(max_nodes, max_edges, max_degree, spaces, methods, **kw):
        if not r.verdict.uniform:
            hits.append(r)
            if limit is not None and len(hits) >= limit:
                break
    return hits


# ---------------------------------------------------------------------------
# constrained partitions (sequential construction vs. propose-then-reject)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Split:
    """One multiset-distinct first part and its number of stub-level splits."""

    part: tuple         # per side: sorted tuple of (element, multiplicity)
    weight: int

    def multiset(self, side: int = 0) -> Counter:
        return Counter(dict(self.part[side]))


Constraint = Callable[[tuple], bool]


def differ(x, y, side: int = 0) -> Constraint:
    """Multiplicities of x and y in the first part differ (on one side)."""
    return lambda parts: parts[side][x] != parts[side][y]


def any_of(*constraints: Constraint) -> Constraint:
    return lambda parts: any(c(parts) for c in constraints)


def split_across(x) -> Constraint:
    """x appears on exactly one side of the first part (and thus once in the second)."""
    return lambda parts: sum(p[x] for p in parts) == 1


def _as_sides(combined, k):
    if isinstance(combined, Counter) or isinstance(combined, dict):
        return [Counter(combined)], [k]
    sides = [Counter(c) for c in combined]
    ks = list(k) if isinstance(k, (tuple, list)) else [k]
    if len(ks) != len(sides):
        raise ValueError("need one part size per side")
    return sides, ks


def _all_assignments(sides, ks, order):
    """Every first-part assignment element -> per-side multiplicities."""
    choices = []
    for x in order:
        choices.append(list(itertools.product(*[range(s[x] + 1) for s in sides])))
    for combo in itertools.product(*choices):
        if all(sum(c[i] for c in combo) == ks[i] for i in range(len(sides))):
            yield combo


def _parts_of(order, combo, n_sides):
    return tuple(Counter({x: c[i] for x, c in zip(order, combo) if c[i]}) for i in range(n_sides))


def _part_key(parts) -> tuple:
    return tuple(tuple(sorted(p.items())) for p in parts)


def _default_order(sides):
    seen = []
    for s in sides:
        for x in s:
            if x not in seen:
                seen.append(x)
    return seen


def enumerate_constrained_partitions(combined, k, constraints: Sequence[Constraint] = ()) -> list[Split]:
    """All multiset-distinct first parts satisfying every constraint.

    ``combined`` is a multiset (or a sequence of multisets for tail/head sides,
    with ``k`` then a matching sequence of sizes). Each split carries its stub
    weight, the number of stub-level splits producing it, so weighting by it
    reproduces a uniform stub split conditioned on the constraints.
    """
    sides, ks = _as_sides(combined, k)
    order = _default_order(sides)
    out = []
    for combo in _all_assignments(sides, ks, order):
        parts = _parts_of(order, combo, len(sides))
        if all(c(parts) for c in constraints):
            w = 1
            for s, p in zip(sides, parts):
                for x, mult in s.items():
                    w *= math.comb(mult, p[x])
            out.append(Split(_part_key(parts), w))
    out.sort(key=lambda s: s.part)
    return out


def sequential_partition_bias(combined, k, constraints: Sequence[Constraint] = (),
                              element_order: Sequence | None = None) -> dict:
    """Distribution induced by building the first part one element at a time.

    For each element in ``element_order`` the number of copies placed in the
    first part (per side) is drawn uniformly among the values that still allow
    a valid completion. Returns ``{part_key: Fraction}``.
    """
    sides, ks = _as_sides(combined, k)
    order = list(element_order) if element_order is not None else _default_order(sides)
    valid = []
    for combo in _all_assignments(sides, ks, order):
        if all(c(_parts_of(order, combo, len(sides))) for c in constraints):
            valid.append(combo)
    dist: dict = {}

    def rec(i, prefix, pool, prob):
        if i == len(order):
            key = _part_key(_parts_of(order, prefix, len(sides)))
            dist[key] = dist.get(key, Fraction(0)) + prob
            return
        options = sorted({c[i] for c in pool})
        for val in options:
            rec(i + 1, prefix + (val,), [c for c in pool if c[i] == val],
                prob / len(options))

    if valid:
        rec(0, (), valid, Fraction(1))
    return dist


def partition_key(*sides: Iterable) -> tuple:
    """Key of a first part given as element lists per side, e.g. ``partition_key("xxa")``."""
    return _part_key(tuple(Counter(s) for s in sides))


# ---------------------------------------------------------------------------
# empirical cross-check
# ---------------------------------------------------------------------------

def _rows_key(rows, n_nodes: int, n_edges: int) -> tuple:
    """Canonical column key straight from kernel stub rows."""
    width = 2 if rows.directed else 1
    cols = np.zeros((n_edges, width * n_nodes), dtype=np.int64)
    sides = [(rows.ptr_a, rows.stubs_a), (rows.ptr_b, rows.stubs_b)][:width]
    for k, (ptr, stubs) in enumerate(sides):
        owner = np.repeat(np.arange(len(ptr) - 1), np.diff(ptr))
        if rows.by == "node":
            np.add.at(cols, (stubs, k * n_nodes + owner), 1)
        else:
            np.add.at(cols, (owner, k * n_nodes + stubs), 1)
    return tuple(sorted(tuple(c) for c in cols.tolist()))


@dataclass
class EmpiricalResult:
    space: StateSpace
    counts: np.ndarray
    expected: np.ndarray        # exact stationary probabilities
    chi2: float
    p_value: float

    @property
    def frequencies(self) -> np.ndarray:
        return self.counts / self.counts.sum()


def empirical_distribution(H0: Hypergraph, spec: SpaceSpec, method: str = "trade",
                           samples: int = 10_000, steps_per_sample: int = 50, seed: int = 0,
                           **caps) -> EmpiricalResult:
    """Run independent chains from ``H0`` and compare end states with the exact chain."""
    from scipy.stats import chisquare

    from .core import degrees
    from .sampling import sample

    space = enumerate_space(degrees(H0), spec, **caps)
    T = transition_matrix(space, method)
    st = stationary(T)
    start = space.locate(H0)
    expected = st.pi
    for members in st.classes:
        if start in members:
            expected = np.zeros(len(space))
            x, _ = _class_stationary(T.P[np.ix_(members, members)], 1e-12)
            expected[members] = x
    seeds = np.random.SeedSequence(seed).generate_state(samples)
    counts = np.zeros(len(space), dtype=np.int64)
    if spec.unconstrained:
        from .kernels import run_pair_chain, stub_rows

        rows0 = stub_rows(H0, by="node" if method == "trade" else "edge")
        for s in seeds:
            rows = rows0.copy()
            if steps_per_sample:
                run_pair_chain(rows, steps_per_sample, int(s))
            counts[space.index[_rows_key(rows, H0.n_nodes, H0.n_edges)]] += 1
    else:
        for s in seeds:
            end = sample(H0, spec, method, steps_per_sample, int(s))
            counts[space.locate(end)] += 1
    support = expected > 0
    if support.sum() <= 1:
        return EmpiricalResult(space, counts, expected, 0.0, 1.0)
    res = chisquare(counts[support], expected[support] * counts.sum())
    return EmpiricalResult(space, counts, expected, float(res.statistic), float(res.pvalue))


# the running example: I_v + I_w = {x, x, y, a, a, b, z}, |I_v| = 3, where
# x/y and a/b would otherwise form multi-hyperedges
DEMO_COMBINED = Counter("xxyaabz")
DEMO_K = 3
DEMO_CONSTRAINTS = (differ("x", "y"), differ("a", "b"))


def demo_partitions(order: str = "xyabz"):
    """Rows (order, part, stub_weight, sequential probability) for the running example."""
    splits = enumerate_constrained_partitions(DEMO_COMBINED, DEMO_K, DEMO_CONSTRAINTS)
    probs = sequential_partition_bias(DEMO_COMBINED, DEMO_K, DEMO_CONSTRAINTS, list(order))
    for s in splits:
        part = "".join(x * m for x, m in s.part[0])
        yield order, "{" + ",".join(part) + "}", s.weight, probs.get(s.part, Fraction(0))
