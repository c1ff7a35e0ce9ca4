"""Hot loops for unconstrained pair moves on stub arrays.

A hypertrade repartitions the stubs of two nodes; a hyperedge shuffle
repartitions the stubs of two hyperedges. Both are the same operation on a
"row" view of the incidence structure: rows are nodes (trade) or hyperedges
(shuffle), and each row owns a slice ``stubs[ptr[r]:ptr[r+1]]`` listing the
column labels it is incident to, with repetition for multiplicity. Directed
hypergraphs carry a second, independent ``(ptr, stubs)`` pair for heads.

Rows are kept sorted so the perturbation contribution of a row against its
initial contents is a linear merge. Only ``np.random.random`` is used, so the
numba and pure-Python paths replay identical trajectories for a given seed.
"""

import numpy as np

from ._jit import njit, BACKEND  # noqa: F401


@njit(cache=True)
def _row_diff(cur, init, lo, hi):
    """Sum over labels of |count in cur - count in init| for one sorted row."""
    i = lo
    j = lo
    common = 0
    while i < hi and j < hi:
        a = cur[i]
        b = init[j]
        if a == b:
            common += 1
            i += 1
            j += 1
        elif a < b:
            i += 1
        else:
            j += 1
    return 2 * ((hi - lo) - common)


@njit(cache=True)
def _split_rows(ptr, stubs, r, s, pool):
    """Uniform stub-level repartition of rows r and s, keeping both row sizes."""
    lo_r = ptr[r]
    hi_r = ptr[r + 1]
    lo_s = ptr[s]
    hi_s = ptr[s + 1]
    k = hi_r - lo_r
    n = k + (hi_s - lo_s)
    if n == 0 or k == 0 or k == n:
        return
    for t in range(k):
        pool[t] = stubs[lo_r + t]
    for t in range(n - k):
        pool[k + t] = stubs[lo_s + t]
    # partial Fisher-Yates on the smaller part
    m = k if k <= n - k else n - k
    for t in range(m):
        q = t + int(np.random.random() * (n - t))
        tmp = pool[t]
        pool[t] = pool[q]
        pool[q] = tmp
    if m == k:
        for t in range(k):
            stubs[lo_r + t] = pool[t]
        for t in range(n - k):
            stubs[lo_s + t] = pool[k + t]
    else:
        for t in range(n - k):
            stubs[lo_s + t] = pool[t]
        for t in range(k):
            stubs[lo_r + t] = pool[n - k + t]
    stubs[lo_r:hi_r] = np.sort(stubs[lo_r:hi_r])
    stubs[lo_s:hi_s] = np.sort(stubs[lo_s:hi_s])


@njit(cache=True)
def _pick_pair(n_rows):
    r = int(np.random.random() * n_rows)
    s = int(np.random.random() * (n_rows - 1))
    if s >= r:
        s += 1
    return r, s


def _pool_size(ptr_a, ptr_b):
    big = 0
    for ptr in (ptr_a, ptr_b):
        if len(ptr) > 1:
            sizes = np.diff(ptr)
            if len(sizes) >= 2:
                top2 = np.sort(sizes)[-2:]
                big = max(big, int(top2.sum()))
            elif len(sizes) == 1:
                big = max(big, int(sizes[0]))
    return max(big, 1)


@njit(cache=True)
def _run(ptr_a, stubs_a, ptr_b, stubs_b, steps, seed, pool):
    np.random.seed(seed)
    n_rows = len(ptr_a) - 1
    directed = len(stubs_b) > 0
    for _ in range(steps):
        r, s = _pick_pair(n_rows)
        _split_rows(ptr_a, stubs_a, r, s, pool)
        if directed:
            _split_rows(ptr_b, stubs_b, r, s, pool)


@njit(cache=True)
def _run_recorded(ptr_a, stubs_a, init_a, ptr_b, stubs_b, init_b, steps, record_every,
                  seed, pool, out):
    np.random.seed(seed)
    n_rows = len(ptr_a) - 1
    directed = len(stubs_b) > 0
    num = 0
    for r in range(n_rows):
        num += _row_diff(stubs_a, init_a, ptr_a[r], ptr_a[r + 1])
        if directed:
            num += _row_diff(stubs_b, init_b, ptr_b[r], ptr_b[r + 1])
    out[0] = num
    slot = 1
    for step in range(1, steps + 1):
        r, s = _pick_pair(n_rows)
        before = (_row_diff(stubs_a, init_a, ptr_a[r], ptr_a[r + 1])
                  + _row_diff(stubs_a, init_a, ptr_a[s], ptr_a[s + 1]))
        _split_rows(ptr_a, stubs_a, r, s, pool)
        after = (_row_diff(stubs_a, init_a, ptr_a[r], ptr_a[r + 1])
                 + _row_diff(stubs_a, init_a, ptr_a[s], ptr_a[s + 1]))
        if directed:
            before += (_row_diff(stubs_b, init_b, ptr_b[r], ptr_b[r + 1])
                       + _row_diff(stubs_b, init_b, ptr_b[s], ptr_b[s + 1]))
            _split_rows(ptr_b, stubs_b, r, s, pool)
            after += (_row_diff(stubs_b, init_b, ptr_b[r], ptr_b[r + 1])
                      + _row_diff(stubs_b, init_b, ptr_b[s], ptr_b[s + 1]))
        num += after - before
        if step % record_every == 0:
            out[slot] = num
            slot += 1


def run_pair_chain(rows, steps, seed):
    """Run ``steps`` unconstrained pair moves in place on ``rows``.

    ``rows`` is a :class:`StubRows` (see :func:`stub_rows`); returns it.
    """
    if rows.n_rows < 2:
        raise ValueError("need at least two rows to pick a pair")
    pool = np.empty(_pool_size(rows.ptr_a, rows.ptr_b), dtype=np.int64)
    _run(rows.ptr_a, rows.stubs_a, rows.ptr_b, rows.stubs_b, int(steps), int(seed), pool)
    return rows


def run_pair_chain_recorded(rows, steps, record_every, seed):
    """Like :func:`run_pair_chain` but returns the perturbation numerator trace.

    Entry ``k`` is sum |m - m0| over all incidences after ``k * record_every``
    steps; divide by ``2 * rows.total`` for the perturbation degree.
    """
    if rows.n_rows < 2:
        raise ValueError("need at least two rows to pick a pair")
    if record_every < 1:
        raise ValueError("record_every must be >= 1")
    pool = np.empty(_pool_size(rows.ptr_a, rows.ptr_b), dtype=np.int64)
    out = np.zeros(steps // record_every + 1, dtype=np.int64)
    init_a = rows.stubs_a.copy()
    init_b = rows.stubs_b.copy()
    _run_recorded(rows.ptr_a, rows.stubs_a, init_a, rows.ptr_b, rows.stubs_b, init_b,
                  int(steps), int(record_every), int(seed), pool, out)
    return out


class StubRows:
    """Row-major stub arrays of a hypergraph viewed by nodes or by hyperedges."""

    __slots__ = ("ptr_a", "stubs_a", "ptr_b", "stubs_b", "directed", "by", "n_cols")

    def __init__(self, ptr_a, stubs_a, ptr_b, stubs_b, directed, by, n_cols):
        self.ptr_a = ptr_a
        self.stubs_a = stubs_a
        self.ptr_b = ptr_b
        self.stubs_b = stubs_b
        self.directed = directed
        self.by = by
        self.n_cols = n_cols

    @property
    def n_rows(self) -> int:
        return len(self.ptr_a) - 1

    @property
    def total(self) -> int:
        return len(self.stubs_a) + len(self.stubs_b)

    def copy(self) -> "StubRows":
        return StubRows(self.ptr_a, self.stubs_a.copy(), self.ptr_b, self.stubs_b.copy(),
                        self.directed, self.by, self.n_cols)


def _pack(lists):
    ptr = np.zeros(len(lists) + 1, dtype=np.int64)
    ptr[1:] = np.cumsum([len(x) for x in lists])
    stubs = np.fromiter((v for x in lists for v in sorted(x)), dtype=np.int64, count=int(ptr[-1]))
    return ptr, stubs


def stub_rows(H, by: str = "node") -> StubRows:
    """Pack hypergraph ``H`` into row stub arrays (``by`` is "node" or "edge")."""
    if by == "node":
        rows = [H.incidence(v) for v in range(H.n_nodes)]
        n_cols = H.n_edges
    elif by == "edge":
        rows = H.edges()
        n_cols = H.n_nodes
    else:
        raise ValueError("by must be 'node' or 'edge'")
    expand = lambda c: [k for k, m in c.items() for _ in range(m)]  # noqa: E731
    if H.directed:
        ptr_a, stubs_a = _pack([expand(r[0]) for r in rows])
        ptr_b, stubs_b = _pack([expand(r[1]) for r in rows])
    else:
        ptr_a, stubs_a = _pack([expand(r) for r in rows])
        ptr_b = np.zeros(len(rows) + 1, dtype=np.int64)
        stubs_b = np.zeros(0, dtype=np.int64)
    return StubRows(ptr_a, stubs_a, ptr_b, stubs_b, H.directed, by, n_cols)


def to_hypergraph(rows: StubRows, node_names=None):
    """Rebuild a :class:`~hypercurveball.core.Hypergraph` from row stub arrays."""
    from collections import Counter
    from .core import Hypergraph

    n_rows = rows.n_rows

    def row(ptr, stubs, r):
        return Counter(stubs[ptr[r]:ptr[r + 1]].tolist())

    if rows.by == "node":
        if rows.directed:
            inc = [(row(rows.ptr_a, rows.stubs_a, v), row(rows.ptr_b, rows.stubs_b, v))
                   for v in range(n_rows)]
        else:
            inc = [row(rows.ptr_a, rows.stubs_a, v) for v in range(n_rows)]
        return Hypergraph(inc, rows.n_cols, rows.directed, node_names)
    if rows.directed:
        edges = [(rows.stubs_a[rows.ptr_a[e]:rows.ptr_a[e + 1]].tolist(),
                  rows.stubs_b[rows.ptr_b[e]:rows.ptr_b[e + 1]].tolist()) for e in range(n_rows)]
    else:
        edges = [rows.stubs_a[rows.ptr_a[e]:rows.ptr_a[e + 1]].tolist() for e in range(n_rows)]
    return Hypergraph.from_edges(edges, rows.directed, n_nodes=rows.n_cols, node_names=node_names)
