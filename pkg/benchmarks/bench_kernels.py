"""Time the pair-chain kernels under numba and under the pure-Python fallback.

Each backend runs in its own interpreter (the backend is chosen at import
time from HCB_NO_NUMBA). Both backends draw the same random stream, so the
script also checks that they end in the same hypergraph.

    python benchmarks/bench_kernels.py [--steps N] [--repeat R]
"""

import argparse
import json
import os
import subprocess
import sys

PROBE = r"""
import json, sys, time
from hypercurveball import _jit
from hypercurveball.core import canonicalize
from hypercurveball.datagen import gen_artificial
from hypercurveball.kernels import run_pair_chain, run_pair_chain_recorded, stub_rows, to_hypergraph

steps, repeat = int(sys.argv[1]), int(sys.argv[2])
out = {"backend": _jit.BACKEND, "rows": []}
for which in (1, 3):
    H = gen_artificial(which)
    for by, method in (("node", "trade"), ("edge", "shuffle")):
        # warm-up compiles the numba kernels outside the timed region
        run_pair_chain(stub_rows(H, by), 10, 0)
        run_pair_chain_recorded(stub_rows(H, by), 10, 5, 0)
        best = float("inf")
        for _ in range(repeat):
            rows = stub_rows(H, by)
            t = time.perf_counter()
            run_pair_chain_recorded(rows, steps, max(1, steps // 100), 12345)
            best = min(best, time.perf_counter() - t)
        out["rows"].append({"dataset": which, "method": method, "seconds": best,
                            "final": hash(canonicalize(to_hypergraph(rows)))})
print(json.dumps(out))
"""


def probe(no_numba: bool, steps: int, repeat: int) -> dict:
    env = dict(os.environ)
    env.pop("HCB_NO_NUMBA", None)
    if no_numba:
        env["HCB_NO_NUMBA"] = "1"
    res = subprocess.run([sys.executable, "-c", PROBE, str(steps), str(repeat)], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=5000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    fast = probe(False, args.steps, args.repeat)
    slow = probe(True, args.steps, args.repeat)
    if fast["backend"] != "numba":
        print("numba is not importable; both runs used the fallback", file=sys.stderr)
    print(f"steps={args.steps} repeat={args.repeat} (best of)")
    print(f"{'dataset':>7} {'method':>8} {'numba s':>10} {'python s':>10} {'speedup':>8} same")
    same_all = True
    for a, b in zip(fast["rows"], slow["rows"]):
        same = a["final"] == b["final"]
        same_all &= same
        print(f"{a['dataset']:>7} {a['method']:>8} {a['seconds']:>10.4f} {b['seconds']:>10.4f} "
              f"{b['seconds'] / a['seconds']:>8.1f} {'yes' if same else 'NO'}")
    return 0 if same_all else 1


if __name__ == "__main__":
    sys.exit(main())
