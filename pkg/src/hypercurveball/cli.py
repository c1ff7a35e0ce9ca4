"""Command-line front end (``hcb``).

Exit codes: 0 success, 1 usage error, 2 data error, 3 verification failure
(a non-uniform verdict under ``--expect-uniform``).
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
from pathlib import Path

from . import __version__
from ._jit import BACKEND
from .core import DegreeSequence, SpaceSpec, degrees, in_space

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_VERIFY = 0, 1, 2, 3
VERDICT_COLUMNS = ("degree_seq", "space", "method", "n_states", "scc_count", "max_deviation", "verdict")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _default_seed() -> int:
    raw = os.environ.get("HCB_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"HCB_SEED must be an integer, got {raw!r}") from None


def _degree_list(text: str, directed: bool) -> tuple:
    out = []
    for tok in filter(None, (t.strip() for t in text.split(","))):
        if directed:
            t, sep, h = tok.partition(":")
            if not sep:
                raise UsageError(f"directed degree {tok!r} must be a t:h pair")
            out.append((int(t), int(h)))
        else:
            out.append(int(tok))
    if not out:
        raise UsageError("empty degree list")
    return tuple(out)


def _space(args) -> SpaceSpec:
    try:
        return SpaceSpec.parse(args.space, args.directed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _methods(choice: str) -> list:
    return ["trade", "shuffle"] if choice == "both" else [choice]


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", newline=""), True


def _emit(text: str, path) -> None:
    fh, close = _open_out(path)
    try:
        fh.write(text)
    finally:
        if close:
            fh.close()


def _load(args):
    from .datagen import gen_artificial, read_hypergraph

    if getattr(args, "artificial", None):
        if args.directed:
            raise UsageError("artificial datasets are undirected")
        return gen_artificial(args.artificial), f"artificial_{args.artificial}"
    if not getattr(args, "input", None):
        raise UsageError("need --in FILE (or --artificial N)")
    return read_hypergraph(args.input, args.directed), Path(args.input).stem


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_sample(args) -> int:
    from .datagen import format_hypergraph
    from .sampling import sample

    H, _ = _load(args)
    spec = _space(args)
    if not in_space(H, spec):
        print(f"error: input hypergraph is not in {spec.name}", file=sys.stderr)
        return EXIT_DATA
    out = sample(H, spec, args.method, args.steps, args.seed)
    _emit(format_hypergraph(out), args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    from .mixbench import estimate_mixing_time, run_mixing_experiment

    H, name = _load(args)
    spec = _space(args)
    if not in_space(H, spec):
        print(f"error: input hypergraph is not in {spec.name}", file=sys.stderr)
        return EXIT_DATA
    buf = io.StringIO()
    for i, method in enumerate(_methods(args.method)):
        curve = run_mixing_experiment(H, spec, method, args.steps, args.runs, args.record_every,
                                      args.seed, name, args.jobs)
        curve.to_csv(buf, header=(i == 0))
        est = estimate_mixing_time(curve, args.tail_frac, args.band)
        when = est.step if est.mixed else "not mixed"
        print(f"# {name} {method}: L={est.L:.4f} mixing_time={when}", file=sys.stderr)
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def _verdict_row(d, spec, method, v) -> tuple:
    return (str(d), spec.flags or "-", method, v.n_states, v.scc_count, f"{v.max_deviation:.3e}", v.status)


def cmd_verify(args) -> int:
    from .chainlab import CapExceeded, uniformity_verdict

    d = DegreeSequence(_degree_list(args.nodes, args.directed), _degree_list(args.edges, args.directed),
                       args.directed)
    spec = _space(args)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(VERDICT_COLUMNS)
    ok = True
    for method in _methods(args.method):
        try:
            v = uniformity_verdict(d, spec, method, exact=args.exact, degree_cap=args.cap)
        except CapExceeded as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_DATA
        w.writerow(_verdict_row(d, spec, method, v))
        ok &= v.uniform
    _emit(buf.getvalue(), args.out)
    return EXIT_VERIFY if args.expect_uniform and not ok else EXIT_OK


def cmd_search(args) -> int:
    from .chainlab import search_verdicts

    flags = args.space_list or [args.space]
    try:
        specs = [SpaceSpec.parse(f, args.directed) for f in flags]
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(VERDICT_COLUMNS)
    found = 0
    for r in search_verdicts(args.max_nodes, args.max_edges, args.max_degree, specs,
                             _methods(args.method), jobs=args.jobs, degree_cap=args.cap):
        if args.all or not r.verdict.uniform:
            w.writerow(_verdict_row(r.degrees, r.spec, r.method, r.verdict))
        if not r.verdict.uniform:
            found += 1
            if args.limit and found >= args.limit:
                break
    _emit(buf.getvalue(), args.out)
    print(f"# non-uniform verdicts: {found}", file=sys.stderr)
    return EXIT_VERIFY if args.expect_uniform and found else EXIT_OK


def cmd_gen(args) -> int:
    from .datagen import format_hypergraph, gen_artificial

    _emit(format_hypergraph(gen_artificial(args.artificial)), args.out)
    return EXIT_OK


def cmd_stats(args) -> int:
    from .datagen import stats_report

    H, name = _load(args)
    _emit(stats_report(H, args.name or name), args.out)
    return EXIT_OK


def cmd_fit(args) -> int:
    from .mixbench import fit_double_exponential, fit_loglog_scaling, read_curves, write_fits

    if bool(args.curves) == bool(args.points):
        raise UsageError("fit needs exactly one of --curves or --points")
    buf = io.StringIO()
    if args.curves:
        with open(args.curves, newline="") as fh:
            curves = read_curves(fh)
        rows = []
        for c in curves:
            fit = fit_double_exponential(c, band=args.band)
            if not fit.converged:
                print(f"warning: fit did not converge for {c.dataset}/{c.method}", file=sys.stderr)
            rows.append(fit.row(c.dataset, c.method))
        write_fits(rows, buf)
    else:
        with open(args.points, newline="") as fh:
            reader = csv.DictReader(fh)
            if not reader.fieldnames or not {"f_min", "mixing_time"} <= set(reader.fieldnames):
                raise ValueError("points CSV needs columns f_min, mixing_time")
            pts = [(float(r["f_min"]), float(r["mixing_time"])) for r in reader]
        slope, intercept = fit_loglog_scaling(pts)
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("slope", "intercept", "prefactor"))
        w.writerow((repr(slope), repr(intercept), repr(math.exp(intercept))))
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_partitions(args) -> int:
    from .chainlab import demo_partitions

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("order", "part", "stub_weight", "sequential_probability"))
    for order, part, weight, prob in demo_partitions(args.order):
        w.writerow((order, part, weight, str(prob)))
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hcb", description="Degree-preserving hypergraph randomization")
    p.add_argument("--version", action="version", version=f"hcb {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, space=True, inp=True):
        sp.add_argument("--directed", action="store_true", help="directed hypergraphs")
        sp.add_argument("--seed", type=int, default=None, help="base seed (default: $HCB_SEED or 0)")
        sp.add_argument("--out", default=None, help="output file (default: stdout)")
        if space:
            sp.add_argument("--space", default="dm", help="allowed hyperedge types, subset of 'sdm'")
        if inp:
            sp.add_argument("--in", dest="input", help="hypergraph text file")
            sp.add_argument("--artificial", type=int, choices=(1, 2, 3), help="use an artificial dataset")

    s = sub.add_parser("sample", help="randomize a hypergraph")
    common(s)
    s.add_argument("--method", choices=("trade", "shuffle"), default="trade")
    s.add_argument("--steps", type=int, required=True)
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("bench", help="mixing curves (perturbation degree vs. steps)")
    common(s)
    s.add_argument("--method", choices=("trade", "shuffle", "both"), default="both")
    s.add_argument("--steps", type=int, required=True)
    s.add_argument("--runs", type=int, default=20)
    s.add_argument("--record-every", type=int, default=1)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--tail-frac", type=float, default=0.1)
    s.add_argument("--band", type=float, default=0.02)
    s.set_defaults(func=cmd_bench)

    s = sub.add_parser("verify", help="exact stationary check for one degree sequence")
    common(s, inp=False)
    s.add_argument("--nodes", required=True, help="node degrees, e.g. 2,2 or 2:2,1:1")
    s.add_argument("--edges", required=True, help="hyperedge degrees")
    s.add_argument("--method", choices=("trade", "shuffle", "both"), default="trade")
    s.add_argument("--exact", action="store_true", help="rational arithmetic (<= 64 states)")
    s.add_argument("--cap", type=int, default=16, help="maximum total degree")
    s.add_argument("--expect-uniform", action="store_true")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("search", help="look for non-uniform verdicts in small spaces")
    common(s, inp=False)
    s.add_argument("--spaces", dest="space_list", nargs="+", help="several space flag sets")
    s.add_argument("--max-nodes", type=int, default=3)
    s.add_argument("--max-edges", type=int, default=3)
    s.add_argument("--max-degree", type=int, default=3)
    s.add_argument("--method", choices=("trade", "shuffle", "both"), default="trade")
    s.add_argument("--limit", type=int, default=0, help="stop after this many hits (0: no limit)")
    s.add_argument("--all", action="store_true", help="list uniform verdicts too")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--cap", type=int, default=16, help="maximum total degree")
    s.add_argument("--expect-uniform", action="store_true")
    s.set_defaults(func=cmd_search)

    s = sub.add_parser("gen", help="write an artificial dataset")
    common(s, space=False, inp=False)
    s.add_argument("--artificial", type=int, choices=(1, 2, 3), required=True)
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("stats", help="degree statistics table")
    common(s, space=False)
    s.add_argument("--name", default=None, help="dataset column value")
    s.set_defaults(func=cmd_stats)

    s = sub.add_parser("fit", help="double-exponential or log-log fits")
    common(s, space=False, inp=False)
    s.add_argument("--curves", help="curve CSV from 'bench'")
    s.add_argument("--points", help="CSV with f_min, mixing_time columns")
    s.add_argument("--band", type=float, default=0.02)
    s.set_defaults(func=cmd_fit)

    s = sub.add_parser("partitions", help="sequential-partition bias demonstration")
    common(s, space=False, inp=False)
    s.add_argument("--order", default="xyabz", help="element order for the sequential build")
    s.set_defaults(func=cmd_partitions)
    return p


def _banner(args, argv) -> str:
    return f"# hcb {__version__} backend={BACKEND} seed={args.seed} argv={' '.join(argv)}"


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        if args.seed is None:
            args.seed = _default_seed()
        print(_banner(args, argv), file=sys.stderr)
        return args.func(args)
    except UsageError as exc:
        msg = str(exc)
        print(msg if msg.startswith("hcb") else f"hcb: error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
