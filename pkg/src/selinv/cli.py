"""Command-line entry point: ``selinv {solve,simulate,fillin-experiment,verify,gen}``.

Every subcommand writes CSV files into ``--output-dir``; unless ``--no-plot``
is given, a PNG rendering of the main result is written next to them.

Exit codes: 0 success, 1 numerical failure, 2 invalid input,
3 verification failure.
"""
from __future__ import annotations

import argparse
import csv
import logging
import sys
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import factor_graph as fg
from . import kron, mmio, plotting, verify
from .errors import (InvalidInputError, NonConvergenceError, NotPositiveDefiniteError,
                     NumericalFailure, SingularMatrixError)
from .generators import random_closed_pattern, random_spd
from .local import (CONVERGENCE_ATOL, LocalProblem, discover_comm_graph,
                    run_asynchronous, run_synchronous)
from .pattern import (FactorGraphTopology, PrimaryOrder, SymmetricSparseMatrix,
                      fill_in_count, pattern_from_graph, random_order,
                      spanning_tree_order, symbolic_fill_in)
from .solver import RECONSTRUCTION_RTOL, ldl_factorize, solve

EXIT_OK, EXIT_NUMERICAL, EXIT_INVALID, EXIT_VERIFY = 0, 1, 2, 3

log = logging.getLogger("selinv")


class VerificationFailure(Exception):
    pass


@dataclass
class Problem:
    """A system in primary-order positions, plus how to map back to labels."""

    a: SymmetricSparseMatrix
    b: np.ndarray
    order: PrimaryOrder
    graph: FactorGraphTopology
    from_factor_graph: bool


# --- input -------------------------------------------------------------------

def _is_factor_graph(path: Path) -> bool:
    with open(path) as fh:
        for line in fh:
            if line.strip():
                return line.split()[0] == "VARS"
    return False


def _graph_of(a: SymmetricSparseMatrix) -> FactorGraphTopology:
    n = a.n
    scopes = [(i, j) for i, j in a.pattern.off_diagonal] + [(v,) for v in range(1, n + 1)]
    return FactorGraphTopology(n, scopes)


def read_order_file(path, n: int) -> PrimaryOrder:
    """Labels in elimination order, whitespace separated."""
    try:
        labels = [int(t) for t in Path(path).read_text().split()]
    except (OSError, ValueError) as exc:
        raise InvalidInputError(f"cannot read order file {path}: {exc}") from exc
    if len(labels) != n:
        raise InvalidInputError(f"order file lists {len(labels)} labels, expected {n}")
    return PrimaryOrder.from_sequence(labels)


def make_order(args, graph: FactorGraphTopology) -> PrimaryOrder:
    n = graph.n_variables
    if args.order == "identity":
        return PrimaryOrder.identity(n)
    if args.order == "tree":
        return spanning_tree_order(graph)
    if args.order == "random":
        return random_order(n, args.seed)
    if args.order_file is None:
        raise InvalidInputError("--order explicit needs --order-file")
    return read_order_file(args.order_file, n)


def load_problem(args) -> Problem:
    if args.input is None:
        raise InvalidInputError("--input is required")
    path = Path(args.input)
    if not path.is_file():
        raise InvalidInputError(f"input file {path} does not exist")
    if _is_factor_graph(path):
        n, factors = fg.read_factor_graph(path)
        graph = fg.topology_of(n, factors)
        order = make_order(args, graph)
        a, b = fg.assemble_system(graph, factors, order)
        return Problem(a, b, order, graph, True)
    a = mmio.read_matrix(path)
    if args.rhs is None:
        raise InvalidInputError("Matrix Market input needs --rhs")
    b = mmio.read_vector(args.rhs)
    if b.shape != (a.n,):
        raise InvalidInputError(f"rhs has {b.size} entries, matrix is {a.n}x{a.n}")
    graph = _graph_of(a)
    order = make_order(args, graph)
    pos = np.array(order.positions)
    b_perm = np.empty_like(b)
    b_perm[pos - 1] = b
    return Problem(a.permuted(order), b_perm, order, graph, False)


# --- output ------------------------------------------------------------------

def _out_dir(args) -> Path:
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_rows(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(header)
        wr.writerows(rows)


def _fmt(v) -> str:
    return repr(float(v))


def write_solution(out: Path, order: PrimaryOrder, x_pos, inverse: dict) -> None:
    """``x.csv`` and ``inverse.csv`` in original labels."""
    seq = order.sequence()
    _write_rows(out / "x.csv", ["label", "x"],
                sorted((seq[p], _fmt(x_pos[p])) for p in range(order.n)))
    triples = []
    for (i, j), v in inverse.items():
        li, lj = seq[i - 1], seq[j - 1]
        triples.append((max(li, lj), min(li, lj), _fmt(v)))
    _write_rows(out / "inverse.csv", ["i", "j", "value"], sorted(triples))


def read_solution(out: Path):
    """Read back ``x.csv`` and ``inverse.csv`` as ``(x by label, {(i, j): value})``."""
    with open(out / "x.csv") as fh:
        rows = list(csv.DictReader(fh))
    x = np.array([float(r["x"]) for r in sorted(rows, key=lambda r: int(r["label"]))])
    with open(out / "inverse.csv") as fh:
        inv = {(int(r["i"]), int(r["j"])): float(r["value"]) for r in csv.DictReader(fh)}
    return x, inv


# --- subcommands -------------------------------------------------------------

def cmd_solve(args) -> int:
    prob = load_problem(args)
    out = _out_dir(args)
    res = solve(prob.a, prob.b)
    seq = prob.order.sequence()
    write_solution(out, prob.order, res.x, dict(res.inverse.values))
    a_pattern = prob.a.pattern
    l_pattern = res.factors.pattern
    stats = [("n", prob.a.n), ("A_lower_nnz", len(a_pattern)),
             ("L_size", len(l_pattern)), ("fill_in", len(l_pattern) - len(a_pattern)),
             ("residual", _fmt(res.residual)), ("order", " ".join(map(str, seq)))]
    _write_rows(out / "stats.csv", ["key", "value"], stats)
    _write_rows(out / "marginals.csv", ["label", "mean", "variance"],
                sorted((seq[p - 1], _fmt(res.x[p - 1]), _fmt(res.inverse[(p, p)]))
                       for p in range(1, prob.a.n + 1)))
    if not args.no_plot:
        plotting.plot_pattern(a_pattern, l_pattern, out / "pattern.png")
    print(f"n={prob.a.n} |L|={len(l_pattern)} fill_in={len(l_pattern) - len(a_pattern)} "
          f"residual={res.residual:.3e}")
    if res.residual > args.residual_tol:
        raise NumericalFailure(
            f"relative residual {res.residual:.3e} exceeds {args.residual_tol:.1e}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    prob = load_problem(args)
    out = _out_dir(args)
    if prob.from_factor_graph:
        comm = discover_comm_graph(prob.graph, prob.order)
        local = LocalProblem(prob.a, prob.b, comm)
    else:
        local = LocalProblem.from_matrix(prob.a, prob.b)
    reference = solve(prob.a, prob.b)
    try:
        if args.scheduler == "sync":
            trace = run_synchronous(local, args.max_rounds, reference, tol=args.tol,
                                    log_messages=args.message_log)
        else:
            trace = run_asynchronous(local, args.seed, args.fairness_window, reference=reference,
                                     tol=args.tol, log_messages=args.message_log)
    except NonConvergenceError as exc:
        if exc.trace is not None:
            exc.trace.write_csv(out / "trace.csv")
        raise
    trace.write_csv(out / "trace.csv")
    if args.message_log:
        trace.write_message_log(out / "messages.csv")
    x, _, _ = trace.final_arrays(local.n)
    write_solution(out, prob.order, x, trace.final_inverse())
    final_err = {q: trace.errors[q][-1] if trace.rounds else trace.initial[q]
                 for q in trace.errors}
    summary = [("scheduler", args.scheduler), ("rounds", trace.rounds),
               ("last_change_round", trace.last_change_round),
               ("bound", trace.bound if trace.bound is not None else ""),
               ("within_bound", "" if trace.within_bound is None else trace.within_bound),
               ("converged", trace.converged)]
    summary += [(f"final_err_{q}", _fmt(v)) for q, v in final_err.items()]
    _write_rows(out / "summary.csv", ["key", "value"], summary)
    if not args.no_plot:
        plotting.plot_convergence(list(trace.rows()), out / "convergence.png",
                                  title=f"{args.scheduler} message passing, n={local.n}")
    print(f"{args.scheduler}: converged={trace.converged} rounds={trace.rounds} "
          f"last_change={trace.last_change_round}"
          + (f" bound={trace.bound}" if trace.bound is not None else ""))
    if args.scheduler == "sync" and not trace.within_bound:
        raise VerificationFailure(
            f"last change at round {trace.last_change_round} exceeds bound {trace.bound}")
    return EXIT_OK


def fillin_counts(graph: FactorGraphTopology, trials: int, seed: int) -> list[int]:
    """Fill-in per trial; trial 0 is the spanning-tree order, the rest are random."""
    n = graph.n_variables
    rng = np.random.default_rng(seed)
    counts = [fill_in_count(pattern_from_graph(graph, spanning_tree_order(graph)))]
    for _ in range(trials):
        order = PrimaryOrder.from_sequence(rng.permutation(n) + 1)
        counts.append(fill_in_count(pattern_from_graph(graph, order)))
    return counts


def cmd_fillin(args) -> int:
    if args.trials < 0:
        raise InvalidInputError("--trials must be non-negative")
    n, factors = fg.generate(args.topology, args.n, args.seed)
    graph = fg.topology_of(n, factors)
    out = _out_dir(args)
    counts = fillin_counts(graph, args.trials, args.seed)
    hist = Counter(counts)
    total = len(counts)
    _write_rows(out / "histogram.csv", ["fill_count", "count", "frequency"],
                [(k, hist[k], _fmt(hist[k] / total)) for k in sorted(hist)])
    _write_rows(out / "trials.csv", ["trial", "fill_count"], enumerate(counts))
    if not args.no_plot:
        plotting.plot_fillin_histogram(dict(hist), out / "histogram.png",
                                       title=f"{args.topology}, n={n}, {total} orders")
    print(f"trial 0 (spanning-tree order): fill {counts[0]}; "
          f"range over {total} orders: {min(counts)}..{max(counts)}")
    return EXIT_OK


def cmd_verify(args) -> int:
    if not 1 <= args.n_max <= kron.MAX_ORACLE_N:
        raise InvalidInputError(f"--n-max must be in 1..{kron.MAX_ORACLE_N}")
    if args.cases < 1:
        raise InvalidInputError("--cases must be positive")
    results = verify.run_suite(args.n_max, args.cases, args.seed)
    for r in results:
        print(r.line())
    if args.output_dir is not None:
        out = _out_dir(args)
        _write_rows(out / "verify.csv",
                    ["property", "cases", "violations", "max_error", "passed", "counterexample"],
                    [(r.name, r.cases, r.violations, _fmt(r.max_error), r.passed,
                      r.counterexample or "") for r in results])
        if not args.no_plot:
            _plot_sample_secondary(args, out)
    failed = [r for r in results if not r.passed]
    if failed:
        raise VerificationFailure(f"{len(failed)} properties failed")
    return EXIT_OK


def _plot_sample_secondary(args, out: Path) -> None:
    rng = np.random.default_rng(args.seed)
    n = min(args.n_max, 6)
    f = ldl_factorize(random_spd(random_closed_pattern(n, rng), rng))
    basic = kron.basic_triangular_order(n)
    ult = kron.ultimate_triangular_order(n, f.pattern)
    plotting.plot_secondary(kron.build_C(f, basic), kron.build_G(f, basic),
                            kron.build_C(f, ult), kron.build_G(f, ult),
                            len(f.pattern.complement), out / "secondary_structure.png")


def cmd_gen(args) -> int:
    n, factors = fg.generate(args.topology, args.n, args.seed)
    out = _out_dir(args)
    name = args.name or args.topology
    fg.write_factor_graph(out / f"{name}.fg", n, factors)
    graph = fg.topology_of(n, factors)
    a, b = fg.assemble_system(graph, factors, PrimaryOrder.identity(n))
    mmio.write_matrix(out / f"{name}_A.mtx", a)
    mmio.write_vector(out / f"{name}_b.mtx", b)
    if not args.no_plot:
        plotting.plot_pattern(a.pattern, symbolic_fill_in(a.pattern), out / f"{name}_pattern.png",
                              title=f"{name} in natural order")
    print(f"wrote {name}.fg, {name}_A.mtx, {name}_b.mtx (n={n}, {len(factors)} factors)")
    return EXIT_OK


# --- parser ------------------------------------------------------------------

def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="selinv", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output-dir", default=".", help="directory for CSV and PNG output")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--no-plot", action="store_true", help="skip PNG rendering")

    problem = argparse.ArgumentParser(add_help=False)
    problem.add_argument("--input", help="Matrix Market matrix or factor-graph file")
    problem.add_argument("--rhs", help="Matrix Market vector (matrix input only)")
    problem.add_argument("--order", choices=["identity", "tree", "random", "explicit"],
                         default="identity")
    problem.add_argument("--order-file", help="labels in elimination order (--order explicit)")

    p = sub.add_parser("solve", parents=[common, problem], help="global sparse solve")
    p.add_argument("--residual-tol", type=_positive_float, default=RECONSTRUCTION_RTOL)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("simulate", parents=[common, problem], help="local message passing")
    p.add_argument("--scheduler", choices=["sync", "async"], default="sync")
    p.add_argument("--max-rounds", type=int, default=None)
    p.add_argument("--fairness-window", type=int, default=None)
    p.add_argument("--tol", type=_positive_float, default=CONVERGENCE_ATOL)
    p.add_argument("--message-log", action="store_true", help="write messages.csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fillin-experiment", parents=[common], help="fill-in histogram")
    p.add_argument("--topology", choices=fg.TOPOLOGIES, default="chain")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--trials", type=int, default=10000)
    p.set_defaults(func=cmd_fillin)

    p = sub.add_parser("verify", parents=[common], help="dense property suite")
    p.add_argument("--n-max", type=int, default=8)
    p.add_argument("--cases", type=int, default=100)
    p.set_defaults(func=cmd_verify, output_dir=None)

    p = sub.add_parser("gen", parents=[common], help="write a fixture")
    p.add_argument("--topology", choices=fg.TOPOLOGIES, default="loop6")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--name", default=None, help="file stem (default: topology)")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (NotPositiveDefiniteError, SingularMatrixError, NumericalFailure,
            NonConvergenceError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except VerificationFailure as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
