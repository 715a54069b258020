"""Command-line harness.

Subcommands:

    solve   one run of one algorithm on one problem, CSV out
    bench   a suite across algorithms/sizes, CSVs plus summary.csv
    verify  independent oracle battery, pass/fail table (optional CSV)
    gen     write a generated problem to an objective file

Exit codes: 0 success, 1 divergence (or failed verification), 2 config
error, 3 IO error.  Flags override config-file values; every effective
setting is echoed into the summary output for provenance.
"""

from __future__ import annotations

import argparse
import sys

from . import io as sio
from .bench import SuiteSettings, emit_csv, run_experiment
from .errors import ConfigError, NoClosedForm, SpdSubspaceError
from .manifold import CholeskyPoint
from .objective import QuadLogDet
from .oracle import verify_suite
from .problems import ProblemInstance, closed_form_optimum, gen_problem
from .solvers import ALGORITHMS, SolverConfig, run


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--k", type=float, default=0.0)
    p.add_argument("--config", help="key=value file; flags override its entries")


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="spdsubspace")
    sub = ap.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="run one algorithm on one problem")
    _add_common(solve)
    solve.add_argument("--algo", choices=[a.replace("_", "-") for a in ALGORITHMS], required=True)
    solve.add_argument("--alpha", type=float, default=0.5)
    solve.add_argument("--steps", type=int, default=1000)
    solve.add_argument("--tol", type=float, default=0.0)
    solve.add_argument("--check-every", type=int, default=100)
    solve.add_argument("--problem-file", help="objective file instead of a generated problem")
    solve.add_argument("--out", default=None, help="CSV path (default solve_<algo>_n<n>.csv)")

    bench = sub.add_parser("bench", help="run a comparison suite")
    bench.add_argument("--suite", default="paper-f2")
    bench.add_argument("--sizes", default="100", help="comma-separated sizes; 1000 is opt-in")
    bench.add_argument("--seed", type=int, default=7)
    bench.add_argument("--steps", type=int, default=None, help="cap iterations for every algorithm")
    bench.add_argument("--tol", type=float, default=1e-6, help="relative gap target")
    bench.add_argument("--out", default="bench_out")
    bench.add_argument("--threads", type=int, default=4)

    verify = sub.add_parser("verify", help="run the oracle battery")
    verify.add_argument("--fast", action="store_true", help="smaller sample counts")
    verify.add_argument("--out", default=None, help="also write CSV rows here")

    gen = sub.add_parser("gen", help="write a generated problem file")
    _add_common(gen)
    gen.add_argument("--out", required=True)
    return ap


def _apply_config_file(args: argparse.Namespace, argv: list[str]) -> None:
    """File values fill in anything not set explicitly on the command line."""
    if not getattr(args, "config", None):
        return
    explicit = {a.split("=")[0].lstrip("-").replace("-", "_") for a in argv if a.startswith("--")}
    try:
        with open(args.config) as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#") or "=" not in line:
                    continue
                key, _, val = line.partition("=")
                key = key.strip().replace("-", "_")
                if key in explicit or not hasattr(args, key):
                    continue
                current = getattr(args, key)
                if isinstance(current, bool):
                    setattr(args, key, val.strip().lower() in ("1", "true", "yes"))
                elif isinstance(current, int):
                    setattr(args, key, int(val))
                elif isinstance(current, float):
                    setattr(args, key, float(val))
                else:
                    setattr(args, key, val.strip())
    except OSError as exc:
        raise ConfigError(f"cannot read config file {args.config}: {exc}") from exc


def _cmd_solve(args) -> int:
    algo = args.algo.replace("-", "_")
    if args.problem_file:
        try:
            spec = sio.load_objective(args.problem_file)
        except OSError as exc:
            print(f"io error: {exc}", file=sys.stderr)
            return 3
        n = spec.n
        inst = None
        if (
            isinstance(spec.g, QuadLogDet)
            and spec.p == 1
            and spec.q == 1
        ):
            inst = ProblemInstance(n, spec.c_list[0], spec.d_list[0], spec.g.k)
    else:
        inst = gen_problem(args.n, args.seed, args.k)
        spec = inst.to_objective()
        n = args.n
    f_star = None
    if inst is not None:
        try:
            _, f_star = closed_form_optimum(inst)
        except NoClosedForm:
            f_star = None
    config = SolverConfig(
        algo=algo,
        alpha=args.alpha,
        max_iters=args.steps,
        tol=args.tol,
        seed=args.seed,
        check_every=args.check_every,
    )
    rec = run(spec, config, CholeskyPoint.identity(n), f_star)
    out = args.out or f"solve_{args.algo}_n{n}.csv"
    try:
        emit_csv(rec, out)
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 3
    gap = "" if rec.gaps[-1] is None else f" gap={rec.gaps[-1]:.6g}"
    print(f"{algo} n={n} iters={rec.iters[-1]} status={rec.status}{gap} -> {out}")
    if rec.status == "diverged":
        print(f"divergence: {rec.message}", file=sys.stderr)
        return 1
    return 0


def _cmd_bench(args) -> int:
    sizes = tuple(int(s) for s in str(args.sizes).split(",") if s)
    if any(s > 1000 for s in sizes):
        raise ConfigError("sizes above 1000 are not supported")
    steps = {}
    if args.steps is not None:
        steps = {a: args.steps for a in ALGORITHMS}
    settings = SuiteSettings(
        suite=args.suite,
        sizes=sizes,
        seed=args.seed,
        steps=steps,
        rel_gap_tol=args.tol,
        out_dir=args.out,
        threads=args.threads,
    )
    try:
        records, summary = run_experiment(settings)
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 3
    diverged = [r for r, _, _ in records if r.status == "diverged"]
    for rec, _, path in records:
        gap = "" if rec.gaps[-1] is None else f" final_gap={rec.gaps[-1]:.6g}"
        print(f"{rec.algo:<12} n={rec.n:<5} status={rec.status:<9}{gap}")
    print(f"summary -> {summary}")
    return 1 if diverged else 0


def _cmd_verify(args) -> int:
    reports = verify_suite(fast=args.fast)
    width = max(len(r.name) for r in reports)
    all_pass = True
    rows = []
    for r in reports:
        flag = "PASS" if r.passed else "FAIL"
        all_pass &= r.passed
        print(f"{r.name:<{width}}  residual={r.max_residual:<12.3e} tol={r.tolerance:<9.1e} {flag}")
        rows.append(f"{r.name},{r.max_residual:.17g},{r.tolerance:.17g},{str(r.passed).lower()}")
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write("check,residual,tolerance,pass\n")
                fh.write("\n".join(rows) + "\n")
        except OSError as exc:
            print(f"io error: {exc}", file=sys.stderr)
            return 3
    return 0 if all_pass else 1


def _cmd_gen(args) -> int:
    inst = gen_problem(args.n, args.seed, args.k)
    try:
        sio.save_objective(args.out, inst.to_objective())
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 3
    print(f"wrote n={args.n} seed={args.seed} k={args.k} -> {args.out}")
    return 0


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        _apply_config_file(args, argv)
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command == "bench":
            return _cmd_bench(args)
        if args.command == "verify":
            return _cmd_verify(args)
        return _cmd_gen(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SpdSubspaceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
