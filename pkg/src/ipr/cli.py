"""Command-line front end.

    ipr run wb --trace csv
    ipr suite --suite hs --out hs.json
    ipr profile a.json b.json --profile iterations

Exit codes: 0 success, 1 solver non-success, 2 usage or parse error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from typing import List, Optional

from . import bench
from .problems import ProblemError, UnknownProblemError
from .solver import SolverConfig, Status

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

_CONFIG_FLAGS = [
    ("--mu0", "mu0", float),
    ("--rho0", "rho0", float),
    ("--eta", "eta", float),
    ("--gamma0", "gamma0", float),
    ("--delta", "delta", float),
    ("--tau", "tau", float),
    ("--sigma", "sigma", float),
    ("--eps", "eps", float),
    ("--max-iter", "max_iters", int),
]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_config(p: argparse.ArgumentParser):
    defaults = SolverConfig()
    for flag, attr, typ in _CONFIG_FLAGS:
        p.add_argument(flag, dest=attr, type=typ, default=None,
                       help=f"default {getattr(defaults, attr)}")
    p.add_argument("--lp-reduced", action="store_true", help="use the reduced LP Newton path")
    p.add_argument("--seed", type=int, default=None, help="seed for generated LPs")
    p.add_argument("--out", default=None, help="write the document here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="ipr", description="Interior-point relaxation solver and benchmarks")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    run = sub.add_parser("run", help="solve one problem")
    run.add_argument("name", nargs="?", help="problem name or LP file")
    run.add_argument("--problem", dest="problem", default=None)
    run.add_argument("--trace", choices=("csv", "json"), default=None)
    _add_config(run)

    suite = sub.add_parser("suite", help="solve a list of problems")
    suite.add_argument("--suite", required=True, help="hs, all, lp<N>, or a file of names")
    suite.add_argument("--label", default="ipr")
    _add_config(suite)

    prof = sub.add_parser("profile", help="performance-profile data from suite results")
    prof.add_argument("results", nargs="+", help="suite result JSON documents")
    prof.add_argument("--profile", dest="metric", default="iterations", choices=bench.METRICS)
    prof.add_argument("--out", default=None)
    return ap


def _config(args) -> SolverConfig:
    overrides = {attr: getattr(args, attr) for _, attr, _ in _CONFIG_FLAGS
                 if getattr(args, attr) is not None}
    try:
        return SolverConfig(**overrides)
    except ValueError as exc:
        raise UsageError(f"invalid solver option: {exc}") from None


def _emit(text: str, out: Optional[str]):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _cmd_run(args) -> int:
    if args.name and args.problem and args.name != args.problem:
        raise UsageError("give the problem either positionally or with --problem, not both")
    name = args.problem or args.name
    if not name:
        raise UsageError("no problem given")
    cfg = _config(args)
    problem = bench.resolve_problem(name, args.seed)
    if args.lp_reduced and not problem.is_lp:
        raise UsageError(f"--lp-reduced needs a standard-form LP, {name!r} is not one")
    report = bench.solve(problem, cfg=cfg, lp_reduced=args.lp_reduced)
    if args.trace == "csv":
        _emit(bench.trace_to_csv(report.trace), args.out)
    elif args.trace == "json":
        _emit(bench.trace_to_json(report, problem.name), args.out)
    fin = report.final
    print(f"{problem.name}: {report.status.value} after {report.counters.iterations} iterations, "
          f"f={fin.f:.10g} E={fin.E:.3e}", file=sys.stderr if args.trace else sys.stdout)
    return EXIT_OK if report.status is Status.KKT_SOLVED else EXIT_FAIL


def _cmd_suite(args) -> int:
    cfg = _config(args)
    names = bench.suite_names(args.suite, args.seed)
    if not names:
        raise UsageError(f"suite {args.suite!r} is empty")
    result = bench.run_suite(names, cfg=cfg, lp_reduced=args.lp_reduced, label=args.label)
    _emit(result.to_json(), args.out)
    solved = result.count(Status.KKT_SOLVED.value)
    print(f"{solved}/{len(result.records)} kkt_solved", file=sys.stderr)
    return EXIT_OK if solved == len(result.records) else EXIT_FAIL


def _cmd_profile(args) -> int:
    results = [bench.load_suite_result(p) for p in args.results]
    curves = bench.performance_profile(results, args.metric)
    _emit(bench.profile_to_csv(curves), args.out)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "suite":
            return _cmd_suite(args)
        if args.command == "profile":
            return _cmd_profile(args)
        raise UsageError("choose a command: run, suite or profile")
    except (UsageError, UnknownProblemError, ProblemError, bench.ProfileError,
            FileNotFoundError, ValueError) as exc:
        print(f"ipr: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
