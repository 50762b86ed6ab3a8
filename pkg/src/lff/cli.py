"""Command line: ``lff solve`` and ``lff bench``.

Exit status is 0 when a solution is found, 1 when there is none (exhausted
space or timeout) and 2 on any error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import _kernels
from .bench import (DEFAULT_REPEATS, DEFAULT_TIMEOUT, SOLVERS, ExperimentConfig, run_experiment,
                    sweep_configs, write_csv)
from .generate import Heuristic
from .solve import PORTFOLIO_RANDOM_FREQ, format_report, run_dac, run_portfolio, solve_sequential
from .synthesis import TASKS
from .taskfile import load_task
from .tester import EvalLimits

EXIT_SOLVED, EXIT_NONE, EXIT_ERROR = 0, 1, 2


def _limits(text: str) -> EvalLimits:
    try:
        depth, steps = (int(x) for x in text.split(","))
        return EvalLimits(depth, steps)
    except ValueError:
        raise argparse.ArgumentTypeError("expected DEPTH,STEPS with positive integers") from None


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated integers") from None
    if not vals or min(vals) < 1:
        raise argparse.ArgumentTypeError("worker counts must be positive")
    return vals


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lff", description="Learning from failures with parallel search.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="learn a program for one task file")
    s.add_argument("--task", required=True, help="task file")
    s.add_argument("--solver", choices=SOLVERS, default="seq")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--comm", action="store_true", help="share constraints between workers")
    s.add_argument("--timeout", type=_positive, help="seconds (default: from the task file)")
    s.add_argument("--max-size", type=int, help="largest hypothesis size to search")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--limits", type=_limits, help="evaluation bounds DEPTH,STEPS")
    s.add_argument("--log", help="write the tested-hypothesis log to this file")

    b = sub.add_parser("bench", help="run timed experiments and write a CSV")
    b.add_argument("--suite", choices=["synthesis"], default="synthesis")
    b.add_argument("--tasks", default=",".join(TASKS), help="comma-separated synthesis tasks")
    b.add_argument("--workers-sweep", type=_int_list, default=[1, 2, 4, 8])
    b.add_argument("--solvers", default=",".join(SOLVERS), help="comma-separated solvers")
    b.add_argument("--no-comm", action="store_true", help="parallel solvers without sharing")
    b.add_argument("--repeats", type=int, default=DEFAULT_REPEATS)
    b.add_argument("--timeout", type=_positive, default=DEFAULT_TIMEOUT)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--limits", type=_limits)
    b.add_argument("--out", default="results.csv")
    return p


def _solve(args) -> int:
    task = load_task(args.task)
    if args.timeout is not None:
        task.timeout = args.timeout
    if args.max_size is not None:
        if args.max_size < 2:
            raise ValueError("--max-size must be at least 2")
        task.max_size = args.max_size
    if args.limits is not None:
        task.limits = args.limits
    if args.workers < 1:
        raise ValueError("--workers must be at least 1")
    if args.solver == "seq":
        res = solve_sequential(task, Heuristic(args.seed, PORTFOLIO_RANDOM_FREQ))
    elif args.solver == "portfolio":
        res = run_portfolio(task, args.workers, args.comm, args.seed)
    else:
        res = run_dac(task, args.workers, args.comm, args.seed)
    if args.log:
        with open(args.log, "w", encoding="utf-8", newline="\n") as fh:
            fh.writelines(line + "\n" for line in res.log_lines)
    print(format_report(res))
    return EXIT_SOLVED if res.solution is not None else EXIT_NONE


def _bench(args) -> int:
    solvers = [s for s in args.solvers.split(",") if s]
    bad = set(solvers) - set(SOLVERS)
    if bad:
        raise ValueError(f"unknown solver(s): {', '.join(sorted(bad))}")
    tasks = [t for t in args.tasks.split(",") if t]
    configs = sweep_configs(tasks, args.workers_sweep, solvers, not args.no_comm,
                            args.repeats, args.timeout, args.seed, args.limits)
    rows = []
    for cfg in configs:
        logging.getLogger("lff").info("running %s %s k=%d comm=%s", cfg.task, cfg.solver,
                                      cfg.workers, cfg.comm)
        rows.extend(run_experiment(cfg))
        write_csv(rows, args.out)
    for r in rows:
        print(",".join(r.as_csv()))
    return EXIT_SOLVED if all(r.solved > 0 for r in rows) else EXIT_NONE


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:   # argparse exits 2 on usage errors, 0 on --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    logging.getLogger("lff").debug("kernel backend: %s", _kernels.BACKEND)
    try:
        if args.command == "solve":
            return _solve(args)
        return _bench(args)
    except KeyboardInterrupt:
        return EXIT_ERROR
    except Exception as exc:
        print(f"lff: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
