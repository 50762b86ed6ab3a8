"""Timed, repeated solver runs and CSV reporting.

A run's wall time starts once the task is loaded and ends when the solver
reports.  Runs that time out count against ``solved`` and are left out of
``mean_time``, ``std_time`` and ``mean_cost``; with no solved run those
columns are ``nan``.
"""

from __future__ import annotations

import csv
import dataclasses
import math
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .generate import Heuristic
from .solve import PORTFOLIO_RANDOM_FREQ, SolveResult, TaskSpec, run_dac, run_portfolio, solve_sequential
from .synthesis import TASKS, gen_synthesis_task
from .taskfile import load_task
from .tester import EvalLimits

SOLVERS = ("seq", "portfolio", "dac")
CSV_HEADER = ("task", "solver", "workers", "comm", "mean_time", "std_time", "solved", "mean_cost")
DEFAULT_REPEATS = 5
DEFAULT_TIMEOUT = 300.0

# Solver comparisons use find_dupl: a few thousand tests sequentially, so
# differences between strategies show without long runs.  The tighter depth
# bound cuts off non-terminating candidates early on 50-element lists.
MEDIUM_TASK = "find_dupl"
MEDIUM_LIMITS = EvalLimits(max_depth=64, max_steps=100_000)


@dataclass
class ExperimentConfig:
    """One row of an experiment.

    ``task`` is a task-file path or the name of a synthesis task; synthesis
    tasks are generated from ``seed``.
    """

    task: str
    solver: str = "seq"
    workers: int = 1
    comm: bool = False
    repeats: int = DEFAULT_REPEATS
    timeout: float = DEFAULT_TIMEOUT
    seed: int = 0
    bias_overrides: dict = field(default_factory=dict)
    limits: EvalLimits | None = None

    def __post_init__(self):
        if self.repeats < 1:
            raise ValueError("repeats must be at least 1")
        if not self.timeout > 0:
            raise ValueError("timeout must be positive")
        if self.solver not in SOLVERS:
            raise ValueError(f"solver must be one of {', '.join(SOLVERS)}")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")


@dataclass(frozen=True)
class ResultRow:
    task: str
    solver: str
    workers: int
    comm: bool
    mean_time: float
    std_time: float
    solved: float
    mean_cost: float

    def as_csv(self) -> list[str]:
        return [self.task, self.solver, str(self.workers), str(self.comm).lower(),
                _num(self.mean_time), _num(self.std_time), _num(self.solved), _num(self.mean_cost)]


def _num(x: float) -> str:
    return "nan" if math.isnan(x) else f"{x:.6g}"


def build_task(cfg: ExperimentConfig) -> TaskSpec:
    if cfg.task in TASKS and not Path(cfg.task).exists():
        task = gen_synthesis_task(cfg.task, cfg.seed, timeout=cfg.timeout, **cfg.bias_overrides)
    else:
        task = load_task(cfg.task)
        if cfg.bias_overrides:
            task.bias = dataclasses.replace(task.bias, **cfg.bias_overrides)
            task.max_size = min(task.max_size, task.bias.max_size)
        task.timeout = cfg.timeout
    if cfg.limits is not None:
        task.limits = cfg.limits
    return task


def medium_task(seed: int = 0, timeout: float = DEFAULT_TIMEOUT) -> TaskSpec:
    return gen_synthesis_task(MEDIUM_TASK, seed, timeout=timeout, limits=MEDIUM_LIMITS)


def run_once(task: TaskSpec, solver: str, workers: int, comm: bool, seed: int) -> SolveResult:
    if solver == "seq":
        return solve_sequential(task, Heuristic(seed, PORTFOLIO_RANDOM_FREQ))
    if solver == "portfolio":
        return run_portfolio(task, workers, comm, seed)
    return run_dac(task, workers, comm, seed)


def run_experiment(cfg: ExperimentConfig) -> list[ResultRow]:
    task = build_task(cfg)
    times, costs = [], []
    for r in range(cfg.repeats):
        res = run_once(task, cfg.solver, cfg.workers, cfg.comm, cfg.seed + r)
        if res.solution is not None:
            times.append(res.wall_time)
            costs.append(res.cost)
    nan = float("nan")
    row = ResultRow(
        task=task.name, solver=cfg.solver,
        workers=1 if cfg.solver == "seq" else cfg.workers,
        comm=cfg.comm and cfg.solver != "seq",
        mean_time=statistics.fmean(times) if times else nan,
        std_time=statistics.pstdev(times) if times else nan,
        solved=len(times) / cfg.repeats,
        mean_cost=statistics.fmean(costs) if costs else nan,
    )
    return [row]


def write_csv(rows: Iterable[ResultRow], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for row in rows:
            w.writerow(row.as_csv())


def sweep_configs(tasks: Iterable[str], workers: Iterable[int], solvers: Iterable[str],
                  comm: bool, repeats: int, timeout: float, seed: int,
                  limits: EvalLimits | None = None) -> list[ExperimentConfig]:
    """A sequential baseline per task plus each parallel solver at each worker count."""
    out = []
    for t in tasks:
        for s in solvers:
            counts = [1] if s == "seq" else list(workers)
            for k in counts:
                out.append(ExperimentConfig(t, s, k, comm and s != "seq", repeats, timeout,
                                            seed, limits=limits))
    return out
