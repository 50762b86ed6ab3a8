"""Sequential, portfolio and divide-and-conquer learning-from-failures solvers.

Parallel workers are forked processes.  Workers share nothing mutable: each
owns a constraint store and its generators.  Cross-worker traffic goes through
per-worker inboxes (the broadcast constraint queue), a report queue to the
master, per-worker size channels (divide-and-conquer) and a stop event.
"""

from __future__ import annotations

import heapq
import logging
import multiprocessing as mp
import os
import queue
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .generate import ClauseSpace, ConstraintStore, Generator, Heuristic, clause_space
from .hyplang import Bias, Hypothesis, cost, format_hypothesis, hypothesis_id
from .subsume import Constraint, derive_constraints
from .tester import BKProgram, Cancelled, EvalLimits, Example, test_hypothesis

log = logging.getLogger(__name__)

PORTFOLIO_RANDOM_FREQ = 0.01


@dataclass
class TaskSpec:
    pos: list[Example]
    neg: list[Example]
    bk: BKProgram
    bias: Bias
    initial_constraints: frozenset = frozenset()
    max_size: int | None = None
    limits: EvalLimits = field(default_factory=EvalLimits)
    timeout: float = 300.0
    name: str = "task"

    def __post_init__(self):
        if not self.pos:
            raise ValueError("a task needs at least one positive example")
        if self.max_size is None:
            self.max_size = self.bias.max_size
        if self.max_size < 2:
            raise ValueError("max_size must be at least 2")
        for e in (*self.pos, *self.neg):
            if e.pred != self.bias.head:
                raise ValueError(f"example {e} does not match head {self.bias.head}")

    @property
    def top_size(self) -> int:
        return min(self.max_size, self.bias.max_size)


@dataclass
class WorkerStats:
    worker: int
    generated: int = 0
    tested: int = 0
    derived: int = 0
    received: int = 0
    applied: int = 0
    sizes: list = field(default_factory=list)


@dataclass
class SolveResult:
    solution: Hypothesis | None
    stats: list[WorkerStats]
    wall_time: float
    timed_out: bool = False
    solver: str = "seq"
    events: list = field(default_factory=list)    # (time, worker, kind, size)
    log_lines: list[str] = field(default_factory=list)

    @property
    def cost(self) -> int | None:
        return None if self.solution is None else cost(self.solution)

    @property
    def tested(self) -> int:
        return sum(s.tested for s in self.stats)


class ConstraintQueue:
    """Many-to-many broadcast: one channel per (sender, receiver) pair.

    Every channel has a single writer, so a worker that dies mid-send can
    only block its own channels, never another sender.
    """

    def __init__(self, k: int, ctx=None):
        ctx = ctx or mp.get_context("fork")
        self.k = k
        self.channels = [[ctx.Queue() if s != r else None for r in range(k)] for s in range(k)]

    def broadcast(self, cs: Iterable[Constraint], sender: int) -> None:
        payload = tuple(cs)
        if not payload:
            return
        for q in self.channels[sender]:
            if q is not None:
                q.put(payload)

    def drain(self, receiver: int) -> set[Constraint]:
        """Everything pending for ``receiver``, deduplicated by id, without blocking."""
        out: dict[str, Constraint] = {}
        for sender in range(self.k):
            q = self.channels[sender][receiver]
            if q is None:
                continue
            while True:
                try:
                    cs = q.get_nowait()
                except queue.Empty:
                    break
                for c in cs:
                    out.setdefault(c.id, c)
        return set(out.values())

    def detach_sender(self, sender: int) -> None:
        """Let a worker exit without waiting for receivers to read what it sent."""
        for q in self.channels[sender]:
            if q is not None:
                q.cancel_join_thread()

    def close(self) -> None:
        for row in self.channels:
            for q in row:
                if q is not None:
                    q.cancel_join_thread()
                    q.close()


def broadcast(q: ConstraintQueue, cs: Iterable[Constraint], sender: int) -> None:
    q.broadcast(cs, sender)


def drain(q: ConstraintQueue, receiver: int) -> set[Constraint]:
    return q.drain(receiver)


class _Stopped(Exception):
    pass


class _Worker:
    """The generate/test/constrain loop shared by every strategy."""

    def __init__(self, task: TaskSpec, wid: int, heuristic: Heuristic,
                 comm: ConstraintQueue | None, should_stop: Callable[[], bool],
                 space: ClauseSpace | None = None):
        self.task = task
        self.wid = wid
        self.heuristic = heuristic
        self.comm = comm
        self.should_stop = should_stop
        self.space = space or clause_space(task.bias)
        self.store = ConstraintStore(self.space)
        self.store.add(task.initial_constraints)
        self.stats = WorkerStats(wid)
        self.log_lines: list[str] = []
        self.directions = dict(task.bias.directions)

    def _receive(self) -> None:
        got = self.comm.drain(self.wid)
        if got:
            self.stats.received += len(got)
            self.stats.applied += self.store.add(got)

    def search_size(self, m: int, abandon: Callable[[], bool] | None = None) -> Hypothesis | None:
        """Exhaust the size-``m`` slice; return a solution or None."""
        task = self.task
        try:
            gen = Generator(self.space, m, heuristic=self.heuristic, store=self.store,
                            should_stop=self.should_stop)
        except Cancelled:
            raise _Stopped() from None
        while True:
            if self.should_stop() or (abandon is not None and abandon()):
                raise _Stopped()
            h = gen.next()
            if h is None:
                self.stats.sizes.append(m)
                return None
            self.stats.generated += 1
            try:
                outcome = test_hypothesis(h, task.bk, task.pos, task.neg, task.limits,
                                          self.should_stop, self.directions)
            except Cancelled:
                raise _Stopped() from None
            self.stats.tested += 1
            self.log_lines.append(
                f"{self.wid}\t{m}\t{hypothesis_id(h)}\t{outcome}\t{len(self.store)}")
            if outcome.is_solution:
                return h
            cons = derive_constraints(h, outcome)
            self.stats.derived += len(cons)
            self.store.add(cons)
            if self.comm is not None:
                self.comm.broadcast(cons, self.wid)
                self._receive()


def _deadline_stop(deadline: float, event=None) -> Callable[[], bool]:
    if event is None:
        return lambda: time.monotonic() > deadline
    return lambda: event.is_set() or time.monotonic() > deadline


def solve_sequential(task: TaskSpec, heur: Heuristic | None = None) -> SolveResult:
    """Iterative deepening over hypothesis size with a single worker."""
    start = time.monotonic()
    heur = heur or Heuristic(0, PORTFOLIO_RANDOM_FREQ)
    deadline = start + task.timeout
    timed_out = False
    solution = None
    events = []
    worker = _Worker(task, 0, heur, None, _deadline_stop(deadline))
    try:
        for m in range(2, task.top_size + 1):
            solution = worker.search_size(m)
            if solution is not None:
                events.append((time.monotonic() - start, 0, "solution", m))
                break
            events.append((time.monotonic() - start, 0, "exhausted", m))
    except _Stopped:
        timed_out = True
    return SolveResult(solution, [worker.stats], time.monotonic() - start, timed_out,
                       "seq", events, worker.log_lines)


# parallel strategies


_PREBUILD = 4     # hypothesis size whose clause levels are built before forking


def _ctx():
    return mp.get_context("fork")


def _crash(reports) -> None:
    """Simulated worker death for tests, at a point where nothing is mid-send."""
    reports.close()
    reports.join_thread()
    time.sleep(0.2)     # let constraint channels flush too
    os._exit(3)


def _portfolio_main(reports, task, wid, seed, comm_q, stop, deadline):
    if comm_q is not None:
        comm_q.detach_sender(wid)
    should_stop = _deadline_stop(deadline, stop)
    worker = _Worker(task, wid, Heuristic(seed + wid, PORTFOLIO_RANDOM_FREQ), comm_q, should_stop)
    try:
        for m in range(2, task.top_size + 1):
            h = worker.search_size(m)
            if h is not None:
                reports.put(("solution", wid, m, h, time.monotonic()))
                break
            reports.put(("exhausted", wid, m, None, time.monotonic()))
    except _Stopped:
        pass
    reports.put(("done", wid, worker.stats, worker.log_lines, time.monotonic()))


def _dac_main(reports, task, wid, seed, comm_q, sizes_in, bound, stop, deadline, crash_at):
    if comm_q is not None:
        comm_q.detach_sender(wid)
    should_stop = _deadline_stop(deadline, stop)
    worker = _Worker(task, wid, Heuristic(seed + wid, PORTFOLIO_RANDOM_FREQ), comm_q, should_stop)
    try:
        while not should_stop():
            reports.put(("need", wid, None, None, time.monotonic()))
            m = None
            while not should_stop():
                try:
                    m = sizes_in.get(timeout=0.05)
                    break
                except queue.Empty:
                    continue
            if m is None or m == 0:
                break
            if crash_at is not None and crash_at == m:
                _crash(reports)
            try:
                h = worker.search_size(m, abandon=lambda: m > bound.value)
            except _Stopped:
                if should_stop():
                    raise
                reports.put(("abandoned", wid, m, None, time.monotonic()))
                continue
            if h is not None:
                reports.put(("solution", wid, m, h, time.monotonic()))
                break
            reports.put(("exhausted", wid, m, None, time.monotonic()))
    except _Stopped:
        pass
    reports.put(("done", wid, worker.stats, worker.log_lines, time.monotonic()))


class _Pool:
    """Process bookkeeping shared by both parallel masters."""

    def __init__(self, task: TaskSpec, k: int, comm: bool):
        if k < 1:
            raise ValueError("need at least one worker")
        # small levels are built once and inherited by the forked workers
        try:
            clause_space(task.bias).ensure(min(task.top_size, _PREBUILD),
                                           _deadline_stop(time.monotonic() + task.timeout))
        except Cancelled:
            pass
        self.ctx = _ctx()
        self.task = task
        self.k = k
        self.start = time.monotonic()
        self.deadline = self.start + task.timeout
        self.comm_q = ConstraintQueue(k, self.ctx) if comm else None
        self.report_qs: dict[int, object] = {}     # one per worker: a single writer each
        self._turn = 0
        self.stop = self.ctx.Event()
        self.procs: dict[int, mp.Process] = {}
        self.stats: dict[int, WorkerStats] = {}
        self.logs: dict[int, list[str]] = {}
        self.done: set[int] = set()
        self.events: list = []

    def spawn(self, wid: int, target, *args) -> None:
        """Start ``target(reports, *args)`` with a fresh report queue for ``wid``."""
        old = self.report_qs.get(wid)
        if old is not None:
            old.cancel_join_thread()
            old.close()
        q = self.report_qs[wid] = self.ctx.Queue()
        p = self.ctx.Process(target=target, args=(q, *args), daemon=True)
        p.start()
        self.procs[wid] = p

    def get(self, timeout: float):
        """Next report from any worker; raises queue.Empty after ``timeout``."""
        end = time.monotonic() + timeout
        while True:
            qs = list(self.report_qs.values())
            for i in range(len(qs)):
                q = qs[(self._turn + i) % len(qs)]
                try:
                    msg = q.get_nowait()
                except queue.Empty:
                    continue
                self._turn += 1
                return msg
            if time.monotonic() >= end:
                raise queue.Empty
            time.sleep(0.002)

    def rel(self, t: float) -> float:
        return t - self.start

    def record_done(self, wid, stats, lines):
        self.done.add(wid)
        prev = self.stats.get(wid)
        if prev is not None:   # a restarted worker: merge
            for f in ("generated", "tested", "derived", "received", "applied"):
                setattr(stats, f, getattr(stats, f) + getattr(prev, f))
            stats.sizes = prev.sizes + stats.sizes
            lines = self.logs[wid] + lines
        self.stats[wid] = stats
        self.logs[wid] = lines

    def shutdown(self, grace: float = 5.0) -> None:
        self.stop.set()
        end = time.monotonic() + grace
        while len(self.done) < len(self.procs) and time.monotonic() < end:
            try:
                kind, wid, a, b, t = self.get(timeout=0.05)
            except queue.Empty:
                if all(not p.is_alive() for w, p in self.procs.items() if w not in self.done):
                    self._drain_reports()
                    break
                continue
            if kind == "done":
                self.record_done(wid, a, b)
        for p in self.procs.values():
            p.join(timeout=max(0.0, end - time.monotonic()))
            if p.is_alive():
                p.terminate()
                p.join()
        if self.comm_q is not None:
            self.comm_q.close()
        for q in self.report_qs.values():
            q.cancel_join_thread()

    def _drain_reports(self) -> None:
        while True:
            try:
                kind, wid, a, b, t = self.get(timeout=0.2)
            except queue.Empty:
                return
            if kind == "done":
                self.record_done(wid, a, b)

    def result(self, solution, solver, timed_out) -> SolveResult:
        stats = [self.stats.get(w, WorkerStats(w)) for w in range(self.k)]
        lines = [ln for w in range(self.k) for ln in self.logs.get(w, [])]
        return SolveResult(solution, stats, time.monotonic() - self.start, timed_out,
                           solver, sorted(self.events), lines)


def run_portfolio(task: TaskSpec, k: int, comm: bool, seed: int = 0) -> SolveResult:
    """k workers search the whole space with different heuristics; first solution wins."""
    pool = _Pool(task, k, comm)
    for wid in range(k):
        pool.spawn(wid, _portfolio_main, task, wid, seed, pool.comm_q, pool.stop, pool.deadline)
    solution = None
    timed_out = False
    while True:
        if time.monotonic() > pool.deadline:
            timed_out = True
            break
        try:
            kind, wid, a, b, t = pool.get(timeout=0.05)
        except queue.Empty:
            alive = [w for w, p in pool.procs.items() if p.is_alive()]
            if not alive and len(pool.done) < k:
                # crashed workers never report; nothing left to wait for
                break
            continue
        if kind == "solution":
            solution = b
            pool.events.append((pool.rel(t), wid, "solution", a))
            break
        if kind == "exhausted":
            pool.events.append((pool.rel(t), wid, "exhausted", a))
        elif kind == "done":
            pool.record_done(wid, a, b)
            if len(pool.done) == k:
                break
    pool.shutdown()
    solver = "portfolio_comm" if comm else "portfolio"
    return pool.result(solution, solver, timed_out)


def run_dac(task: TaskSpec, k: int, comm: bool, seed: int = 0,
            _crash: dict[int, int] | None = None) -> SolveResult:
    """Workers take exact sizes from an ascending queue and exhaust them.

    A solution of size m is returned only once every size below m has been
    exhausted.  A worker process that dies has its size put back in the queue
    and is replaced.
    """
    pool = _Pool(task, k, comm)
    ctx = pool.ctx
    top = task.top_size
    bound = ctx.Value("i", top + 1, lock=False)
    size_ins = {w: ctx.Queue() for w in range(k)}
    pending = list(range(2, top + 1))
    heapq.heapify(pending)
    assigned: dict[int, int] = {}
    exhausted: set[int] = set()
    crash = dict(_crash or {})
    best: tuple | None = None      # (size, worker, hypothesis)
    timed_out = False

    def spawn(wid):
        pool.spawn(wid, _dac_main, task, wid, seed, pool.comm_q,
                   size_ins[wid], bound, pool.stop, pool.deadline, crash.pop(wid, None))

    for wid in range(k):
        spawn(wid)

    def barrier_met() -> bool:
        return best is not None and all(s in exhausted for s in range(2, best[0]))

    while True:
        if barrier_met():
            break
        if time.monotonic() > pool.deadline:
            timed_out = True
            break
        try:
            kind, wid, a, b, t = pool.get(timeout=0.05)
        except queue.Empty:
            for w, p in list(pool.procs.items()):
                if w not in pool.done and not p.is_alive():
                    lost = assigned.pop(w, None)
                    pool.events.append((pool.rel(time.monotonic()), w, "crashed", lost))
                    log.warning("worker %d died on size %s; reassigning", w, lost)
                    if lost is not None:
                        heapq.heappush(pending, lost)
                    size_ins[w] = ctx.Queue()
                    spawn(w)
            if len(pool.done) == len(pool.procs) and not pending:
                break
            continue
        if kind == "need":
            if pending and (best is None or pending[0] < best[0]):
                m = heapq.heappop(pending)
                assigned[wid] = m
                pool.events.append((pool.rel(t), wid, "assigned", m))
                size_ins[wid].put(m)
            else:
                assigned.pop(wid, None)
                size_ins[wid].put(0)
        elif kind == "exhausted":
            exhausted.add(a)
            assigned.pop(wid, None)
            pool.events.append((pool.rel(t), wid, "exhausted", a))
        elif kind == "abandoned":
            assigned.pop(wid, None)
            pool.events.append((pool.rel(t), wid, "abandoned", a))
        elif kind == "solution":
            assigned.pop(wid, None)
            pool.events.append((pool.rel(t), wid, "solution", a))
            if best is None or a < best[0]:
                best = (a, wid, b)
                bound.value = a
                pending = [s for s in pending if s < a]
                heapq.heapify(pending)
        elif kind == "done":
            pool.record_done(wid, a, b)
            if len(pool.done) == len(pool.procs) and not pending and not assigned:
                break
    pool.events.append((pool.rel(time.monotonic()), -1, "return", best[0] if best else None))
    pool.shutdown()
    solution = best[2] if best is not None and barrier_met() else None
    solver = "dac_comm" if comm else "dac"
    return pool.result(solution, solver, timed_out)


def format_report(result: SolveResult) -> str:
    """The solution-report message: worker, size, hypothesis text, wall time."""
    if result.solution is None:
        return "UNSAT" if not result.timed_out else "TIMEOUT"
    sol_events = [e for e in result.events if e[2] == "solution"]
    wid = sol_events[-1][1] if sol_events else 0
    return (f"% worker {wid} size {result.cost} time {result.wall_time:.3f}s\n"
            f"{format_hypothesis(result.solution)}")
