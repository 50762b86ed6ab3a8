"""End-to-end acceptance checks; each prints one PASS/FAIL line.

The solver comparisons (criteria 5 to 7) run on the medium find_dupl task
and take several minutes in total.
"""

import filecmp
import os
import random
import statistics
import subprocess
import sys
import time

import pytest

from lff import bench, cli
from lff.bench import MEDIUM_TASK, medium_task
from lff.generate import Generator
from lff.hyplang import cost
from lff.solve import TaskSpec, run_dac, run_portfolio, solve_sequential
from lff.subsume import REDUNDANCY, clause_subsumes, derive_constraints, violates
from lff.synthesis import ELEMENTS, MAX_LEN, TASKS, gen_synthesis_task
from lff.taskfile import parse_task, save_task
from lff.tester import test_hypothesis

from conftest import record_acceptance
from microtasks import micro_tasks
from oracles import brute_hypotheses, brute_optimum, brute_space, brute_subsumes, random_bias, \
    random_pair

MEDIUM_SEEDS = range(5)


def _check(n, ok, detail):
    record_acceptance(n, ok, detail)
    assert ok, detail


def _is_solution(task, h):
    return test_hypothesis(h, task.bk, task.pos, task.neg, task.limits,
                           directions=dict(task.bias.directions)).is_solution


def test_1_oracle_optimality():
    variants = [("seq", 1, False)]
    variants += [("portfolio", k, c) for k in (1, 2, 4) for c in (True, False)]
    variants += [("dac", k, True) for k in (1, 2, 4)]
    t0 = time.monotonic()
    bad = []
    runs = 0
    for task in micro_tasks():
        space = brute_space(task.bias)
        assert sum(map(len, space.values())) <= 5000
        best, _ = brute_optimum(task)
        assert best is not None
        for solver, k, comm in variants:
            if solver == "seq":
                res = solve_sequential(task)
            elif solver == "portfolio":
                res = run_portfolio(task, k, comm)
            else:
                res = run_dac(task, k, comm)
            runs += 1
            if res.cost != best or not _is_solution(task, res.solution):
                bad.append((task.name, solver, k, comm, res.cost, best))
    took = time.monotonic() - t0
    _check(1, not bad and took < 300,
           f"{runs} runs, {len(bad)} mismatches {bad[:3]}, {took:.1f}s of 300s")


def test_2_constraint_soundness():
    n_cons = 0
    pruned_solutions = []
    redundant_nonoptimal = 0
    for task in micro_tasks():
        best, _ = brute_optimum(task)
        hyps = sorted(h for hs in brute_space(task.bias).values() for h in hs)
        outcome = {}
        d = dict(task.bias.directions)
        for h in hyps:
            outcome[h] = test_hypothesis(h, task.bk, task.pos, task.neg, task.limits,
                                         directions=d)
        solutions = [h for h in hyps if outcome[h].is_solution]
        optimal = [h for h in solutions if cost(h) == best]
        for h in hyps:
            if outcome[h].is_solution:
                continue
            for c in derive_constraints(h, outcome[h]):
                n_cons += 1
                # redundancy only promises to keep optimal solutions
                pool = optimal if c.kind == REDUNDANCY else solutions
                for s in pool:
                    if violates(s, c):
                        pruned_solutions.append((task.name, str(c.anchor), c.kind, str(s)))
                if c.kind == REDUNDANCY:
                    redundant_nonoptimal += sum(violates(s, c) for s in solutions)
    _check(2, n_cons >= 1000 and not pruned_solutions,
           f"{n_cons} constraints, {len(pruned_solutions)} pruned solutions "
           f"(redundancy pruned {redundant_nonoptimal} non-optimal solution matches)")


def test_3_subsumption_oracle_agreement():
    rng = random.Random(20240603)
    t0 = time.monotonic()
    wrong = 0
    for _ in range(10_000):
        c1, c2 = random_pair(rng)
        wrong += clause_subsumes(c1, c2) != brute_subsumes(c1, c2)
    took = time.monotonic() - t0
    _check(3, wrong == 0 and took < 60, f"10000 pairs, {wrong} disagreements, {took:.1f}s of 60s")


def test_4_generator_completeness():
    rng = random.Random(4)
    bad = 0
    sizes = []
    for _ in range(20):
        bias, m = random_bias(rng)
        want = brute_hypotheses(bias, m)
        sizes.append(len(want))
        assert 1 <= len(want) <= 500
        got = list(Generator(bias, m))
        bad += len(got) != len(set(got)) or set(got) != want
    _check(4, bad == 0, f"20 configurations ({min(sizes)}..{max(sizes)} hypotheses), {bad} differ")


@pytest.mark.slow
def test_5_communication_benefit():
    wins = {"portfolio": 0, "dac": 0}
    counts = []
    for s in MEDIUM_SEEDS:
        task = medium_task(s)
        for name, run in (("portfolio", run_portfolio), ("dac", run_dac)):
            on, off = run(task, 2, True, s), run(task, 2, False, s)
            wins[name] += on.tested <= off.tested
            counts.append(f"{name[0]}{s}:{on.tested}/{off.tested}")
    _check(5, wins["portfolio"] >= 4 and wins["dac"] >= 4,
           f"{MEDIUM_TASK} comm wins portfolio {wins['portfolio']}/5 dac {wins['dac']}/5; "
           + " ".join(counts))


@pytest.mark.slow
def test_6_parallel_speedup():
    task = medium_task(0)
    seq = [solve_sequential(task).wall_time for _ in range(5)]
    par = [run_portfolio(task, 4, True, r).wall_time for r in range(5)]
    ratio = statistics.median(par) / statistics.median(seq)
    _check(6, ratio <= 0.9,
           f"portfolio4+comm / seq median = {statistics.median(par):.2f}s / "
           f"{statistics.median(seq):.2f}s = {ratio:.2f} (need <= 0.9; {os.cpu_count()} cpu)")


@pytest.mark.slow
def test_7_dac_without_communication():
    task = medium_task(0)
    on = run_dac(task, 4, True)
    off = run_dac(task, 4, False)
    ok = off.timed_out or off.tested >= 2 * on.tested
    _check(7, ok, f"dac4 tested without/with comm = {off.tested}/{on.tested}"
                  f"{' (timed out)' if off.timed_out else ''}")


def test_8_protocol_fidelity():
    problems = []
    for name in TASKS:
        for seed in range(5):
            t = gen_synthesis_task(name, seed)
            if (len(t.pos), len(t.neg)) != (10, 10):
                problems.append(f"{name}:{seed} example counts")
            for e in t.pos + t.neg:
                lists = [a for a in e.args if isinstance(a, tuple)]
                if any(len(xs) > MAX_LEN for xs in lists):
                    problems.append(f"{name}:{seed} long list")
                if any(not (1 <= x <= 100) for xs in lists for x in xs):
                    problems.append(f"{name}:{seed} element range")
            if t.timeout != 300.0:
                problems.append(f"{name} timeout")
    assert ELEMENTS == (1, 100)
    parser = cli.build_parser()
    b = parser.parse_args(["bench"])
    defaults = {
        "task timeout": TaskSpec.__dataclass_fields__["timeout"].default,
        "task file timeout": parse_task("head p/1.\nfact q(a).\npos p(a).\n").timeout,
        "bench timeout": bench.DEFAULT_TIMEOUT,
        "cli bench timeout": b.timeout,
        "bench repeats": bench.ExperimentConfig("filter").repeats,
        "cli bench repeats": b.repeats,
    }
    want = {k: (5 if "repeats" in k else 300.0) for k in defaults}
    problems += [k for k in defaults if defaults[k] != want[k]]
    _check(8, not problems, f"20 tasks and 6 defaults checked, problems: {problems[:5]}")


@pytest.mark.slow
def test_9_determinism(tmp_path):
    path = tmp_path / "medium.task"
    save_task(medium_task(0), path)
    logs = []
    for i in range(2):
        log = tmp_path / f"log{i}.tsv"
        r = subprocess.run([sys.executable, "-m", "lff.cli", "solve", "--task", str(path),
                            "--solver", "seq", "--seed", "7", "--log", str(log)],
                           capture_output=True, text=True, timeout=600)
        assert r.returncode == 0, r.stderr
        logs.append(log)
    same = filecmp.cmp(logs[0], logs[1], shallow=False)
    n = len(logs[0].read_text().splitlines())
    _check(9, same and n > 0, f"two seq --seed 7 logs of {n} lines are "
                              f"{'identical' if same else 'different'}")
