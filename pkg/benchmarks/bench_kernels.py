"""Compiled kernels against the pure-Python fallback.

Runs each workload in a fresh interpreter, once with the compiled backend and
once with ``LFF_PURE_PYTHON=1``, and prints the timings side by side::

    python3 benchmarks/bench_kernels.py [--repeat N] [--no-solve]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def workloads(repeat: int, solve: bool) -> dict:
    from lff import _kernels
    from lff.bench import medium_task
    from lff.generate import enumerate_clauses
    from lff.solve import solve_sequential
    from lff.subsume import encode_clause
    from lff.synthesis import TASKS, gen_synthesis_task, reference_solution
    from lff.tester import test_hypothesis

    clauses = [encode_clause(c) for c in enumerate_clauses(medium_task().bias)][:400]
    pairs = [(a, b) for a in clauses[:150] for b in clauses[:150]]

    def pairwise():
        for a, b in pairs:
            _kernels.subsumes(a, b)

    packed = _kernels.PackedClauses(clauses)
    ids = list(range(len(clauses)))

    def match():
        for a in clauses[:100]:
            packed.match(a, ids, True)
            packed.match(a, ids, False)

    tasks = [(gen_synthesis_task(n, s), reference_solution(n)) for n in TASKS for s in range(3)]

    def prove():
        for t, h in tasks:
            test_hypothesis(h, t.bk, t.pos, t.neg, t.limits, directions=dict(t.bias.directions))

    out = {
        "backend": _kernels.BACKEND,
        f"subsume {len(pairs)} pairs": _best(pairwise, repeat),
        "packed match 100x2 scans": _best(match, repeat),
        f"prove reference programs ({len(tasks)} tasks)": _best(prove, repeat),
    }
    if solve:
        task = medium_task()
        out["seq solve find_dupl"] = _best(lambda: solve_sequential(task), 1)
    return out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--no-solve", action="store_true", help="skip the end-to-end solve")
    ap.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.child:
        print(json.dumps(workloads(args.repeat, not args.no_solve)))
        return
    cmd = [sys.executable, __file__, "--child", "--repeat", str(args.repeat)]
    if args.no_solve:
        cmd.append("--no-solve")
    results = []
    for pure in (False, True):
        env = dict(os.environ)
        env.pop("LFF_PURE_PYTHON", None)
        if pure:
            env["LFF_PURE_PYTHON"] = "1"
        r = subprocess.run(cmd, env=env, capture_output=True, text=True, check=True)
        results.append(json.loads(r.stdout))
    fast, slow = results
    if fast["backend"] != "cython":
        print("compiled kernels are not built; both columns use the fallback", file=sys.stderr)
    print(f"{'workload':<40}{'compiled s':>12}{'python s':>12}{'speedup':>10}")
    for key in fast:
        if key == "backend":
            continue
        print(f"{key:<40}{fast[key]:>12.3f}{slow[key]:>12.3f}{slow[key] / fast[key]:>9.1f}x")


if __name__ == "__main__":
    main()
