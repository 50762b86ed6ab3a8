"""Randomly generated list-synthesis tasks: find_dupl, sorted, dropk, filter.

Each task has 10 positive and 10 negative examples over lists of at most 50
elements drawn uniformly from 1..100.  Negative examples are corrupted
positives, re-checked against the task's ground-truth function.
"""

from __future__ import annotations

import random
from typing import Callable

from .hyplang import Bias, PredSig, parse_hypothesis
from .solve import TaskSpec
from .tester import BUILTINS, BKProgram, EvalLimits, Example

N_POS = 10
N_NEG = 10
MAX_LEN = 50
ELEMENTS = (1, 100)

LIST_BK = ("head", "tail", "element", "increment", "decrement", "geq",
           "empty", "zero", "one", "even", "odd")

TASKS = ("find_dupl", "sorted", "dropk", "filter")


def _rand_list(rng: random.Random, lo: int = 1, hi: int = MAX_LEN) -> tuple:
    n = rng.randint(lo, hi)
    return tuple(rng.randint(*ELEMENTS) for _ in range(n))


def has_dupl(xs, x) -> bool:
    return xs.count(x) >= 2


def is_sorted(xs) -> bool:
    return all(a <= b for a, b in zip(xs, xs[1:]))


def drop(xs, k):
    return xs[k:]


def evens(xs):
    return tuple(x for x in xs if x % 2 == 0)


def _find_dupl(rng):
    while True:
        xs = list(_rand_list(rng, 2))
        i, j = rng.sample(range(len(xs)), 2)
        xs[j] = xs[i]
        xs = tuple(xs)
        dup = sorted({x for x in xs if has_dupl(xs, x)})
        pos = (xs, rng.choice(dup))
        wrong = [v for v in range(ELEMENTS[0], ELEMENTS[1] + 1) if not has_dupl(xs, v)]
        neg = (xs, rng.choice(wrong))
        return pos, neg


def _sorted(rng):
    pos = (tuple(sorted(_rand_list(rng))),)
    while True:
        xs = _rand_list(rng, 2)
        if not is_sorted(xs):
            return pos, (xs,)


def _dropk(rng):
    xs = _rand_list(rng)
    k = rng.randint(1, len(xs))
    pos = (xs, k, drop(xs, k))
    while True:
        j = rng.randint(0, len(xs))
        if drop(xs, j) != drop(xs, k):
            return pos, (xs, k, drop(xs, j))
        if len(set(xs)) == 1 and len(xs) == 1:
            return pos, (xs, k, xs)


def _filter(rng):
    xs = _rand_list(rng)
    out = evens(xs)
    pos = (xs, out)
    while True:
        cut = list(xs)
        # keep a random subsequence of the input
        cut = tuple(x for x in cut if rng.random() < 0.5)
        if cut != out:
            return pos, (xs, cut)


_GENERATORS: dict[str, Callable] = {
    "find_dupl": _find_dupl, "sorted": _sorted, "dropk": _dropk, "filter": _filter,
}

_ORACLES: dict[str, Callable[[tuple], bool]] = {
    "find_dupl": lambda a: has_dupl(a[0], a[1]),
    "sorted": lambda a: is_sorted(a[0]),
    "dropk": lambda a: 1 <= a[1] <= len(a[0]) and drop(a[0], a[1]) == a[2],
    "filter": lambda a: evens(a[0]) == a[1],
}

# head signature, types, directions, bias bounds
_SHAPES = {
    "find_dupl": (PredSig("f", 2), ("list", "int"), ("in", "out"),
                  dict(max_clauses=2, max_body=3, max_vars=3)),
    "sorted": (PredSig("f", 1), ("list",), ("in",),
               dict(max_clauses=2, max_body=5, max_vars=4)),
    "dropk": (PredSig("f", 3), ("list", "int", "list"), ("in", "in", "out"),
              dict(max_clauses=2, max_body=3, max_vars=5)),
    "filter": (PredSig("f", 2), ("list", "list"), ("in", "out"),
               dict(max_clauses=3, max_body=5, max_vars=5)),
}

REFERENCE_SOLUTIONS = {
    "find_dupl": """f(A,B) :- head(A,B), tail(A,C), element(C,B).
                    f(A,B) :- tail(A,C), f(C,B).""",
    "sorted": """f(A) :- tail(A,B), empty(B).
                 f(A) :- head(A,B), tail(A,C), head(C,D), geq(D,B), f(C).""",
    "dropk": """f(A,B,C) :- one(B), tail(A,C).
                f(A,B,C) :- tail(A,D), decrement(B,E), f(D,E,C).""",
    "filter": """f(A,B) :- empty(A), empty(B).
                 f(A,B) :- head(A,D), odd(D), tail(A,C), f(C,B).
                 f(A,B) :- tail(A,C), head(A,E), even(E), f(C,D), prepend(E,D,B).""",
}


def ground_truth(name: str, args: tuple) -> bool:
    return _ORACLES[name](args)


def reference_solution(name: str):
    return parse_hypothesis(REFERENCE_SOLUTIONS[name])


def synthesis_bias(name: str, **overrides) -> Bias:
    head, htypes, hdirs, bounds = _SHAPES[name]
    builtins = LIST_BK + (("prepend",) if name == "filter" else ())
    preds = [PredSig(n, BUILTINS[n].arity) for n in builtins] + [head]
    types = {n: BUILTINS[n].types for n in builtins}
    dirs = {n: BUILTINS[n].directions for n in builtins}
    types[head.name] = htypes
    dirs[head.name] = hdirs
    params = dict(bounds, allow_recursion=True)
    params.update(overrides)
    return Bias(head, tuple(preds), types=types, directions=dirs, **params)


def gen_synthesis_task(name: str, seed: int = 0, timeout: float = 300.0,
                       limits: EvalLimits | None = None, **bias_overrides) -> TaskSpec:
    if name not in _GENERATORS:
        raise ValueError(f"unknown synthesis task {name!r}; choose from {', '.join(TASKS)}")
    rng = random.Random(f"{name}:{seed}")
    make = _GENERATORS[name]
    oracle = _ORACLES[name]
    bias = synthesis_bias(name, **bias_overrides)
    pos, neg = [], []
    while len(pos) < N_POS or len(neg) < N_NEG:
        p, n = make(rng)
        assert oracle(p) and not oracle(n)
        if len(pos) < N_POS:
            pos.append(Example(bias.head, p))
        if len(neg) < N_NEG:
            neg.append(Example(bias.head, n))
    builtins = set(LIST_BK) | ({"prepend"} if name == "filter" else set())
    return TaskSpec(pos=pos, neg=neg, bk=BKProgram(frozenset(), frozenset(builtins)),
                    bias=bias, limits=limits or EvalLimits(), timeout=timeout, name=name)
