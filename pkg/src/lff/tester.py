"""Bounded SLD resolution over background knowledge plus a hypothesis.

Background knowledge is a set of ground facts and a set of enabled builtin
relations over integers, atoms and lists (tuples).  A builtin is only called
once the arguments it needs are bound, so literal order inside a canonical
clause does not matter.  The proof engine itself lives in ``lff._kernels``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from ._kernels import sld
from ._kernels._errors import Cancelled, UnknownPredicate
from .hyplang import Hypothesis, PredSig
from .syntax import format_term

Builtin = sld.Builtin
BUILTINS = sld.BUILTINS


class Completeness(enum.Enum):
    COMPLETE = "complete"
    INCOMPLETE = "incomplete"
    TOTALLY_INCOMPLETE = "totally_incomplete"


class Consistency(enum.Enum):
    CONSISTENT = "consistent"
    INCONSISTENT = "inconsistent"


class Outcome(NamedTuple):
    completeness: Completeness
    consistency: Consistency

    @property
    def is_solution(self) -> bool:
        return (self.completeness is Completeness.COMPLETE
                and self.consistency is Consistency.CONSISTENT)

    @property
    def incomplete(self) -> bool:
        return self.completeness is not Completeness.COMPLETE

    @property
    def inconsistent(self) -> bool:
        return self.consistency is Consistency.INCONSISTENT

    def __str__(self) -> str:
        return f"{self.completeness.value},{self.consistency.value}"


class Proof(enum.Enum):
    PROVED = "proved"
    NOT_PROVED = "not_proved"
    RESOURCE_EXHAUSTED = "resource_exhausted"


@dataclass(frozen=True)
class EvalLimits:
    max_depth: int = 200
    max_steps: int = 100_000

    def __post_init__(self):
        if self.max_depth < 1 or self.max_steps < 1:
            raise ValueError("evaluation limits must be positive")


class Example(NamedTuple):
    pred: PredSig
    args: tuple

    def __str__(self) -> str:
        return f"{self.pred.name}({','.join(format_term(a) for a in self.args)})"


@dataclass(frozen=True)
class BKProgram:
    """Ground facts plus enabled builtins; immutable and shareable."""

    ground_facts: frozenset = frozenset()   # of (name, args tuple)
    builtins: frozenset = frozenset()
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        unknown = set(self.builtins) - set(BUILTINS)
        if unknown:
            raise UnknownPredicate(f"unknown builtin(s): {sorted(unknown)}")
        object.__setattr__(self, "ground_facts", frozenset(
            (name, tuple(args)) for name, args in self.ground_facts))
        object.__setattr__(self, "builtins", frozenset(self.builtins))
        index: dict = {}
        for name, args in sorted(self.ground_facts, key=repr):
            rows, by_arg = index.setdefault((name, len(args)), ([], {}))
            rows.append(args)
            for i, t in enumerate(args):
                by_arg.setdefault((i, t), []).append(args)
        object.__setattr__(self, "_index", index)

    @property
    def fact_keys(self) -> frozenset:
        return frozenset(self._index)

    def fact_preds(self) -> set[PredSig]:
        return {PredSig(name, arity) for name, arity in self._index}

    def builtin_preds(self) -> set[PredSig]:
        return {PredSig(n, BUILTINS[n].arity) for n in self.builtins}

    def lookup(self, name: str, arity: int, bound: list):
        """Candidate fact rows for a call with ``bound[i]`` ground values or None."""
        entry = self._index.get((name, arity))
        if entry is None:
            return ()
        rows, by_arg = entry
        best = rows
        for i, v in enumerate(bound):
            if v is not None:
                cand = by_arg.get((i, v), ())
                if len(cand) < len(best):
                    best = cand
        return best


_PROOFS = {sld.PROVED: Proof.PROVED, sld.NOT_PROVED: Proof.NOT_PROVED,
           sld.RESOURCE_EXHAUSTED: Proof.RESOURCE_EXHAUSTED}


def _engine(b: BKProgram, h: Hypothesis, lim: EvalLimits | None, should_stop, directions):
    lim = lim or EvalLimits()
    clauses = [(c.head.pred.name, c.head.args, [(lit.pred.name, lit.args) for lit in c.body])
               for c in h.clauses]
    return sld.Engine(b, clauses, lim.max_depth, lim.max_steps, should_stop,
                      dict(directions or ()))


def entails(b: BKProgram, h: Hypothesis, e: Example, lim: EvalLimits | None = None,
            should_stop=None, directions=None) -> Proof:
    """Bounded decision of ``B ∪ H ⊨ e``."""
    return _PROOFS[_engine(b, h, lim, should_stop, directions).prove(e.pred.name, e.args)]


def test_hypothesis(h: Hypothesis, b: BKProgram, pos: Iterable[Example],
                    neg: Iterable[Example], lim: EvalLimits | None = None,
                    should_stop=None, directions=None) -> Outcome:
    """Classify ``h`` as complete/incomplete/totally incomplete × consistent/inconsistent.

    Only a real proof counts: an exhausted budget on a positive example leaves
    it unproved, and on a negative example does not make ``h`` inconsistent.
    """
    pos = list(pos)
    if not pos:
        raise ValueError("at least one positive example is required")
    engine = _engine(b, h, lim, should_stop, directions)
    proved = failed = 0
    for e in pos:
        if engine.prove(e.pred.name, e.args) == sld.PROVED:
            proved += 1
        else:
            failed += 1
        if proved and failed:
            break
    if not failed:
        completeness = Completeness.COMPLETE
    elif not proved:
        completeness = Completeness.TOTALLY_INCOMPLETE
    else:
        completeness = Completeness.INCOMPLETE
    consistency = Consistency.CONSISTENT
    for e in neg:
        if engine.prove(e.pred.name, e.args) == sld.PROVED:
            consistency = Consistency.INCONSISTENT
            break
    return Outcome(completeness, consistency)


test_hypothesis.__test__ = False  # keep pytest from collecting it as a test
