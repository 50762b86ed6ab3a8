"""θ-subsumption between clauses and theories, and hypothesis constraints.

Constraints are kept semantically: a kind plus the failed (anchor) hypothesis.
Checking one is a subsumption test against the anchor.

Wire format of a constraint, one line, tab separated::

    <kind> TAB <id> TAB <clause 1> <clause 2> ...

where each clause is the canonical text of one anchor clause (terminated by a
period) and ``id`` is the first 16 hex digits of SHA-1 over ``kind + "\\n" +``
the anchor text with clauses joined by newlines.
"""

from __future__ import annotations

import hashlib
from itertools import combinations
from typing import Iterable, NamedTuple

from . import _kernels
from .hyplang import Clause, Hypothesis, canonical_form, format_hypothesis, parse_hypothesis
from .tester import Completeness, Outcome

SPECIALISATION = "specialisation"
GENERALISATION = "generalisation"
REDUNDANCY = "redundancy"
KINDS = (SPECIALISATION, GENERALISATION, REDUNDANCY)

_pred_ids: dict[tuple[str, int], int] = {}


def _pred_id(name: str, arity: int) -> int:
    key = (name, arity)
    pid = _pred_ids.get(key)
    if pid is None:
        pid = _pred_ids[key] = len(_pred_ids)
    return pid


def encode_clause(c: Clause) -> tuple:
    """Flat integer form consumed by the matching kernels."""
    renum: dict[int, int] = {}
    out = [1 + len(c.body), 0]
    for lit in (c.head, *c.body):
        out.append(_pred_id(lit.pred.name, lit.pred.arity))
        out.append(len(lit.args))
        for v in lit.args:
            out.append(renum.setdefault(v, len(renum)))
    out[1] = len(renum)
    return tuple(out)


def clause_subsumes(c1: Clause, c2: Clause) -> bool:
    """True iff some θ gives ``c1θ ⊆ c2`` (head onto head, body into body)."""
    if c1.head.pred != c2.head.pred:
        return False
    return _kernels.subsumes(encode_clause(c1), encode_clause(c2))


def theory_subsumes(t1: Hypothesis | Iterable[Clause], t2: Hypothesis | Iterable[Clause]) -> bool:
    """True iff every clause of ``t2`` is subsumed by some clause of ``t1``."""
    cs1 = list(t1)
    return all(any(clause_subsumes(c1, c2) for c1 in cs1) for c2 in t2)


class Constraint(NamedTuple):
    kind: str
    anchor: Hypothesis
    id: str

    def __str__(self) -> str:
        return to_wire(self)


def _constraint_id(kind: str, anchor: Hypothesis) -> str:
    return hashlib.sha1(f"{kind}\n{format_hypothesis(anchor)}".encode()).hexdigest()[:16]


def make_constraint(kind: str, anchor: Hypothesis) -> Constraint:
    if kind not in KINDS:
        raise ValueError(f"unknown constraint kind {kind!r}")
    anchor = canonical_form(anchor)
    return Constraint(kind, anchor, _constraint_id(kind, anchor))


def to_wire(c: Constraint) -> str:
    return "\t".join((c.kind, c.id, " ".join(str(cl) for cl in c.anchor.clauses)))


def from_wire(line: str) -> Constraint:
    kind, cid, text = line.rstrip("\n").split("\t")
    c = make_constraint(kind, parse_hypothesis(text))
    if c.id != cid:
        raise ValueError(f"constraint id mismatch: {cid} != {c.id}")
    return c


class SolutionConstraintError(ValueError):
    """No constraint may be derived from a complete and consistent hypothesis."""


def derive_constraints(h: Hypothesis, outcome: Outcome) -> frozenset[Constraint]:
    if outcome.is_solution:
        raise SolutionConstraintError("hypothesis is a solution")
    out = set()
    if outcome.incomplete:
        out.add(make_constraint(SPECIALISATION, h))
    if outcome.inconsistent:
        out.add(make_constraint(GENERALISATION, h))
    if outcome.completeness is Completeness.TOTALLY_INCOMPLETE:
        out.add(make_constraint(REDUNDANCY, h))
    return frozenset(out)


def violates(h: Hypothesis, c: Constraint) -> bool:
    """True iff ``h`` is pruned by ``c``.

    Redundancy constraints only apply to hypotheses without recursive clauses:
    in a recursive program a clause that covers nothing on its own may still be
    the base case other clauses rely on.
    """
    if c.kind == SPECIALISATION:
        return theory_subsumes(c.anchor, h)
    if c.kind == GENERALISATION:
        return theory_subsumes(h, c.anchor)
    if h.is_recursive():
        return False
    # a ⪯ S for nonempty S ⊆ h; smallest subsets first
    clauses = h.clauses
    for k in range(1, len(clauses) + 1):
        for subset in combinations(clauses, k):
            if theory_subsumes(c.anchor, subset):
                return True
    return False
