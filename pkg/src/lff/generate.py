"""Enumeration of canonical hypotheses of an exact size under constraints.

The clause universe of a bias is built lazily, one body length at a time
(:class:`ClauseSpace`).  A
hypothesis is a strictly increasing tuple of universe ids, so enumerating
id-tuples whose sizes sum to ``m`` enumerates every canonical hypothesis once.
Constraints are compiled to per-clause bitmasks (:class:`ConstraintStore`),
which turns each hypothesis-level subsumption test into a few integer ops.
"""

from __future__ import annotations

import bisect
import random
from dataclasses import dataclass
from typing import Iterable, TextIO

from . import _kernels
from .hyplang import (
    Bias,
    Clause,
    Hypothesis,
    InvalidBias,
    Literal,
    _connected,
    _mode_safe,
    _well_typed,
    is_canonical_clause,
)
from ._kernels._errors import Cancelled
from .subsume import GENERALISATION, REDUNDANCY, SPECIALISATION, Constraint, encode_clause


@dataclass(frozen=True)
class Heuristic:
    """Branch-order policy: canonical order, shuffled with probability ``random_freq``."""

    seed: int = 0
    random_freq: float = 0.01

    def __post_init__(self):
        if not 0.0 <= self.random_freq <= 1.0:
            raise ValueError("random_freq must lie in [0, 1]")


def _literal_candidates(bias: Bias, next_var: int, prev: Literal | None):
    """Literals usable after ``prev`` with new variables numbered from ``next_var``."""
    out = []
    for pred in bias.usable_preds:
        def rec(args, nv):
            if len(args) == pred.arity:
                out.append((Literal(pred, tuple(args)), nv))
                return
            for v in range(min(nv + 1, bias.max_vars)):
                rec(args + [v], nv + 1 if v == nv else nv)
        rec([], next_var)
    return sorted((lit, nv) for lit, nv in out if prev is None or lit > prev)


def _type_prefix_ok(body, head: Literal, types: dict) -> bool:
    seen = {}
    for lit in (head, *body):
        spec = types.get(lit.pred.name)
        if spec is None:
            continue
        for v, t in zip(lit.args, spec):
            if seen.setdefault(v, t) != t:
                return False
    return True


_POLL = 1024


class ClauseSpace:
    """The clause universe of a bias, grown one body length at a time.

    Level ``k`` holds the canonical clauses with ``k`` body literals; it is
    built only when a generator first needs a hypothesis size that can use
    it.  Ids follow growth order (sorted within a level) and never change, so
    constraint bitmasks stay valid while the universe grows.
    """

    def __init__(self, bias: Bias):
        self.bias = bias
        self.head = bias.head_literal()
        self.clauses: list[Clause] = []
        self.index: dict[Clause, int] = {}
        self.size: list[int] = []
        self.recursive: list[bool] = []
        self.predmask: list[int] = []
        self.by_size: dict[int, list[int]] = {}
        self.buckets: dict[int, list[int]] = {}
        self._bit = {p: 1 << i for i, p in enumerate(bias.usable_preds)}
        self.packed = _kernels.PackedClauses()
        self.level = 0
        self._frontier: list[tuple] = [((), self.head.pred.arity)]
        self._cands: dict = {}
        self._down: dict[Clause, tuple[tuple[int, ...], int]] = {}
        self._up: dict[Clause, tuple[tuple[int, ...], int]] = {}

    def __len__(self) -> int:
        return len(self.clauses)

    def ensure(self, size: int, should_stop=None) -> None:
        """Build every level a hypothesis of ``size`` literals can draw on.

        Raises :class:`Cancelled` if ``should_stop`` fires; a level is only
        committed once complete.
        """
        want = min(size - 1, self.bias.max_body)
        while self.level < want:
            self._grow(should_stop)

    def _candidates(self, nv, prev):
        key = (nv, prev)
        hit = self._cands.get(key)
        if hit is None:
            hit = self._cands[key] = _literal_candidates(self.bias, nv, prev)
        return hit

    def _grow(self, should_stop) -> None:
        bias, head = self.bias, self.head
        types = dict(bias.types)
        head_vars = set(head.args)
        last = self.level + 1 == bias.max_body
        frontier, found = [], []
        ticks = 0
        for body, nv in self._frontier:
            for lit, nv2 in self._candidates(nv, body[-1] if body else None):
                ticks += 1
                if should_stop is not None and ticks % _POLL == 0 and should_stop():
                    raise Cancelled()
                if lit == head:
                    continue
                nb = body + (lit,)
                if types and not _type_prefix_ok(nb, head, types):
                    continue
                if not last:
                    frontier.append((nb, nv2))
                clause = Clause(head, nb)
                if (head_vars <= {v for l in nb for v in l.args}
                        and _connected(clause)
                        and _mode_safe(clause, bias)
                        and is_canonical_clause(clause)):
                    found.append(clause)
        found.sort()
        self._frontier = frontier
        self.level += 1
        for c in found:
            i = len(self.clauses)
            self.clauses.append(c)
            self.index[c] = i
            self.size.append(c.size)
            self.recursive.append(c.is_recursive())
            m = self._mask(c)
            self.predmask.append(m)
            self.by_size.setdefault(c.size, []).append(i)
            self.buckets.setdefault(m, []).append(i)
            self.packed.append(encode_clause(c))

    def _mask(self, c: Clause) -> int:
        m = 0
        for lit in c.body:
            m |= self._bit.get(lit.pred, 0)
        return m

    def _extend(self, cache, anchor, pick, forward) -> tuple[int, ...]:
        hit, seen = cache.get(anchor, ((), 0))
        n = len(self.clauses)
        if seen < n:
            ids = pick(seen)
            if ids:
                hit = hit + tuple(self.packed.match(encode_clause(anchor), ids, forward))
            cache[anchor] = (hit, n)
        return hit

    def subsumed_by(self, anchor: Clause) -> tuple[int, ...]:
        """Ids of universe clauses ``c`` with ``anchor ⪯ c``."""
        if anchor.head.pred != self.bias.head or not all(
                lit.pred in self._bit for lit in anchor.body):
            return ()
        need = self._mask(anchor)

        def pick(lo):
            return sorted(i for m, b in self.buckets.items() if m & need == need
                          for i in b[bisect.bisect_left(b, lo):])
        return self._extend(self._down, anchor, pick, True)

    def subsuming(self, anchor: Clause) -> tuple[int, ...]:
        """Ids of universe clauses ``c`` with ``c ⪯ anchor``."""
        if anchor.head.pred != self.bias.head:
            return ()
        allowed = self._mask(anchor)

        def pick(lo):
            return sorted(i for m, b in self.buckets.items() if m & ~allowed == 0
                          for i in b[bisect.bisect_left(b, lo):])
        return self._extend(self._up, anchor, pick, False)


def enumerate_clauses(bias: Bias) -> list[Clause]:
    """All canonical clauses admitted by ``bias``, in canonical order."""
    space = ClauseSpace(bias)
    space.ensure(bias.max_body + 1)
    return sorted(space.clauses)


_SPACES: dict[Bias, ClauseSpace] = {}


def clause_space(bias: Bias) -> ClauseSpace:
    """Process-wide cache; forked workers inherit levels built before the fork."""
    space = _SPACES.get(bias)
    if space is None:
        space = _SPACES[bias] = ClauseSpace(bias)
    return space


class ConstraintStore:
    """Constraints of one worker compiled to per-clause bitmasks over a ClauseSpace.

    When the universe grows, :meth:`sync` applies every stored constraint to
    the new clauses.
    """

    def __init__(self, space: ClauseSpace):
        self.space = space
        self.ids: set[str] = set()
        self.constraints: list[Constraint] = []
        self.spec_of: list[int] = []
        self.gen_of: list[int] = []       # single-clause generalisation anchors
        self.slots_of: list[int] = []     # slots of multi-clause generalisation anchors
        self.slot_groups: list[int] = []
        self.redundant = bytearray()
        self.any_redundant = False
        self.everything = False           # an empty generalisation anchor prunes all
        self._nspec = self._ngen = self._nslot = 0
        self._marks: list[tuple] = []     # (array name, bit, anchor clause)
        self.sync()

    def __len__(self) -> int:
        return len(self.constraints)

    def __contains__(self, cid: str) -> bool:
        return cid in self.ids

    def _apply(self, name: str, bit: int, clause: Clause, lo: int) -> None:
        space = self.space
        if name == "spec_of" or name == "redundant":
            hit = space.subsumed_by(clause)
        else:
            hit = space.subsuming(clause)
        arr = getattr(self, name)
        start = bisect.bisect_left(hit, lo) if lo else 0
        if name == "redundant":
            for i in hit[start:]:
                arr[i] = 1
                self.any_redundant = True
        else:
            for i in hit[start:]:
                arr[i] |= bit

    def sync(self, should_stop=None) -> None:
        """Extend the bitmasks to clauses added to the universe since the last call."""
        old, n = len(self.spec_of), len(self.space)
        if n == old:
            return
        grow = n - old
        self.spec_of.extend([0] * grow)
        self.gen_of.extend([0] * grow)
        self.slots_of.extend([0] * grow)
        self.redundant.extend(bytes(grow))
        for k, (name, bit, clause) in enumerate(self._marks):
            if should_stop is not None and k % 64 == 0 and should_stop():
                raise Cancelled()
            self._apply(name, bit, clause, old)

    def _mark(self, name: str, bit: int, clause: Clause) -> None:
        self._marks.append((name, bit, clause))
        self._apply(name, bit, clause, 0)

    def add(self, cs: Iterable[Constraint]) -> int:
        """Add constraints, skipping known ids; returns how many were new."""
        self.sync()
        added = 0
        for c in cs:
            if c.id in self.ids:
                continue
            self.ids.add(c.id)
            self.constraints.append(c)
            added += 1
            anchor = c.anchor.clauses
            if c.kind == SPECIALISATION:
                bit = 1 << self._nspec
                self._nspec += 1
                for a in anchor:
                    self._mark("spec_of", bit, a)
            elif c.kind == GENERALISATION:
                if not anchor:
                    self.everything = True
                    continue
                if len(anchor) == 1:
                    bit = 1 << self._ngen
                    self._ngen += 1
                    self._mark("gen_of", bit, anchor[0])
                else:
                    group = 0
                    for a in anchor:
                        bit = 1 << self._nslot
                        self._nslot += 1
                        group |= bit
                        self._mark("slots_of", bit, a)
                    self.slot_groups.append(group)
            elif c.kind == REDUNDANCY:
                for a in anchor:
                    self._mark("redundant", 0, a)
        return added

    def generalises_known(self, ids) -> bool:
        """Whether ``ids`` already generalise some generalisation anchor."""
        if self.everything:
            return True
        gen = slots = 0
        for i in ids:
            gen |= self.gen_of[i]
            slots |= self.slots_of[i]
        if gen:
            return True
        if slots:
            return any(g & slots == g for g in self.slot_groups)
        return False

    def violated(self, ids) -> bool:
        """Whether the hypothesis made of universe clauses ``ids`` violates any constraint."""
        spec = -1
        for i in ids:
            spec &= self.spec_of[i]
        if spec:
            return True
        if self.generalises_known(ids):
            return True
        if self.any_redundant:
            rec = self.space.recursive
            if not any(rec[i] for i in ids) and any(self.redundant[i] for i in ids):
                return True
        return False


class Generator:
    """Stateful enumerator of the size-``m`` slice of the hypothesis space.

    Depth-first over clause-id tuples; each node's children are ordered by
    (clause size, id).  Before taking a child, with probability
    ``heuristic.random_freq`` the node's remaining children are shuffled with
    the generator's seeded random stream.
    """

    def __init__(self, bias: Bias | ClauseSpace, size: int,
                 constraints: Iterable[Constraint] = (),
                 heuristic: Heuristic | None = None,
                 store: ConstraintStore | None = None,
                 trace: TextIO | None = None,
                 should_stop=None):
        space = bias if isinstance(bias, ClauseSpace) else clause_space(bias)
        self.space = space
        self.bias = space.bias
        if size < 2:
            raise InvalidBias("a definite clause in this language has at least 2 literals")
        if size > self.bias.max_size:
            raise InvalidBias(f"size {size} exceeds the bias maximum {self.bias.max_size}")
        self.size = size
        space.ensure(size, should_stop)
        self.heuristic = heuristic or Heuristic()
        self.rng = random.Random(self.heuristic.seed)
        self.store = store if store is not None else ConstraintStore(space)
        self.store.sync(should_stop)
        self.store.add(constraints)
        self.trace = trace
        self.emitted: set[tuple[int, ...]] = set()
        self.visited = 0
        self._exhausted = False
        self._stack = [self._frame((), size)]

    @property
    def constraints(self) -> list[Constraint]:
        return self.store.constraints

    def _frame(self, prefix: tuple[int, ...], remaining: int) -> list:
        """[prefix, remaining, children, position]"""
        space = self.space
        last = prefix[-1] if prefix else -1
        final = len(prefix) + 1 >= self.bias.max_clauses
        children: list[int] = []
        top = min(remaining, self.bias.max_body + 1)
        for s in range(2, top + 1):
            rest = remaining - s
            if rest != 0 and (final or rest < 2):
                continue
            ids = space.by_size.get(s)
            if ids:
                children.extend(ids[bisect.bisect_right(ids, last):])
        return [prefix, remaining, children, 0]

    def add_constraints(self, cs: Iterable[Constraint]) -> int:
        return self.store.add(cs)

    def _prefix_dead(self, prefix: tuple[int, ...]) -> bool:
        store = self.store
        if store.generalises_known(prefix):
            return True
        if store.any_redundant and not self.bias.allow_recursion:
            return any(store.redundant[i] for i in prefix)
        return False

    def _admissible(self, ids: tuple[int, ...]) -> bool:
        rec = self.space.recursive
        flags = [rec[i] for i in ids]
        return not any(flags) or not all(flags)

    def next(self) -> Hypothesis | None:
        """Next hypothesis, or None once the slice is exhausted."""
        if self._exhausted:
            return None
        stack = self._stack
        p = self.heuristic.random_freq
        rng = self.rng
        space = self.space
        store = self.store
        while stack:
            frame = stack[-1]
            prefix, remaining, children, pos = frame
            if pos >= len(children):
                stack.pop()
                continue
            if p > 0.0 and rng.random() < p and len(children) - pos > 1:
                tail = children[pos:]
                rng.shuffle(tail)
                children[pos:] = tail
            cid = children[pos]
            frame[3] = pos + 1
            ids = prefix + (cid,)
            rest = remaining - space.size[cid]
            self.visited += 1
            if rest:
                if not self._prefix_dead(ids):
                    stack.append(self._frame(ids, rest))
                continue
            if not self._admissible(ids) or store.violated(ids):
                continue
            if ids in self.emitted:
                continue
            self.emitted.add(ids)
            h = Hypothesis(tuple(sorted(space.clauses[i] for i in ids)))
            if self.trace is not None:
                self.trace.write(f"{h}\n\n")
            return h
        self._exhausted = True
        return None

    def __iter__(self):
        while (h := self.next()) is not None:
            yield h


def new_generator(bias: Bias, m: int, cons: Iterable[Constraint] = (),
                  heur: Heuristic | None = None) -> Generator:
    return Generator(bias, m, cons, heur)


def next_hypothesis(g: Generator) -> Hypothesis | None:
    return g.next()


def add_constraints(g: Generator, cs: Iterable[Constraint]) -> None:
    g.add_constraints(cs)
