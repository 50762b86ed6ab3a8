"""Bounded SLD resolution: builtin relations and the proof engine.

This module is the pure-Python implementation.  The same source is compiled
by Cython into ``_sld_c`` when the extension is built.

Terms are ints, strs and tuples (lists); unbound variables are ``Ref`` cells.
"""

import sys
from typing import Callable, NamedTuple

from ._errors import Cancelled, UnknownPredicate

PROVED, NOT_PROVED, RESOURCE_EXHAUSTED = 0, 1, 2


def _is_list(x) -> bool:
    return type(x) is tuple


def _is_int(x) -> bool:
    return type(x) is int


def _b_head(a, unify):
    lst, x = a
    if _is_list(lst) and lst and unify(x, lst[0]):
        yield


def _b_tail(a, unify):
    lst, t = a
    if _is_list(lst) and lst and unify(t, lst[1:]):
        yield


def _b_element(a, unify, undo):
    lst, x = a
    if not _is_list(lst):
        return
    if type(x) is not Ref:
        if any(type(item) is type(x) and item == x for item in lst):
            yield
        return
    seen = set()
    for item in lst:
        if item in seen:
            continue
        seen.add(item)
        if unify(x, item):
            yield
        undo()


def _b_increment(a, unify):
    x, y = a
    if _is_int(x):
        if unify(y, x + 1):
            yield
    elif _is_int(y) and unify(x, y - 1):
        yield


def _b_decrement(a, unify):
    x, y = a
    if _is_int(x):
        if unify(y, x - 1):
            yield
    elif _is_int(y) and unify(x, y + 1):
        yield


def _b_geq(a, unify):
    x, y = a
    if _is_int(x) and _is_int(y) and x >= y:
        yield


def _b_const(value):
    def rel(a, unify):
        if unify(a[0], value):
            yield
    return rel


def _b_even(a, unify):
    if _is_int(a[0]) and a[0] % 2 == 0:
        yield


def _b_odd(a, unify):
    if _is_int(a[0]) and a[0] % 2 == 1:
        yield


def _b_prepend(a, unify):
    x, lst, r = a
    if _is_list(r):
        if r and unify(x, r[0]) and unify(lst, r[1:]):
            yield
    elif _is_list(lst) and not isinstance(x, Ref):
        if unify(r, (x,) + lst):
            yield


class Builtin(NamedTuple):
    arity: int
    types: tuple
    directions: tuple
    ready: Callable      # bound-flags tuple -> bool
    solve: Callable
    needs_undo: bool = False    # nondeterministic: may yield several answers


BUILTINS: dict[str, Builtin] = {
    "head": Builtin(2, ("list", "int"), ("in", "out"), lambda b: b[0], _b_head),
    "tail": Builtin(2, ("list", "list"), ("in", "out"), lambda b: b[0], _b_tail),
    "element": Builtin(2, ("list", "int"), ("in", "out"), lambda b: b[0], _b_element, True),
    "increment": Builtin(2, ("int", "int"), ("in", "out"), lambda b: b[0] or b[1], _b_increment),
    "decrement": Builtin(2, ("int", "int"), ("in", "out"), lambda b: b[0] or b[1], _b_decrement),
    "geq": Builtin(2, ("int", "int"), ("in", "in"), lambda b: b[0] and b[1], _b_geq),
    "empty": Builtin(1, ("list",), ("out",), lambda b: True, _b_const(())),
    "zero": Builtin(1, ("int",), ("out",), lambda b: True, _b_const(0)),
    "one": Builtin(1, ("int",), ("out",), lambda b: True, _b_const(1)),
    "even": Builtin(1, ("int",), ("in",), lambda b: b[0], _b_even),
    "odd": Builtin(1, ("int",), ("in",), lambda b: b[0], _b_odd),
    "prepend": Builtin(3, ("int", "list", "list"), ("in", "in", "out"),
                       lambda b: (b[0] and b[1]) or b[2], _b_prepend),
}



_UNBOUND = object()


class Ref:
    __slots__ = ("val",)

    def __init__(self):
        self.val = _UNBOUND


def deref(x):
    while type(x) is Ref:
        v = x.val
        if v is _UNBOUND:
            return x
        x = v
    return x


_BUILTIN, _FACT, _USER = 0, 1, 2


class _Exhausted(Exception):
    pass


def _call_pattern(goal):
    """(key, args up to variable renaming, ground?) of a goal at call time."""
    out = []
    refs: list = []
    for a in goal[2]:
        v = deref(a)
        if type(v) is Ref:
            for i, r in enumerate(refs):
                if r is v:
                    break
            else:
                i = len(refs)
                refs.append(v)
            out.append((Ref, i))
        else:
            out.append(v)
    return (goal[1], tuple(out), not refs)


def _has_variant(anc, pattern) -> bool:
    while anc is not None:
        if anc[0] == pattern:
            return True
        anc = anc[1]
    return False


class Engine:
    """SLD interpreter for one background program and set of clauses.

    A user goal whose arguments are all ground is solved in a nested proof and
    its answer tabled: it binds nothing, so one proof is as good as many.  Only
    proofs and genuine finite failures are tabled, never depth-cut failures.
    The table lives as long as the engine, so it is shared across examples.
    """

    def __init__(self, bk, clauses, max_depth: int, max_steps: int,
                 should_stop: Callable[[], bool] | None = None,
                 directions: dict | None = None):
        self.bk = bk
        self.max_depth = max_depth
        self.max_steps = max_steps
        self.should_stop = should_stop
        self.trail: list[Ref] = []
        self.user: dict[tuple, list] = {}
        self.table: dict = {}
        self._token = 0
        self.directions = directions or {}
        clauses = list(clauses)
        defined = {(name, len(args)) for name, args, _ in clauses}
        facts = set(bk.fact_keys)
        for name, head_args, lits in clauses:
            nvars = 1 + max(v for args in (head_args, *(a for _, a in lits)) for v in args)
            body = []
            for pred, args in lits:
                key = (pred, len(args))
                if key in defined:
                    kind, info = _USER, self._in_positions(pred)
                elif pred in bk.builtins and BUILTINS[pred].arity == len(args):
                    kind, info = _BUILTIN, BUILTINS[pred]
                elif key in facts:
                    kind, info = _FACT, None
                else:
                    raise UnknownPredicate(f"{pred}/{len(args)} is neither builtin, fact nor defined")
                body.append((kind, key, tuple(args), info))
            plain = tuple(head_args) == tuple(range(len(head_args)))
            self.user.setdefault((name, len(head_args)), []).append(
                (None if plain else tuple(head_args), tuple(body), nvars))
        self.facts = facts
        self.steps = 0

    def _in_positions(self, name):
        dirs = self.directions.get(name)
        return None if dirs is None else tuple(i for i, d in enumerate(dirs) if d == "in")

    def _bind(self, r: Ref, v) -> None:
        r.val = v
        self.trail.append(r)

    def _undo(self, mark: int) -> None:
        trail = self.trail
        while len(trail) > mark:
            trail.pop().val = _UNBOUND

    def unify(self, a, b) -> bool:
        a = deref(a)
        b = deref(b)
        if a is b:
            return True
        if type(a) is Ref:
            self._bind(a, b)
            return True
        if type(b) is Ref:
            self._bind(b, a)
            return True
        return type(a) is type(b) and a == b

    # goal = (kind, (name, arity), args, info, depth, ancestors)
    # ancestors is a linked list (call pattern, parent) of enclosing user calls


    def _select(self, goals) -> int | None:
        """Index of the goal to resolve next, or None when everything is blocked.

        Any selection rule is sound, so cheap goals go first: facts and ready
        deterministic builtins, then ground user calls (tabled), then ready
        nondeterministic builtins, then ready user calls, and finally any user
        call as a last resort.  Ties go to the leftmost goal.
        """
        best = None
        rank = 6
        for i, (kind, _, args, info, _, _) in enumerate(goals):
            if kind == _FACT:
                return i
            bound = tuple(type(deref(a)) is not Ref for a in args)
            if kind == _BUILTIN:
                if info.ready(bound):
                    if not info.needs_undo or all(bound):
                        return i
                    r = 2
                else:
                    continue
            elif all(bound):
                r = 1
            elif (any(bound) if info is None else all(bound[j] for j in info)):
                r = 3
            else:
                r = 4
            if r < rank:
                best, rank = i, r
        return best

    def _expand(self, goal, rest, mark):
        kind, key, args, info, depth, anc = goal
        unify = self.unify
        if kind == _BUILTIN:
            vals = tuple(deref(a) for a in args)
            if info.needs_undo:
                sols = info.solve(vals, unify, lambda: self._undo(mark))
            else:
                sols = info.solve(vals, unify)
            for _ in sols:
                yield rest
            return
        if kind == _FACT or key in self.facts:
            vals = [deref(a) for a in args]
            bound = [None if type(v) is Ref else v for v in vals]
            for row in self.bk.lookup(key[0], key[1], bound):
                if all(unify(v, t) for v, t in zip(vals, row)):
                    yield rest
                self._undo(mark)
            if kind == _FACT:
                return
        clauses = self.user.get(key, ())
        if not clauses:
            return
        if depth >= self.max_depth:
            self.cut = True
            return
        for head_args, body, nvars in clauses:
            if head_args is None:
                # head is f(A,B,...) over distinct variables: no unification
                env = list(args)
                env.extend(Ref() for _ in range(nvars - len(args)))
            else:
                env = [Ref() for _ in range(nvars)]
                if not all(unify(a, env[v]) for a, v in zip(args, head_args)):
                    self._undo(mark)
                    continue
            new = tuple((k, bk, tuple(env[v] for v in bargs), inf, depth + 1, anc)
                        for k, bk, bargs, inf in body)
            yield new + rest
            self._undo(mark)

    def _ground_call(self, goal) -> bool:
        """Decide a ground user goal in a nested proof, with tabling.

        Re-entering a ground goal that is already being decided fails: a
        shortest proof never repeats a ground atom along a branch.  Such a
        failure depends on the outer call, so it is cached only while that
        call is still active (``self.low`` tracks the outermost level hit).
        """
        key = goal[5][0][:2]
        known = self.table.get(key)
        if known is not None:
            return known
        level = self.active.get(key)
        if level is not None:
            self.low = min(self.low, level)
            return False
        temp = self.temp.get(key)
        if temp is not None:
            low, token = temp
            if low < len(self.tokens) and self.tokens[low] == token:
                self.low = min(self.low, low)
                return False
        level = len(self.tokens)
        self._token += 1
        self.tokens.append(self._token)
        self.active[key] = level
        outer_cut, outer_low = self.cut, self.low
        self.cut, self.low = False, level
        mark = len(self.trail)
        try:
            ok = self._run([(self._expand(goal, (), mark), mark)])
        finally:
            self._undo(mark)
            del self.active[key]
            self.tokens.pop()
        low = self.low
        if ok:
            self.table[key] = True
            self.cut, self.low = outer_cut, outer_low
            return True
        if not self.cut:
            if low >= level:
                self.table[key] = False
            else:
                self.temp[key] = (low, self.tokens[low])
        self.cut = outer_cut or self.cut
        self.low = min(outer_low, low)
        return False

    def _run(self, stack) -> bool:
        """Depth-first search from the choice points on ``stack``."""
        trail = self.trail
        max_steps = self.max_steps
        poll = self.should_stop
        while stack:
            it, mark = stack[-1]
            if len(trail) > mark:
                self._undo(mark)
            self.steps += 1
            if self.steps > max_steps:
                raise _Exhausted()
            if poll is not None and self.steps & 1023 == 0 and poll():
                raise Cancelled()
            goals = next(it, None)
            if goals is None:
                stack.pop()
                continue
            while True:
                if not goals:
                    return True
                idx = self._select(goals)
                if idx is None:
                    self.cut = True     # floundered: unknown, not a refutation
                    break
                g = goals[idx]
                rest = goals[:idx] + goals[idx + 1:]
                if g[0] == _USER:
                    pattern = _call_pattern(g)
                    if not pattern[2] and _has_variant(g[5], pattern):
                        self.cut = True     # loops: unknown, not a refutation
                        break
                    g = g[:5] + ((pattern, g[5]),)
                    if pattern[2]:
                        if self._ground_call(g):
                            goals = rest
                            continue
                        break
                m = len(trail)
                stack.append((self._expand(g, rest, m), m))
                break
        return False

    def prove(self, name: str, args: tuple) -> int:
        key = (name, len(args))
        if key in self.user:
            kind, info = _USER, self._in_positions(name)
        elif key in self.facts:
            kind, info = _FACT, None
        else:
            return NOT_PROVED
        self.cut = False
        self.trail = []
        self.steps = 0
        self.active: dict = {}
        self.temp: dict = {}
        self.tokens: list[int] = []
        self.low = 0
        need = 4 * self.max_depth + 200
        if sys.getrecursionlimit() < need:
            sys.setrecursionlimit(need)
        try:
            ok = self._run([(iter([((kind, key, tuple(args), info, 0, None),)]), 0)])
        except _Exhausted:
            return RESOURCE_EXHAUSTED
        finally:
            self._undo(0)
        if ok:
            return PROVED
        return RESOURCE_EXHAUSTED if self.cut else NOT_PROVED

