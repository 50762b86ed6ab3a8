"""Reading and writing task files.

One period-terminated declaration per line; ``%`` starts a comment line::

    name last.
    head last/2.
    body head/2.
    type last(list,int).
    direction last(in,out).
    max_clauses 2.  max_body 3.  max_vars 3.  recursion true.
    max_size 7.
    limits 200,100000.
    timeout 300.
    builtin head.
    fact beats(paper,rock).
    constraint specialisation last(A,B) :- head(A,B).
    pos last([4,7,9],9).
    neg last([4,7,9],7).

Without ``body`` lines the body predicates are every enabled builtin plus every
fact predicate.  When the head has a ``type`` (or ``direction``) declaration,
builtins without one take their standard annotation.
"""

from __future__ import annotations

import re
from pathlib import Path

from .hyplang import Bias, InvalidBias, PredSig, format_clause, parse_hypothesis
from .solve import TaskSpec
from .subsume import KINDS, make_constraint
from .syntax import ParseError, format_term, is_ground, parse_atom
from .tester import BUILTINS, BKProgram, EvalLimits, Example


class TaskError(ValueError):
    """Semantically invalid task (parses, but cannot be solved as stated)."""


_SIG = re.compile(r"^([a-z][A-Za-z0-9_]*)/(\d+)$")
_INT_KEYS = ("max_clauses", "max_body", "max_vars", "max_size")


def _sig(text: str, lineno: int) -> PredSig:
    m = _SIG.match(text.strip())
    if not m:
        raise ParseError(f"expected name/arity, got {text!r}", lineno)
    return PredSig(m.group(1), int(m.group(2)))


def parse_task(text: str, source: str = "<string>") -> TaskSpec:
    settings: dict = {}
    head: PredSig | None = None
    body: list[PredSig] = []
    types: dict[str, tuple] = {}
    directions: dict[str, tuple] = {}
    builtins: set[str] = set()
    facts: set = set()
    pos: list[tuple] = []
    neg: list[tuple] = []
    cons: list[tuple] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        if not line.endswith("."):
            raise ParseError("declaration must end with '.'", lineno)
        key, _, rest = line.partition(" ")
        rest = rest.strip()
        try:
            if key in ("pos", "neg", "fact"):
                name, args = parse_atom(rest)
                if not all(is_ground(a) for a in args):
                    raise ParseError(f"{key} atoms must be ground", lineno)
                if key == "fact":
                    facts.add((name, args))
                else:
                    (pos if key == "pos" else neg).append((name, args, lineno))
            elif key == "builtin":
                name = rest[:-1].strip()
                if name not in BUILTINS:
                    raise ParseError(f"unknown builtin {name!r}", lineno)
                builtins.add(name)
            elif key == "head":
                head = _sig(rest[:-1], lineno)
            elif key == "body":
                body.append(_sig(rest[:-1], lineno))
            elif key in ("type", "direction"):
                name, args = parse_atom(rest)
                (types if key == "type" else directions)[name] = tuple(str(a) for a in args)
            elif key in _INT_KEYS:
                settings[key] = int(rest[:-1])
            elif key == "recursion":
                val = rest[:-1].strip()
                if val not in ("true", "false"):
                    raise ParseError("recursion takes true or false", lineno)
                settings["recursion"] = val == "true"
            elif key == "limits":
                depth, steps = (int(x) for x in rest[:-1].split(","))
                settings["limits"] = EvalLimits(depth, steps)
            elif key == "timeout":
                settings["timeout"] = float(rest[:-1])
            elif key == "name":
                settings["name"] = rest[:-1].strip()
            elif key == "constraint":
                kind, _, clauses = rest.partition(" ")
                if kind not in KINDS:
                    raise ParseError(f"unknown constraint kind {kind!r}", lineno)
                cons.append((kind, clauses, lineno))
            else:
                raise ParseError(f"unknown directive {key!r}", lineno)
        except ParseError as exc:
            if exc.line is None:
                raise ParseError(str(exc), lineno) from None
            raise
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None

    if head is None:
        raise TaskError(f"{source}: missing 'head' declaration")
    if not pos:
        raise TaskError(f"{source}: at least one positive example is required")
    bk = BKProgram(frozenset(facts), frozenset(builtins))
    known = bk.builtin_preds() | bk.fact_preds()
    recursion = settings.get("recursion", False)
    if not body:
        body = sorted(known)
    for p in body:
        if p not in known and p != head:
            raise TaskError(f"{source}: body predicate {p} is neither an enabled builtin nor a fact")
    if head.name in types:
        for n in builtins:
            types.setdefault(n, BUILTINS[n].types)
    if head.name in directions:
        for n in builtins:
            directions.setdefault(n, BUILTINS[n].directions)
    try:
        bias = Bias(head, tuple(body), settings.get("max_clauses", 1), settings.get("max_body", 1),
                    settings.get("max_vars", max(head.arity, 1)), recursion, types, directions)
    except InvalidBias as exc:
        raise TaskError(f"{source}: {exc}") from None

    def examples(rows):
        out = []
        for name, args, lineno in rows:
            if PredSig(name, len(args)) != head:
                raise TaskError(f"{source}:{lineno}: example {name}/{len(args)} does not match head {head}")
            out.append(Example(head, tuple(args)))
        return out

    initial = frozenset(make_constraint(k, parse_hypothesis(c)) for k, c, _ in cons)
    return TaskSpec(
        pos=examples(pos), neg=examples(neg), bk=bk, bias=bias,
        initial_constraints=initial,
        max_size=settings.get("max_size", bias.max_size),
        limits=settings.get("limits", EvalLimits()),
        timeout=settings.get("timeout", 300.0),
        name=settings.get("name", Path(source).stem),
    )


def load_task(path) -> TaskSpec:
    path = Path(path)
    return parse_task(path.read_text(encoding="utf-8"), str(path))


def _atom_text(name: str, args) -> str:
    return f"{name}({','.join(format_term(a) for a in args)})"


def dump_task(task: TaskSpec) -> str:
    """Task-file text; ``parse_task(dump_task(t))`` reproduces ``t``."""
    b = task.bias
    lines = [f"name {task.name}.", f"head {b.head}."]
    lines += [f"body {p}." for p in b.body_preds]
    lines += [f"type {n}({','.join(t)})." for n, t in b.types]
    lines += [f"direction {n}({','.join(d)})." for n, d in b.directions]
    lines += [f"max_clauses {b.max_clauses}.", f"max_body {b.max_body}.",
              f"max_vars {b.max_vars}.", f"recursion {'true' if b.allow_recursion else 'false'}.",
              f"max_size {task.max_size}.",
              f"limits {task.limits.max_depth},{task.limits.max_steps}.",
              f"timeout {task.timeout:g}."]
    lines += [f"builtin {n}." for n in sorted(task.bk.builtins)]
    lines += [f"fact {_atom_text(n, a)}." for n, a in sorted(task.bk.ground_facts, key=repr)]
    for c in sorted(task.initial_constraints, key=lambda c: c.id):
        lines.append(f"constraint {c.kind} {' '.join(format_clause(x) for x in c.anchor)}")
    lines += [f"pos {e}." for e in task.pos]
    lines += [f"neg {e}." for e in task.neg]
    return "\n".join(lines) + "\n"


def save_task(task: TaskSpec, path) -> None:
    Path(path).write_text(dump_task(task), encoding="utf-8", newline="\n")
