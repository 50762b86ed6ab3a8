"""Hypothesis language: clauses over variables, canonical forms, meta-encoding, cost.

Variables are plain integers (0 is ``A``, 1 is ``B`` ...).  Hypothesis literals
carry no constants or function symbols; all structure lives in the background
knowledge.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple

from .syntax import ParseError, Variable, parse_rule

Var = int

HEAD = "head"
BODY = "body"


class PredSig(NamedTuple):
    name: str
    arity: int

    def __str__(self) -> str:
        return f"{self.name}/{self.arity}"


class Literal(NamedTuple):
    pred: PredSig
    args: tuple[Var, ...]

    def __str__(self) -> str:
        return f"{self.pred.name}({','.join(var_name(v) for v in self.args)})"


class Clause(NamedTuple):
    head: Literal
    body: tuple[Literal, ...]

    def __str__(self) -> str:
        return format_clause(self)

    @property
    def size(self) -> int:
        return 1 + len(self.body)

    def variables(self) -> set[Var]:
        vs = set(self.head.args)
        for lit in self.body:
            vs.update(lit.args)
        return vs

    def is_recursive(self) -> bool:
        return any(lit.pred == self.head.pred for lit in self.body)


class Hypothesis(NamedTuple):
    clauses: tuple[Clause, ...] = ()

    def __str__(self) -> str:
        return format_hypothesis(self)

    def __len__(self) -> int:
        return len(self.clauses)

    def __iter__(self):
        return iter(self.clauses)

    def __reduce__(self):
        # iteration yields clauses, so pickling must name the field explicitly
        return (Hypothesis, (self.clauses,))

    def is_recursive(self) -> bool:
        return any(c.is_recursive() for c in self.clauses)


class MetaAtom(NamedTuple):
    role: str
    clause_index: int
    pred: PredSig
    vars: tuple[int, ...]

    def __str__(self) -> str:
        tag = "h_lit" if self.role == HEAD else "b_lit"
        vs = ",".join(map(str, self.vars))
        return f"{tag}({self.clause_index},{self.pred.name},{self.pred.arity},({vs}))"


class MalformedEncoding(ValueError):
    pass


class InvalidBias(ValueError):
    pass


def var_name(v: Var) -> str:
    letters = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
    if v < 26:
        return letters[v]
    return f"{letters[v % 26]}{v // 26}"


def _freeze(mapping) -> tuple:
    if not mapping:
        return ()
    if isinstance(mapping, tuple):
        return mapping
    return tuple(sorted((k, tuple(v)) for k, v in dict(mapping).items()))


@dataclass(frozen=True)
class Bias:
    """Syntactic bounds of the hypothesis space.

    ``types`` and ``directions`` are optional per-predicate annotations keyed by
    predicate name.  Types force every variable to take one type across its
    occurrences; directions (``in``/``out``) require each clause to admit a
    left-to-right execution order in which every input is bound before use.
    Predicates without an annotation are unconstrained.
    """

    head: PredSig
    body_preds: tuple[PredSig, ...]
    max_clauses: int = 1
    max_body: int = 1
    max_vars: int = 1
    allow_recursion: bool = False
    types: tuple = field(default=())
    directions: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "head", PredSig(*self.head))
        body = {PredSig(*p) for p in self.body_preds}
        object.__setattr__(self, "body_preds", tuple(sorted(body)))
        object.__setattr__(self, "types", _freeze(self.types))
        object.__setattr__(self, "directions", _freeze(self.directions))
        if min(self.max_clauses, self.max_body, self.max_vars) < 1:
            raise InvalidBias("max_clauses, max_body and max_vars must be >= 1")
        if self.max_vars < self.head.arity:
            raise InvalidBias("max_vars smaller than head arity")
        names = {}
        for p in (self.head, *self.body_preds):
            if names.setdefault(p.name, p.arity) != p.arity:
                raise InvalidBias(f"predicate {p.name} declared with two arities")
        for name, spec in self.directions:
            if any(d not in ("in", "out") for d in spec):
                raise InvalidBias(f"bad direction for {name}: {spec}")

    @property
    def usable_preds(self) -> tuple[PredSig, ...]:
        """Body predicates actually usable, honouring ``allow_recursion``."""
        preds = [p for p in self.body_preds if p != self.head]
        if self.allow_recursion:
            preds.append(self.head)
        return tuple(sorted(preds))

    @property
    def max_size(self) -> int:
        return self.max_clauses * (1 + self.max_body)

    def type_of(self, name: str) -> tuple | None:
        return dict(self.types).get(name)

    def direction_of(self, name: str) -> tuple | None:
        return dict(self.directions).get(name)

    def head_literal(self) -> Literal:
        return Literal(self.head, tuple(range(self.head.arity)))


# canonical forms


def _rename_literal(lit: Literal, mapping: Mapping[Var, Var]) -> Literal:
    return Literal(lit.pred, tuple(mapping[v] for v in lit.args))


def canonical_clause(clause: Clause) -> Clause:
    """Smallest renaming of ``clause`` with a sorted, duplicate-free body.

    Head variables are numbered by first occurrence in the head; the remaining
    variables take every bijection onto the following numbers and the
    lexicographically least sorted body wins.  The winner is also numbered by
    first occurrence (any out-of-order pair could be swapped for a smaller body).
    """
    head_map: dict[Var, Var] = {}
    for v in clause.head.args:
        head_map.setdefault(v, len(head_map))
    rest = sorted({v for lit in clause.body for v in lit.args} - set(head_map))
    head = _rename_literal(clause.head, head_map)
    body_set = set(clause.body)
    base = len(head_map)
    best = None
    for perm in itertools.permutations(range(base, base + len(rest))):
        mapping = dict(head_map)
        mapping.update(zip(rest, perm))
        body = tuple(sorted({_rename_literal(lit, mapping) for lit in body_set}))
        if best is None or body < best:
            best = body
    return Clause(head, best if best is not None else ())


def is_canonical_clause(clause: Clause) -> bool:
    return canonical_clause(clause) == clause


def canonical_form(h: Hypothesis | Iterable[Clause]) -> Hypothesis:
    clauses = h.clauses if isinstance(h, Hypothesis) else tuple(h)
    return Hypothesis(tuple(sorted({canonical_clause(c) for c in clauses})))


def cost(h: Hypothesis) -> int:
    return sum(1 + len(c.body) for c in h.clauses)


# meta-level encoding


def encode_hypothesis(h: Hypothesis) -> frozenset[MetaAtom]:
    atoms = set()
    for i, c in enumerate(h.clauses):
        atoms.add(MetaAtom(HEAD, i, c.head.pred, c.head.args))
        for lit in c.body:
            atoms.add(MetaAtom(BODY, i, lit.pred, lit.args))
    return frozenset(atoms)


def decode_hypothesis(atoms: Iterable[MetaAtom]) -> Hypothesis:
    heads: dict[int, Literal] = {}
    bodies: dict[int, list[Literal]] = {}
    for a in atoms:
        if len(a.vars) != a.pred.arity:
            raise MalformedEncoding(f"arity mismatch in {a}")
        lit = Literal(PredSig(*a.pred), tuple(a.vars))
        if a.role == HEAD:
            if a.clause_index in heads and heads[a.clause_index] != lit:
                raise MalformedEncoding(f"two heads for clause {a.clause_index}")
            heads[a.clause_index] = lit
        elif a.role == BODY:
            bodies.setdefault(a.clause_index, []).append(lit)
        else:
            raise MalformedEncoding(f"unknown role {a.role!r}")
    missing = set(bodies) - set(heads)
    if missing:
        raise MalformedEncoding(f"no head atom for clause(s) {sorted(missing)}")
    if sorted(heads) != list(range(len(heads))):
        raise MalformedEncoding("clause indices are not contiguous from 0")
    clauses = tuple(
        Clause(heads[i], tuple(sorted(bodies.get(i, ())))) for i in range(len(heads))
    )
    return Hypothesis(clauses)


# bias conformance


def _connected(clause: Clause) -> bool:
    vs = clause.variables()
    seen = set(clause.head.args)
    changed = True
    while changed:
        changed = False
        for lit in clause.body:
            args = set(lit.args)
            if args & seen and not args <= seen:
                seen |= args
                changed = True
    return seen >= vs


def _well_typed(clause: Clause, bias: Bias) -> bool:
    if not bias.types:
        return True
    types = dict(bias.types)
    seen: dict[Var, str] = {}
    for lit in (clause.head, *clause.body):
        spec = types.get(lit.pred.name)
        if spec is None:
            continue
        for v, t in zip(lit.args, spec):
            if seen.setdefault(v, t) != t:
                return False
    return True


def _mode_safe(clause: Clause, bias: Bias) -> bool:
    if not bias.directions:
        return True
    dirs = dict(bias.directions)
    head_dirs = dirs.get(clause.head.pred.name)
    if head_dirs is None:
        return True
    bound = {v for v, d in zip(clause.head.args, head_dirs) if d == "in"}
    pending = list(clause.body)
    progress = True
    while pending and progress:
        progress = False
        for lit in list(pending):
            spec = dirs.get(lit.pred.name)
            inputs = (
                [v for v, d in zip(lit.args, spec) if d == "in"] if spec else []
            )
            if all(v in bound for v in inputs):
                bound.update(lit.args)
                pending.remove(lit)
                progress = True
    return not pending


def clause_conforms(clause: Clause, bias: Bias) -> bool:
    """True iff ``clause`` is canonical and admitted by ``bias``."""
    if clause.head != bias.head_literal():
        return False
    if not 1 <= len(clause.body) <= bias.max_body:
        return False
    usable = set(bias.usable_preds)
    for lit in clause.body:
        if lit.pred not in usable or len(lit.args) != lit.pred.arity:
            return False
        if lit == clause.head:
            return False
    vs = clause.variables()
    if max(vs) >= bias.max_vars:
        return False
    if not set(clause.head.args) <= {v for lit in clause.body for v in lit.args}:
        return False
    if not _connected(clause):
        return False
    if not _well_typed(clause, bias) or not _mode_safe(clause, bias):
        return False
    return is_canonical_clause(clause)


def conforms(h: Hypothesis, bias: Bias) -> bool:
    """True iff ``h`` is a canonical hypothesis inside the space of ``bias``.

    A hypothesis containing a recursive clause must also contain a
    non-recursive one; otherwise no derivation can bottom out.
    """
    if not 1 <= len(h.clauses) <= bias.max_clauses:
        return False
    if list(h.clauses) != sorted(set(h.clauses)):
        return False
    if not all(clause_conforms(c, bias) for c in h.clauses):
        return False
    rec = [c.is_recursive() for c in h.clauses]
    return not any(rec) or not all(rec)


# text form


def format_clause(c: Clause) -> str:
    if not c.body:
        return f"{c.head}."
    return f"{c.head} :- {', '.join(str(lit) for lit in c.body)}."


def format_hypothesis(h: Hypothesis) -> str:
    return "\n".join(format_clause(c) for c in h.clauses)


def hypothesis_id(h: Hypothesis) -> str:
    return hashlib.sha1(format_hypothesis(h).encode()).hexdigest()[:12]


def parse_clause(text: str, preds: Mapping[str, PredSig] | None = None) -> Clause:
    """Parse a clause with variables only, numbering variables by first occurrence.

    The result is not canonicalised; pass it through :func:`canonical_clause`.
    """
    (hname, hargs), body = parse_rule(text)
    names: dict[str, int] = {}

    def lit(name, args) -> Literal:
        vs = []
        for a in args:
            if not isinstance(a, Variable):
                raise ParseError(f"hypothesis literals take variables only, got {a!r}")
            vs.append(names.setdefault(str(a), len(names)))
        sig = PredSig(name, len(args))
        if preds is not None and name in preds and preds[name] != sig:
            raise ParseError(f"{name} used with arity {len(args)}")
        return Literal(sig, tuple(vs))

    head = lit(hname, hargs)
    return Clause(head, tuple(lit(n, a) for n, a in body))


def parse_hypothesis(text: str) -> Hypothesis:
    """Parse period-terminated clauses; a clause may span several lines."""
    lines = [ln for ln in text.splitlines() if not ln.strip().startswith("%")]
    chunks = " ".join(lines).split(".")
    clauses = [parse_clause(chunk) for chunk in chunks if chunk.strip()]
    return canonical_form(clauses)
