"""Tokenizer and parser for the Prolog-like surface syntax used in task files.

Terms are integers, lowercase atoms, ``[...]`` lists and uppercase variables.
Lists are represented as Python tuples so that ground terms are hashable.
"""

from __future__ import annotations

import re
from typing import Union

Term = Union[int, str, tuple]


class ParseError(ValueError):
    """Raised on malformed clause or atom text."""

    def __init__(self, msg: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line is not None else msg)


class Variable(str):
    """A named variable appearing in parsed (non-ground) text."""

    __slots__ = ()

    def __repr__(self) -> str:
        return f"Variable({str.__repr__(self)})"


_TOKEN = re.compile(
    r"\s*(?:(?P<neck>:-|<-)|(?P<int>-?\d+)|(?P<var>[A-Z_][A-Za-z0-9_]*)"
    r"|(?P<atom>[a-z][A-Za-z0-9_]*)|(?P<punct>[()\[\],.|]))"
)


def tokenize(text: str) -> list[tuple[str, str]]:
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            if text[pos:].strip() == "":
                break
            raise ParseError(f"unexpected character {text[pos]!r} at column {pos}")
        kind = m.lastgroup
        out.append((kind, m.group(kind)))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str] | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, value: str | None = None) -> tuple[str, str]:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input")
        if value is not None and tok[1] != value:
            raise ParseError(f"expected {value!r}, got {tok[1]!r}")
        self.i += 1
        return tok

    def at_end(self) -> bool:
        return self.i >= len(self.toks)

    def term(self) -> Term:
        kind, val = self.take()
        if kind == "int":
            return int(val)
        if kind == "var":
            return Variable(val)
        if kind == "atom":
            return val
        if val == "[":
            items: list[Term] = []
            if self.peek() == ("punct", "]"):
                self.take()
                return ()
            while True:
                items.append(self.term())
                kind, val = self.take()
                if val == "]":
                    return tuple(items)
                if val != ",":
                    raise ParseError(f"expected ',' or ']' in list, got {val!r}")
        raise ParseError(f"unexpected token {val!r}")

    def atom(self) -> tuple[str, tuple[Term, ...]]:
        kind, name = self.take()
        if kind != "atom":
            raise ParseError(f"expected predicate name, got {name!r}")
        args: list[Term] = []
        if self.peek() == ("punct", "("):
            self.take()
            while True:
                args.append(self.term())
                _, val = self.take()
                if val == ")":
                    break
                if val != ",":
                    raise ParseError(f"expected ',' or ')', got {val!r}")
        return name, tuple(args)


def parse_atom(text: str) -> tuple[str, tuple[Term, ...]]:
    """Parse ``name(t1,...,tn)`` optionally terminated by a period."""
    p = _Parser(text)
    a = p.atom()
    if p.peek() == ("punct", "."):
        p.take()
    if not p.at_end():
        raise ParseError(f"trailing input after atom: {p.peek()[1]!r}")
    return a


def parse_rule(text: str):
    """Parse ``head :- b1, ..., bn.`` into (head, [body atoms])."""
    p = _Parser(text)
    head = p.atom()
    body = []
    if p.peek() is not None and p.peek()[0] == "neck":
        p.take()
        while True:
            body.append(p.atom())
            tok = p.peek()
            if tok == ("punct", ","):
                p.take()
                continue
            break
    if p.peek() == ("punct", "."):
        p.take()
    if not p.at_end():
        raise ParseError(f"trailing input after clause: {p.peek()[1]!r}")
    return head, body


def is_ground(t: Term) -> bool:
    if isinstance(t, Variable):
        return False
    if isinstance(t, tuple):
        return all(is_ground(x) for x in t)
    return True


def format_term(t: Term) -> str:
    if isinstance(t, tuple):
        return "[" + ",".join(format_term(x) for x in t) + "]"
    return str(t)
