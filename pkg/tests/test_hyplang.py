import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lff.hyplang import (BODY, HEAD, Bias, Clause, Hypothesis, InvalidBias, Literal,
                         MalformedEncoding, MetaAtom, PredSig, canonical_clause, canonical_form,
                         conforms, cost, decode_hypothesis, encode_hypothesis, parse_hypothesis)
from lff.synthesis import REFERENCE_SOLUTIONS, reference_solution, synthesis_bias

LAST = PredSig("last", 2)
HEAD_P = PredSig("head", 2)
TAIL = PredSig("tail", 2)
P, Q, R = PredSig("p", 1), PredSig("q", 1), PredSig("r", 1)


def test_encode_last_clause():
    h = parse_hypothesis("last(A,B) :- tail(A,C), head(C,B).")
    assert encode_hypothesis(h) == {
        MetaAtom(HEAD, 0, LAST, (0, 1)),
        MetaAtom(BODY, 0, TAIL, (0, 2)),
        MetaAtom(BODY, 0, HEAD_P, (2, 1)),
    }


def test_encode_empty():
    assert encode_hypothesis(Hypothesis()) == frozenset()


def test_encode_two_clauses_in_canonical_order():
    h = parse_hypothesis("p(A) :- r(A). p(A) :- q(A).")
    assert encode_hypothesis(h) == {
        MetaAtom(HEAD, 0, P, (0,)), MetaAtom(BODY, 0, Q, (0,)),
        MetaAtom(HEAD, 1, P, (0,)), MetaAtom(BODY, 1, R, (0,)),
    }


def test_decode_recursive_clause():
    atoms = {MetaAtom(HEAD, 0, LAST, (0, 1)), MetaAtom(BODY, 0, LAST, (1, 0))}
    h = decode_hypothesis(atoms)
    assert h == Hypothesis((Clause(Literal(LAST, (0, 1)), (Literal(LAST, (1, 0)),)),))
    assert str(h) == "last(A,B) :- last(B,A)."


@pytest.mark.parametrize("atoms", [
    {MetaAtom(BODY, 0, Q, (0,))},
    {MetaAtom(HEAD, 0, P, (0, 1))},
    {MetaAtom(HEAD, 0, P, (0,)), MetaAtom(HEAD, 0, P, (1,))},
    {MetaAtom(HEAD, 1, P, (0,)), MetaAtom(BODY, 1, Q, (0,))},
    {MetaAtom("neck", 0, P, (0,))},
])
def test_decode_malformed(atoms):
    with pytest.raises(MalformedEncoding):
        decode_hypothesis(atoms)


def test_canonical_renames_and_orders_body():
    c = canonical_form(parse_hypothesis("last(X,Y) :- head(Z,Y), tail(X,Z)."))
    expected = Clause(Literal(LAST, (0, 1)),
                      tuple(sorted([Literal(TAIL, (0, 2)), Literal(HEAD_P, (2, 1))])))
    assert c == Hypothesis((expected,))
    # body literals are ordered by (name, args)
    assert [l.pred.name for l in c.clauses[0].body] == ["head", "tail"]


def test_canonical_idempotent_and_order_invariant():
    a = parse_hypothesis("p(A) :- q(A). p(A) :- r(A).")
    b = parse_hypothesis("p(A) :- r(A). p(A) :- q(A).")
    assert a == b
    assert canonical_form(a) == a


def test_cost():
    assert cost(Hypothesis()) == 0
    assert cost(parse_hypothesis("p(A) :- q(A).")) == 2
    assert cost(reference_solution("filter")) == 14


def test_reference_solutions_conform():
    for name in REFERENCE_SOLUTIONS:
        assert conforms(reference_solution(name), synthesis_bias(name)), name


def test_bias_validation():
    with pytest.raises(InvalidBias):
        Bias(P, (Q,), max_clauses=0)
    with pytest.raises(InvalidBias):
        Bias(P, (Q,), max_vars=0)


def test_conforms_rejects_bad_hypotheses():
    bias = Bias(P, (Q, R), max_clauses=2, max_body=2, max_vars=2, allow_recursion=True)
    assert conforms(parse_hypothesis("p(A) :- q(A)."), bias)
    assert not conforms(parse_hypothesis("p(A) :- q(B)."), bias)           # head var unused
    assert not conforms(parse_hypothesis("p(A) :- p(A)."), bias)           # body equals head
    assert not conforms(Hypothesis((Clause(Literal(P, (0,)), (Literal(Q, (1,)), Literal(Q, (0,)))),)),
                        bias)                                              # disconnected
    assert not conforms(parse_hypothesis("p(A) :- q(A), q(B), r(B)."), bias)  # body too long


# property tests over random clauses

PREDS = [PredSig("q", 1), PredSig("r", 2), PredSig("s", 2)]


@st.composite
def clauses(draw, nvars=4, max_body=4):
    head = Literal(PredSig("p", 2), (0, 1))
    n = draw(st.integers(1, max_body))
    body = []
    for _ in range(n):
        pred = draw(st.sampled_from(PREDS))
        args = tuple(draw(st.integers(0, nvars - 1)) for _ in range(pred.arity))
        body.append(Literal(pred, args))
    return Clause(head, tuple(body))


def _rename(c: Clause, perm) -> Clause:
    m = dict(enumerate(perm))
    return Clause(Literal(c.head.pred, tuple(m[v] for v in c.head.args)),
                  tuple(Literal(l.pred, tuple(m[v] for v in l.args)) for l in c.body))


@settings(max_examples=200, deadline=None)
@given(clauses(), st.randoms())
def test_canonical_invariant_under_renaming(c, rnd):
    # swap non-head variables and shuffle the body
    others = [2, 3]
    rnd.shuffle(others)
    r = _rename(c, (0, 1, *others))
    body = list(r.body)
    rnd.shuffle(body)
    assert canonical_clause(Clause(r.head, tuple(body))) == canonical_clause(c)


@settings(max_examples=200, deadline=None)
@given(st.lists(clauses(), min_size=1, max_size=3))
def test_encode_decode_round_trip(cs):
    h = canonical_form(cs)
    assert decode_hypothesis(encode_hypothesis(h)) == h
    assert canonical_form(h) == h


def test_canonical_brute_force_minimum():
    # the canonical body is the least sorted body over every bijection of the
    # non-head variables onto the numbers after the head's
    rng = random.Random(3)
    for _ in range(300):
        head = Literal(PredSig("p", 1), (0,))
        body = tuple(Literal(p, tuple(rng.randrange(4) for _ in range(p.arity)))
                     for p in rng.sample(PREDS, rng.randint(1, 3)))
        c = Clause(head, body)
        others = sorted({v for l in body for v in l.args} - {0})
        best = None
        for perm in itertools.permutations(range(1, 1 + len(others))):
            m = {0: 0, **dict(zip(others, perm))}
            cand = tuple(sorted({Literal(l.pred, tuple(m[v] for v in l.args)) for l in body}))
            best = cand if best is None or cand < best else best
        assert canonical_clause(c) == Clause(head, best)
