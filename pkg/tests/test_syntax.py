import random

import pytest

from unicorr.generators import random_term
from unicorr.signature import builtin
from unicorr.syntax import (BOT, TOP, App, Conom, Hole, Inequality, Join, Meet, Nom, ParseError,
                            Quasi, StrictOrder, Var, free_symbols, is_pure, parse_inequality,
                            parse_order, parse_quasi, parse_term, positions, print_term, replace_at,
                            substitute, subterm_at, variables_in_order)

BIINT = builtin("biint")
MODAL = builtin("modal")


def test_parse_join_of_applications():
    t = parse_term(r"dia(box(p)) \/ q", BIINT)
    assert t == Join(App("dia", (App("box", (Var("p"),)),)), Var("q"))


def test_constants_and_symbols():
    assert parse_term("T") == TOP and parse_term("B") == BOT
    ineq = parse_inequality("j1 <= box(m1)", MODAL)
    assert ineq == Inequality(Nom("j1"), App("box", (Conom("m1"),)))


def test_meet_binds_tighter_and_associates_left():
    t = parse_term(r"p \/ q /\ r /\ s")
    assert t == Join(Var("p"), Meet(Meet(Var("q"), Var("r")), Var("s")))


def test_quasi_round_trip():
    text = r"dia(box_b1(j1)) <= m1 & j2 <= p => dia(j1) <= box(m1)"
    q = parse_quasi(text, MODAL)
    assert isinstance(q, Quasi) and len(q.antecedents) == 2
    assert str(q) == text
    assert q.nominals == ["j1", "j2"] and q.conominals == ["m1"]


@pytest.mark.parametrize("text", ["dia(p", "dia(p, q)", "foo(p)", "p <= ", "p q", "u", "dia(u)"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_term(text, MODAL) if "<=" not in text else parse_inequality(text, MODAL)


def test_holes_only_when_allowed():
    assert parse_term("dia(u)", MODAL, allow_holes=True) == App("dia", (Hole("u"),))


@pytest.mark.parametrize("name", ["modal", "tense", "binary", "biint", "boolean-tense"])
def test_print_parse_identity_on_random_terms(name):
    esig = builtin(name)
    rng = random.Random(7)
    for _ in range(10_000):
        t = random_term(esig, rng, depth=4, residuals=True)
        assert parse_term(print_term(t), esig) == t


def test_substitute_examples():
    assert substitute(Meet(Var("p"), Var("p")), {"p": TOP}) == Meet(TOP, TOP)
    t = App("dia", (Var("p"),))
    assert substitute(t, {"q": BOT}) == t


def test_substitute_is_simultaneous():
    t = parse_term(r"p /\ q")
    assert substitute(t, {"p": Var("q"), "q": Var("p")}) == parse_term(r"q /\ p")


def test_substitute_commutes_with_constructors():
    rng = random.Random(3)
    esig = builtin("binary")
    binding = {"p": parse_term("box(q)", esig), "q": TOP}
    for _ in range(300):
        t = random_term(esig, rng)
        s = substitute(t, binding)
        if isinstance(t, (Meet, Join)):
            assert s == type(t)(substitute(t.left, binding), substitute(t.right, binding))
        elif isinstance(t, App):
            assert s == App(t.op, tuple(substitute(a, binding) for a in t.args))


def test_free_symbols():
    s = free_symbols(parse_term(r"dia(box(p)) \/ q", MODAL))
    assert dict(s.props) == {"p": 1, "q": 1}
    s = free_symbols(parse_inequality("j1 <= p"))
    assert dict(s.nominals) == {"j1": 1}
    assert is_pure(parse_inequality("j1 <= box(m1)", MODAL))


def test_positions_and_replacement():
    t = parse_term(r"dia(p) /\ p", MODAL)
    assert positions(t, "p") == [(0, 0), (1,)]
    assert subterm_at(t, (0,)) == App("dia", (Var("p"),))
    assert replace_at(t, (0, 0), TOP) == parse_term(r"dia(T) /\ p", MODAL)
    assert variables_in_order(parse_inequality(r"q <= dia(p) \/ q", MODAL)) == ["q", "p"]


def test_strict_order():
    o = parse_order("a<b, b<c")
    assert o.less("a", "c") and o.is_strict
    assert o.topological(["c", "b", "a"]) == ["a", "b", "c"]
    assert not StrictOrder((), [("a", "b"), ("b", "a")]).is_strict
    with pytest.raises(ParseError):
        parse_order("a<a")
