import random

import pytest

from unicorr.adjoints import AdjointError, is_sc, is_so, is_ssc, is_sso, la, ra, x_sign
from unicorr.generators import random_definite_pia
from unicorr.gentree import polarity
from unicorr.signature import builtin
from unicorr.syntax import U, Conom, Nom, Var, parse_term, substitute

MODAL = builtin("modal")
BINARY = builtin("binary")


def term(text, esig=BINARY):
    return parse_term(text, esig, allow_holes=True)


@pytest.mark.parametrize("fn, source, expected", [
    (la, "x", "u"),
    (la, "box(x)", "box_b1(u)"),
    (la, "g(box(z), x)", "g_b2(box(z), u)"),
    (ra, "x", "u"),
    (ra, "dia(x)", "dia#1(u)"),
    (ra, "f(x, dia(z))", "f#1(u, dia(z))"),
])
def test_adjoint_examples(fn, source, expected):
    assert fn(term(source), "x", BINARY) == term(expected)


def test_nested_adjoint_switches_between_la_and_ra():
    # x sits in the d-coordinate of g, so the recursion continues with RA of the negative part
    out = la(term("box(g(dia(x), z))"), "x", BINARY)
    assert out == term("dia#1(g_b1(box_b1(u), z))")
    assert x_sign(term("box(g(dia(x), z))"), "x", BINARY) == "-"


@pytest.mark.parametrize("fn, source", [
    (la, r"box(x) /\ z"),
    (la, "dia(x)"),
    (ra, "box(x)"),
    (la, "g(x, x)"),
    (la, "box(z)"),
])
def test_rejects_non_definite_or_bad_multiplicity(fn, source):
    with pytest.raises(AdjointError):
        fn(term(source), "x", BINARY)


def test_closed_open_grammar():
    j, m = Nom("j1"), Conom("m1")
    assert is_sc(j, BINARY) and is_so(m, BINARY)
    assert not is_sc(m, BINARY) and not is_so(j, BINARY)
    assert is_sc(term("g(m1, j1)"), BINARY)
    assert is_ssc(term("box_b1(j1)"), BINARY)
    assert is_sc(term("box(j1)"), BINARY) and not is_ssc(term("box(j1)"), BINARY)
    assert is_ssc(Var("p"), BINARY) and is_sso(Var("p"), BINARY)


def _pia_corpus(esig, sign, seed, count=200):
    rng = random.Random(seed)
    return [random_definite_pia(esig, rng, sign, "x", ("z1", "z2"), depth=4) for _ in range(count)]


@pytest.mark.parametrize("name", ["modal", "tense", "binary", "biint"])
def test_definite_pia_is_sso_or_ssc(name):
    esig = builtin(name)
    assert all(is_sso(a, esig) for a in _pia_corpus(esig, "+", 1))
    assert all(is_ssc(b, esig) for b in _pia_corpus(esig, "-", 2))


@pytest.mark.parametrize("name", ["modal", "tense", "binary", "biint"])
def test_adjoints_have_the_expected_shape(name):
    esig = builtin(name)
    for alpha in _pia_corpus(esig, "+", 3):
        s = substitute(la(alpha, "x", esig), {U: Nom("j1")})
        assert (is_ssc if x_sign(alpha, "x", esig) == "+" else is_sso)(s, esig)
    for beta in _pia_corpus(esig, "-", 4):
        s = substitute(ra(beta, "x", esig), {U: Conom("m1")})
        assert (is_sso if x_sign(beta, "x", esig) == "+" else is_ssc)(s, esig)


@pytest.mark.parametrize("name", ["tense", "binary", "biint"])
def test_composition_of_closed_and_open_terms(name):
    esig = builtin(name)
    rng = random.Random(8)
    done = 0
    for alpha in _pia_corpus(esig, "+", 5, 400):
        pol = polarity(alpha, esig, "+")
        if any(len(s) != 1 for s in pol.values()):
            continue
        binding = {}
        for v, signs in pol.items():
            # the sso term alpha is positive in its sso slots and negative in its ssc slots
            sign = "+" if "+" in signs else "-"
            binding[v] = random_definite_pia(esig, rng, sign, "x", ("z1",), depth=2, with_x=False)
        composed = substitute(alpha, binding)
        assert is_sso(composed, esig)
        done += 1
    assert done > 50
