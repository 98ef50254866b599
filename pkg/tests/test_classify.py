import random

import pytest

from unicorr.classify import (decompose_analytic, is_analytic, is_inductive, is_sahlqvist,
                              search_classification)
from unicorr.generators import analytic_inductive_corpus, random_term
from unicorr.gentree import build_signed_tree, is_critical
from unicorr.signature import builtin
from unicorr.syntax import Inequality, StrictOrder, parse_inequality

BIINT = builtin("biint")
MODAL = builtin("modal")
GENIMP = builtin("genimp")
BIINT_EXAMPLE = r"dia(box(p)) \/ q <= dia(box(q)) /\ rtail(dia(r), p)"


def ineq(text, esig):
    return parse_inequality(text, esig)


def test_biint_example_is_sahlqvist_but_not_analytic():
    i = ineq(BIINT_EXAMPLE, BIINT)
    eps = ("1", "1", "d")
    assert is_inductive(i, eps, (), BIINT).accepted
    assert is_sahlqvist(i, eps, BIINT).accepted
    cert = is_analytic(i, eps, (), BIINT)
    assert cert.verdict == "none"
    assert cert.witness["clause"] == "analytic"
    best = search_classification(i, BIINT)
    assert (best.verdict, best.eps_string()) == ("sahlqvist", "(1,1,d)")


def test_generalized_implication_axioms():
    trans = ineq(r"g(a, b) /\ g(b, c) <= g(a, c)", GENIMP)
    cert = search_classification(trans, GENIMP)
    assert cert.verdict == "analytic-inductive"
    assert not is_sahlqvist(trans, cert.epsilon, GENIMP).accepted
    assert is_analytic(trans, cert.epsilon, cert.omega, GENIMP).verdict == "analytic-inductive"
    refl = search_classification(ineq("T <= g(a, a)", GENIMP), GENIMP)
    assert refl.verdict == "analytic-sahlqvist"


def test_inductive_needs_the_omega_dependencies():
    trans = ineq(r"g(a, b) /\ g(b, c) <= g(a, c)", GENIMP)
    eps = ("1", "1", "1")
    assert not is_inductive(trans, eps, (), GENIMP).accepted
    assert is_inductive(trans, eps, [("a", "b"), ("b", "c")], GENIMP).accepted


def test_trivial_cases():
    assert is_inductive(ineq("p <= p", MODAL), ("1",), (), MODAL).accepted
    assert is_analytic(ineq("T <= T", MODAL), (), (), MODAL).verdict == "analytic-sahlqvist"
    assert is_sahlqvist(ineq("dia(p) <= p", MODAL), ("d",), MODAL).accepted
    assert search_classification(ineq("dia(box(p)) <= box(dia(p))", MODAL), MODAL).verdict == "analytic-sahlqvist"
    for eps in (("1",), ("d",)):
        assert is_analytic(ineq("B <= p", MODAL), eps, (), MODAL).accepted


def test_search_picks_least_eps():
    cert = search_classification(ineq("dia(p) <= box(p)", MODAL), MODAL)
    assert str(cert) == "analytic-sahlqvist, eps=(1)"


def test_mckinsey_is_rejected():
    cert = search_classification(ineq("box(dia(p)) <= dia(box(p))", MODAL), MODAL)
    assert cert.verdict == "none" and cert.witness["clause"] == "good"


@pytest.mark.parametrize("text, esig, eps, expected", [
    ("dia(box(p)) <= box(dia(p))", MODAL, {"p": "1"},
     ["skeleton: dia(x1) <= box(w1)", "alpha x1: box(p)", "delta w1: dia(p)"]),
    ("dia(p) <= box(p)", MODAL, {"p": "1"},
     ["skeleton: dia(x1) <= box(w1)", "alpha x1: p", "delta w1: p"]),
    ("T <= g(a, a)", GENIMP, {"a": "1"},
     ["skeleton: z1 <= g(x1, w1)", "alpha x1: a", "gamma z1: T", "delta w1: a"]),
])
def test_decompositions(text, esig, eps, expected):
    i = ineq(text, esig)
    dec = decompose_analytic(i, eps, esig)
    assert str(dec).splitlines() == expected
    assert dec.reassemble() == i


SIGS = ["modal", "tense", "binary", "biint"]


@pytest.mark.parametrize("name", SIGS)
def test_hierarchy_on_random_inequalities(name):
    esig = builtin(name)
    dist = esig.with_mode("distributive")
    rng = random.Random(2024)
    seen = 0
    for _ in range(1000):
        i = Inequality(random_term(esig, rng, depth=3), random_term(esig, rng, depth=3))
        cert = search_classification(i, esig)
        if not cert.accepted:
            continue
        seen += 1
        eps, omega = cert.epsilon, cert.omega
        assert is_inductive(i, eps, omega, esig).accepted
        if cert.verdict in ("analytic-sahlqvist", "sahlqvist"):
            assert is_sahlqvist(i, eps, esig).accepted
            assert is_inductive(i, eps, StrictOrder(omega.domain), esig).accepted
        if cert.verdict.startswith("analytic"):
            assert is_analytic(i, eps, omega, esig).verdict == cert.verdict
            dec = decompose_analytic(i, eps, esig)
            assert dec.reassemble() == i
            assert is_analytic(i, eps, omega, dist).accepted
        assert is_inductive(i, eps, omega, dist).accepted
    assert seen > 100


def test_decomposition_groups():
    esig = builtin("binary")
    for i in analytic_inductive_corpus(esig, 1, 40):
        cert = search_classification(i, esig)
        dec = decompose_analytic(i, cert.epsilon, esig)
        for group, crit in ((dec.alpha, True), (dec.beta, True), (dec.gamma, False), (dec.delta, False)):
            for p in group:
                leaves = build_signed_tree(p.term, p.sign, esig).leaves()
                assert any(is_critical(l, cert.epsilon) for l in leaves) == crit

