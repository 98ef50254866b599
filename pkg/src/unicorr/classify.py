"""Inductive / Sahlqvist / analytic classification and the (eps, Omega) search."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .gentree import (NodeClass, analyse_branch, inequality_trees, is_critical,
                      is_skeleton_node)
from .signature import DUAL, ONE
from .syntax import Hole, Inequality, StrictOrder, Var, replace_at, variables_in_order

VERDICTS = ("analytic-sahlqvist", "analytic-inductive", "sahlqvist", "inductive", "none")
RANK = {v: i for i, v in enumerate(reversed(VERDICTS))}


class BudgetExceeded(RuntimeError):
    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


@dataclass
class Certificate:
    verdict: str
    variables: tuple
    epsilon: dict
    omega: StrictOrder
    witness: dict | None = None

    @property
    def accepted(self):
        return self.verdict != "none"

    def eps_string(self):
        return "(" + ",".join(self.epsilon.get(v, ONE) for v in self.variables) + ")"

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "variables": list(self.variables),
            "epsilon": [self.epsilon.get(v, ONE) for v in self.variables],
            "omega": sorted([a, b] for a, b in self.omega.pairs),
            "witness": self.witness,
        }

    def __str__(self):
        s = f"{self.verdict}, eps={self.eps_string()}"
        if self.omega.pairs:
            s += f", omega={self.omega}"
        return s


def normalize_eps(eps, variables):
    if eps is None:
        return {v: ONE for v in variables}
    if isinstance(eps, (tuple, list)):
        if len(eps) != len(variables):
            raise ValueError(f"epsilon has {len(eps)} entries for {len(variables)} variables")
        eps = dict(zip(variables, eps))
    out = {v: ONE for v in variables}
    for k, v in eps.items():
        if v in ("∂", "D", "-1"):
            v = DUAL
        if v not in (ONE, DUAL):
            raise ValueError(f"bad order-type entry {v!r}")
        out[k] = v
    return out


@dataclass
class Analysis:
    """Everything the classification clauses need for one order-type."""

    branches: list
    critical_ok: bool
    excellent: bool
    analytic: bool
    clause2_ok: bool
    required: set
    witness: dict | None = field(default=None)


def _leaf_vars(node):
    return [n.term.name for n in node.nodes() if not n.children and isinstance(n.term, Var)]


def analyse(ineq, esig, eps, mode=None):
    trees = inequality_trees(ineq, esig, mode)
    reports, required = [], set()
    critical_ok = excellent = analytic = clause2_ok = True
    witness = None

    def fail(kind, rep, detail):
        nonlocal witness
        if witness is None:
            witness = {"clause": kind, "leaf": rep.leaf, "sign": rep.sign,
                       "path": list(rep.path), "detail": detail}

    for t in trees:
        for leaf in t.leaves():
            rep = analyse_branch(leaf, eps)
            reports.append(rep)
            if not rep.good:
                analytic = False
            if not rep.critical:
                continue
            crit = leaf.term.name
            if not rep.good:
                critical_ok = False
                fail("good", rep, rep.witness)
                continue
            if not rep.excellent:
                excellent = False
            below = leaf
            for node in rep.pia_nodes:
                if NodeClass.SRR in node.classes:
                    for sib in node.children:
                        if sib is below:
                            continue
                        for n in sib.nodes():
                            if n.children:
                                continue
                            if is_critical(n, eps):
                                clause2_ok = False
                                fail("srr-sibling-agrees", rep,
                                     f"{n.sign}{n.term} under {node.sign}{node.label()} is critical")
                            elif isinstance(n.term, Var):
                                required.add((n.term.name, crit))
                below = node
    if any(a == b for a, b in required):
        clause2_ok = False
        witness = witness or {"clause": "omega", "detail": "variable must precede itself"}
    return Analysis(reports, critical_ok, excellent, analytic, clause2_ok, required, witness)


def _acyclic(pairs):
    return StrictOrder((), pairs).is_strict


def _verdict(a, omega_ok):
    inductive = a.critical_ok and a.clause2_ok and omega_ok
    sahl = a.critical_ok and a.excellent
    if a.analytic and sahl:
        return "analytic-sahlqvist"
    if a.analytic and inductive:
        return "analytic-inductive"
    if sahl:
        return "sahlqvist"
    if inductive:
        return "inductive"
    return "none"


def _vars(ineq):
    return tuple(variables_in_order(ineq))


def _witness(a, omega_ok, analytic_needed=False):
    if a.witness:
        return a.witness
    if not omega_ok:
        return {"clause": "omega", "detail": "required dependencies not contained in omega"}
    if analytic_needed and not a.analytic:
        bad = next(r for r in a.branches if not r.good)
        return {"clause": "analytic", "leaf": bad.leaf, "sign": bad.sign, "path": list(bad.path),
                "detail": bad.witness}
    return {"clause": "excellent", "detail": "some critical branch passes through an SRR node"}


def is_inductive(ineq, eps, omega, esig, mode=None):
    vs = _vars(ineq)
    eps = normalize_eps(eps, vs)
    omega = omega if isinstance(omega, StrictOrder) else StrictOrder(vs, omega or ())
    a = analyse(ineq, esig, eps, mode)
    omega_ok = omega.is_strict and a.required <= omega.pairs
    ok = a.critical_ok and a.clause2_ok and omega_ok
    return Certificate("inductive" if ok else "none", vs, eps, omega,
                       None if ok else _witness(a, omega_ok))


def is_sahlqvist(ineq, eps, esig, mode=None):
    vs = _vars(ineq)
    eps = normalize_eps(eps, vs)
    a = analyse(ineq, esig, eps, mode)
    ok = a.critical_ok and a.excellent
    return Certificate("sahlqvist" if ok else "none", vs, eps, StrictOrder(vs),
                       None if ok else _witness(a, True))


def is_analytic(ineq, eps, omega, esig, mode=None):
    """Analytic check: inductive (or Sahlqvist) plus goodness of every branch."""
    vs = _vars(ineq)
    eps = normalize_eps(eps, vs)
    omega = omega if isinstance(omega, StrictOrder) else StrictOrder(vs, omega or ())
    a = analyse(ineq, esig, eps, mode)
    omega_ok = omega.is_strict and a.required <= omega.pairs
    v = _verdict(a, omega_ok)
    if not v.startswith("analytic"):
        return Certificate("none", vs, eps, omega, _witness(a, omega_ok, True))
    return Certificate(v, vs, eps, omega)


def search_classification(ineq, esig, mode=None, max_vars=12):
    """Strongest class over all order-types; ties go to the lexicographically least eps (1 < d).

    Omega is the least strict order containing the dependencies the SRR
    clause imposes, so no search over orders is needed.
    """
    vs = _vars(ineq)
    if len(vs) > max_vars:
        raise BudgetExceeded(f"{len(vs)} variables exceeds the search bound {max_vars}")
    best = None
    first_fail = None
    for combo in itertools.product((ONE, DUAL), repeat=len(vs)):
        eps = dict(zip(vs, combo))
        a = analyse(ineq, esig, eps, mode)
        omega_ok = _acyclic(a.required)
        v = _verdict(a, omega_ok)
        if first_fail is None:
            first_fail = (eps, a, omega_ok)
        if best is None or RANK[v] > RANK[best[0]]:
            omega = StrictOrder(vs, a.required if v in ("analytic-inductive", "inductive") else ())
            best = (v, eps, omega)
            if v == VERDICTS[0]:
                break
    v, eps, omega = best
    if v == "none":
        eps, a, omega_ok = first_fail
        return Certificate("none", vs, eps, StrictOrder(vs), _witness(a, omega_ok, False))
    return Certificate(v, vs, eps, omega)


@dataclass
class Part:
    hole: str
    sign: str
    term: object
    path: tuple


@dataclass
class AnalyticDecomposition:
    skeleton: Inequality
    alpha: list
    beta: list
    gamma: list
    delta: list

    def parts(self):
        return self.alpha + self.beta + self.gamma + self.delta

    def reassemble(self):
        from .syntax import substitute
        return substitute(self.skeleton, {Hole(p.hole): p.term for p in self.parts()})

    def __str__(self):
        lines = [f"skeleton: {self.skeleton}"]
        for label, group in (("alpha", self.alpha), ("beta", self.beta),
                             ("gamma", self.gamma), ("delta", self.delta)):
            for p in group:
                lines.append(f"{label} {p.hole}: {p.term}")
        return "\n".join(lines)


def maximal_pia_parts(tree):
    """Subtrees hanging off the skeleton: non-skeleton children of skeleton nodes, or the root."""
    if not is_skeleton_node(tree):
        return [tree]
    out = []
    for c in tree.children:
        out.extend(maximal_pia_parts(c))
    return out


def decompose_analytic(ineq, eps, esig, mode=None):
    """Split into a skeleton with holes and its maximal PIA parts.

    Parts containing a critical occurrence become alpha (positive) or beta
    (negative); the rest become gamma or delta.  Holes are named x, y, z, w
    for alpha, beta, gamma, delta, numbered left to right.
    """
    vs = _vars(ineq)
    eps = normalize_eps(eps, vs)
    trees = inequality_trees(ineq, esig, mode)
    groups = {"alpha": [], "beta": [], "gamma": [], "delta": []}
    letters = {"alpha": "x", "beta": "y", "gamma": "z", "delta": "w"}
    sides = [ineq.lhs, ineq.rhs]
    for side, tree in enumerate(trees):
        for node in maximal_pia_parts(tree):
            crit = any(is_critical(n, eps) for n in node.nodes() if not n.children)
            if node.sign == "+":
                key = "alpha" if crit else "gamma"
            else:
                key = "beta" if crit else "delta"
            name = f"{letters[key]}{len(groups[key]) + 1}"
            groups[key].append(Part(name, node.sign, node.term, node.path))
    for side, tree in enumerate(trees):
        parts = [p for g in groups.values() for p in g if p.path[0] == tree.path[0]]
        for p in parts:
            sides[side] = replace_at(sides[side], p.path[1:], Hole(p.hole))
    return AnalyticDecomposition(Inequality(*sides), groups["alpha"], groups["beta"],
                                 groups["gamma"], groups["delta"])
