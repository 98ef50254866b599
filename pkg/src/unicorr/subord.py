"""Subordination algebras, tense slanted Boolean algebras, s-Sahlqvist formulas and generalized implications."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import FiniteLattice, PerfectLE, is_valid, random_operator
from .classify import is_analytic
from .signature import Connective, Signature, expand_signature, parse_signature, BUILTIN
from .syntax import (App, Bot, Inequality, Join, Meet, TOP, Top, Var, children, rebuild,
                     variables_in_order)

TENSE = expand_signature(parse_signature(BUILTIN["boolean-tense"]))
FORMULAS = expand_signature(parse_signature(BUILTIN["boolean-tense"] + "G: imp/2:(d,1)\n"))
DIA, DIAB, BOX, BOXB, NEG, IMP = "dia", "diab", "box", "boxb", "neg", "imp"


class SubordinationAlgebra:
    """A finite Boolean algebra 2^k (elements are bitmasks) with a binary relation."""

    def __init__(self, k, rel):
        self.k = k
        self.B = FiniteLattice.boolean(k)
        self.rel = np.array(rel, dtype=bool)
        if self.rel.shape != (self.B.n, self.B.n):
            raise ValueError("relation has the wrong shape")

    @classmethod
    def from_pairs(cls, k, pairs):
        n = 1 << k
        rel = np.zeros((n, n), dtype=bool)
        for a, b in pairs:
            rel[a, b] = True
        return cls(k, rel)

    def pairs(self):
        return [(int(a), int(b)) for a, b in np.argwhere(self.rel)]

    def __eq__(self, other):
        return isinstance(other, SubordinationAlgebra) and self.k == other.k and (self.rel == other.rel).all()

    def dumps(self):
        lines = [f"atoms: {self.k}"] + [f"rel: {a} {b}" for a, b in self.pairs()]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text):
        k, pairs = None, []
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, val = line.partition(":")
            if key.strip() == "atoms":
                k = int(val)
            elif key.strip() == "rel":
                a, b = val.split()
                pairs.append((int(a), int(b)))
            else:
                raise ValueError(f"unexpected line {raw!r}")
        if k is None:
            raise ValueError("missing 'atoms:' line")
        return cls.from_pairs(k, pairs)


def check_subordination(S):
    """Failed axioms with a witness each; empty when S is a subordination.

    S1: 0<0 and 1<1.  S2: a<c and b<c give a|b<c.  S3: a<b and a<c give a<b&c.
    S4: a<=b<c<=d gives a<d.
    """
    B, R = S.B, S.rel
    fails = []
    if not (R[B.bot, B.bot] and R[B.top, B.top]):
        fails.append(("S1", None))
    for c in range(B.n):
        lows = np.flatnonzero(R[:, c])
        for a in lows:
            for b in lows:
                if not R[B.join[a, b], c]:
                    fails.append(("S2", (int(a), int(b), c)))
                    break
            else:
                continue
            break
    for a in range(B.n):
        ups = np.flatnonzero(R[a])
        for b in ups:
            for c in ups:
                if not R[a, B.meet[b, c]]:
                    fails.append(("S3", (a, int(b), int(c))))
                    break
            else:
                continue
            break
    weak = (B.leq.astype(int) @ R.astype(int) @ B.leq.astype(int)) > 0
    if (weak & ~R).any():
        a, d = np.argwhere(weak & ~R)[0]
        fails.append(("S4", (int(a), int(d))))
    return fails


def subordination_closure(k, pairs):
    """Least subordination on 2^k containing ``pairs``."""
    B = FiniteLattice.boolean(k)
    R = np.zeros((B.n, B.n), dtype=bool)
    for a, b in pairs:
        R[a, b] = True
    R[B.bot, B.bot] = R[B.top, B.top] = True
    leq = B.leq.astype(int)
    while True:
        old = R.copy()
        R = (leq @ R.astype(int) @ leq) > 0
        for c in range(B.n):
            lows = np.flatnonzero(R[:, c])
            R[B.join[np.ix_(lows, lows)].ravel(), c] = True
        for a in range(B.n):
            ups = np.flatnonzero(R[a])
            R[a, B.meet[np.ix_(ups, ups)].ravel()] = True
        if (R == old).all():
            return SubordinationAlgebra(k, R)


@dataclass
class TenseSlantedBAE:
    """A Boolean algebra 2^k with a diamond and a backward box, given by tables."""

    k: int
    dia: np.ndarray
    boxb: np.ndarray

    @property
    def B(self):
        return FiniteLattice.boolean(self.k)

    def is_adjoint(self):
        B = self.B
        a, b = np.meshgrid(np.arange(B.n), np.arange(B.n), indexing="ij")
        return bool((B.leq[self.dia[a], b] == B.leq[a, self.boxb[b]]).all())

    def algebra(self):
        """Perfect tense BAE with the derived box and backward diamond."""
        B = self.B
        neg = B.complement
        tables = {DIA: self.dia, BOXB: self.boxb, BOX: neg[self.dia[neg]], DIAB: neg[self.boxb[neg]]}
        return PerfectLE(B, TENSE, tables, f"tense-B{self.k}")

    @classmethod
    def random(cls, k, rng):
        """Diamond from a random relation on atoms; the backward box is its right adjoint."""
        B = FiniteLattice.boolean(k)
        dia = random_operator(B, ("1",), rng)
        boxb = np.array([B.join_all(a for a in range(B.n) if B.leq[dia[a], b]) for b in range(B.n)])
        return cls(k, dia, boxb)


def to_slanted(S):
    """dia a = meet of the b with a < b; boxb a = join of the b with b < a."""
    B = S.B
    dia = np.array([B.meet_all(np.flatnonzero(S.rel[a])) for a in range(B.n)])
    boxb = np.array([B.join_all(np.flatnonzero(S.rel[:, a])) for a in range(B.n)])
    return TenseSlantedBAE(S.k, dia, boxb)


def from_slanted(T):
    """a < b exactly when dia a <= b."""
    B = T.B
    return SubordinationAlgebra(T.k, B.leq[T.dia][:, :])


def delta_relation(S):
    """Extension of the relation to the (finite) canonical extension: u < v iff u <= a < b <= v for some a, b."""
    leq = S.B.leq.astype(int)
    return (leq @ S.rel.astype(int) @ leq) > 0


def perfect_tables(S):
    """dia and boxb of the perfect algebra associated with the extended relation."""
    return to_slanted(SubordinationAlgebra(S.k, delta_relation(S)))


def desugar(t):
    """Rewrite imp(a, b) as neg(a) \\/ b."""
    t = rebuild(t, [desugar(c) for c in children(t)])
    if isinstance(t, App) and t.op == IMP:
        return Join(App(NEG, (t.args[0],)), t.args[1])
    return t


def as_inequality(formula):
    if isinstance(formula, Inequality):
        return Inequality(desugar(formula.lhs), desugar(formula.rhs))
    return Inequality(TOP, desugar(formula))


def validity_on_subordination(S, formula):
    """Validity of a formula (as T <= formula) or an inequality on the tense algebra of S."""
    alg = to_slanted(S).algebra()
    return is_valid(as_inequality(formula), alg)


# s-Sahlqvist formulas

def _unary(t, ops):
    return isinstance(t, App) and t.op in ops and len(t.args) == 1


def _negvar(t):
    return _unary(t, (NEG,)) and isinstance(t.args[0], Var)


def _base(t, negated):
    return isinstance(t, (Top, Bot)) or (isinstance(t, Var) if not negated else _negvar(t))


def _built(t, leaf, ops):
    if leaf(t):
        return True
    if isinstance(t, (Meet, Join)):
        return _built(t.left, leaf, ops) and _built(t.right, leaf, ops)
    return _unary(t, ops) and _built(t.args[0], leaf, ops)


def is_closed(t):
    return _built(t, lambda x: _base(x, False) or _negvar(x), (DIA, DIAB))


def is_open(t):
    return _built(t, lambda x: _base(x, False) or _negvar(x), (BOX, BOXB))


def is_positive(t):
    return _built(t, lambda x: _base(x, False), (DIA, BOX, DIAB, BOXB))


def is_negative(t):
    return _built(t, lambda x: _base(x, True), (DIA, BOX, DIAB, BOXB))


def is_subpositive(t):
    if is_closed(t) and is_positive(t):
        return True
    if isinstance(t, (Meet, Join)):
        return is_subpositive(t.left) and is_subpositive(t.right)
    return _unary(t, (BOX, BOXB)) and is_subpositive(t.args[0])


def is_subnegative(t):
    if is_open(t) and is_negative(t):
        return True
    if isinstance(t, (Meet, Join)):
        return is_subnegative(t.left) and is_subnegative(t.right)
    return _unary(t, (DIA, DIAB)) and is_subnegative(t.args[0])


def is_boxed_atom(t):
    while _unary(t, (BOX, BOXB)):
        t = t.args[0]
    return isinstance(t, Var)


def is_strongly_positive(t):
    if isinstance(t, Meet):
        return is_strongly_positive(t.left) and is_strongly_positive(t.right)
    return is_boxed_atom(t)


def is_untied(t):
    if is_strongly_positive(t) or is_subnegative(t):
        return True
    if isinstance(t, Meet):
        return is_untied(t.left) and is_untied(t.right)
    return _unary(t, (DIA, DIAB)) and is_untied(t.args[0])


def is_s_sahlqvist(t):
    """Derivation dict if ``t`` is a box/backward-box prefix over imp(untied, sub-positive), else None."""
    prefix = []
    while _unary(t, (BOX, BOXB)):
        prefix.append(t.op)
        t = t.args[0]
    if not (isinstance(t, App) and t.op == IMP):
        return None
    ante, cons = t.args
    if not is_untied(ante) or not is_subpositive(cons):
        return None
    return {"boxed-prefix": prefix, "untied": str(ante), "sub-positive": str(cons)}


def bridge(t):
    """Classify T <= desugared t in distributive mode with eps constantly 1."""
    ineq = as_inequality(t)
    eps = {v: "1" for v in variables_in_order(ineq)}
    cert = is_analytic(ineq, eps, (), TENSE, "distributive")
    return cert


# generalized implication lattices

@dataclass
class GenImplLattice:
    """A finite distributive lattice with an ideal-valued implication, stored as bitmask sets."""

    L: FiniteLattice
    imp: np.ndarray  # imp[a, b] is an int bitmask of the ideal a => b

    @classmethod
    def random(cls, L, rng, density=0.3):
        """Strict implication of a random transitive relation R on the join-irreducibles.

        j is below a => b when every R-successor of j under a is under b.  R is
        closed so that j' <= j gives R[j'] within R[j], which keeps each a => b
        a principal ideal; transitivity and reflexivity then give the axioms.
        """
        J = L.join_irreducibles
        k = len(J)
        below = np.array([[bool(L.leq[x, y]) for y in J] for x in J])
        R = rng.random((k, k)) < density
        while True:
            old = R
            R = R | ((below.T.astype(int) @ R.astype(int)) > 0)
            R = R | ((R.astype(int) @ R.astype(int)) > 0)
            if (R == old).all():
                break
        g = np.empty((L.n, L.n), dtype=np.int64)
        for a in range(L.n):
            for b in range(L.n):
                ok = [J[x] for x in range(k)
                      if all(not L.leq[J[y], a] or L.leq[J[y], b] for y in range(k) if R[x, y])]
                g[a, b] = L.join_all(ok)
        return genimp_from_slanted(L, g)

    def ideal(self, a, b):
        return [x for x in range(self.L.n) if (int(self.imp[a, b]) >> x) & 1]

    def check(self):
        """Failed conditions; the second is read as (a=>c) & (b=>c) = (a|b) => c."""
        L, I = self.L, self.imp
        full = (1 << L.n) - 1
        fails = []
        for a in range(L.n):
            if int(I[a, a]) != full:
                fails.append(("reflexive", (a,)))
            for b in range(L.n):
                ideal = self.ideal(a, b)
                if not _is_ideal(L, ideal):
                    fails.append(("ideal", (a, b)))
                for c in range(L.n):
                    if int(I[a, b]) & int(I[a, c]) != int(I[a, L.meet[b, c]]):
                        fails.append(("meet", (a, b, c)))
                    if int(I[a, c]) & int(I[b, c]) != int(I[L.join[a, b], c]):
                        fails.append(("join", (a, b, c)))
                    if int(I[a, b]) & int(I[b, c]) & ~int(I[a, c]):
                        fails.append(("transitive", (a, b, c)))
        return fails


def _is_ideal(L, elems):
    s = set(elems)
    if not s:
        return False
    return all(int(L.join[a, b]) in s for a in s for b in s) and \
        all(x in s for a in s for x in range(L.n) if L.leq[x, a])


def _down(L, c):
    return sum(1 << x for x in range(L.n) if L.leq[x, c])


def genimp_to_slanted(G):
    """g(a, b) is the largest element of the ideal a => b."""
    L = G.L
    g = np.empty((L.n, L.n), dtype=np.int64)
    for a in range(L.n):
        for b in range(L.n):
            g[a, b] = L.join_all(G.ideal(a, b))
    return g


def genimp_from_slanted(L, g):
    imp = np.empty((L.n, L.n), dtype=object)
    for a in range(L.n):
        for b in range(L.n):
            imp[a, b] = _down(L, g[a, b])
    return GenImplLattice(L, imp)


def heyting(L):
    """Relative pseudocomplement of a finite distributive lattice."""
    h = np.empty((L.n, L.n), dtype=np.int64)
    for a in range(L.n):
        for b in range(L.n):
            h[a, b] = L.join_all(c for c in range(L.n) if L.leq[L.meet[c, a], b])
    return h


def genimp_axioms_hold(L, g):
    """1 <= g(a, a) and g(a, b) /\\ g(b, c) <= g(a, c) for all elements."""
    n = L.n
    if any(g[a, a] != L.top for a in range(n)):
        return False
    a, b, c = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij")
    return bool(L.leq[L.meet[g[a, b], g[b, c]], g[a, c]].all())


GENIMP = expand_signature(Signature((Connective("g", "G", ("d", "1")),), "distributive"))


def genimp_algebra(L, g):
    return PerfectLE(L, GENIMP, {"g": g}, f"genimp-{L.name}")
