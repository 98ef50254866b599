"""Seeded random terms, definite PIA terms, analytic inductive inequalities and s-Sahlqvist formulas."""
from __future__ import annotations

import random

from .signature import ONE
from .syntax import App, BOT, TOP, Inequality, Join, Meet, Var
from .gentree import flip_sign


def _conns(esig, family, arity=None):
    out = [c for c in esig.base.connectives if c.family == family and c.arity > 0]
    return [c for c in out if arity is None or c.arity == arity]


def random_term(esig, rng, variables=("p", "q", "r"), depth=3, residuals=False):
    """Any well-formed term: used for parser and printer properties."""
    pool = [c for c in esig.table.values() if c.family in ("F", "G", "N")]
    if not residuals:
        pool = [c for c in pool if not c.is_residual]
    if depth == 0 or rng.random() < 0.25:
        k = rng.random()
        return TOP if k < 0.08 else BOT if k < 0.16 else Var(rng.choice(variables))
    k = rng.random()
    if k < 0.2:
        return Meet(random_term(esig, rng, variables, depth - 1, residuals),
                    random_term(esig, rng, variables, depth - 1, residuals))
    if k < 0.4:
        return Join(random_term(esig, rng, variables, depth - 1, residuals),
                    random_term(esig, rng, variables, depth - 1, residuals))
    c = rng.choice(pool)
    return App(c.name, tuple(random_term(esig, rng, variables, depth - 1, residuals) for _ in range(c.arity)))


def random_definite_pia(esig, rng, sign="+", x="x", params=("z",), depth=3, with_x=True):
    """Definite PIA term: +g and -f nodes only, ``x`` exactly once when ``with_x``."""
    family = "G" if sign == "+" else "F"
    conns = _conns(esig, family)
    if depth == 0 or not conns or rng.random() < 0.2:
        if with_x:
            return Var(x)
        k = rng.random()
        return TOP if k < 0.1 else BOT if k < 0.2 else Var(rng.choice(params))
    c = rng.choice(conns)
    slot = rng.randrange(c.arity) if with_x else -1
    args = []
    for i, o in enumerate(c.order_type):
        s = sign if o == ONE else flip_sign(sign)
        args.append(random_definite_pia(esig, rng, s, x, params, depth - 1, with_x and i == slot))
    return App(c.name, tuple(args))


class InductiveGenerator:
    """Builds inequalities shaped as skeleton over PIA parts for a fixed order-type.

    Variables are ordered by position; SRR siblings of a critical occurrence use
    only earlier variables in non-critical position, or constants when
    ``transferable`` is set.  Non-critical parts hang off the skeleton as bare
    variables or variable-free PIA terms when ``transferable`` is set.
    """

    def __init__(self, esig, rng, variables=("p", "q", "r"), mode="lattice", transferable=False,
                 skeleton_depth=2, pia_depth=2):
        self.esig, self.rng, self.mode = esig, rng, mode
        self.vars = list(variables)
        self.transferable = transferable
        self.sd, self.pd = skeleton_depth, pia_depth
        self.eps = {v: rng.choice(("1", "d")) for v in self.vars}

    def inequality(self):
        return Inequality(self.skeleton("+", self.sd), self.skeleton("-", self.sd))

    def _critical_vars(self, sign):
        return [v for v in self.vars if (self.eps[v] == ONE) == (sign == "+")]

    def _noncritical_vars(self, sign, below=None):
        vs = [v for v in self.vars if (self.eps[v] == ONE) != (sign == "+")]
        if below is not None:
            vs = [v for v in vs if self.vars.index(v) < self.vars.index(below)]
        return vs

    def skeleton(self, sign, depth):
        rng = self.rng
        if depth == 0 or rng.random() < 0.3:
            return self.part(sign)
        fam = "F" if sign == "+" else "G"
        options = ["conn"] * 3 + ["delta"]
        if self.mode == "distributive":
            options.append("extra")
        pick = rng.choice(options)
        conns = _conns(self.esig, fam)
        if pick == "conn" and conns:
            c = rng.choice(conns)
            return App(c.name, tuple(self.skeleton(sign if o == ONE else flip_sign(sign), depth - 1)
                                     for o in c.order_type))
        upward = pick != "extra"
        cls = (Join if upward else Meet) if sign == "+" else (Meet if upward else Join)
        return cls(self.skeleton(sign, depth - 1), self.skeleton(sign, depth - 1))

    def part(self, sign):
        rng = self.rng
        k = rng.random()
        crit = self._critical_vars(sign)
        if k < 0.6 and crit:
            return self.pia(sign, self.pd, rng.choice(crit))
        non = self._noncritical_vars(sign)
        if k < 0.85 and non:
            return Var(rng.choice(non)) if self.transferable else self.pia(sign, self.pd, None, non)
        return self.pia(sign, self.pd, None, [])

    def pia(self, sign, depth, crit, params=None):
        """PIA term: with ``crit`` it contains that variable once, on a critical leaf."""
        rng = self.rng
        if depth == 0 or rng.random() < 0.25:
            if crit:
                return Var(crit)
            if params:
                return Var(rng.choice(params))
            return TOP if rng.random() < 0.5 else BOT
        fam = "G" if sign == "+" else "F"
        conns = _conns(self.esig, fam)
        if rng.random() < 0.2 or not conns:
            cls = Meet if sign == "+" else Join
            if crit:
                side = self.pia(sign, depth - 1, None, [] if self.transferable else self._noncritical_vars(sign, crit))
                kids = [self.pia(sign, depth - 1, crit), side]
                if rng.random() < 0.5:
                    kids.reverse()
                return cls(*kids)
            return cls(self.pia(sign, depth - 1, None, params), self.pia(sign, depth - 1, None, params))
        c = rng.choice(conns)
        slot = rng.randrange(c.arity)
        args = []
        for i, o in enumerate(c.order_type):
            s = sign if o == ONE else flip_sign(sign)
            if crit and i == slot:
                args.append(self.pia(s, depth - 1, crit))
            elif crit:
                sib = [] if self.transferable else self._noncritical_vars(s, crit)
                args.append(self.pia(s, depth - 1, None, sib))
            else:
                args.append(self.pia(s, depth - 1, None, self._regate(params, sign, s)))
        return App(c.name, tuple(args))

    def _regate(self, params, old, new):
        # a sign flip turns non-critical variables of one sign into those of the other
        if params is None or not params:
            return params
        if old == new:
            return params
        return [v for v in self.vars if (self.eps[v] == ONE) != (new == "+")
                and any(self.vars.index(v) <= self.vars.index(p) for p in params)]


def analytic_inductive_corpus(esig, seed, count, variables=("p", "q", "r"), mode="lattice",
                              transferable=False, max_tries=200000, min_size=0):
    """Distinct generated inequalities that the classifier accepts as analytic inductive."""
    from .classify import search_classification
    from .syntax import size
    rng = random.Random(seed)
    out, seen = [], set()
    tries = 0
    while len(out) < count and tries < max_tries:
        tries += 1
        gen = InductiveGenerator(esig, rng, variables, mode, transferable)
        ineq = gen.inequality()
        key = str(ineq)
        if key in seen or size(ineq.lhs) + size(ineq.rhs) < min_size:
            continue
        seen.add(key)
        if transferable:
            from .gmt import find_transferable
            if find_transferable(ineq, esig, mode) is None:
                continue
        elif not search_classification(ineq, esig, mode).verdict.startswith("analytic"):
            continue
        out.append(ineq)
    return out


# s-Sahlqvist formulas over dia, diab, box, boxb, neg, imp

def _s(op, t):
    return App(op, (t,))


def _leaf(rng, variables, negated=None):
    k = rng.random()
    if k < 0.1:
        return TOP
    if k < 0.2:
        return BOT
    v = Var(rng.choice(variables))
    if negated is None:
        negated = rng.random() < 0.5
    return _s("neg", v) if negated else v


def _grow(rng, variables, depth, unary, leaf):
    if depth == 0 or rng.random() < 0.3:
        return leaf()
    k = rng.random()
    if k < 0.25:
        return Meet(_grow(rng, variables, depth - 1, unary, leaf), _grow(rng, variables, depth - 1, unary, leaf))
    if k < 0.5:
        return Join(_grow(rng, variables, depth - 1, unary, leaf), _grow(rng, variables, depth - 1, unary, leaf))
    return _s(rng.choice(unary), _grow(rng, variables, depth - 1, unary, leaf))


def boxed_atom(rng, variables, depth=2):
    t = Var(rng.choice(variables))
    for _ in range(rng.randrange(depth + 1)):
        t = _s(rng.choice(("box", "boxb")), t)
    return t


def closed_positive(rng, variables, depth=2):
    return _grow(rng, variables, depth, ("dia", "diab"), lambda: _leaf(rng, variables, False))


def open_negative(rng, variables, depth=2):
    return _grow(rng, variables, depth, ("box", "boxb"), lambda: _leaf(rng, variables, True))


def sub_positive(rng, variables, depth=2):
    return _grow(rng, variables, depth, ("box", "boxb"), lambda: closed_positive(rng, variables))


def sub_negative(rng, variables, depth=2):
    return _grow(rng, variables, depth, ("dia", "diab"), lambda: open_negative(rng, variables))


def untied(rng, variables, depth=2):
    def leaf():
        if rng.random() < 0.5:
            t = boxed_atom(rng, variables)
            while rng.random() < 0.3:
                t = Meet(t, boxed_atom(rng, variables))
            return t
        return sub_negative(rng, variables, 1)

    def grow(d):
        if d == 0 or rng.random() < 0.35:
            return leaf()
        if rng.random() < 0.4:
            return Meet(grow(d - 1), grow(d - 1))
        return _s(rng.choice(("dia", "diab")), grow(d - 1))

    return grow(depth)


def random_s_sahlqvist(rng, variables=("p", "q", "r")):
    body = App("imp", (untied(rng, variables), sub_positive(rng, variables)))
    for _ in range(rng.randrange(3)):
        body = _s(rng.choice(("box", "boxb")), body)
    return body
