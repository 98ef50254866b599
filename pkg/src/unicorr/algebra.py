"""Finite lattices, perfect LE-algebras, vectorised evaluation and validity.

Elements of an n-element lattice are the integers ``0..n-1``; the order is a
boolean matrix ``leq`` and meets/joins are ``n x n`` integer tables, so terms
evaluate over whole batches of assignments with numpy fancy indexing.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .signature import DUAL, ONE
from .syntax import (App, Bot, Conom, Hole, Inequality, Join, Meet, Nom, Quasi, Top, Var,
                     free_symbols, variables_in_order)

DEFAULT_BUDGET = 10**7
CHUNK = 1 << 16


class AlgebraError(ValueError):
    pass


class BudgetError(RuntimeError):
    pass


class FiniteLattice:
    def __init__(self, leq, name="", labels=None):
        leq = np.array(leq, dtype=bool)
        n = leq.shape[0]
        if n == 0 or leq.shape != (n, n):
            raise AlgebraError("order matrix must be square and non-empty")
        if not leq.diagonal().all():
            raise AlgebraError("order is not reflexive")
        if (leq & leq.T & ~np.eye(n, dtype=bool)).any():
            raise AlgebraError("order is not antisymmetric")
        if ((leq.astype(np.int64) @ leq.astype(np.int64)) > 0)[~leq].any():
            raise AlgebraError("order is not transitive")
        self.n = n
        self.leq = leq
        self.name = name
        self.labels = labels or [str(i) for i in range(n)]
        self.meet = self._bound(leq)
        self.join = self._bound(leq.T)
        self.bot = int(np.flatnonzero(leq.all(axis=1))[0])
        self.top = int(np.flatnonzero(leq.all(axis=0))[0])
        self.leq.setflags(write=False)

    def _bound(self, leq):
        # greatest lower bound w.r.t. leq; raises if some pair has none
        n = leq.shape[0]
        out = np.empty((n, n), dtype=np.int64)
        for a in range(n):
            for b in range(a, n):
                lower = np.flatnonzero(leq[:, a] & leq[:, b])
                best = [c for c in lower if leq[lower, c].all()]
                if not best:
                    raise AlgebraError(f"elements {a} and {b} have no bound")
                out[a, b] = out[b, a] = best[0]
        return out

    @classmethod
    def from_covers(cls, n, covers, name=""):
        leq = np.eye(n, dtype=bool)
        for a, b in covers:
            leq[a, b] = True
        for k in range(n):
            leq |= leq[:, [k]] & leq[[k], :]
        return cls(leq, name)

    @classmethod
    def chain(cls, n):
        return cls(np.triu(np.ones((n, n), dtype=bool)), f"C{n}")

    @classmethod
    def boolean(cls, k):
        """The powerset of a k-element set; element i is the subset with bitmask i."""
        m = np.arange(1 << k)
        return cls((m[:, None] & ~m[None, :]) == 0, f"B{k}")

    @classmethod
    def n5(cls):
        return cls.from_covers(5, [(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)], "N5")

    @classmethod
    def m3(cls):
        return cls.from_covers(5, [(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)], "M3")

    @classmethod
    def downsets(cls, poset_leq, name=""):
        """Lattice of down-sets of a finite poset, elements sorted by bitmask."""
        poset_leq = np.asarray(poset_leq, dtype=bool)
        k = poset_leq.shape[0]
        below = [sum(1 << y for y in range(k) if poset_leq[y, x]) for x in range(k)]
        sets = [m for m in range(1 << k)
                if all(not (m >> x) & 1 or (below[x] & ~m) == 0 for x in range(k))]
        sets.sort()
        arr = np.array(sets)
        lat = cls((arr[:, None] & ~arr[None, :]) == 0, name)
        lat.downset_masks = sets
        return lat

    def dual(self):
        d = FiniteLattice.__new__(FiniteLattice)
        d.n, d.leq, d.name, d.labels = self.n, self.leq.T, self.name + "^op", self.labels
        d.meet, d.join, d.bot, d.top = self.join, self.meet, self.top, self.bot
        return d

    @cached_property
    def lower_covers(self):
        strict = self.leq & ~np.eye(self.n, dtype=bool)
        out = []
        for a in range(self.n):
            below = np.flatnonzero(strict[:, a])
            out.append([b for b in below if not (strict[b, below] ).any()])
        return out

    @cached_property
    def join_irreducibles(self):
        """Completely join-irreducible elements (one lower cover)."""
        return [a for a in range(self.n) if len(self.lower_covers[a]) == 1]

    @cached_property
    def meet_irreducibles(self):
        return self.dual().join_irreducibles

    @cached_property
    def is_distributive(self):
        j, m = self.join, self.meet
        a, b, c = np.meshgrid(*(np.arange(self.n),) * 3, indexing="ij")
        return bool((m[a, j[b, c]] == j[m[a, b], m[a, c]]).all())

    @cached_property
    def complement(self):
        comp = np.full(self.n, -1)
        for a in range(self.n):
            c = np.flatnonzero((self.meet[a] == self.bot) & (self.join[a] == self.top))
            if len(c) == 1:
                comp[a] = c[0]
        return comp

    @property
    def is_boolean(self):
        return self.is_distributive and (self.complement >= 0).all()

    def join_all(self, elems):
        out = self.bot
        for x in elems:
            out = self.join[out, x]
        return int(out)

    def meet_all(self, elems):
        out = self.top
        for x in elems:
            out = self.meet[out, x]
        return int(out)

    def check_laws(self):
        """Every element is the join of the join-irreducibles below it and dually."""
        J, M = self.join_irreducibles, self.meet_irreducibles
        for a in range(self.n):
            if self.join_all(j for j in J if self.leq[j, a]) != a:
                return False
            if self.meet_all(m for m in M if self.leq[a, m]) != a:
                return False
        return True

    def __repr__(self):
        return f"FiniteLattice({self.name or self.n})"


def fold_masked(values, mask, table, identity):
    """Reduce ``values`` (shape (k, ...)) along axis 0 where ``mask`` holds."""
    out = np.full(values.shape[1:], identity, dtype=np.int64)
    for c in range(values.shape[0]):
        out = np.where(mask[c], table[out, values[c]], out)
    return out


class Algebra:
    """A finite lattice with operation tables for a signature.

    Residual tables of the expanded signature are computed on demand.
    """

    def __init__(self, lattice, esig, tables, name=""):
        self.lattice = lattice
        self.esig = esig
        self.tables = {k: np.asarray(v, dtype=np.int64) for k, v in tables.items()}
        self.name = name or lattice.name
        for c in esig.base.connectives:
            if c.family == "N":
                if not lattice.is_boolean:
                    raise AlgebraError(f"negation {c.name} needs a Boolean lattice")
                self.tables.setdefault(c.name, lattice.complement.copy())
            elif c.name not in self.tables:
                raise AlgebraError(f"missing table for {c.name}")
            if self.tables[c.name].shape != (lattice.n,) * c.arity:
                raise AlgebraError(f"table for {c.name} has the wrong shape")

    @property
    def n(self):
        return self.lattice.n

    def table(self, name):
        if name not in self.tables:
            conn = self.esig[name]
            if not conn.is_residual:
                raise AlgebraError(f"no table for {name}")
            self.tables[name] = residual_table(self.lattice, self.esig[conn.base],
                                               self.tables[conn.base], conn.index)
        return self.tables[name]

    def to_dict(self):
        L = self.lattice
        covers = [[int(b), a] for a in range(L.n) for b in L.lower_covers[a]]
        return {"name": self.name, "size": L.n, "covers": covers,
                "ops": {c.name: self.tables[c.name].tolist() for c in self.esig.base.connectives}}

    @classmethod
    def from_dict(cls, d, esig):
        L = FiniteLattice.from_covers(d["size"], d["covers"], d.get("name", ""))
        return cls(L, esig, {k: np.array(v) for k, v in d["ops"].items()}, d.get("name", ""))

    def dumps(self):
        return json.dumps(self.to_dict())

    def __repr__(self):
        return f"Algebra({self.name})"


def residual_table(L, conn, T, i):
    """Table of the residual of ``conn`` (table ``T``) in 1-based coordinate ``i``."""
    ax = i - 1
    Tm = np.moveaxis(T, ax, 0)
    out = np.empty(Tm.shape, dtype=np.int64)
    t = conn.order_type[ax]
    for b in range(L.n):
        if conn.family == "F":
            mask = L.leq[Tm, b]
            use_join = t == ONE
        else:
            mask = L.leq[b, Tm]
            use_join = t == DUAL
        vals = np.broadcast_to(np.arange(L.n).reshape((-1,) + (1,) * (Tm.ndim - 1)), Tm.shape)
        if use_join:
            out[b] = fold_masked(vals, mask, L.join, L.bot)
        else:
            out[b] = fold_masked(vals, mask, L.meet, L.top)
    return np.moveaxis(out, 0, ax)


def check_residuation(alg, name):
    """Residuation law for every coordinate of ``name`` over all element tuples."""
    L, conn = alg.lattice, alg.esig[name]
    T = alg.table(name)
    k = conn.arity
    grids = np.meshgrid(*(np.arange(L.n),) * (k + 1), indexing="ij")
    args, b = grids[:k], grids[k]
    val = T[tuple(args)]
    for i in range(1, k + 1):
        R = alg.table(alg.esig.residual_of(name, i).name)
        rargs = list(args)
        rargs[i - 1] = b
        r = R[tuple(rargs)]
        a = args[i - 1]
        t = conn.order_type[i - 1]
        if conn.family == "F":
            lhs = L.leq[val, b]
            rhs = L.leq[a, r] if t == ONE else L.leq[r, a]
        else:
            lhs = L.leq[b, val]
            rhs = L.leq[r, a] if t == ONE else L.leq[a, r]
        if (lhs != rhs).any():
            return False
    return True


def coordinate_lattice(L, family, t):
    """Domain order of a coordinate: the order in which the connective preserves joins."""
    flip = (family == "G") != (t == DUAL)
    return L.dual() if flip else L


def check_normal(alg, conn):
    """F-connectives send bottom and binary joins of each coordinate domain to bottom and joins; G dually."""
    L = alg.lattice
    T = alg.table(conn.name)
    out_join = L.join if conn.family == "F" else L.meet
    out_bot = L.bot if conn.family == "F" else L.top
    for i, t in enumerate(conn.order_type):
        D = coordinate_lattice(L, conn.family, t)
        Tm = np.moveaxis(T, i, 0)
        if (Tm[D.bot] != out_bot).any():
            return False
        a, c = np.meshgrid(np.arange(L.n), np.arange(L.n), indexing="ij")
        lhs = Tm[D.join[a, c]]
        rhs = out_join[Tm[a], Tm[c]]
        if (lhs != rhs).any():
            return False
    return True


def check_monotone(L, conn, T, leq_dom=None):
    """eps-monotonicity: order-preserving in 1-coordinates, reversing in d-coordinates."""
    for i, t in enumerate(conn.order_type):
        Tm = np.moveaxis(T, i, 0)
        for a in range(L.n):
            for c in range(L.n):
                if L.leq[a, c]:
                    x, y = (Tm[a], Tm[c]) if t == ONE else (Tm[c], Tm[a])
                    if not L.leq[x, y].all():
                        return False
    return True


class PerfectLE(Algebra):
    """A finite LE-algebra; finiteness makes it perfect once the operations are normal."""

    def __init__(self, lattice, esig, tables, name="", check=True):
        super().__init__(lattice, esig, tables, name)
        if check:
            problems = check_perfect_le(self)
            if problems:
                raise AlgebraError("; ".join(problems))


def check_perfect_le(alg):
    problems = []
    if not alg.lattice.check_laws():
        problems.append("join-irreducibles do not join-generate")
    if alg.esig.mode == "distributive" and not alg.lattice.is_distributive:
        problems.append("lattice is not distributive")
    for c in alg.esig.base.connectives:
        if c.family in ("F", "G") and not check_normal(alg, c):
            problems.append(f"{c.name} is not a normal operator of its order-type")
    return problems


# evaluation

def evaluate_batch(term, alg, env):
    """Evaluate ``term`` on arrays of element indices; ``env`` maps symbol names to arrays."""
    L = alg.lattice
    memo = {}

    def ev(t):
        key = id(t)
        if key in memo:
            return memo[key][1]
        if isinstance(t, (Var, Nom, Conom, Hole)):
            try:
                v = env[t.name]
            except KeyError:
                raise AlgebraError(f"unassigned symbol {t.name}") from None
        elif isinstance(t, Top):
            v = L.top
        elif isinstance(t, Bot):
            v = L.bot
        elif isinstance(t, Meet):
            v = L.meet[ev(t.left), ev(t.right)]
        elif isinstance(t, Join):
            v = L.join[ev(t.left), ev(t.right)]
        elif isinstance(t, App):
            T = alg.table(t.op)
            v = T[tuple(ev(a) for a in t.args)] if t.args else int(T)
        else:
            raise AlgebraError(f"cannot evaluate {t!r}")
        memo[key] = (t, v)
        return v

    return ev(term)


def evaluate(term, alg, assignment):
    env = {k: np.array([v]) for k, v in assignment.items()}
    return int(np.broadcast_to(evaluate_batch(term, alg, env), (1,))[0])


def holds_batch(obj, alg, env):
    L = alg.lattice
    if isinstance(obj, Inequality):
        return L.leq[evaluate_batch(obj.lhs, alg, env), evaluate_batch(obj.rhs, alg, env)]
    if isinstance(obj, Quasi):
        ok = holds_batch(obj.consequent, alg, env)
        for a in obj.antecedents:
            ok = ok | ~holds_batch(a, alg, env)
        return ok
    raise AlgebraError(f"cannot check {obj!r}")


def assignment_domains(obj, alg, prop_domain=None, nominal_domain=None, conominal_domain=None):
    """Symbols in canonical order with the elements each ranges over."""
    L = alg.lattice
    syms = free_symbols(obj)
    props = variables_in_order(obj)
    noms = sorted(syms.nominals, key=_num_key)
    conoms = sorted(syms.conominals, key=_num_key)
    pd = np.arange(L.n) if prop_domain is None else np.asarray(prop_domain)
    nd = np.array(L.join_irreducibles if nominal_domain is None else nominal_domain, dtype=np.int64)
    cd = np.array(L.meet_irreducibles if conominal_domain is None else conominal_domain, dtype=np.int64)
    return [(p, pd) for p in props] + [(j, nd) for j in noms] + [(m, cd) for m in conoms]


def _num_key(name):
    digits = "".join(ch for ch in name if ch.isdigit())
    return (name.rstrip("0123456789"), int(digits) if digits else -1)


@dataclass
class Validity:
    valid: bool
    countermodel: dict | None = None
    checked: int = 0

    def __bool__(self):
        return self.valid


def check_validity(obj, alg, budget=DEFAULT_BUDGET, **domains):
    """Validity of an inequality or quasi-inequality under all assignments.

    Assignments are enumerated in mixed-radix order (first symbol most
    significant); the countermodel is the least failing assignment.
    Propositional variables range over the carrier, nominals over the
    completely join-irreducibles and conominals over the completely
    meet-irreducibles.
    """
    doms = assignment_domains(obj, alg, **domains)
    radices = [len(d) for _, d in doms]
    total = int(np.prod(radices, dtype=object)) if radices else 1
    if total > budget:
        raise BudgetError(f"{total} assignments exceed the budget of {budget}")
    if total == 0:
        return Validity(True, None, 0)
    strides = []
    s = 1
    for r in reversed(radices):
        strides.append(s)
        s *= r
    strides.reverse()
    for start in range(0, total, CHUNK):
        idx = np.arange(start, min(total, start + CHUNK), dtype=np.int64)
        env = {name: d[(idx // st) % len(d)] for (name, d), st in zip(doms, strides)}
        ok = np.broadcast_to(holds_batch(obj, alg, env), idx.shape)
        if not ok.all():
            k = int(np.flatnonzero(~ok)[0])
            return Validity(False, {name: int(v[k]) for name, v in env.items()}, start + k + 1)
    return Validity(True, None, total)


def is_valid(obj, alg, budget=DEFAULT_BUDGET, **domains):
    return check_validity(obj, alg, budget, **domains).valid


# random operations and the pool

def random_operator(L, order_type, rng, spread=0.6):
    """A random operation preserving bottom and binary joins in every coordinate.

    Values are chosen on tuples of join-irreducibles (meet-irreducibles in
    d-coordinates) and extended by joins; in non-distributive lattices a
    repair pass raises basis values until binary joins are preserved.
    """
    k = len(order_type)
    if k == 0:
        return np.array(rng.integers(L.n))
    doms = [L if t == ONE else L.dual() for t in order_type]
    bases = [D.join_irreducibles for D in doms]
    V = {}
    for combo in itertools.product(*bases):
        V[combo] = int(rng.integers(L.n)) if rng.random() < spread else L.bot
    while True:
        T = _extend(L, doms, bases, V)
        bad = _first_join_failure(L, doms, T)
        if bad is None:
            return T
        i, a, rest, target = bad
        b_i = next(b for b in bases[i] if doms[i].leq[b, a])
        others = [[b for b in bases[j] if doms[j].leq[b, rest[j]]] if j != i else [b_i]
                  for j in range(k)]
        raised = False
        for combo in itertools.product(*others):
            new = int(L.join[V[combo], target])
            if new != V[combo]:
                V[combo] = new
                raised = True
        if not raised:
            raise AlgebraError("repair pass made no progress")


def _extend(L, doms, bases, V):
    k = len(doms)
    T = np.full((L.n,) * k, L.bot, dtype=np.int64)
    for combo, val in V.items():
        if val == L.bot:
            continue
        mask = np.ones((L.n,) * k, dtype=bool)
        for i, b in enumerate(combo):
            shape = [1] * k
            shape[i] = L.n
            mask = mask & doms[i].leq[b].reshape(shape)
        T = np.where(mask, L.join[T, val], T)
    return T


def _first_join_failure(L, doms, T):
    k = T.ndim
    for i in range(k):
        D = doms[i]
        Tm = np.moveaxis(T, i, 0)
        for a in range(L.n):
            for c in range(L.n):
                lhs = Tm[D.join[a, c]]
                rhs = L.join[Tm[a], Tm[c]]
                diff = lhs != rhs
                if diff.any():
                    pos = tuple(int(x) for x in np.argwhere(diff)[0])
                    rest = list(pos)
                    rest.insert(i, None)
                    # raise the value at a, with the other coordinates fixed
                    return i, a if a != D.bot else c, rest, int(lhs[pos])
    return None


def random_tables(L, esig, rng):
    tables = {}
    for c in esig.base.connectives:
        if c.family == "F":
            tables[c.name] = random_operator(L, c.order_type, rng)
        elif c.family == "G":
            tables[c.name] = random_operator(L.dual(), c.order_type, rng)
    return tables


def _posets(k):
    pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
    seen, out = set(), []
    for choice in itertools.product((0, 1, 2), repeat=len(pairs)):
        leq = np.eye(k, dtype=bool)
        for (i, j), c in zip(pairs, choice):
            if c == 1:
                leq[i, j] = True
            elif c == 2:
                leq[j, i] = True
        closed = leq.copy()
        for m in range(k):
            closed |= closed[:, [m]] & closed[[m], :]
        if (closed != leq).any():
            continue
        canon = min(tuple(leq[np.ix_(p, p)].flatten()) for p in itertools.permutations(range(k)))
        if canon not in seen:
            seen.add(canon)
            out.append(leq)
    return out


def distributive_lattices(max_join_irreducibles=4):
    """Down-set lattices of all posets with 1..max elements, up to isomorphism."""
    out = []
    for k in range(1, max_join_irreducibles + 1):
        for idx, P in enumerate(_posets(k)):
            antichain = not (P & ~np.eye(k, dtype=bool)).any()
            name = f"B{k}" if antichain else f"D{k}.{idx}"
            out.append(FiniteLattice.downsets(P, name))
    return out


@dataclass
class PoolSpec:
    max_join_irreducibles: int = 4
    boolean_only: bool = False
    max_boolean: int = 3
    non_distributive: bool = True
    samples: int = 5
    seed: int = 0

    @classmethod
    def parse(cls, text):
        """``full``, ``small`` or ``ba:K``, optionally followed by ``,key=value`` overrides."""
        head, *rest = [p.strip() for p in (text or "full").split(",")]
        if head == "full":
            spec = cls()
        elif head == "small":
            spec = cls(max_join_irreducibles=2, samples=2)
        elif head.startswith("ba:"):
            spec = cls(boolean_only=True, max_boolean=int(head[3:]), non_distributive=False)
        else:
            spec, rest = cls(), [head] + rest
        for part in rest:
            k, _, v = part.partition("=")
            k = k.strip()
            if not hasattr(spec, k):
                raise ValueError(f"unknown pool option {k!r}")
            cur = getattr(spec, k)
            setattr(spec, k, v.strip().lower() in ("1", "true", "yes") if isinstance(cur, bool) else int(v))
        return spec


def pool_lattices(spec=None, mode="lattice"):
    spec = spec or PoolSpec()
    if spec.boolean_only:
        return [FiniteLattice.boolean(k) for k in range(1, spec.max_boolean + 1)]
    lats = distributive_lattices(spec.max_join_irreducibles)
    have = {l.name for l in lats}
    for k in range(1, spec.max_boolean + 1):
        if f"B{k}" not in have:
            lats.append(FiniteLattice.boolean(k))
    if spec.non_distributive and mode == "lattice":
        lats += [FiniteLattice.n5(), FiniteLattice.m3()]
    return lats


def generate_pool(esig, spec=None):
    """Seeded random perfect LE-algebras over the pool lattices; deterministic in the seed."""
    spec = spec or PoolSpec()
    lats = pool_lattices(spec, esig.mode)
    needs_boolean = bool(esig.base.negations)
    out = []
    seeds = np.random.SeedSequence(spec.seed).spawn(len(lats))
    for L, ss in zip(lats, seeds):
        if needs_boolean and not L.is_boolean:
            continue
        rng = np.random.default_rng(ss)
        for s in range(spec.samples):
            out.append(PerfectLE(L, esig, random_tables(L, esig, rng), f"{L.name}/s{s}"))
    return out


# canonical extensions of finite lattices

def _upsets(L):
    order = sorted(range(L.n), key=lambda a: int(L.leq[a].sum()))
    above = [int(sum(1 << b for b in range(L.n) if L.leq[a, b] and b != a)) for a in range(L.n)]
    out = []

    def rec(i, mask):
        if i == len(order):
            out.append(mask)
            return
        a = order[i]
        rec(i + 1, mask)
        if above[a] & ~mask == 0:
            rec(i + 1, mask | (1 << a))

    rec(0, 0)
    return out


def filters(L):
    out = []
    for m in _upsets(L):
        elems = [a for a in range(L.n) if (m >> a) & 1]
        if elems and all((m >> int(L.meet[a, b])) & 1 for a in elems for b in elems):
            out.append(m)
    return out


def ideals(L):
    return filters(L.dual())


def canonical_extension_finite(L):
    """Build the stable sets of the filter/ideal polarity and the embedding a -> {F : a in F}.

    Returns the completion ``C`` and the embedding as an index array; raises
    if the embedding is not an isomorphism onto a dense, compact extension.
    """
    Fs, Is = filters(L), ideals(L)
    full = (1 << len(Fs)) - 1
    basic = []
    for I in Is:
        basic.append(sum(1 << f for f, F in enumerate(Fs) if F & I))
    stable = {full}
    frontier = [full]
    while frontier:
        nxt = []
        for s in frontier:
            for b in basic:
                t = s & b
                if t not in stable:
                    stable.add(t)
                    nxt.append(t)
        frontier = nxt
    elems = sorted(stable, key=lambda m: (bin(m).count("1"), m))
    leq = np.array([[(x & ~y) == 0 for y in elems] for x in elems])
    C = FiniteLattice(leq, L.name + "^delta")
    index = {m: i for i, m in enumerate(elems)}
    e = np.array([index[sum(1 << f for f, F in enumerate(Fs) if (F >> a) & 1)] for a in range(L.n)])
    if len(set(e.tolist())) != L.n or C.n != L.n:
        raise AlgebraError("embedding is not onto")
    if not (L.leq == C.leq[np.ix_(e, e)]).all():
        raise AlgebraError("embedding is not an order isomorphism")
    K = closed_elements(C, e)
    O = open_elements(C, e)
    for c in range(C.n):
        if C.join_all(k for k in K if C.leq[k, c]) != c or C.meet_all(o for o in O if C.leq[c, o]) != c:
            raise AlgebraError("extension is not dense")
    for k in K:
        for o in O:
            if C.leq[k, o] and not any(C.leq[k, e[a]] and C.leq[e[a], o] for a in range(L.n)):
                raise AlgebraError("extension is not compact")
    return C, e


def closed_elements(C, e):
    """Meets of subsets of the image of the embedding."""
    out = {C.top}
    frontier = set(int(x) for x in e) | {C.top}
    out |= frontier
    changed = True
    while changed:
        changed = False
        for a in list(out):
            for b in list(out):
                m = int(C.meet[a, b])
                if m not in out:
                    out.add(m)
                    changed = True
    return sorted(out)


def open_elements(C, e):
    return closed_elements(C.dual(), e)


def bounded_sublattices(L, max_size=None):
    """Bounded sublattices of a small lattice (exponential; for exploration only)."""
    rest = [a for a in range(L.n) if a not in (L.bot, L.top)]
    out = []
    for r in range(len(rest) + 1):
        for combo in itertools.combinations(rest, r):
            S = set(combo) | {L.bot, L.top}
            if all(int(L.meet[a, b]) in S and int(L.join[a, b]) in S for a in S for b in S):
                if max_size is None or len(S) <= max_size:
                    out.append(sorted(S))
    return out


def sublattice(L, elems, name=""):
    elems = list(elems)
    return FiniteLattice(L.leq[np.ix_(elems, elems)], name or f"{L.name}|{len(elems)}")


@dataclass
class SlantedLE2S:
    """A lattice A embedded into a finite complete lattice C with operations A^n -> C.

    F-operations take values in the closed elements, G-operations in the
    open ones.  When A = C the algebra is dense and the extensions agree with
    the operations themselves.
    """

    A: FiniteLattice
    C: FiniteLattice
    e: np.ndarray
    esig: object
    ops: dict
    name: str = ""
    _ext: dict = field(default_factory=dict, repr=False)

    @cached_property
    def K(self):
        return closed_elements(self.C, self.e)

    @cached_property
    def O(self):
        return open_elements(self.C, self.e)

    @property
    def dense(self):
        return self.A.n == self.C.n

    @classmethod
    def lift(cls, alg):
        L = alg.lattice
        ops = {c.name: alg.tables[c.name] for c in alg.esig.base.connectives if c.family in ("F", "G")}
        return cls(L, L, np.arange(L.n), alg.esig, ops, alg.name)

    @classmethod
    def on_sublattice(cls, C, elems, esig, rng, name=""):
        """Random operations on a bounded sublattice ``A`` of ``C`` composed with the inclusion."""
        A = sublattice(C, elems)
        e = np.array(elems)
        ops = {}
        for c in esig.base.connectives:
            if c.family == "F":
                ops[c.name] = e[random_operator(A, c.order_type, rng)]
            elif c.family == "G":
                ops[c.name] = e[random_operator(A.dual(), c.order_type, rng)]
        return cls(A, C, e, esig, ops, name or f"{C.name}>{A.n}")

    def extension(self, name):
        """Sigma-extension of an F-operation or pi-extension of a G-operation, as a table over C."""
        if name not in self._ext:
            conn = self.esig[name]
            self._ext[name] = (_sigma if conn.family == "F" else _pi)(self, conn)
        return self._ext[name]

    def extended_algebra(self):
        tables = {c.name: self.extension(c.name) for c in self.esig.base.connectives if c.family in ("F", "G")}
        return Algebra(self.C, self.esig, tables, self.name + "^ext")


def _sigma(S, conn):
    C, A, e, T = S.C, S.A, S.e, S.ops[conn.name]
    k = conn.arity
    if k == 0:
        return np.array(int(T))
    approx = [S.K if t == ONE else S.O for t in conn.order_type]
    atuples = list(itertools.product(range(A.n), repeat=k))
    on_approx = {}
    for kt in itertools.product(*approx):
        vals = [T[at] for at in atuples
                if all((C.leq[kt[i], e[at[i]]] if t == ONE else C.leq[e[at[i]], kt[i]])
                       for i, t in enumerate(conn.order_type))]
        on_approx[kt] = C.meet_all(vals)
    out = np.empty((C.n,) * k, dtype=np.int64)
    for ut in itertools.product(range(C.n), repeat=k):
        out[ut] = C.join_all(v for kt, v in on_approx.items()
                             if all((C.leq[kt[i], ut[i]] if t == ONE else C.leq[ut[i], kt[i]])
                                    for i, t in enumerate(conn.order_type)))
    return out


def _pi(S, conn):
    C, A, e, T = S.C, S.A, S.e, S.ops[conn.name]
    k = conn.arity
    if k == 0:
        return np.array(int(T))
    approx = [S.O if t == ONE else S.K for t in conn.order_type]
    atuples = list(itertools.product(range(A.n), repeat=k))
    on_approx = {}
    for ot in itertools.product(*approx):
        vals = [T[at] for at in atuples
                if all((C.leq[e[at[i]], ot[i]] if t == ONE else C.leq[ot[i], e[at[i]]])
                       for i, t in enumerate(conn.order_type))]
        on_approx[ot] = C.join_all(vals)
    out = np.empty((C.n,) * k, dtype=np.int64)
    for ut in itertools.product(range(C.n), repeat=k):
        out[ut] = C.meet_all(v for ot, v in on_approx.items()
                             if all((C.leq[ut[i], ot[i]] if t == ONE else C.leq[ot[i], ut[i]])
                                    for i, t in enumerate(conn.order_type)))
    return out


def check_extension_adjoints(S, name):
    """Each coordinate of an extended F-operation has a right adjoint on C (left adjoint for G).

    For an F-operation and a 1-coordinate i the candidate is the join of all
    c with f(.., c, ..) <= o, and f(x) <= o must hold exactly when x_i is below
    it; d-coordinates use the meet and the reversed comparison.  Checked for
    every tuple over C and every open (closed, for G) bound.
    """
    C = S.C
    conn = S.esig[name]
    T = S.extension(name)
    bounds = S.O if conn.family == "F" else S.K
    for i, t in enumerate(conn.order_type):
        Tm = np.moveaxis(T, i, 0)
        for o in bounds:
            if conn.family == "F":
                ok_set = C.leq[Tm, o]
            else:
                ok_set = C.leq[o, Tm]
            use_join = (t == ONE) == (conn.family == "F")
            vals = np.broadcast_to(np.arange(C.n).reshape((-1,) + (1,) * (Tm.ndim - 1)), Tm.shape)
            if use_join:
                adj = fold_masked(vals, ok_set, C.join, C.bot)
            else:
                adj = fold_masked(vals, ok_set, C.meet, C.top)
            for c in range(C.n):
                pred = C.leq[c, adj] if use_join else C.leq[adj, c]
                if (ok_set[c] != pred).any():
                    return False
    return True


def check_admissible_validity(S, ineq, budget=DEFAULT_BUDGET):
    """Validity on C with the extended operations, variables ranging over the image of A only."""
    alg = S.extended_algebra()
    return check_validity(ineq, alg, budget, prop_domain=np.unique(S.e))
