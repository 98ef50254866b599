"""Terms, inequalities and quasi-inequalities: parsing, printing, substitution."""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass


class ParseError(ValueError):
    def __init__(self, message, pos=None, text=None):
        if pos is not None and text is not None:
            line = text.count("\n", 0, pos) + 1
            col = pos - (text.rfind("\n", 0, pos) + 1) + 1
            message = f"{message} at line {line}, col {col}"
        super().__init__(message)
        self.pos = pos


class Term:
    __slots__ = ()

    def __str__(self):
        return print_term(self)


@dataclass(frozen=True, repr=False)
class Var(Term):
    name: str

    def __repr__(self):
        return f"Var({self.name!r})"


@dataclass(frozen=True, repr=False)
class Nom(Term):
    name: str

    def __repr__(self):
        return f"Nom({self.name!r})"


@dataclass(frozen=True, repr=False)
class Conom(Term):
    name: str

    def __repr__(self):
        return f"Conom({self.name!r})"


@dataclass(frozen=True, repr=False)
class Hole(Term):
    """Placeholder: the adjoint argument ``u`` or a skeleton slot."""

    name: str

    def __repr__(self):
        return f"Hole({self.name!r})"


@dataclass(frozen=True, repr=False)
class Top(Term):
    def __repr__(self):
        return "TOP"


@dataclass(frozen=True, repr=False)
class Bot(Term):
    def __repr__(self):
        return "BOT"


@dataclass(frozen=True, repr=False)
class Meet(Term):
    left: Term
    right: Term

    def __repr__(self):
        return f"Meet({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class Join(Term):
    left: Term
    right: Term

    def __repr__(self):
        return f"Join({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class App(Term):
    op: str
    args: tuple = ()

    def __repr__(self):
        return f"App({self.op!r}, {self.args!r})"


TOP = Top()
BOT = Bot()
U = Hole("u")
ATOMS = (Var, Nom, Conom, Hole, Top, Bot)


@dataclass(frozen=True)
class Inequality:
    lhs: Term
    rhs: Term

    def __str__(self):
        return f"{print_term(self.lhs)} <= {print_term(self.rhs)}"


@dataclass(frozen=True)
class Quasi:
    antecedents: tuple
    consequent: Inequality

    @property
    def nominals(self):
        return sorted(free_symbols(self).nominals, key=_symbol_key)

    @property
    def conominals(self):
        return sorted(free_symbols(self).conominals, key=_symbol_key)

    def __str__(self):
        ants = " & ".join(str(a) for a in self.antecedents)
        return f"{ants} => {self.consequent}" if ants else f"=> {self.consequent}"


def _symbol_key(name):
    m = re.fullmatch(r"([A-Za-z_]+)(\d+)", name)
    return (m.group(1), int(m.group(2))) if m else (name, -1)


def children(t):
    if isinstance(t, (Meet, Join)):
        return (t.left, t.right)
    if isinstance(t, App):
        return t.args
    return ()


def rebuild(t, kids):
    if isinstance(t, Meet):
        return Meet(*kids)
    if isinstance(t, Join):
        return Join(*kids)
    if isinstance(t, App):
        return App(t.op, tuple(kids))
    return t


def big_join(terms):
    terms = list(terms)
    if not terms:
        return BOT
    out = terms[0]
    for t in terms[1:]:
        out = Join(out, t)
    return out


def big_meet(terms):
    terms = list(terms)
    if not terms:
        return TOP
    out = terms[0]
    for t in terms[1:]:
        out = Meet(out, t)
    return out


# printing

def print_term(t):
    if isinstance(t, Top):
        return "T"
    if isinstance(t, Bot):
        return "B"
    if isinstance(t, (Var, Nom, Conom, Hole)):
        return t.name
    if isinstance(t, App):
        return f"{t.op}(" + ", ".join(print_term(a) for a in t.args) + ")"
    op = " /\\ " if isinstance(t, Meet) else " \\/ "
    return _wrap(t.left) + op + _wrap(t.right)


def _wrap(t):
    s = print_term(t)
    return f"({s})" if isinstance(t, (Meet, Join)) else s


# parsing

_TOKEN = re.compile(r"\s*(?:(/\\)|(\\/)|(<=)|(=>)|(&)|(\()|(\))|(,)|([A-Za-z][A-Za-z0-9_]*(?:#[0-9]+)?))")
_NOMINAL = re.compile(r"j[0-9]+")
_CONOMINAL = re.compile(r"m[0-9]+")
_KINDS = ("meet", "join", "leq", "implies", "and", "lpar", "rpar", "comma", "ident")


def tokenize(text):
    pos, out = 0, []
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        for kind, g in zip(_KINDS, m.groups()):
            if g is not None:
                out.append((kind, g, m.start(m.lastindex)))
                break
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text, esig, allow_holes):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.esig = esig
        self.allow_holes = allow_holes

    def peek(self):
        return self.toks[self.i]

    def take(self, kind):
        tok = self.toks[self.i]
        if tok[0] != kind:
            what = tok[1] or "end of input"
            raise ParseError(f"expected {kind}, found {what!r}", tok[2], self.text)
        self.i += 1
        return tok

    def term(self):
        left = self.conj()
        while self.peek()[0] == "join":
            self.i += 1
            left = Join(left, self.conj())
        return left

    def conj(self):
        left = self.atom()
        while self.peek()[0] == "meet":
            self.i += 1
            left = Meet(left, self.atom())
        return left

    def atom(self):
        kind, val, pos = self.peek()
        if kind == "lpar":
            self.i += 1
            t = self.term()
            self.take("rpar")
            return t
        if kind != "ident":
            raise ParseError(f"unexpected {val or 'end of input'!r}", pos, self.text)
        self.i += 1
        if self.peek()[0] == "lpar":
            self.i += 1
            args = []
            if self.peek()[0] != "rpar":
                args.append(self.term())
                while self.peek()[0] == "comma":
                    self.i += 1
                    args.append(self.term())
            self.take("rpar")
            if self.esig is not None:
                if val not in self.esig:
                    raise ParseError(f"unknown connective {val!r}", pos, self.text)
                if self.esig[val].arity != len(args):
                    raise ParseError(
                        f"{val} expects {self.esig[val].arity} arguments, got {len(args)}", pos, self.text)
            return App(val, tuple(args))
        if val == "T":
            return TOP
        if val == "B":
            return BOT
        if val == "u" and not self.allow_holes:
            raise ParseError("'u' is reserved", pos, self.text)
        if val == "u":
            return U
        if _NOMINAL.fullmatch(val):
            return Nom(val)
        if _CONOMINAL.fullmatch(val):
            return Conom(val)
        if "#" in val:
            raise ParseError(f"{val!r} must be applied", pos, self.text)
        if self.esig is not None and val in self.esig:
            raise ParseError(f"connective {val!r} used as a variable", pos, self.text)
        return Var(val)

    def inequality(self):
        lhs = self.term()
        self.take("leq")
        return Inequality(lhs, self.term())

    def finish(self):
        kind, val, pos = self.peek()
        if kind != "eof":
            raise ParseError(f"trailing input {val!r}", pos, self.text)


def parse_term(text, esig=None, allow_holes=False):
    p = _Parser(text, esig, allow_holes)
    t = p.term()
    p.finish()
    return t


def parse_inequality(text, esig=None, allow_holes=False):
    p = _Parser(text, esig, allow_holes)
    ineq = p.inequality()
    p.finish()
    return ineq


def parse_quasi(text, esig=None):
    p = _Parser(text, esig, False)
    ants = []
    if p.peek()[0] != "implies":
        ants.append(p.inequality())
        while p.peek()[0] == "and":
            p.i += 1
            ants.append(p.inequality())
    p.take("implies")
    q = Quasi(tuple(ants), p.inequality())
    p.finish()
    return q


# traversal and substitution

def _as_key(k):
    return Var(k) if isinstance(k, str) else k


def substitute(t, binding):
    """Simultaneously replace atoms (``Var``, ``Nom``, ``Conom``, ``Hole``; strings mean variables)."""
    binding = {_as_key(k): v for k, v in binding.items()}
    if isinstance(t, Inequality):
        return Inequality(_subst(t.lhs, binding), _subst(t.rhs, binding))
    if isinstance(t, Quasi):
        return Quasi(tuple(substitute(a, binding) for a in t.antecedents), substitute(t.consequent, binding))
    return _subst(t, binding)


def _subst(t, binding):
    if isinstance(t, ATOMS):
        return binding.get(t, t)
    return rebuild(t, [_subst(c, binding) for c in children(t)])


@dataclass
class Symbols:
    props: Counter
    nominals: Counter
    conominals: Counter
    holes: Counter


def free_symbols(obj):
    s = Symbols(Counter(), Counter(), Counter(), Counter())
    for t in _terms_of(obj):
        for a in iter_subterms(t):
            if isinstance(a, Var):
                s.props[a.name] += 1
            elif isinstance(a, Nom):
                s.nominals[a.name] += 1
            elif isinstance(a, Conom):
                s.conominals[a.name] += 1
            elif isinstance(a, Hole):
                s.holes[a.name] += 1
    return s


def _terms_of(obj):
    if isinstance(obj, Inequality):
        return [obj.lhs, obj.rhs]
    if isinstance(obj, Quasi):
        out = []
        for a in obj.antecedents:
            out += _terms_of(a)
        return out + _terms_of(obj.consequent)
    return [obj]


def iter_subterms(t):
    stack = [t]
    while stack:
        x = stack.pop()
        yield x
        stack.extend(reversed(children(x)))


def positions(t, atom):
    """Paths (tuples of child indices) of every occurrence of ``atom`` in ``t``."""
    atom = _as_key(atom)
    out = []

    def walk(x, path):
        if x == atom:
            out.append(path)
        for i, c in enumerate(children(x)):
            walk(c, path + (i,))

    walk(t, ())
    return out


def subterm_at(t, path):
    for i in path:
        t = children(t)[i]
    return t


def replace_at(t, path, new):
    if not path:
        return new
    kids = list(children(t))
    kids[path[0]] = replace_at(kids[path[0]], path[1:], new)
    return rebuild(t, kids)


def variables_in_order(obj):
    """Propositional variables in order of first occurrence, left to right."""
    seen = []
    for t in _terms_of(obj):
        for a in iter_subterms(t):
            if isinstance(a, Var) and a.name not in seen:
                seen.append(a.name)
    return seen


def is_pure(obj):
    return not free_symbols(obj).props


def size(t):
    return sum(1 for _ in iter_subterms(t))


class StrictOrder:
    """A strict partial order on a finite set of names, kept transitively closed."""

    def __init__(self, domain=(), pairs=()):
        self.domain = tuple(domain)
        closed = set(pairs)
        changed = True
        while changed:
            changed = False
            for a, b in list(closed):
                for c, d in list(closed):
                    if b == c and (a, d) not in closed:
                        closed.add((a, d))
                        changed = True
        self.pairs = frozenset(closed)

    @property
    def is_strict(self):
        return all(a != b for a, b in self.pairs)

    def less(self, a, b):
        return (a, b) in self.pairs

    def topological(self, names):
        names = list(names)
        out = []
        while names:
            for n in names:
                if not any(self.less(m, n) for m in names if m != n):
                    out.append(n)
                    names.remove(n)
                    break
            else:
                raise ValueError("order has a cycle")
        return out

    def __eq__(self, other):
        return isinstance(other, StrictOrder) and self.pairs == other.pairs

    def __hash__(self):
        return hash(self.pairs)

    def __str__(self):
        return "{" + ", ".join(f"{a}<{b}" for a, b in sorted(self.pairs)) + "}"

    def __repr__(self):
        return f"StrictOrder({sorted(self.pairs)!r})"


def parse_order(text, domain=()):
    pairs = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        a, sep, b = part.partition("<")
        if not sep or not a.strip() or not b.strip():
            raise ParseError(f"malformed order pair {part!r}")
        pairs.append((a.strip(), b.strip()))
    order = StrictOrder(domain, pairs)
    if not order.is_strict:
        raise ParseError("order is not irreflexive")
    return order
