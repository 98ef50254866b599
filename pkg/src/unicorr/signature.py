"""Connective declarations, order-types and the residual expansion of a signature."""
from __future__ import annotations

import re
from dataclasses import dataclass, field

ONE = "1"
DUAL = "d"
MODES = ("lattice", "distributive")


class SignatureError(ValueError):
    def __init__(self, message, line=None, col=None):
        where = "" if line is None else f" (line {line}" + ("" if col is None else f", col {col}") + ")"
        super().__init__(message + where)
        self.line = line
        self.col = col


def flip(t):
    return DUAL if t == ONE else ONE


def opposite(order_type):
    return tuple(flip(t) for t in order_type)


@dataclass(frozen=True)
class Connective:
    """A connective symbol.

    ``family`` is ``"F"`` (join-preserving family), ``"G"`` (meet-preserving
    family) or ``"N"`` (self-dual Boolean negation).  Residuals carry the name
    of the connective they come from and the 1-based coordinate.
    """

    name: str
    family: str
    order_type: tuple
    base: str | None = None
    index: int | None = None

    @property
    def arity(self):
        return len(self.order_type)

    @property
    def is_residual(self):
        return self.base is not None

    def declaration(self):
        return f"{self.name}/{self.arity}:({','.join(self.order_type)})"


def residual_name(conn, i):
    return f"{conn.name}#{i}" if conn.family == "F" else f"{conn.name}_b{i}"


def residual(conn, i):
    """The residual of ``conn`` in coordinate ``i`` (1-based).

    Residuals of F-connectives land in the G-family exactly when the
    coordinate has order-type 1; dually for G.  The order-type keeps the
    coordinate's own entry and flips the others only when that entry is 1.
    """
    if conn.family not in ("F", "G"):
        raise SignatureError(f"{conn.name} has no residuals")
    if not 1 <= i <= conn.arity:
        raise SignatureError(f"{conn.name} has no coordinate {i}")
    t = conn.order_type[i - 1]
    if t == ONE:
        family = "G" if conn.family == "F" else "F"
        ot = tuple(ONE if k == i - 1 else flip(x) for k, x in enumerate(conn.order_type))
    else:
        family = conn.family
        ot = conn.order_type
    return Connective(residual_name(conn, i), family, ot, base=conn.name, index=i)


@dataclass(frozen=True)
class Signature:
    connectives: tuple
    mode: str = "lattice"

    def __post_init__(self):
        if self.mode not in MODES:
            raise SignatureError(f"unknown mode {self.mode!r}")
        seen = set()
        for c in self.connectives:
            if c.name in seen:
                raise SignatureError(f"duplicate connective {c.name}")
            if c.family == "N" and c.order_type != (DUAL,):
                raise SignatureError(f"negation {c.name} must have order-type (d)")
            seen.add(c.name)

    @property
    def F(self):
        return tuple(c for c in self.connectives if c.family == "F")

    @property
    def G(self):
        return tuple(c for c in self.connectives if c.family == "G")

    @property
    def negations(self):
        return tuple(c for c in self.connectives if c.family == "N")

    def with_mode(self, mode):
        return Signature(self.connectives, mode)


@dataclass(frozen=True)
class ExpandedSignature:
    """A signature together with one level of residuals for every F/G connective."""

    base: Signature
    table: dict = field(compare=False, hash=False)

    @property
    def mode(self):
        return self.base.mode

    def __getitem__(self, name):
        try:
            return self.table[name]
        except KeyError:
            raise KeyError(f"unknown connective {name!r}") from None

    def __contains__(self, name):
        return name in self.table

    def residuals(self):
        return [c for c in self.table.values() if c.is_residual]

    def family_star(self, family):
        return [c for c in self.table.values() if c.family == family]

    def residual_of(self, name, i):
        return self.table[residual_name(self.table[name], i)]

    def with_mode(self, mode):
        return expand_signature(self.base.with_mode(mode))


def expand_signature(sig):
    table = {c.name: c for c in sig.connectives}
    for c in sig.connectives:
        if c.family == "N":
            continue
        for i in range(1, c.arity + 1):
            r = residual(c, i)
            if r.name in table:
                raise SignatureError(f"residual name {r.name} clashes with a declared connective")
            table[r.name] = r
    return ExpandedSignature(sig, table)


_DECL = re.compile(r"([A-Za-z][A-Za-z0-9_]*)/(\d+):\(([^)]*)\)")


def parse_signature(text):
    """Parse the line-based signature format.

    Lines look like ``F: dia/1:(1) f/2:(1,d)``, ``G: box/1:(1)``,
    ``N: neg/1:(d)`` and ``mode: distributive``; ``#`` starts a comment.
    """
    conns = []
    mode = "lattice"
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, rest = line.partition(":")
        if not sep:
            raise SignatureError("expected 'F:', 'G:', 'N:' or 'mode:'", ln, 1)
        head = head.strip()
        if head == "mode":
            mode = rest.strip()
            if mode not in MODES:
                raise SignatureError(f"unknown mode {mode!r}", ln)
            continue
        if head not in ("F", "G", "N"):
            raise SignatureError(f"unknown family {head!r}", ln, 1)
        pos = len(raw) - len(raw.lstrip()) + len(head) + 2
        for tok in rest.split():
            col = raw.find(tok, pos) + 1
            m = _DECL.fullmatch(tok)
            if not m:
                raise SignatureError(f"malformed declaration {tok!r}", ln, col)
            name, arity, ot = m.group(1), int(m.group(2)), m.group(3)
            entries = tuple(x.strip() for x in ot.split(",")) if ot.strip() else ()
            if any(e not in (ONE, DUAL) for e in entries):
                raise SignatureError(f"order-type entries must be 1 or d in {tok!r}", ln, col)
            if len(entries) != arity:
                raise SignatureError(f"arity {arity} does not match order-type length in {tok!r}", ln, col)
            conns.append(Connective(name, head, entries))
            pos = col + len(tok) - 1
    try:
        return Signature(tuple(conns), mode)
    except SignatureError as e:
        raise SignatureError(str(e)) from None


def serialize_signature(sig):
    lines = []
    for fam in ("F", "G", "N"):
        decls = [c.declaration() for c in sig.connectives if c.family == fam]
        if decls:
            lines.append(f"{fam}: " + " ".join(decls))
    lines.append(f"mode: {sig.mode}")
    return "\n".join(lines) + "\n"


BUILTIN = {
    "modal": "F: dia/1:(1)\nG: box/1:(1)\n",
    "tense": "F: dia/1:(1) diab/1:(1)\nG: box/1:(1) boxb/1:(1)\n",
    "binary": "F: dia/1:(1) f/2:(1,d) fu/2:(1,1)\nG: box/1:(1) g/2:(d,1)\n",
    "biint": "F: dia/1:(1) rtail/2:(d,1)\nG: box/1:(1) imp/2:(d,1)\n",
    "genimp": "G: g/2:(d,1)\nmode: distributive\n",
    "boolean-tense": "F: dia/1:(1) diab/1:(1)\nG: box/1:(1) boxb/1:(1)\nN: neg/1:(d)\nmode: distributive\n",
}


def builtin(name, mode=None):
    sig = parse_signature(BUILTIN[name])
    return expand_signature(sig if mode is None else sig.with_mode(mode))
