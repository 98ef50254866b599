"""Signed generation trees, node classes and branch analysis."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .signature import ONE
from .syntax import App, Hole, Join, Meet, Var, children


class NodeClass(str, Enum):
    DELTA = "delta-adjoint"
    SLR = "SLR"
    SRA = "SRA"
    SRR = "SRR"
    LEAF = "leaf"


SKELETON = frozenset({NodeClass.DELTA, NodeClass.SLR})
PIA = frozenset({NodeClass.SRA, NodeClass.SRR})


def flip_sign(sign):
    return "-" if sign == "+" else "+"


def classify_node(sign, term, esig, mode=None):
    """Node classes of the root of ``term`` carrying ``sign``.

    In lattice mode the answer is a singleton.  Distributive mode adds SLR to
    +meet/-join and SRR to +join/-meet.  A self-dual Boolean negation is both
    SLR and SRA under either sign.
    """
    mode = mode or esig.mode
    C = NodeClass
    if isinstance(term, (Join, Meet)):
        upward = (sign == "+") == isinstance(term, Join)
        if upward:
            return frozenset({C.DELTA, C.SRR}) if mode == "distributive" else frozenset({C.DELTA})
        return frozenset({C.SRA, C.SLR}) if mode == "distributive" else frozenset({C.SRA})
    if isinstance(term, App):
        conn = esig[term.op]
        if conn.arity == 0:
            return frozenset({C.LEAF})
        if conn.family == "N":
            return frozenset({C.SLR, C.SRA})
        skeletal = (sign == "+") == (conn.family == "F")
        if skeletal:
            return frozenset({C.SLR})
        return frozenset({C.SRA}) if conn.arity == 1 else frozenset({C.SRR})
    return frozenset({C.LEAF})


@dataclass
class SignedTree:
    sign: str
    term: object
    classes: frozenset
    children: tuple = ()
    path: tuple = ()
    parent: "SignedTree | None" = field(default=None, repr=False, compare=False)

    @property
    def is_leaf(self):
        return not self.children and NodeClass.LEAF in self.classes

    @property
    def skeleton_capable(self):
        return bool(self.classes & SKELETON)

    @property
    def pia_capable(self):
        return bool(self.classes & PIA)

    def ancestors(self):
        node = self.parent
        while node is not None:
            yield node
            node = node.parent

    def nodes(self):
        yield self
        for c in self.children:
            yield from c.nodes()

    def leaves(self):
        return [n for n in self.nodes() if not n.children]

    def label(self):
        t = self.term
        if isinstance(t, App):
            return t.op
        if isinstance(t, Meet):
            return "/\\"
        if isinstance(t, Join):
            return "\\/"
        return str(t)


def child_signs(sign, term, esig):
    if isinstance(term, (Meet, Join)):
        return (sign, sign)
    if isinstance(term, App):
        return tuple(sign if t == ONE else flip_sign(sign) for t in esig[term.op].order_type)
    return ()


def build_signed_tree(term, sign, esig, mode=None, path=(), parent=None):
    node = SignedTree(sign, term, classify_node(sign, term, esig, mode), (), path, parent)
    kids = []
    for i, (c, s) in enumerate(zip(children(term), child_signs(sign, term, esig))):
        kids.append(build_signed_tree(c, s, esig, mode, path + (i,), node))
    node.children = tuple(kids)
    return node


def inequality_trees(ineq, esig, mode=None):
    """The trees of +lhs and -rhs."""
    return (build_signed_tree(ineq.lhs, "+", esig, mode, ("L",)),
            build_signed_tree(ineq.rhs, "-", esig, mode, ("R",)))


def is_critical(leaf, eps):
    t = leaf.term
    if not isinstance(t, Var):
        return False
    e = eps.get(t.name, ONE)
    return (leaf.sign == "+") == (e == ONE)


def is_skeleton_node(node):
    """Skeleton-capable with only skeleton-capable ancestors."""
    if not node.children or not node.skeleton_capable:
        return False
    return all(a.skeleton_capable for a in node.ancestors())


@dataclass
class BranchReport:
    leaf: str
    sign: str
    path: tuple
    critical: bool
    good: bool
    excellent: bool
    skeleton: bool
    definite: bool
    pia_nodes: tuple
    skeleton_nodes: tuple
    witness: str | None = None

    @property
    def split(self):
        """Number of skeleton nodes counted from the root."""
        return len(self.skeleton_nodes)


def analyse_branch(leaf, eps):
    """Split the path above ``leaf`` into a PIA lower part and a skeleton upper part.

    The split is the lowest one keeping every upper node skeleton-capable.
    """
    path = list(leaf.ancestors())
    s = 0
    for k, node in enumerate(path):
        if not node.skeleton_capable:
            s = k + 1
    lower, upper = path[:s], path[s:]
    bad = [n for n in lower if not n.pia_capable]
    good = not bad
    excellent = good and all(NodeClass.SRA in n.classes for n in lower)
    definite = all(NodeClass.SLR in n.classes for n in upper)
    witness = None
    if bad:
        witness = f"skeleton node {bad[0].sign}{bad[0].label()} below PIA node {path[s - 1].sign}{path[s - 1].label()}"
    return BranchReport(
        leaf=str(leaf.term), sign=leaf.sign, path=leaf.path, critical=is_critical(leaf, eps),
        good=good, excellent=excellent, skeleton=good and s == 0, definite=definite,
        pia_nodes=tuple(lower), skeleton_nodes=tuple(upper), witness=witness)


def branch_analysis(tree, eps):
    trees = tree if isinstance(tree, (tuple, list)) else (tree,)
    return [analyse_branch(leaf, eps) for t in trees for leaf in t.leaves()]


def occurrence_signs(ineq, esig):
    """Map each variable to the list of signs of its occurrences in +lhs and -rhs."""
    out = {}
    for t in inequality_trees(ineq, esig):
        for leaf in t.leaves():
            if isinstance(leaf.term, Var):
                out.setdefault(leaf.term.name, []).append(leaf.sign)
    return out


def uniformity(ineq, esig):
    out = {}
    for v, signs in occurrence_signs(ineq, esig).items():
        if all(s == "+" for s in signs):
            out[v] = "1-uniform"
        elif all(s == "-" for s in signs):
            out[v] = "d-uniform"
        else:
            out[v] = "non-uniform"
    return out


def polarity(term, esig, sign="+"):
    """Signs with which each variable and hole occurs in the tree of ``term``."""
    out = {}
    for leaf in build_signed_tree(term, sign, esig, "lattice").leaves():
        if isinstance(leaf.term, (Var, Hole)):
            out.setdefault(leaf.term.name, set()).add(leaf.sign)
    return out


def tree_to_dict(node):
    return {
        "sign": node.sign,
        "label": node.label(),
        "classes": sorted(c.value for c in node.classes),
        "children": [tree_to_dict(c) for c in node.children],
    }


def dump_tree(node, indent=0):
    cls = ",".join(sorted(c.value for c in node.classes))
    lines = ["  " * indent + f"{node.sign}{node.label()}  [{cls}]"]
    for c in node.children:
        lines.append(dump_tree(c, indent + 1))
    return "\n".join(lines)
