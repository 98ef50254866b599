"""Correspondence for analytic inductive inequalities by approximation, adjunction and Ackermann steps.

The run works on plain inequalities and quasi-inequalities; every stage is a
deterministic function of its input and the certificate, so a recorded trace
can be replayed step by step.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .adjoints import is_ssc, is_sso, la, ra
from .classify import (Certificate, decompose_analytic, is_analytic, normalize_eps,
                       search_classification)
from .gentree import NodeClass, build_signed_tree, is_critical, is_skeleton_node, uniformity
from .signature import DUAL, ONE
from .syntax import (App, BOT, TOP, Conom, Hole, Inequality, Join, Meet, Nom, Quasi, StrictOrder,
                     U, Var, big_join, big_meet, children, parse_inequality, parse_quasi, rebuild,
                     replace_at, substitute, variables_in_order)


class AlbaRejected(ValueError):
    def __init__(self, certificate):
        super().__init__(f"input is not analytic inductive: {certificate.witness}")
        self.certificate = certificate


@dataclass
class TraceStep:
    rule: str
    before: str
    after: str
    params: dict = field(default_factory=dict)

    def to_dict(self):
        return {"rule": self.rule, "before": self.before, "after": self.after, "params": self.params}


@dataclass
class AlbaResult:
    source: Inequality
    certificate: Certificate
    definite: list
    quasis: list
    mv: list
    trace: list

    def to_dict(self):
        return {
            "source": str(self.source),
            "certificate": self.certificate.to_dict(),
            "definite": [str(d) for d in self.definite],
            "quasis": [str(q) for q in self.quasis],
            "mv": [{v: [str(t) for t in ts] for v, ts in m.items()} for m in self.mv],
            "trace": [s.to_dict() for s in self.trace],
        }


def _text(obj):
    if isinstance(obj, list):
        return " ; ".join(str(o) for o in obj)
    return str(obj)


# stage 1: preprocessing

def eliminate_uniform(ineq, esig):
    """Replace 1-uniform variables by top and d-uniform ones by bottom, until none remain."""
    subst = {}
    while True:
        uni = {v: k for v, k in uniformity(ineq, esig).items() if k != "non-uniform"}
        if not uni:
            return ineq, subst
        step = {v: (TOP if k == "1-uniform" else BOT) for v, k in uni.items()}
        subst.update(step)
        ineq = substitute(ineq, step)


def _sides(ineq, esig):
    return (build_signed_tree(ineq.lhs, "+", esig, "lattice", ("L",)),
            build_signed_tree(ineq.rhs, "-", esig, "lattice", ("R",)))


def _rewrite_node(node, new_class):
    """Push a lattice child of ``node.term`` above it; the new root is meet or join."""
    t = node.term
    for i, c in enumerate(node.children):
        if c.term.__class__ in (Meet, Join) and c.classes & new_class:
            parts = []
            for half in (c.term.left, c.term.right):
                args = list(t.args)
                args[i] = half
                parts.append(App(t.op, tuple(args)))
            upward = isinstance(c.term, Join) == (c.sign == "+")
            # the result keeps the child's class under the parent's sign
            if node.sign == "+":
                return (Join if upward else Meet)(*parts)
            return (Meet if upward else Join)(*parts)
    return None


def _first_redex(tree, pick):
    for c in tree.children:
        r = _first_redex(c, pick)
        if r is not None:
            return r
    return tree if pick(tree) else None


def _apply_first(ineq, esig, pick, new_class):
    for tree in _sides(ineq, esig):
        node = _first_redex(tree, pick)
        if node is not None:
            new = _rewrite_node(node, new_class)
            side, path = tree.path[0], node.path[1:]
            if side == "L":
                return Inequality(replace_at(ineq.lhs, path, new), ineq.rhs)
            return Inequality(ineq.lhs, replace_at(ineq.rhs, path, new))
    return None


def _skeleton_redex(node):
    return (isinstance(node.term, App) and NodeClass.SLR in node.classes and is_skeleton_node(node)
            and any(isinstance(c.term, (Meet, Join)) and NodeClass.DELTA in c.classes
                    for c in node.children))


def _pia_redex(node):
    return (isinstance(node.term, App) and node.classes & {NodeClass.SRA, NodeClass.SRR}
            and any(isinstance(c.term, (Meet, Join)) and NodeClass.SRA in c.classes
                    for c in node.children))


def distribute_skeleton_step(ineq, esig):
    """One leftmost-innermost step moving a delta-adjoint above a skeleton connective."""
    return _apply_first(ineq, esig, _skeleton_redex, {NodeClass.DELTA})


def distribute_pia_step(ineq, esig):
    """One leftmost-innermost step moving +meet / -join above a PIA connective."""
    return _apply_first(ineq, esig, _pia_redex, {NodeClass.SRA})


def split_root(ineq):
    if isinstance(ineq.lhs, Join):
        return split_root(Inequality(ineq.lhs.left, ineq.rhs)) + split_root(Inequality(ineq.lhs.right, ineq.rhs))
    if isinstance(ineq.rhs, Meet):
        return split_root(Inequality(ineq.lhs, ineq.rhs.left)) + split_root(Inequality(ineq.lhs, ineq.rhs.right))
    return [ineq]


def preprocess(ineq, esig, trace=None):
    """Distribute skeleton, split, then distribute inside PIA parts; returns definite inequalities."""
    trace = trace if trace is not None else []
    while True:
        nxt = distribute_skeleton_step(ineq, esig)
        if nxt is None:
            break
        trace.append(TraceStep("distribute-skeleton", str(ineq), str(nxt)))
        ineq = nxt
    pieces = split_root(ineq)
    trace.append(TraceStep("split", str(ineq), _text(pieces)))
    out = []
    for piece in pieces:
        while True:
            nxt = distribute_pia_step(piece, esig)
            if nxt is None:
                break
            trace.append(TraceStep("distribute-pia", str(piece), str(nxt)))
            piece = nxt
        out.extend(split_root(piece))
    return out


# stage 1: the initial quasi-inequality

def initial_quasi(ineq, eps, esig):
    """Approximate every maximal PIA part by a fresh nominal (positive) or conominal (negative)."""
    dec = decompose_analytic(ineq, eps, esig, "lattice")
    parts = sorted(dec.parts(), key=lambda p: (p.path[0] != "L", p.path[1:]))
    ants, binding = [], {}
    nj = nm = 0
    for p in parts:
        if p.sign == "+":
            nj += 1
            sym = Nom(f"j{nj}")
            ants.append(Inequality(sym, p.term))
        else:
            nm += 1
            sym = Conom(f"m{nm}")
            ants.append(Inequality(p.term, sym))
        binding[Hole(p.hole)] = sym
    return Quasi(tuple(ants), substitute(dec.skeleton, binding))


def _orientation(ant):
    if isinstance(ant.lhs, Nom):
        return "+", ant.rhs
    if isinstance(ant.rhs, Conom):
        return "-", ant.lhs
    return None, None


def critical_variable(ant, eps, esig):
    sign, term = _orientation(ant)
    if sign is None:
        return None
    tree = build_signed_tree(term, sign, esig, "lattice")
    crit = [l.term.name for l in tree.leaves() if is_critical(l, eps)]
    if len(crit) > 1:
        raise ValueError(f"{ant} has {len(crit)} critical occurrences")
    return crit[0] if crit else None


def normalize_critical(quasi, eps, esig):
    """Split top meets of lower approximations and top joins of upper ones."""
    out = []
    for ant in quasi.antecedents:
        out.extend(_split_antecedent(ant))
    for ant in out:
        critical_variable(ant, eps, esig)
    return Quasi(tuple(out), quasi.consequent)


def _split_antecedent(ant):
    if isinstance(ant.rhs, Meet):
        return _split_antecedent(Inequality(ant.lhs, ant.rhs.left)) + _split_antecedent(Inequality(ant.lhs, ant.rhs.right))
    if isinstance(ant.lhs, Join):
        return _split_antecedent(Inequality(ant.lhs.left, ant.rhs)) + _split_antecedent(Inequality(ant.lhs.right, ant.rhs))
    return [ant]


# stage 2

def residuate(quasi, eps, esig):
    """Solve every approximation containing a critical occurrence for its variable."""
    out = []
    for ant in quasi.antecedents:
        v = critical_variable(ant, eps, esig)
        if v is None:
            out.append(ant)
            continue
        sign, term = _orientation(ant)
        sym = ant.lhs if sign == "+" else ant.rhs
        adj = la(term, v, esig) if sign == "+" else ra(term, v, esig)
        bound = substitute(adj, {U: sym})
        out.append(Inequality(bound, Var(v)) if eps.get(v, ONE) == ONE else Inequality(Var(v), bound))
    return Quasi(tuple(out), quasi.consequent)


def bubble(t, esig):
    """Move meets and joins above connectives wherever the connective distributes over them."""
    t = rebuild(t, [bubble(c, esig) for c in children(t)])
    if not isinstance(t, App) or esig[t.op].family not in ("F", "G"):
        return t
    conn = esig[t.op]
    for i, (a, ot) in enumerate(zip(t.args, conn.order_type)):
        if not isinstance(a, (Meet, Join)):
            continue
        if conn.family == "F":
            ok = isinstance(a, Join) == (ot == ONE)
            out_cls = Join
        else:
            ok = isinstance(a, Meet) == (ot == ONE)
            out_cls = Meet
        if ok:
            halves = []
            for h in (a.left, a.right):
                args = list(t.args)
                args[i] = h
                halves.append(bubble(App(t.op, tuple(args)), esig))
            return out_cls(*halves)
    return t


def bounds_for(quasi, v, eps):
    """Indices of the solved bounds of ``v`` (lower bounds if eps(v)=1, upper otherwise)."""
    var = Var(v)
    out = []
    for k, ant in enumerate(quasi.antecedents):
        if eps.get(v, ONE) == ONE and ant.rhs == var and v not in variables_in_order(ant.lhs):
            out.append(k)
        elif eps.get(v, ONE) == DUAL and ant.lhs == var and v not in variables_in_order(ant.rhs):
            out.append(k)
    return out


def compute_mv(quasi, v, eps, esig):
    """Minimal valuation terms for ``v``: its solved bounds with inner joins/meets distributed."""
    terms = []
    for k in bounds_for(quasi, v, eps):
        ant = quasi.antecedents[k]
        if eps.get(v, ONE) == ONE:
            for piece in _split_antecedent(Inequality(bubble(ant.lhs, esig), ant.rhs)):
                terms.append(piece.lhs)
        else:
            for piece in _split_antecedent(Inequality(ant.lhs, bubble(ant.rhs, esig))):
                terms.append(piece.rhs)
    return terms


def ackermann(quasi, v, eps, esig):
    """Drop the bounds of ``v`` and substitute their join (meet, for eps(v)=d) everywhere else.

    A variable left without bounds by splitting gets the empty join or meet.
    """
    idx = bounds_for(quasi, v, eps)
    mv = compute_mv(quasi, v, eps, esig)
    value = big_join(mv) if eps.get(v, ONE) == ONE else big_meet(mv)
    rest = [a for k, a in enumerate(quasi.antecedents) if k not in idx]
    out = Quasi(tuple(substitute(a, {v: value}) for a in rest), quasi.consequent)
    if v in variables_in_order(out):
        raise ValueError(f"{v} survives elimination")
    return out, mv


def final_split(quasi, esig):
    """Distribute the substituted joins and meets to the top of each side and split."""
    out = []
    for ant in quasi.antecedents:
        out.extend(_split_antecedent(Inequality(bubble(ant.lhs, esig), bubble(ant.rhs, esig))))
    seen, uniq = set(), []
    for a in out:
        if a not in seen:
            seen.add(a)
            uniq.append(a)
    return Quasi(tuple(uniq), quasi.consequent)


def validate_output_shape(quasi, esig):
    """Every antecedent has a strictly closed left side and a strictly open right side."""
    return all(is_ssc(a.lhs, esig) and is_sso(a.rhs, esig) for a in quasi.antecedents)


# driver

def certify(ineq, esig, eps=None, omega=None):
    vs = variables_in_order(ineq)
    if eps is None:
        cert = search_classification(ineq, esig, "lattice")
        if not cert.verdict.startswith("analytic"):
            raise AlbaRejected(cert)
        return cert
    eps = normalize_eps(eps, vs)
    if omega is None:
        from .classify import analyse
        omega = StrictOrder(vs, analyse(ineq, esig, eps, "lattice").required)
    cert = is_analytic(ineq, eps, omega, esig, "lattice")
    if not cert.accepted:
        raise AlbaRejected(cert)
    return cert


def run_alba(ineq, esig, eps=None, omega=None):
    """Pure quasi-inequalities whose conjunction is equivalent to ``ineq`` on perfect algebras."""
    cert = certify(ineq, esig, eps, omega)
    eps, omega = dict(cert.epsilon), cert.omega
    params = {"eps": eps, "omega": sorted(list(p) for p in omega.pairs)}
    trace = []
    ineq1, subst = eliminate_uniform(ineq, esig)
    trace.append(TraceStep("eliminate-uniform", str(ineq), str(ineq1)))
    definite = preprocess(ineq1, esig, trace)
    quasis, mvs = [], []
    for d in definite:
        q = initial_quasi(d, eps, esig)
        trace.append(TraceStep("approximate", str(d), str(q), params))
        q2 = normalize_critical(q, eps, esig)
        trace.append(TraceStep("normalize", str(q), str(q2), params))
        q3 = residuate(q2, eps, esig)
        trace.append(TraceStep("residuate", str(q2), str(q3), params))
        mv = {}
        live = [v for v in variables_in_order(q3)]
        for v in omega.topological(live):
            q4, mv[v] = ackermann(q3, v, eps, esig)
            trace.append(TraceStep("ackermann", str(q3), str(q4), dict(params, var=v)))
            q3 = q4
        q5 = final_split(q3, esig)
        trace.append(TraceStep("final-split", str(q3), str(q5)))
        quasis.append(q5)
        mvs.append(mv)
    return AlbaResult(ineq, cert, definite, quasis, mvs, trace)


def replay(trace, esig):
    """Re-run every recorded step on its recorded input; returns the index of the first mismatch or None."""
    for k, step in enumerate(trace):
        eps = step.params.get("eps", {})
        if step.rule == "eliminate-uniform":
            got = str(eliminate_uniform(parse_inequality(step.before, esig), esig)[0])
        elif step.rule == "distribute-skeleton":
            got = str(distribute_skeleton_step(parse_inequality(step.before, esig), esig))
        elif step.rule == "distribute-pia":
            got = str(distribute_pia_step(parse_inequality(step.before, esig), esig))
        elif step.rule == "split":
            got = _text(split_root(parse_inequality(step.before, esig)))
        elif step.rule == "approximate":
            got = str(initial_quasi(parse_inequality(step.before, esig), eps, esig))
        elif step.rule == "normalize":
            got = str(normalize_critical(parse_quasi(step.before, esig), eps, esig))
        elif step.rule == "residuate":
            got = str(residuate(parse_quasi(step.before, esig), eps, esig))
        elif step.rule == "ackermann":
            got = str(ackermann(parse_quasi(step.before, esig), step.params["var"], eps, esig)[0])
        elif step.rule == "final-split":
            got = str(final_split(parse_quasi(step.before, esig), esig))
        else:
            return k
        if got != step.after:
            return k
    return None
