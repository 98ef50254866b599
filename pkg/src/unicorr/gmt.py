"""Translation of DLE-inequalities into a Boolean signature with adjoint modalities."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .classify import Certificate, analyse, is_analytic, normalize_eps
from .gentree import inequality_trees, is_critical, is_skeleton_node
from .signature import DUAL, ONE, Connective, Signature, expand_signature
from .syntax import (App, Bot, Inequality, Join, Meet, StrictOrder, Top, Var,
                     variables_in_order)

DIA_GE = "dia_ge"
BOX_LE = "box_le"
NEG = "neg"


def target_name(name):
    return f"{name}_o"


def target_signature(esig):
    """F: dia_ge and every f_o; G: box_le and every g_o; all coordinates monotone; plus negation."""
    conns = [Connective(DIA_GE, "F", (ONE,)), Connective(BOX_LE, "G", (ONE,)), Connective(NEG, "N", (DUAL,))]
    for c in esig.base.connectives:
        if c.family in ("F", "G"):
            conns.append(Connective(target_name(c.name), c.family, (ONE,) * c.arity))
    taken = {c.name for c in conns}
    if len(taken) != len(conns):
        raise ValueError("target connective names clash")
    return expand_signature(Signature(tuple(conns), "distributive"))


def translate(t, eps, esig):
    """Variables go to box_le p (eps 1) or dia_ge p (eps d); f(..) to dia_ge f_o(..), g(..) to box_le g_o(..),
    with d-coordinates wrapped in negation; lattice operations and constants are kept."""
    if isinstance(t, Var):
        return App(BOX_LE if eps.get(t.name, ONE) == ONE else DIA_GE, (t,))
    if isinstance(t, (Top, Bot)):
        return t
    if isinstance(t, Meet):
        return Meet(translate(t.left, eps, esig), translate(t.right, eps, esig))
    if isinstance(t, Join):
        return Join(translate(t.left, eps, esig), translate(t.right, eps, esig))
    if isinstance(t, App):
        conn = esig[t.op]
        if conn.is_residual or conn.family not in ("F", "G"):
            raise ValueError(f"cannot translate {t.op}")
        args = tuple(translate(a, eps, esig) if o == ONE else App(NEG, (translate(a, eps, esig),))
                     for a, o in zip(t.args, conn.order_type))
        inner = App(target_name(t.op), args)
        return App(DIA_GE if conn.family == "F" else BOX_LE, (inner,))
    raise ValueError(f"cannot translate {t!r}")


def translate_inequality(ineq, eps, esig):
    eps = normalize_eps(eps, variables_in_order(ineq))
    return Inequality(translate(ineq.lhs, eps, esig), translate(ineq.rhs, eps, esig))


def is_transferable(ineq, eps, esig, mode=None):
    """Every maximal PIA subterm free of critical occurrences is variable-free or a bare variable
    hanging directly off the skeleton.  Returns (ok, offending subterm or None)."""
    eps = normalize_eps(eps, variables_in_order(ineq))
    for tree in inequality_trees(ineq, esig, mode):
        for leaf in tree.leaves():
            if not isinstance(leaf.term, Var) or is_critical(leaf, eps):
                continue
            parent = leaf.parent
            if parent is None or is_skeleton_node(parent):
                continue
            top = leaf
            while top.parent is not None and not is_skeleton_node(top.parent) and \
                    not any(is_critical(l, eps) for l in top.parent.leaves()):
                top = top.parent
            return False, str(top.term)
    return True, None


@dataclass
class TransferReport:
    source: Inequality
    source_certificate: Certificate
    image: Inequality
    image_certificate: Certificate
    critical_preserved: bool

    @property
    def ok(self):
        return self.image_certificate.verdict.startswith("analytic") and self.critical_preserved

    def to_dict(self):
        return {"source": str(self.source), "source_certificate": self.source_certificate.to_dict(),
                "image": str(self.image), "image_certificate": self.image_certificate.to_dict(),
                "critical_preserved": self.critical_preserved}


def find_transferable(ineq, esig, mode=None):
    """Lexicographically least eps making ``ineq`` analytic inductive and transferable."""
    vs = variables_in_order(ineq)
    for combo in itertools.product((ONE, DUAL), repeat=len(vs)):
        eps = dict(zip(vs, combo))
        a = analyse(ineq, esig, eps, mode)
        omega = StrictOrder(vs, a.required)
        if not omega.is_strict:
            continue
        cert = is_analytic(ineq, eps, omega, esig, mode)
        if cert.accepted and is_transferable(ineq, eps, esig, mode)[0]:
            return cert
    return None


def transfer_pipeline(ineq, esig, eps=None, mode=None):
    """Certify the source, translate it and certify the image with the same eps and Omega."""
    mode = mode or esig.mode
    if eps is None:
        cert = find_transferable(ineq, esig, mode)
        if cert is None:
            raise ValueError("no order-type makes the inequality transferable analytic inductive")
    else:
        vs = variables_in_order(ineq)
        eps = normalize_eps(eps, vs)
        cert = is_analytic(ineq, eps, StrictOrder(vs, analyse(ineq, esig, eps, mode).required), esig, mode)
        if not cert.accepted:
            raise ValueError(f"source is not analytic inductive: {cert.witness}")
        ok, bad = is_transferable(ineq, eps, esig, mode)
        if not ok:
            raise ValueError(f"source is not transferable: {bad}")
    tsig = target_signature(esig)
    image = translate_inequality(ineq, cert.epsilon, esig)
    image_cert = is_analytic(image, cert.epsilon, cert.omega, tsig, "distributive")
    src_crit = _critical_count(ineq, cert.epsilon, esig, mode)
    img_crit = _critical_count(image, cert.epsilon, tsig, "distributive")
    img_good = all(r.good for r in analyse(image, tsig, cert.epsilon, "distributive").branches if r.critical)
    return TransferReport(ineq, cert, image, image_cert, src_crit == img_crit and img_good)


def _critical_count(ineq, eps, esig, mode):
    return sum(is_critical(l, eps) for t in inequality_trees(ineq, esig, mode) for l in t.leaves())
