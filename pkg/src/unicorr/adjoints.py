"""Adjoint maps of definite PIA terms and the (strictly) closed/open shape predicates."""
from __future__ import annotations

from .signature import ONE
from .syntax import (App, Bot, Conom, Hole, Join, Meet, Nom, Top, U, Var, positions,
                     substitute)


class AdjointError(ValueError):
    pass


def _locate(term, x):
    x = Var(x) if isinstance(x, str) else x
    occ = positions(term, x)
    if len(occ) != 1:
        raise AdjointError(f"{x} must occur exactly once, found {len(occ)}")
    return x


def _step(term, x, esig, family):
    """Head connective, coordinate holding ``x`` and the residual applied to u."""
    if not isinstance(term, App) or esig[term.op].family != family or esig[term.op].is_residual:
        kind = "positive" if family == "G" else "negative"
        raise AdjointError(f"{term} is not a definite {kind} PIA term")
    conn = esig[term.op]
    j = next(i for i, a in enumerate(term.args) if positions(a, x))
    args = list(term.args)
    child = args[j]
    args[j] = U
    res = App(esig.residual_of(term.op, j + 1).name, tuple(args))
    return conn.order_type[j], child, res


def la(phi, x, esig):
    """Left adjoint of a definite positive PIA term in its unique occurrence of ``x``.

    The result is a term in the hole ``u`` and the remaining symbols of ``phi``.
    """
    x = _locate(phi, x)
    return _la(phi, x, esig)


def ra(psi, x, esig):
    """Right adjoint of a definite negative PIA term in its unique occurrence of ``x``."""
    x = _locate(psi, x)
    return _ra(psi, x, esig)


def _la(phi, x, esig):
    if phi == x:
        return U
    t, child, res = _step(phi, x, esig, "G")
    inner = _la(child, x, esig) if t == ONE else _ra(child, x, esig)
    return substitute(inner, {U: res})


def _ra(psi, x, esig):
    if psi == x:
        return U
    t, child, res = _step(psi, x, esig, "F")
    inner = _ra(child, x, esig) if t == ONE else _la(child, x, esig)
    return substitute(inner, {U: res})


def x_sign(phi, x, esig, sign="+"):
    """Sign of the unique occurrence of ``x`` in the signed tree of ``phi``."""
    from .gentree import polarity
    signs = polarity(phi, esig, sign).get(x.name if isinstance(x, Var) else x, set())
    if len(signs) != 1:
        raise AdjointError(f"{x} has no unique polarity")
    return next(iter(signs))


def _shape(t, esig, want_closed, strict):
    if isinstance(t, (Var, Top, Bot, Hole)):
        return True
    if isinstance(t, Nom):
        return want_closed
    if isinstance(t, Conom):
        return not want_closed
    if isinstance(t, (Meet, Join)):
        return _shape(t.left, esig, want_closed, strict) and _shape(t.right, esig, want_closed, strict)
    if isinstance(t, App):
        conn = esig[t.op]
        own = "F" if want_closed else "G"
        if conn.family == own:
            pass
        elif not strict and not conn.is_residual and conn.family in ("F", "G"):
            pass
        else:
            return False
        return all(_shape(a, esig, want_closed if o == ONE else not want_closed, strict)
                   for a, o in zip(t.args, conn.order_type))
    return False


def is_sc(t, esig):
    """Syntactically closed: F*-heads anywhere, base G-heads allowed too."""
    return _shape(t, esig, True, False)


def is_so(t, esig):
    return _shape(t, esig, False, False)


def is_ssc(t, esig):
    """Syntactically strictly closed: only F*-heads."""
    return _shape(t, esig, True, True)


def is_sso(t, esig):
    return _shape(t, esig, False, True)
