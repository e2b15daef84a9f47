"""Total derivative, u-derivation, Euler-Lagrange operator and prolongations."""
from __future__ import annotations

from functools import lru_cache

from .poly import (CONST, JET, LOG, LOG_GEN, SYMBOL, U, XVAR, Poly, Q, jet_gen,
                   mono_mul, sym)


@lru_cache(maxsize=None)
def _dx_ratio(g):
    kind, name, order = g
    if kind == SYMBOL:
        # D_x S^(j) = S^(j+1) u_x
        m = mono_mul(((g, -1),), tuple(sorted([(sym(name, order + 1), 1), (jet_gen(1), 1)])))
        return ((m, Q(1)),)
    if kind == JET:
        m = mono_mul(((g, -1),), ((jet_gen(order + 1, name), 1),))
        return ((m, Q(1)),)
    if kind == LOG:
        # D_x log u_x = u_xx / u_x
        m = tuple(sorted([(LOG_GEN, -1), (jet_gen(2), 1), (jet_gen(1), -1)]))
        return ((m, Q(1)),)
    if kind == XVAR:
        return ((((g, -1),), Q(1)),)
    return None


@lru_cache(maxsize=None)
def _du_ratio(g):
    kind, name, order = g
    if kind == SYMBOL:
        m = tuple(sorted([(g, -1), (sym(name, order + 1), 1)]))
        return ((m, Q(1)),)
    if kind == JET and name == U and order == 0:
        return ((((g, -1),), Q(1)),)
    return None


@lru_cache(maxsize=None)
def _symbol_ratio(g):
    kind, name, order = g
    if kind == SYMBOL:
        m = tuple(sorted([(g, -1), (sym(name, order + 1), 1)]))
        return ((m, Q(1)),)
    return None


def total_derivative(p: Poly) -> Poly:
    """D_x: chain rule through symbols and log u_x, shift on jets, D_x x = 1."""
    return p.derive(_dx_ratio)


def total_derivative_n(p: Poly, n: int) -> Poly:
    for _ in range(n):
        p = total_derivative(p)
    return p


def u_derivative(p: Poly) -> Poly:
    """d/du acting on coefficient expressions: S^(j) -> S^(j+1), u -> 1.

    Jets, log u_x, constants and x are held fixed, so on a full DiffPoly this
    is the partial derivative with respect to u^(0).
    """
    return p.derive(_du_ratio)


def u_derivative_n(p: Poly, n: int) -> Poly:
    for _ in range(n):
        p = u_derivative(p)
    return p


def jet_partial(p: Poly, n: int, var: str = U) -> Poly:
    """Partial derivative with respect to v^(n), all other jets held fixed.

    For ``var == 'u'``: n = 0 differentiates through u and every function
    symbol; n = 1 includes the log u_x contribution 1/u_x.
    """
    g = jet_gen(n, var)
    if var == U and n == 0:
        return u_derivative(p)
    if var == U and n == 1:
        r_jet = (((g, -1),), Q(1)),
        r_log = (((LOG_GEN, -1), (g, -1)), Q(1)),

        def ratio(h):
            if h == g:
                return r_jet
            if h == LOG_GEN:
                return r_log
            return None
        return p.derive(ratio)
    return p.diff(g)


def euler_operator(p: Poly, var: str = U) -> Poly:
    """E = sum_n (-D_x)^n d/dv^(n), evaluated by Horner's scheme."""
    top = p.jet_order(var)
    if top < 0:
        return Poly()
    acc = jet_partial(p, top, var)
    for n in range(top - 1, -1, -1):
        acc = jet_partial(p, n, var) - total_derivative(acc)
    return acc


def is_null_lagrangian(p: Poly, var: str = U) -> bool:
    """True iff p = const + D_x(h) for some h, decided by E(p) == 0."""
    return euler_operator(p, var).is_zero()


def evolutionary_apply(P: Poly, h: Poly, var: str = U) -> Poly:
    """Prolongation of the evolutionary field with characteristic P applied to h.

    sum_n (dh/dv^(n)) * D_x^n P; for var u the n = 0 term differentiates
    through the function symbols as well.
    """
    top = h.jet_order(var)
    out = Poly()
    DP = P
    for n in range(top + 1):
        if n:
            DP = total_derivative(DP)
        part = jet_partial(h, n, var)
        if part:
            out = out + part * DP
    return out
