"""Numerical evaluation of exact differential polynomials and jets of characteristic solutions."""
from __future__ import annotations

from math import factorial

import numpy as np

from . import exprfn
from .diffalg import CONST, JET, LOG, SYMBOL, XVAR, Poly


class PolyEvaluator:
    """Compiles a Poly into a numpy evaluator.

    ``functions`` maps symbol names to Exprs in u (their u-derivatives are
    taken symbolically); ``constants`` maps CONST names to floats.
    """

    def __init__(self, poly: Poly, functions: dict | None = None, constants: dict | None = None,
                 var: str = "u"):
        self.poly = poly
        self.var = var
        self.functions = {k: exprfn.coerce(v) for k, v in (functions or {}).items()}
        self.constants = dict(constants or {})
        self._derivs: dict[tuple[str, int], exprfn.Expr] = {}
        orders = [g[2] for m, _ in poly for g, _ in m if g[0] == JET and g[1] == var]
        self.max_order = max(orders, default=0)

    def _sym(self, name, order):
        key = (name, order)
        if key not in self._derivs:
            if name not in self.functions:
                raise KeyError(f"no value supplied for function symbol {name!r}")
            e = self.functions[name]
            self._derivs[key] = exprfn.derivative(e, order) if order else e
        return self._derivs[key]

    def __call__(self, jets, x=None):
        """``jets[n]`` is the n-th x-derivative of the field (arrays of one shape)."""
        if len(jets) <= self.max_order:
            raise ValueError(f"need jets up to order {self.max_order}")
        u = np.asarray(jets[0], dtype=float)
        cache: dict = {}

        def gen_value(g):
            if g in cache:
                return cache[g]
            kind, name, order = g
            if kind == JET:
                if name != self.var:
                    raise KeyError(f"unknown dependent variable {name!r}")
                val = np.asarray(jets[order], dtype=float)
            elif kind == SYMBOL:
                val = exprfn.evaluate(self._sym(name, order), u)
            elif kind == CONST:
                if name not in self.constants:
                    raise KeyError(f"no value supplied for constant {name!r}")
                val = float(self.constants[name])
            elif kind == LOG:
                val = np.log(np.asarray(jets[1], dtype=float))
            elif kind == XVAR:
                if x is None:
                    raise ValueError("the polynomial depends on x; pass x")
                val = np.asarray(x, dtype=float)
            else:  # pragma: no cover
                raise ValueError(f"unknown generator kind {kind}")
            cache[g] = val
            return val

        out = np.zeros_like(u)
        for mono, coeff in self.poly:
            term = float(coeff)
            for g, e in mono:
                v = gen_value(g)
                term = term * (v ** e if e > 0 else 1.0 / v ** (-e))
            out = out + term
        return out


def evaluate_poly(poly: Poly, jets, functions=None, constants=None, x=None):
    return PolyEvaluator(poly, functions, constants)(jets, x)


def characteristic_jets(a, b, v, t: float, order: int):
    """x-derivatives 0..order of the solution v(x, t) of x = a(v) t + b(v) at the points v.

    Inverts the Taylor series of phi(v) = a(v) t + b(v) about each point, so
    the jets are exact up to rounding.
    """
    a, b = exprfn.coerce(a), exprfn.coerce(b)
    v = np.asarray(v, dtype=float)
    shape = v.shape
    v = v.ravel()
    # phi_k = phi^(k)(v)/k!, k = 1..order
    phi = np.empty((order + 1, v.size))
    phi[0] = 0.0
    for k in range(1, order + 1):
        dk = exprfn.evaluate(exprfn.derivative(a, k), v) * t + exprfn.evaluate(exprfn.derivative(b, k), v)
        phi[k] = dk / factorial(k)
    if np.any(phi[1] == 0):
        raise ZeroDivisionError("phi'(v) = 0: the characteristic map is singular (catastrophe)")
    # series reversion: d = sum_n d_n X^n with phi(v + d) - phi(v) = X
    d = np.zeros((order + 1, v.size))
    for _ in range(order):
        # powers of d truncated at X^order
        acc = np.zeros_like(d)
        power = d.copy()
        for k in range(2, order + 1):
            power = _series_mul(power, d, order)
            acc += phi[k] * power
        rhs = -acc
        rhs[1] += 1.0
        d = rhs / phi[1]
    jets = [v.reshape(shape)]
    for n in range(1, order + 1):
        jets.append((d[n] * factorial(n)).reshape(shape))
    return jets


def _series_mul(p, q, order):
    out = np.zeros_like(p)
    for i in range(order + 1):
        if not np.any(p[i]):
            continue
        for j in range(order + 1 - i):
            out[i + j] += p[i] * q[j]
    return out
