"""Numerical evaluation of differential polynomials and characteristic jets."""
import numpy as np
import pytest
import sympy as sp

from hampert.diffalg import C, J, Poly, S, logux, ux, xvar
from hampert.numeric import PolyEvaluator, characteristic_jets


def test_polynomial_evaluation():
    p = S("c") * ux(-2) * J(3) + C("k") * logux() + xvar() * J(0)
    ev = PolyEvaluator(p, {"c": "1 + u^2"}, {"k": 0.5})
    u, ux_, uxx, uxxx = 0.3, 2.0, -1.0, 4.0
    got = ev([u, ux_, uxx, uxxx], x=1.5)
    expected = (1 + u**2) * uxxx / ux_**2 + 0.5 * np.log(ux_) + 1.5 * u
    assert got == pytest.approx(expected, rel=1e-15)
    assert ev.max_order == 3


def test_symbol_derivatives_are_symbolic():
    ev = PolyEvaluator(S("c", 2) * ux(), {"c": "sin(u)"})
    assert ev([0.7, 1.0, 0.0]) == pytest.approx(-np.sin(0.7), rel=1e-15)


def test_missing_values_raise():
    with pytest.raises(KeyError):
        PolyEvaluator(S("c"))([np.zeros(2)])
    with pytest.raises(ValueError):
        PolyEvaluator(J(3))([np.zeros(2)])
    with pytest.raises(ValueError):
        PolyEvaluator(xvar())([np.zeros(2)])


@pytest.mark.parametrize("a,b", [("u", "-u-u^3"), ("u + u^2/5", "-u-u^3+u^4/4")])
def test_characteristic_jets_against_sympy(a, b):
    # oracle: implicit differentiation of x = a(v) t + b(v)
    x, t = sp.symbols("x t")
    V = sp.Function("v")(x)
    A = sp.sympify(a.replace("^", "**"), locals={"u": V})
    B = sp.sympify(b.replace("^", "**"), locals={"u": V})
    F = A * t + B - x
    ders = [sp.Symbol(f"d{n}") for n in range(1, 6)]
    subs = {}
    for n in range(1, 6):
        eq = sp.diff(F, x, n).subs({sp.Derivative(V, (x, k)): ders[k - 1] for k in range(n, 0, -1)})
        sol = sp.solve(eq.subs(subs), ders[n - 1])[0]
        subs[ders[n - 1]] = sol
    tv = 0.4
    for v0 in (-0.6, 0.1, 0.5):
        jets = characteristic_jets(a, b, np.array([v0]), tv, 5)
        vals = {V: v0, t: tv}
        for n in range(1, 6):
            ref = float(subs[ders[n - 1]].subs(vals))
            assert float(jets[n][0]) == pytest.approx(ref, rel=1e-12)


def test_characteristic_jets_singular():
    with pytest.raises(ZeroDivisionError):
        characteristic_jets("u", "-u-u^3", np.array([0.0]), 1.0, 3)
