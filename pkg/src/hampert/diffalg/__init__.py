"""Exact differential-polynomial algebra on the jet space of one dependent variable."""
from .ops import (euler_operator, evolutionary_apply, is_null_lagrangian, jet_partial,
                  total_derivative, total_derivative_n, u_derivative, u_derivative_n)
from .poly import (CONST, JET, LOG, ONE, SYMBOL, XVAR, ZERO, C, J, Poly, Q, S, U, const_gen,
                   jet_gen, logux, mono_degree, rational, sym, ux, xvar)
from .render import ParseError, parse, render
from .series import (EpsSeries, PoissonOperator, bracket_density, characteristic,
                     evolutionary_apply_series, lie_transform, null_lagrangian_orders,
                     variational_derivative)

# names for the two roles a Poly plays
DiffPoly = Poly
FormalCoefficient = Poly


def u0() -> Poly:
    """The generator u itself."""
    return J(0)


__all__ = [
    "Poly", "DiffPoly", "FormalCoefficient", "EpsSeries", "PoissonOperator", "Q",
    "S", "C", "J", "u0", "ux", "logux", "xvar", "sym", "const_gen", "jet_gen", "rational",
    "total_derivative", "total_derivative_n", "u_derivative", "u_derivative_n",
    "jet_partial", "euler_operator", "is_null_lagrangian", "evolutionary_apply",
    "variational_derivative", "bracket_density", "characteristic",
    "evolutionary_apply_series", "lie_transform", "null_lagrangian_orders",
    "render", "parse", "ParseError", "mono_degree",
    "SYMBOL", "CONST", "LOG", "JET", "XVAR", "U", "ZERO", "ONE",
]
