"""Builders turning the transcription tables into diffalg objects."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .. import exprfn
from ..diffalg import C, EpsSeries, J, Poly, PoissonOperator, S, u_derivative
from . import tables
from .transcribe import Literals, Mutation, compile_formula

MAX_ORDER = 4
S_CHOICES = ("zero", "free", "theorem2")

ParamLike = None | str | int | Fraction | Poly | exprfn.Expr


def coefficient(value: ParamLike, name: str) -> Poly:
    """A function parameter as a Poly in u and formal symbols.

    None means a formal symbol called ``name``; strings and Exprs must be
    polynomial in u (exact algebra has no transcendental functions).
    """
    if value is None:
        return S(name, 0)
    if isinstance(value, Poly):
        return value
    expr = exprfn.coerce(value)
    poly = exprfn.as_polynomial(expr)
    if poly is None:
        raise ValueError(f"parameter {name} = {exprfn.render(expr)} is not polynomial in u; "
                         "exact builders accept formal symbols or polynomials")
    out = Poly()
    for k, c in poly.items():
        out = out + J(0) ** k * Poly.const(c) if k else out + Poly.const(c)
    return out


class Env:
    """Resolves ``name`` + derivative order to a Poly, caching u-derivatives."""

    def __init__(self, bindings: dict[str, Poly]):
        self.bindings = dict(bindings)
        self._cache: dict[tuple[str, int], Poly] = {}

    def __call__(self, name: str, order: int) -> Poly:
        key = (name, order)
        if key in self._cache:
            return self._cache[key]
        if name not in self.bindings:
            raise KeyError(f"unbound function symbol {name!r}")
        if order == 0:
            out = self.bindings[name]
        else:
            out = u_derivative(self(name, order - 1))
        self._cache[key] = out
        return out


@dataclass(frozen=True)
class ModelParams:
    """Functional parameters c, p, q, s and the convention for s."""

    c: ParamLike = None
    p: ParamLike = None
    q: ParamLike = None
    s: ParamLike = None
    s_choice: str = "free"

    def __post_init__(self):
        if self.s_choice not in S_CHOICES:
            raise ValueError(f"s_choice must be one of {S_CHOICES}")

    def c_poly(self) -> Poly:
        return coefficient(self.c, "c")

    def p_poly(self) -> Poly:
        return coefficient(self.p, "p")

    def q_poly(self) -> Poly:
        return coefficient(self.q, "q")

    def s_poly(self) -> Poly:
        if self.s_choice == "zero":
            return Poly()
        if self.s_choice == "theorem2":
            c = self.c_poly()
            return c * u_derivative(u_derivative(u_derivative(c))) * Poly.const(Fraction(1, 3456))
        return coefficient(self.s, "s")


def _series(table: dict[int, str], name: str, env: Env, mutation: Mutation | None,
            max_order: int = MAX_ORDER, record: dict | None = None) -> EpsSeries:
    lits = Literals(name, mutation)
    comps = {k: compile_formula(text, env, lits) for k, text in sorted(table.items())}
    if record is not None:
        record[name] = lits.values
    return EpsSeries(comps, max_order)


def _fn(f, default: str) -> Poly:
    if isinstance(f, str) and f.isidentifier() and f != "u":
        return S(f, 0)
    return coefficient(f, default)


def build_hf_density(params: ModelParams = ModelParams(), f="f", mutation: Mutation | None = None,
                     record: dict | None = None) -> EpsSeries:
    """The commuting density h_f through eps^4.

    ``f`` is a symbol name ("f", "g", ...) or a polynomial in u.
    """
    env = Env({"f": _fn(f, "f"), "c": params.c_poly(), "p": params.p_poly(), "s": params.s_poly()})
    return _series(tables.HF, "h_f", env, mutation, record=record)


def build_riem2_rhs(c: ParamLike = None, p: ParamLike = None, mutation: Mutation | None = None,
                    record: dict | None = None) -> EpsSeries:
    """Characteristic u u_x + ... of the perturbed Riemann wave, i.e. d_x of dH/du."""
    env = Env({"c": coefficient(c, "c"), "p": coefficient(p, "p")})
    return _series(tables.RIEM2, "riem2", env, mutation, record=record)


def build_K_generator(c: ParamLike = None, p: ParamLike = None, mutation: Mutation | None = None,
                      record: dict | None = None) -> EpsSeries:
    """Density of the generator K of the trivializing canonical transformation."""
    env = Env({"c": coefficient(c, "c"), "p": coefficient(p, "p")})
    return _series(tables.K_GEN, "K", env, mutation, record=record)


def build_quasitriviality_map(c: ParamLike = None, p: ParamLike = None,
                              mutation: Mutation | None = None,
                              record: dict | None = None) -> EpsSeries:
    """u = v + eps^2 (...) + eps^4 (...), written with the jet variable u standing for v."""
    env = Env({"c": coefficient(c, "c"), "p": coefficient(p, "p")})
    return _series(tables.QUASI, "quasi_map", env, mutation, record=record)


def p_constraint_poly(c: ParamLike = None, q: ParamLike = None,
                      mutation: Mutation | None = None) -> Poly:
    """p = (5 c c' - c^2 q''/q')/960 as a Poly (q' may appear inverted)."""
    env = Env({"c": coefficient(c, "c"), "q": coefficient(q, "q")})
    return compile_formula(tables.P_CONSTRAINT, env, Literals("p_cons", mutation))


def p_from_cq(c, q) -> exprfn.Expr:
    """p = (c^2/960)(5c'/c - q''/q') for concrete expressions, simplified.

    Evaluated in the equivalent form (5 c c' - c^2 q''/q')/960, which needs
    only q' != 0.
    """
    c, q = exprfn.coerce(c), exprfn.coerce(q)
    dc = exprfn.derivative(c, 1)
    dq, ddq = exprfn.derivative(q, 1), exprfn.derivative(q, 2)
    if exprfn.normal_form(dq) == exprfn.Laurent():
        raise ZeroDivisionError("p_from_cq: q' vanishes identically")
    expr = exprfn.div(
        exprfn.sub(exprfn.mul(exprfn.mul(exprfn.num(5), c), dc),
                   exprfn.div(exprfn.mul(exprfn.power(c, 2), ddq), dq)),
        exprfn.num(960))
    return exprfn.simplify(expr)


def check_p_domain(q, u_values) -> None:
    """Raise a domain error if q' vanishes at any of the sample points."""
    dq = exprfn.derivative(exprfn.coerce(q), 1)
    vals = exprfn.evaluate(dq, np.asarray(u_values, dtype=float))
    if np.any(vals == 0):
        raise exprfn.DomainError("q'", "division by zero in p_from_cq")


def build_second_poisson(c: ParamLike = None, q: ParamLike = None,
                         mutation: Mutation | None = None,
                         record: dict | None = None) -> PoissonOperator:
    """The deformed second bracket sum eps^k A_{k,j} delta^(j)(x - y) through eps^4."""
    env = Env({"c": coefficient(c, "c"), "q": coefficient(q, "q")})
    lits = Literals("L2", mutation)
    entries = []
    for (k, j), text in tables.SECOND_BRACKET.items():
        a = compile_formula(text, env, lits)
        if a:
            entries.append((k, j, a))
    if record is not None:
        record["L2"] = lits.values
    return PoissonOperator(tuple(entries), MAX_ORDER)


def build_string_density(a: ParamLike = None, b: ParamLike = None, c0: ParamLike = None,
                         p0: ParamLike = None, t: ParamLike = None,
                         include_missing_term: bool = True,
                         mutation: Mutation | None = None,
                         record: dict | None = None) -> EpsSeries:
    """Right-hand side of x = t a + b + eps^2 (...) + eps^4 (...).

    With ``include_missing_term`` the u_xx^2 term that the printed relation
    lacks is added (it is required by the Euler operator identity).
    c0, p0, t default to formal constants.
    """
    def const(v, name):
        return C(name) if v is None else coefficient(v, name)

    env = Env({"a": _fn(a if a is not None else "a", "a"), "b": _fn(b if b is not None else "b", "b"),
               "c0": const(c0, "c0"), "p0": const(p0, "p0"), "t": const(t, "t")})
    out = _series(tables.STRING, "string", env, mutation, record=record)
    if include_missing_term:
        out = out + _series(tables.STRING_MISSING, "string_extra", env, mutation, record=record)
    return out


@dataclass(frozen=True)
class Specialization:
    name: str
    c: exprfn.Expr
    p: exprfn.Expr
    q: exprfn.Expr
    s: exprfn.Expr
    note: str


def specializations(c0="c0") -> list[Specialization]:
    """The three worked examples: KdV, the Volterra lattice and Camassa-Holm."""
    P = exprfn.parse
    kdv_c = exprfn.coerce(1) if c0 == "c0" else exprfn.coerce(c0)
    return [
        Specialization("KdV", kdv_c, P("0"), P("u"), P("0"),
                       "c = c0 constant (c0 = 1 unless given), p = s = 0"),
        Specialization("Volterra", P("2"), P("-1/240"), P("1 - exp(u)"), P("1/4320"),
                       "s != 0: removable by a Miura-type transform"),
        Specialization("CamassaHolm", P("8*u"), P("u/3"), P("u"), P("0"), "c = 8u, p = u/3"),
    ]


@lru_cache(maxsize=None)
def literal_counts() -> dict[str, int]:
    """Number of transcription literals in each table (for mutation sampling)."""
    rec: dict = {}
    build_hf_density(record=rec)
    build_K_generator(record=rec)
    build_quasitriviality_map(record=rec)
    build_riem2_rhs(record=rec)
    build_second_poisson(record=rec)
    build_string_density(record=rec)
    lits = Literals("p_cons")
    compile_formula(tables.P_CONSTRAINT, Env({"c": S("c", 0), "q": S("q", 0)}), lits)
    rec["p_cons"] = lits.values
    return {k: len(v) for k, v in rec.items()}


def literal_values(table: str) -> list:
    rec: dict = {}
    if table == "h_f":
        build_hf_density(record=rec)
    elif table == "K":
        build_K_generator(record=rec)
    elif table == "quasi_map":
        build_quasitriviality_map(record=rec)
    elif table == "riem2":
        build_riem2_rhs(record=rec)
    elif table == "L2":
        build_second_poisson(record=rec)
    elif table in ("string", "string_extra"):
        build_string_density(record=rec)
    elif table == "p_cons":
        lits = Literals("p_cons")
        compile_formula(tables.P_CONSTRAINT, Env({"c": S("c", 0), "q": S("q", 0)}), lits)
        return list(lits.values)
    else:
        raise KeyError(f"unknown table {table!r}")
    return list(rec[table])
