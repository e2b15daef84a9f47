"""Exact Laurent polynomials over the generators of a one-variable jet space.

A single class, :class:`Poly`, carries both the coefficient ring (polynomials in
u-derivatives of registered function symbols such as ``c``, ``q'``, ``f''''``)
and the differential polynomials built on top of it (monomials in ``u_x``,
``u_xx``, ..., ``log u_x``).  Keeping one flat representation makes products
and derivations cheap; :meth:`Poly.by_jet` recovers the two-level view
(jet monomial -> formal coefficient).

Generators are tuples ``(kind, name, order)``:

* ``SYMBOL``: ``S^(j)``, the j-th u-derivative of a function symbol ``S(u)``;
* ``CONST``: a constant parameter (zero derivative);
* ``LOG``:   ``log u_x``;
* ``JET``:   ``v^(n)`` for a dependent variable ``v`` (``n = 0`` is ``v`` itself);
* ``XVAR``:  the explicit independent variable ``x`` (``D_x x = 1``).

Symbols are functions of the dependent variable ``u`` only.
"""
from __future__ import annotations

from functools import lru_cache
from numbers import Rational
from typing import Iterable, Iterator

try:
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover
    from fractions import Fraction as Q

SYMBOL, CONST, LOG, JET, XVAR = 0, 1, 2, 3, 4

U = "u"  # the dependent variable that function symbols depend on

Monomial = tuple  # tuple of (generator, exponent), sorted by generator


def rational(x) -> Q:
    """Coerce ints, Fractions, mpq and decimal strings to an exact rational."""
    if isinstance(x, str):
        from fractions import Fraction
        f = Fraction(x)
        return Q(f.numerator, f.denominator)
    if isinstance(x, float):
        raise TypeError("floating point values are not allowed in exact algebra")
    if isinstance(x, Rational) or type(x).__name__ == "mpq":
        return Q(x)
    try:
        return Q(x)
    except Exception as exc:  # pragma: no cover
        raise TypeError(f"cannot convert {x!r} to a rational") from exc


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    la, lb = len(a), len(b)
    while i < la and j < lb:
        ga, ea = a[i]
        gb, eb = b[j]
        if ga == gb:
            e = ea + eb
            if e:
                out.append((ga, e))
            i += 1
            j += 1
        elif ga < gb:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    if i < la:
        out.extend(a[i:])
    if j < lb:
        out.extend(b[j:])
    return tuple(out)


_mono_mul_cached = lru_cache(maxsize=1 << 18)(mono_mul)


def _check_exponent(gen, exp):
    if exp < 0:
        kind, name, order = gen
        if kind == LOG or kind == XVAR or (kind == JET and order != 1):
            raise ValueError(f"negative power of {render_gen(gen)} is not allowed")


class Poly:
    """Immutable sparse Laurent polynomial with exact rational coefficients."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: dict | None = None):
        # callers guarantee: no zero coefficients, canonical monomials
        self.terms = terms if terms is not None else {}
        self._hash = None

    # ------------------------------------------------------------ construction
    @classmethod
    def const(cls, value) -> "Poly":
        q = rational(value)
        return cls({(): q}) if q else cls()

    @classmethod
    def gen(cls, gen: tuple, exp: int = 1) -> "Poly":
        if exp == 0:
            return cls({(): Q(1)})
        _check_exponent(gen, exp)
        return cls({((gen, exp),): Q(1)})

    @classmethod
    def from_terms(cls, items: Iterable[tuple[Monomial, object]]) -> "Poly":
        acc: dict = {}
        for m, c in items:
            c = rational(c)
            if not c:
                continue
            v = acc.get(m)
            if v is None:
                acc[m] = c
            else:
                v = v + c
                if v:
                    acc[m] = v
                else:
                    del acc[m]
        return cls(acc)

    # ------------------------------------------------------------ basic protocol
    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[tuple[Monomial, Q]]:
        return iter(self.terms.items())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            try:
                other = Poly.const(other)
            except TypeError:
                return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __repr__(self) -> str:
        from .render import render
        return f"Poly({render(self)!r})"

    def __str__(self) -> str:
        from .render import render
        return render(self)

    # ------------------------------------------------------------ arithmetic
    @staticmethod
    def _coerce(x) -> "Poly":
        return x if isinstance(x, Poly) else Poly.const(x)

    def __add__(self, other) -> "Poly":
        other = self._coerce(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        acc = dict(self.terms)
        for m, c in other.terms.items():
            v = acc.get(m)
            if v is None:
                acc[m] = c
            else:
                v = v + c
                if v:
                    acc[m] = v
                else:
                    del acc[m]
        return Poly(acc)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Poly":
        return self._coerce(other) - self

    def scale(self, k) -> "Poly":
        k = rational(k)
        if not k:
            return Poly()
        return Poly({m: c * k for m, c in self.terms.items()})

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            return self.scale(other)
        if not self.terms or not other.terms:
            return Poly()
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        acc: dict = {}
        get = acc.get
        mul = _mono_mul_cached
        for mb, cb in b.items():
            for ma, ca in a.items():
                m = mul(ma, mb)
                v = get(m)
                if v is None:
                    acc[m] = ca * cb
                else:
                    v = v + ca * cb
                    if v:
                        acc[m] = v
                    else:
                        del acc[m]
        return Poly(acc)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Poly":
        if isinstance(other, Poly):
            return self * other.inverse()
        return self.scale(1 / rational(other))

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            return self.inverse() ** (-n)
        result = Poly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def inverse(self) -> "Poly":
        """Inverse of a single-term polynomial (Laurent monomial)."""
        if len(self.terms) != 1:
            raise ZeroDivisionError("only monomials are invertible in this ring")
        (m, c), = self.terms.items()
        inv = tuple((g, -e) for g, e in m)
        for g, e in inv:
            _check_exponent(g, e)
        return Poly({inv: 1 / c})

    # ------------------------------------------------------------ inspection
    def generators(self) -> set:
        return {g for m in self.terms for g, _ in m}

    def is_constant(self) -> bool:
        return all(not m for m in self.terms)

    def constant_value(self) -> Q:
        return self.terms.get((), Q(0))

    def jet_order(self, var: str = U) -> int:
        """Highest n with v^(n) present (log u_x counts as order 1); -1 if none."""
        best = -1
        for g in self.generators():
            kind, name, order = g
            if kind == JET and name == var:
                best = max(best, order)
            elif kind == LOG and var == U:
                best = max(best, 1)
            elif kind == SYMBOL and var == U:
                best = max(best, 0)
        return best

    def degrees(self, var: str = U) -> set[int]:
        """Set of jet degrees sum(n * e_n) over terms (log u_x has degree 0)."""
        return {mono_degree(m, var) for m in self.terms}

    def is_homogeneous(self, degree: int | None = None, var: str = U) -> bool:
        ds = self.degrees(var)
        if not ds:
            return True
        if len(ds) != 1:
            return False
        return degree is None or ds == {degree}

    def by_jet(self) -> dict[Monomial, "Poly"]:
        """Group terms by their jet part; values are formal coefficients."""
        out: dict[Monomial, dict] = {}
        for m, c in self.terms.items():
            jet = tuple(p for p in m if p[0][0] in (LOG, JET, XVAR))
            coef = tuple(p for p in m if p[0][0] not in (LOG, JET, XVAR))
            out.setdefault(jet, {})[coef] = c
        return {k: Poly(v) for k, v in out.items()}

    def coefficient(self, jet: "Poly") -> "Poly":
        """Formal coefficient of a pure jet monomial."""
        if len(jet.terms) != 1:
            raise ValueError("coefficient() expects a single jet monomial")
        (m, c), = jet.terms.items()
        return self.by_jet().get(m, Poly()).scale(1 / c)

    def max_abs_coefficient(self) -> Q:
        return max((abs(c) for c in self.terms.values()), default=Q(0))

    def lead_term(self) -> tuple[Monomial, Q] | None:
        """Smallest term in render order; used as a reproducible witness."""
        if not self.terms:
            return None
        m = min(self.terms, key=_mono_sort_key)
        return m, self.terms[m]

    # ------------------------------------------------------------ derivations
    def derive(self, ratio) -> "Poly":
        """Apply the derivation defined on generators by ``ratio(g) = D(g)/g``.

        ``ratio`` returns a list of (monomial, coefficient) pairs or ``None``
        when the generator is a constant for this derivation.
        """
        acc: dict = {}
        get = acc.get
        mul = _mono_mul_cached
        for m, c in self.terms.items():
            for g, e in m:
                r = ratio(g)
                if not r:
                    continue
                ce = c * e
                for rm, rc in r:
                    nm = mul(m, rm)
                    v = get(nm)
                    if v is None:
                        acc[nm] = ce * rc
                    else:
                        v = v + ce * rc
                        if v:
                            acc[nm] = v
                        else:
                            del acc[nm]
        return Poly(acc)

    def diff(self, gen: tuple) -> "Poly":
        """Partial derivative with respect to one generator."""
        r = (((gen, -1),), Q(1)),
        return self.derive(lambda g: r if g == gen else None)

    def subs(self, mapping: dict) -> "Poly":
        """Substitute Polys for generators (negative exponents use inverses)."""
        out = Poly()
        cache: dict = {}
        for m, c in self.terms.items():
            term = Poly({(): c})
            rest = []
            for g, e in m:
                if g in mapping:
                    key = (g, e)
                    if key not in cache:
                        cache[key] = mapping[g] ** e
                    term = term * cache[key]
                else:
                    rest.append((g, e))
            if rest:
                term = term * Poly({tuple(rest): Q(1)})
            out = out + term
        return out

    def map_coefficients(self, fn) -> "Poly":
        return Poly.from_terms((m, fn(c)) for m, c in self.terms.items())


def mono_degree(m: Monomial, var: str = U) -> int:
    d = 0
    for (kind, name, order), e in m:
        if kind == JET and name == var:
            d += order * e
    return d


def _mono_sort_key(m: Monomial):
    return tuple((g, -e) for g, e in m)


# ---------------------------------------------------------------- generators
def sym(name: str, order: int = 0) -> tuple:
    return (SYMBOL, name, order)


def const_gen(name: str) -> tuple:
    return (CONST, name, 0)


def jet_gen(order: int, var: str = U) -> tuple:
    return (JET, var, order)


LOG_GEN = (LOG, "log", 0)
X_GEN = (XVAR, "x", 0)


def S(name: str, order: int = 0) -> Poly:
    """The j-th u-derivative of a function symbol, as a Poly."""
    return Poly.gen(sym(name, order))


def C(name: str) -> Poly:
    return Poly.gen(const_gen(name))


def J(order: int, var: str = U, exp: int = 1) -> Poly:
    """Jet variable v^(order); J(0) is u itself."""
    return Poly.gen(jet_gen(order, var), exp)


def ux(exp: int = 1) -> Poly:
    return J(1, U, exp)


def logux() -> Poly:
    return Poly.gen(LOG_GEN)


def xvar() -> Poly:
    return Poly.gen(X_GEN)


ZERO = Poly()
ONE = Poly.const(1)


# ---------------------------------------------------------------- rendering helpers
def render_gen(g: tuple) -> str:
    kind, name, order = g
    if kind == SYMBOL:
        return name + ("'" * order if order <= 3 else "{%d}" % order)
    if kind == CONST or kind == XVAR:
        return name
    if kind == LOG:
        return "log(ux)"
    if order <= 3:
        return name + "x" * order
    return f"{name}x{order}"
