"""ASCII rendering and parsing of Polys.

Grammar (whitespace is insignificant)::

    poly    := ["-"] term (("+" | "-") term)*
    term    := [rational "*"] factor ("*" factor)*  |  rational
    rational:= integer | "(" integer "/" integer ")"
    factor  := atom ["^" ["-"] integer]
    atom    := symbol | jet | "log(ux)" | name

* ``symbol``: a function name followed by primes for 1-3 derivatives or
  ``{j}`` for any order, e.g. ``c``, ``c''``, ``q{5}``;
* ``jet``: ``u``, ``ux``, ``uxx``, ``uxxx``, ``ux4``, ``ux5``, ...
  (same for any declared dependent variable);
* ``name``: a declared constant, or ``x`` for the independent variable.

Example: ``(1/24)*c*ux^2 - c'*ux^3``.  Terms are printed in a fixed total
order so that renderings are reproducible across runs.
"""
from __future__ import annotations

import re

from .poly import (CONST, JET, LOG_GEN, SYMBOL, X_GEN, Poly, Q, _mono_sort_key,
                   const_gen, jet_gen, render_gen, sym)


def _render_rational(c: Q) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"({c.numerator}/{c.denominator})"


def render_monomial(m) -> str:
    parts = []
    for g, e in m:
        s = render_gen(g)
        parts.append(s if e == 1 else f"{s}^{e}")
    return "*".join(parts)


def render(p: Poly) -> str:
    if not p.terms:
        return "0"
    out = []
    for i, m in enumerate(sorted(p.terms, key=_mono_sort_key)):
        c = p.terms[m]
        neg = c < 0
        a = -c if neg else c
        body = render_monomial(m)
        if not body:
            txt = _render_rational(a)
        elif a == 1:
            txt = body
        else:
            txt = f"{_render_rational(a)}*{body}"
        if i == 0:
            out.append(("-" if neg else "") + txt)
        else:
            out.append((" - " if neg else " + ") + txt)
    return "".join(out)


_TOKEN = re.compile(r"\s*(?:(\d+)|(log\(ux\))|([A-Za-z_][A-Za-z0-9_]*)('*)(\{\d+\})?|(.))")


class ParseError(ValueError):
    pass


def parse(text: str, variables: tuple[str, ...] = ("u",), constants: tuple[str, ...] = ()) -> Poly:
    """Inverse of :func:`render` for the grammar above."""
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            break
        pos = m.end()
        num, log, name, primes, braces, other = m.groups()
        if num is not None:
            toks.append(("num", int(num)))
        elif log is not None:
            toks.append(("gen", LOG_GEN))
        elif name is not None:
            toks.append(("gen", _name_gen(name, primes, braces, variables, constants)))
        elif other is not None and not other.isspace():
            toks.append(("op", other))
    toks.append(("end", None))
    i = 0

    def peek():
        return toks[i]

    def take(kind=None, val=None):
        nonlocal i
        t = toks[i]
        if (kind and t[0] != kind) or (val is not None and t[1] != val):
            raise ParseError(f"unexpected token {t!r} at {i}")
        i += 1
        return t

    def rational_():
        if peek() == ("op", "("):
            take()
            n = take("num")[1]
            take("op", "/")
            d = take("num")[1]
            take("op", ")")
            return Q(n, d)
        return Q(take("num")[1])

    def factor():
        g = take("gen")[1]
        e = 1
        if peek() == ("op", "^"):
            take()
            sign = 1
            if peek() == ("op", "-"):
                take()
                sign = -1
            e = sign * take("num")[1]
        return Poly.gen(g, e)

    def term():
        if peek()[0] == "num" or peek() == ("op", "("):
            acc = Poly.const(rational_())
            if peek() != ("op", "*"):
                return acc
            take()
        else:
            acc = Poly.const(1)
        acc = acc * factor()
        while peek() == ("op", "*"):
            take()
            acc = acc * factor()
        return acc

    sign = 1
    if peek() == ("op", "-"):
        take()
        sign = -1
    total = term().scale(sign)
    while peek()[0] == "op" and peek()[1] in "+-":
        s = 1 if take()[1] == "+" else -1
        total = total + term().scale(s)
    take("end")
    return total


def _name_gen(name, primes, braces, variables, constants):
    for v in variables:
        if name == v and not primes and not braces:
            return jet_gen(0, v)
        m = re.fullmatch(re.escape(v) + r"(x+)|" + re.escape(v) + r"x(\d+)", name)
        if m and not primes and not braces:
            n = len(m.group(1)) if m.group(1) else int(m.group(2))
            return jet_gen(n, v)
    if name == "x" and not primes and not braces:
        return X_GEN
    if name in constants:
        return const_gen(name)
    order = len(primes or "")
    if braces:
        order += int(braces[1:-1])
    return sym(name, order)


__all__ = ["render", "parse", "ParseError", "render_monomial", "CONST", "SYMBOL", "JET"]
