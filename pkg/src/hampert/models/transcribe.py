"""A small formula language for entering printed formulas literally.

Grammar::

    expr   := ["-"] term (("+" | "-") term)*
    term   := factor ("*"? factor)*
    factor := number ["/" number] | atom ["^" ["-"] int]
            | "(" expr ")" ["^" int] | "Du(" expr ")" | "Dx(" expr ")"

Atoms are function symbols with primes or ``{j}`` (``c'``, ``q{5}``), jets
(``u``, ``ux``, ``uxx``, ``uxxx``, ``ux4``, ...), ``log(ux)`` and names bound
in the environment.  ``Du`` is the u-derivative of a coefficient expression,
``Dx`` the total x-derivative.

Every rational literal (``3/16``, ``5``, ``1`` written out explicitly) is
numbered in reading order within its table; a :class:`Mutation` can perturb
one or more of them, which is how transcription sensitivity is measured.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from ..diffalg import Poly, Q, jet_gen, total_derivative, u_derivative
from ..diffalg.poly import LOG_GEN, rational


@dataclass(frozen=True)
class Mutation:
    """Relative perturbation of transcription literals.

    Selects literals of ``table`` either by reading-order ``index`` or by exact
    ``value`` (every literal equal to it).  The literal becomes
    ``value * (1 + rel)``, or ``replacement`` when that is given.
    """

    table: str
    rel: Fraction = Fraction(1, 10**6)
    index: int | None = None
    value: Fraction | None = None
    replacement: Fraction | None = None

    @classmethod
    def parse(cls, text: str) -> "Mutation":
        """``table:value:rel``, ``table:#index:rel`` or ``table:old=new``.

        Examples: ``h_f:1/480:+1e-6``, ``L2:#17:1e-6``, ``h_f:1/480=1/479``.
        """
        parts = text.split(":")
        if len(parts) == 2 and "=" in parts[1]:
            old, new = parts[1].split("=", 1)
            try:
                return cls(parts[0], Fraction(0), value=Fraction(old), replacement=Fraction(new))
            except (ValueError, ZeroDivisionError) as exc:
                raise ValueError(f"bad mutation spec {text!r}") from exc
        try:
            table, sel, rel = parts
            relq = Fraction(rel.replace("+", ""))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"bad mutation spec {text!r}; expected table:value:rel") from exc
        if sel.startswith("#"):
            return cls(table, relq, index=int(sel[1:]))
        return cls(table, relq, value=Fraction(sel))

    def applies(self, table: str, index: int, value: Q) -> bool:
        if table != self.table:
            return False
        if self.index is not None:
            return index == self.index
        return self.value is not None and Q(self.value.numerator, self.value.denominator) == value


class Literals:
    """Hands out numbered literals for one table, applying any mutation."""

    def __init__(self, table: str, mutation: Mutation | None = None):
        self.table = table
        self.mutation = mutation
        self.values: list[Q] = []
        self.mutated: list[int] = []

    def __call__(self, value) -> Q:
        value = rational(value)
        idx = len(self.values)
        self.values.append(value)
        m = self.mutation
        if m is not None and m.applies(self.table, idx, value):
            self.mutated.append(idx)
            if m.replacement is not None:
                return Q(m.replacement.numerator, m.replacement.denominator)
            return value * (1 + Q(m.rel.numerator, m.rel.denominator))
        return value


_TOK = re.compile(r"\s*(?:(\d+)|(log\(ux\))|(Du\(|Dx\()|([A-Za-z_][A-Za-z0-9_]*)('*)(\{\d+\})?|(\S))")


class FormulaError(ValueError):
    pass


def compile_formula(text: str, env, lits: Literals) -> Poly:
    """Evaluate a formula string to a Poly.

    ``env(name, order)`` resolves function atoms; jets and log(ux) are built in.
    """
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOK.match(text, pos)
        if not m:
            raise FormulaError(f"cannot tokenize at {pos}: {text[pos:pos+10]!r}")
        pos = m.end()
        num, log, op, name, primes, braces, other = m.groups()
        if num is not None:
            toks.append(("num", int(num)))
        elif log is not None:
            toks.append(("poly", Poly.gen(LOG_GEN)))
        elif op is not None:
            toks.append(("fn", op[:2]))
        elif name is not None:
            toks.append(("atom", (name, primes or "", braces)))
        elif other is not None:
            toks.append(("op", other))
    toks.append(("end", None))
    i = 0

    def peek():
        return toks[i]

    def take():
        nonlocal i
        t = toks[i]
        i += 1
        return t

    def expect(op):
        t = take()
        if t != ("op", op):
            raise FormulaError(f"expected {op!r}, got {t!r} in {text!r}")

    def atom(name, primes, braces):
        m = re.fullmatch(r"u(x*)|ux(\d+)", name)
        if m and not primes and not braces:
            n = len(m.group(1)) if m.group(2) is None else int(m.group(2))
            return Poly.gen(jet_gen(n))
        order = len(primes) + (int(braces[1:-1]) if braces else 0)
        return env(name, order)

    def power(p):
        if peek() == ("op", "^"):
            take()
            sign = 1
            if peek() == ("op", "-"):
                take()
                sign = -1
            t = take()
            if t[0] != "num":
                raise FormulaError(f"integer exponent expected in {text!r}")
            return p ** (sign * t[1])
        return p

    def factor():
        t = take()
        if t[0] == "num":
            value = Fraction(t[1])
            if peek() == ("op", "/") and toks[i + 1][0] == "num":
                take()
                value = value / take()[1]
            return Poly.const(lits(value))
        if t[0] == "poly":
            return power(t[1])
        if t[0] == "atom":
            return power(atom(*t[1]))
        if t[0] == "fn":
            inner = expr()
            expect(")")
            return u_derivative(inner) if t[1] == "Du" else total_derivative(inner)
        if t == ("op", "("):
            inner = expr()
            expect(")")
            return power(inner)
        raise FormulaError(f"unexpected token {t!r} in {text!r}")

    def starts_factor(t):
        return t[0] in ("num", "poly", "atom", "fn") or t == ("op", "(")

    def term():
        acc = factor()
        while True:
            t = peek()
            if t == ("op", "*"):
                take()
                acc = acc * factor()
            elif starts_factor(t):
                acc = acc * factor()
            else:
                return acc

    def expr():
        sign = 1
        if peek() == ("op", "-"):
            take()
            sign = -1
        total = term().scale(sign)
        while peek()[0] == "op" and peek()[1] in "+-":
            s = 1 if take()[1] == "+" else -1
            total = total + term().scale(s)
        return total

    out = expr()
    if peek()[0] != "end":
        raise FormulaError(f"trailing input {peek()!r} in {text!r}")
    return out
