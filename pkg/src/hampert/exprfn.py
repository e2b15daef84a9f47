"""Scalar functions of u: parsing, evaluation, differentiation, normal form.

Grammar (EBNF)::

    expr    = term { ("+" | "-") term } ;
    term    = unary { ("*" | "/") unary } ;
    unary   = "-" unary | power ;
    power   = primary [ "^" [ "-" ] integer ] ;
    primary = number | "u" | func "(" expr ")" | "(" expr ")" ;
    func    = "exp" | "log" | "sin" | "cos" | "tanh" | "sqrt" ;
    number  = digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ] ;

``^`` binds tighter than unary minus, so ``-u^2`` is ``-(u^2)``.  Decimal
literals are read as exact rationals.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

FUNCS = ("exp", "log", "sin", "cos", "tanh", "sqrt")


class ExprSyntaxError(ValueError):
    def __init__(self, offset: int, expected: set[str], text: str):
        self.offset = offset
        self.expected = sorted(expected)
        super().__init__(f"syntax error at offset {offset}: expected one of {self.expected} in {text!r}")


class DomainError(ValueError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{message} at node {path}")


# ---------------------------------------------------------------- nodes

@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Func:
    name: str
    arg: "Expr"


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exp: int


Expr = Num | Var | Func | Neg | BinOp | Pow
U = Var()
ZERO = Num(Fraction(0))
ONE = Num(Fraction(1))


def num(v) -> Num:
    return Num(Fraction(v))


# ---------------------------------------------------------------- parsing

class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def fail(self, expected):
        self.skip()
        raise ExprSyntaxError(self.pos, set(expected), self.text)

    def parse(self) -> Expr:
        e = self.expr()
        if self.peek():
            self.fail({"+", "-", "*", "/", "^", "end of input"})
        return e

    def expr(self):
        e = self.term()
        while self.peek() in ("+", "-"):
            op = self.text[self.pos]
            self.pos += 1
            e = BinOp(op, e, self.term())
        return e

    def term(self):
        e = self.unary()
        while self.peek() in ("*", "/"):
            op = self.text[self.pos]
            self.pos += 1
            e = BinOp(op, e, self.unary())
        return e

    def unary(self):
        if self.peek() == "-":
            self.pos += 1
            arg = self.unary()
            # a negated literal is a negative literal
            return Num(-arg.value) if isinstance(arg, Num) else Neg(arg)
        return self.power()

    def power(self):
        base = self.primary()
        if self.peek() == "^":
            self.pos += 1
            sign = 1
            if self.peek() == "-":
                self.pos += 1
                sign = -1
            self.skip()
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
            if start == self.pos:
                self.fail({"integer"})
            if self.peek() == "^":
                # exponents are literals, so a chained power is ambiguous; parenthesize
                self.fail({"+", "-", "*", "/", ")", "end of input"})
            return Pow(base, sign * int(self.text[start:self.pos]))
        return base

    def primary(self):
        ch = self.peek()
        if ch.isdigit() or ch == ".":
            return self.number()
        if ch.isalpha():
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isalnum():
                self.pos += 1
            name = self.text[start:self.pos]
            if name == "u":
                return U
            if name in FUNCS:
                if self.peek() != "(":
                    self.fail({"("})
                self.pos += 1
                arg = self.expr()
                if self.peek() != ")":
                    self.fail({")", "+", "-", "*", "/"})
                self.pos += 1
                return Func(name, arg)
            self.pos = start
            self.fail({"u", "number", "(", *FUNCS})
        if ch == "(":
            self.pos += 1
            e = self.expr()
            if self.peek() != ")":
                self.fail({")", "+", "-", "*", "/"})
            self.pos += 1
            return e
        self.fail({"u", "number", "(", "-", *FUNCS})

    def number(self):
        t = self.text
        start = self.pos
        while self.pos < len(t) and (t[self.pos].isdigit() or t[self.pos] == "."):
            self.pos += 1
        if self.pos < len(t) and t[self.pos] in "eE":
            j = self.pos + 1
            if j < len(t) and t[j] in "+-":
                j += 1
            if j < len(t) and t[j].isdigit():
                while j < len(t) and t[j].isdigit():
                    j += 1
                self.pos = j
        try:
            return Num(Fraction(t[start:self.pos]))
        except ValueError:
            self.pos = start
            self.fail({"number"})


def parse(text: str) -> Expr:
    return _Parser(text).parse()


# ---------------------------------------------------------------- rendering

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def render(e: Expr) -> str:
    return _render(e, 0)


def _render_num(v: Fraction) -> str:
    if v.denominator == 1:
        return str(v.numerator)
    return f"{v.numerator}/{v.denominator}"


def _render(e: Expr, ctx: int) -> str:
    # ctx: 0 top, 1 sum, 2 product, 3 unary, 4 power base
    if isinstance(e, Num):
        s = _render_num(e.value)
        need = (e.value < 0 and ctx >= 1) or (e.value.denominator != 1 and ctx >= 2)
        return f"({s})" if need else s
    if isinstance(e, Var):
        return "u"
    if isinstance(e, Func):
        return f"{e.name}({_render(e.arg, 0)})"
    if isinstance(e, Neg):
        s = "-" + _render(e.arg, 3)
        return f"({s})" if ctx >= 2 else s
    if isinstance(e, Pow):
        s = f"{_render(e.base, 4)}^{e.exp}"
        return f"({s})" if ctx == 4 else s
    p = _PREC[e.op]
    left = _render(e.left, p)
    # right operand of - and / needs parentheses at equal precedence
    right = _render(e.right, p + 1 if e.op in "-/" else p)
    s = f"{left} {e.op} {right}" if p == 1 else f"{left}*{right}" if e.op == "*" else f"{left}/{right}"
    return f"({s})" if ctx > p else s


# ---------------------------------------------------------------- evaluation

def evaluate(e: Expr, u, path: str = "root"):
    """Evaluate at a float or numpy array; raises DomainError outside the domain."""
    if isinstance(e, Num):
        v = float(e.value)
        return np.full(np.shape(u), v) if np.ndim(u) else v
    if isinstance(e, Var):
        return np.asarray(u, dtype=float) if np.ndim(u) else float(u)
    if isinstance(e, Neg):
        return -evaluate(e.arg, u, path + ".neg")
    if isinstance(e, Pow):
        b = evaluate(e.base, u, path + ".base")
        if e.exp < 0 and np.any(np.asarray(b) == 0):
            raise DomainError(path, "negative power of zero")
        return b ** e.exp if e.exp >= 0 else 1.0 / b ** (-e.exp)
    if isinstance(e, Func):
        a = evaluate(e.arg, u, path + f".{e.name}")
        arr = np.asarray(a)
        if e.name == "log" and np.any(arr <= 0):
            raise DomainError(path, "log of non-positive value")
        if e.name == "sqrt" and np.any(arr < 0):
            raise DomainError(path, "sqrt of negative value")
        out = getattr(np, e.name)(a)
        return float(out) if not np.ndim(u) else out
    l = evaluate(e.left, u, path + ".left")
    r = evaluate(e.right, u, path + ".right")
    if e.op == "+":
        return l + r
    if e.op == "-":
        return l - r
    if e.op == "*":
        return l * r
    if np.any(np.asarray(r) == 0):
        raise DomainError(path, "division by zero")
    return l / r


eval_expr = evaluate


def to_callable(e: Expr):
    return lambda u: evaluate(e, u)


# ---------------------------------------------------------------- simplifying constructors

def _is(e, v) -> bool:
    return isinstance(e, Num) and e.value == v


def add(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value + b.value)
    if _is(a, 0):
        return b
    if _is(b, 0):
        return a
    if isinstance(b, Neg):
        return sub(a, b.arg)
    if isinstance(b, Num) and b.value < 0:
        return BinOp("-", a, Num(-b.value))
    return BinOp("+", a, b)


def sub(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value - b.value)
    if _is(b, 0):
        return a
    if _is(a, 0):
        return neg(b)
    if a == b:
        return ZERO
    if isinstance(b, Neg):
        return add(a, b.arg)
    return BinOp("-", a, b)


def neg(a: Expr) -> Expr:
    if isinstance(a, Num):
        return Num(-a.value)
    if isinstance(a, Neg):
        return a.arg
    if isinstance(a, BinOp) and a.op in "*/" and isinstance(a.left, Num):
        return BinOp(a.op, Num(-a.left.value), a.right) if a.left.value != -1 else a.right
    return Neg(a)


def mul(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value * b.value)
    if _is(a, 0) or _is(b, 0):
        return ZERO
    if _is(a, 1):
        return b
    if _is(b, 1):
        return a
    if _is(a, -1):
        return neg(b)
    if _is(b, -1):
        return neg(a)
    if isinstance(a, Neg):
        return neg(mul(a.arg, b))
    if isinstance(b, Neg):
        return neg(mul(a, b.arg))
    if isinstance(b, Num):
        a, b = b, a
    if isinstance(a, Num) and isinstance(b, BinOp) and b.op == "*" and isinstance(b.left, Num):
        return mul(Num(a.value * b.left.value), b.right)
    return BinOp("*", a, b)


def div(a: Expr, b: Expr) -> Expr:
    if _is(b, 0):
        raise ZeroDivisionError("division by literal zero")
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value / b.value)
    if _is(a, 0):
        return ZERO
    if _is(b, 1):
        return a
    if a == b:
        return ONE
    return BinOp("/", a, b)


def power(a: Expr, n: int) -> Expr:
    if n == 0:
        return ONE
    if n == 1:
        return a
    if isinstance(a, Num):
        return Num(a.value ** n)
    return Pow(a, n)


# ---------------------------------------------------------------- differentiation

def _d(e: Expr) -> Expr:
    if isinstance(e, Num):
        return ZERO
    if isinstance(e, Var):
        return ONE
    if isinstance(e, Neg):
        return neg(_d(e.arg))
    if isinstance(e, Pow):
        return mul(mul(num(e.exp), power(e.base, e.exp - 1)), _d(e.base))
    if isinstance(e, Func):
        da = _d(e.arg)
        if _is(da, 0):
            return ZERO
        a = e.arg
        outer = {
            "exp": lambda: e,
            "log": lambda: div(ONE, a),
            "sin": lambda: Func("cos", a),
            "cos": lambda: neg(Func("sin", a)),
            "tanh": lambda: sub(ONE, power(e, 2)),
            "sqrt": lambda: div(ONE, mul(num(2), e)),
        }[e.name]()
        return mul(outer, da) if not _is(da, 1) else outer
    dl, dr = _d(e.left), _d(e.right)
    if e.op == "+":
        return add(dl, dr)
    if e.op == "-":
        return sub(dl, dr)
    if e.op == "*":
        return add(mul(dl, e.right), mul(e.left, dr))
    # quotient rule
    return div(sub(mul(dl, e.right), mul(e.left, dr)), power(e.right, 2))


def derivative(e: Expr, order: int = 1) -> Expr:
    if order < 0:
        raise ValueError("order must be >= 0")
    for _ in range(order):
        e = _d(e)
    return simplify(e)


# ---------------------------------------------------------------- normal form

class Laurent:
    """Rational-coefficient Laurent polynomial in atoms (u, function nodes, opaque sums).

    Two expressions with equal normal forms are equal as functions; the converse
    holds for the usual cases (cancellation of monomial factors, common
    exponential factors), which is all the exact fixture checks need.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {m: c for m, c in (terms or {}).items() if c != 0}

    @staticmethod
    def const(v) -> "Laurent":
        return Laurent({(): Fraction(v)})

    @staticmethod
    def atom(a) -> "Laurent":
        return Laurent({((a, 1),): Fraction(1)})

    def __add__(self, o):
        t = dict(self.terms)
        for m, c in o.terms.items():
            t[m] = t.get(m, 0) + c
        return Laurent(t)

    def __neg__(self):
        return Laurent({m: -c for m, c in self.terms.items()})

    def __sub__(self, o):
        return self + (-o)

    def __mul__(self, o):
        t: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in o.terms.items():
                d = dict(m1)
                for a, e in m2:
                    d[a] = d.get(a, 0) + e
                m = tuple(sorted(((a, e) for a, e in d.items() if e), key=lambda x: repr(x[0])))
                t[m] = t.get(m, 0) + c1 * c2
        return Laurent(t)

    def __eq__(self, o):
        return isinstance(o, Laurent) and self.terms == o.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def inverse(self) -> "Laurent":
        if not self.terms:
            raise ZeroDivisionError("division by zero expression")
        if self.is_monomial():
            (m, c), = self.terms.items()
            return Laurent({tuple((a, -e) for a, e in m): 1 / c})
        # opaque denominator: divide out the leading rational content so that
        # 2 + 2u and 1 + u share the atom (1 + u)
        c0 = min(self.terms.items(), key=lambda kv: repr(kv[0]))[1]
        normed = Laurent({m: c / c0 for m, c in self.terms.items()})
        return Laurent({((("sum", _laurent_to_expr(normed)), -1),): 1 / c0})

    def pow(self, n: int) -> "Laurent":
        base = self if n >= 0 else self.inverse()
        out = Laurent.const(1)
        for _ in range(abs(n)):
            out = out * base
        return out


def _normal(e: Expr) -> Laurent:
    if isinstance(e, Num):
        return Laurent.const(e.value)
    if isinstance(e, Var):
        return Laurent.atom("u")
    if isinstance(e, Neg):
        return -_normal(e.arg)
    if isinstance(e, Pow):
        if e.exp < 0:
            return _factored(e.base).pow(e.exp)
        return _normal(e.base).pow(e.exp)
    if isinstance(e, Func):
        inner = _normal(e.arg)
        if e.name == "exp":
            # exp(a + b) = exp(a) exp(b); exp of a constant stays an atom
            # exp(a + b) = exp(a) exp(b) and exp(k m) = exp(m)^k for integer k
            out = Laurent.const(1)
            for m, c in inner.terms.items():
                if c.denominator == 1 and m:
                    out = out * Laurent({((("exp", _laurent_to_expr(Laurent({m: Fraction(1)}))), int(c)),): Fraction(1)})
                else:
                    out = out * Laurent.atom(("exp", _laurent_to_expr(Laurent({m: c}))))
            return out
        if e.name == "log" and inner == Laurent.const(1):
            return Laurent()
        return Laurent.atom((e.name, _laurent_to_expr(inner)))
    l, r = _normal(e.left), _normal(e.right)
    if e.op == "+":
        return l + r
    if e.op == "-":
        return l - r
    if e.op == "*":
        return l * r
    return l * _factored(e.right).inverse()


def _factored(e: Expr) -> Laurent:
    """Normal form kept as a single monomial in atoms, for use as a denominator."""
    if isinstance(e, Pow):
        return _factored(e.base).pow(e.exp)
    if isinstance(e, BinOp) and e.op == "*":
        return _factored(e.left) * _factored(e.right)
    if isinstance(e, BinOp) and e.op == "/":
        return _factored(e.left) * _factored(e.right).inverse()
    if isinstance(e, Neg):
        return -_factored(e.arg)
    L = _normal(e)
    if len(L.terms) <= 1:
        return L
    return L.inverse().inverse()


def normal_form(e: Expr) -> Laurent:
    return _normal(e)


def _atom_to_expr(a) -> Expr:
    if a == "u":
        return U
    name, arg = a
    if name == "sum":
        return arg
    return Func(name, arg)


def _laurent_to_expr(L: Laurent) -> Expr:
    out: Expr = ZERO
    for m, c in sorted(L.terms.items(), key=lambda kv: repr(kv[0])):
        num_part: Expr = ONE
        den_part: Expr = ONE
        for a, e in m:
            f = _atom_to_expr(a)
            if e > 0:
                num_part = mul(num_part, power(f, e))
            else:
                den_part = mul(den_part, power(f, -e))
        t = mul(Num(abs(c.numerator)), num_part)
        den_part = mul(Num(c.denominator), den_part)
        if not _is(den_part, 1):
            t = div(t, den_part)
        if _is(out, 0):
            out = t if c > 0 else neg(t)
        else:
            out = add(out, t) if c > 0 else sub(out, t)
    return out


def simplify(e: Expr) -> Expr:
    """Rebuild from the Laurent normal form (cancels common monomial factors)."""
    return _laurent_to_expr(_normal(e))


def equal(a: Expr, b: Expr) -> bool:
    return _normal(a) == _normal(b)


def as_polynomial(e: Expr) -> dict[int, Fraction] | None:
    """Coefficients {power: c} if e is a polynomial in u, else None."""
    out = {}
    for m, c in _normal(e).terms.items():
        if not m:
            out[0] = c
            continue
        if len(m) != 1 or m[0][0] != "u" or m[0][1] < 0:
            return None
        out[m[0][1]] = c
    return out


def as_rational(e: Expr) -> Fraction | None:
    poly = as_polynomial(e)
    if poly is None or any(k for k in poly):
        return None
    return poly.get(0, Fraction(0))


def coerce(value) -> Expr:
    """Accept Expr, str, int or Fraction."""
    if isinstance(value, (Num, Var, Func, Neg, BinOp, Pow)):
        return value
    if isinstance(value, str):
        return parse(value)
    if isinstance(value, (int, Fraction)):
        return Num(Fraction(value))
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError("non-finite constant")
        return Num(Fraction(value))
    raise TypeError(f"cannot make an expression from {type(value).__name__}")
