"""Truncated epsilon-series of differential polynomials and Poisson operators."""
from __future__ import annotations

from dataclasses import dataclass, field

from .ops import euler_operator, evolutionary_apply, is_null_lagrangian, total_derivative
from .poly import Poly, Q, U, rational
from .render import render


class EpsSeries:
    """sum_k eps^k * components[k], known up to and including ``max_order``."""

    __slots__ = ("components", "max_order")

    def __init__(self, components: dict[int, Poly] | None = None, max_order: int = 4):
        self.max_order = max_order
        comps = {}
        for k, p in (components or {}).items():
            if k < 0:
                raise ValueError("negative eps-order")
            if k <= max_order and p:
                comps[k] = p
        self.components = comps

    @classmethod
    def of(cls, p: Poly, max_order: int = 4, order: int = 0) -> "EpsSeries":
        return cls({order: p}, max_order)

    def __getitem__(self, k: int) -> Poly:
        if k > self.max_order:
            raise KeyError(f"order {k} beyond truncation {self.max_order}")
        return self.components.get(k, Poly())

    def orders(self) -> list[int]:
        return sorted(self.components)

    def is_zero(self) -> bool:
        return not self.components

    def __bool__(self) -> bool:
        return bool(self.components)

    def __eq__(self, other) -> bool:
        if not isinstance(other, EpsSeries):
            return NotImplemented
        m = min(self.max_order, other.max_order)
        return all(self[k] == other[k] for k in range(m + 1))

    def truncate(self, max_order: int) -> "EpsSeries":
        return EpsSeries(self.components, min(max_order, self.max_order))

    def map(self, fn) -> "EpsSeries":
        return EpsSeries({k: fn(p) for k, p in self.components.items()}, self.max_order)

    def __add__(self, other) -> "EpsSeries":
        if isinstance(other, Poly):
            other = EpsSeries.of(other, self.max_order)
        m = min(self.max_order, other.max_order)
        comps = dict(self.components)
        for k, p in other.components.items():
            comps[k] = comps.get(k, Poly()) + p
        return EpsSeries(comps, m)

    def __neg__(self) -> "EpsSeries":
        return self.map(lambda p: -p)

    def __sub__(self, other) -> "EpsSeries":
        return self + (-other)

    def scale(self, k) -> "EpsSeries":
        k = rational(k)
        return self.map(lambda p: p.scale(k))

    def __mul__(self, other) -> "EpsSeries":
        if isinstance(other, Poly):
            return self.map(lambda p: p * other)
        if not isinstance(other, EpsSeries):
            return self.scale(other)
        m = min(self.max_order, other.max_order)
        comps: dict[int, Poly] = {}
        for i, a in self.components.items():
            for j, b in other.components.items():
                if i + j <= m:
                    comps[i + j] = comps.get(i + j, Poly()) + a * b
        return EpsSeries(comps, m)

    __rmul__ = __mul__

    def shift(self, n: int) -> "EpsSeries":
        """Multiply by eps^n (the truncation order moves with it)."""
        return EpsSeries({k + n: p for k, p in self.components.items()}, self.max_order + n)

    def render(self) -> str:
        if not self.components:
            return "0"
        lines = [f"[eps^{k}] {render(p)}" for k, p in sorted(self.components.items())]
        return "\n".join(lines)

    def __repr__(self) -> str:
        return f"EpsSeries(max_order={self.max_order}, orders={self.orders()})"


@dataclass(frozen=True)
class PoissonOperator:
    """sum eps^k A_{k,j} o D_x^j, i.e. the bracket sum A_{k,j} delta^(j)(x - y)."""

    entries: tuple[tuple[int, int, Poly], ...] = field(default_factory=tuple)
    max_order: int = 4

    @classmethod
    def standard(cls, max_order: int = 4) -> "PoissonOperator":
        """The bracket {u(x), u(y)} = delta'(x - y)."""
        return cls(((0, 1, Poly.const(1)),), max_order)

    def coefficient(self, order: int, j: int) -> Poly:
        out = Poly()
        for k, jj, a in self.entries:
            if k == order and jj == j:
                out = out + a
        return out

    def apply(self, phi: EpsSeries) -> EpsSeries:
        m = min(self.max_order, phi.max_order)
        derivs: dict[tuple[int, int], Poly] = {}
        comps: dict[int, Poly] = {}
        for k, j, a in self.entries:
            for i, p in phi.components.items():
                if k + i > m:
                    continue
                key = (i, j)
                if key not in derivs:
                    d = derivs.get((i, j - 1)) if j else None
                    if d is not None:
                        derivs[key] = total_derivative(d)
                    else:
                        d = p
                        for _ in range(j):
                            d = total_derivative(d)
                        derivs[key] = d
                comps[k + i] = comps.get(k + i, Poly()) + a * derivs[key]
        return EpsSeries(comps, m)

    def render(self) -> str:
        lines = []
        for k, j, a in sorted(self.entries, key=lambda e: (e[0], -e[1])):
            lines.append(f"[eps^{k} delta^({j})] {render(a)}")
        return "\n".join(lines)


def variational_derivative(h: EpsSeries, var: str = U) -> EpsSeries:
    return h.map(lambda p: euler_operator(p, var))


def bracket_density(h1: EpsSeries, h2: EpsSeries, L: PoissonOperator | None = None,
                    max_order: int | None = None) -> EpsSeries:
    """Density (dH1/du) * L(dH2/du) of the bracket {H1, H2}_L."""
    L = L or PoissonOperator.standard()
    m = min(h1.max_order, h2.max_order, L.max_order)
    if max_order is not None:
        m = min(m, max_order)
    d1 = variational_derivative(h1.truncate(m))
    d2 = variational_derivative(h2.truncate(m))
    return d1 * L.apply(d2)


def characteristic(K: EpsSeries) -> EpsSeries:
    """P = D_x(dK/du): the flow u_tau = {u(x), K} of the standard bracket."""
    return K.map(lambda p: total_derivative(euler_operator(p)))


def evolutionary_apply_series(P: EpsSeries, h: EpsSeries) -> EpsSeries:
    m = min(P.max_order, h.max_order)
    comps: dict[int, Poly] = {}
    for i, p in P.components.items():
        for j, q in h.components.items():
            if i + j <= m:
                comps[i + j] = comps.get(i + j, Poly()) + evolutionary_apply(p, q)
    return EpsSeries(comps, m)


def lie_transform(K: EpsSeries, target: EpsSeries, max_order: int | None = None) -> EpsSeries:
    """exp(eps * ad_K) acting on a density (or on the coordinate u).

    Computes target + eps{target, K} + eps^2/2 {{target, K}, K} + ... where
    {phi, K} is the prolongation of P = D_x(dK/du) applied to phi.  The
    explicit factor eps in front of K is included here, so a generator given
    with eps-orders >= 1 produces corrections of order >= 2.
    """
    m = target.max_order if max_order is None else min(max_order, target.max_order)
    P = characteristic(K).shift(1).truncate(m)
    if P.is_zero():
        return target.truncate(m)
    if min(P.orders()) < 1:
        raise ValueError("generator must not contain eps^0 terms after the eps prefactor")
    result = target.truncate(m)
    term = result
    n = 0
    while True:
        n += 1
        term = evolutionary_apply_series(P, term).scale(Q(1, n))
        if term.is_zero():
            break
        result = result + term
    return result


def null_lagrangian_orders(series: EpsSeries) -> dict[int, bool]:
    return {k: is_null_lagrangian(series[k]) for k in range(series.max_order + 1)}
