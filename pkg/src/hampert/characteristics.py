"""Characteristic solution x = a(v) t + b(v), its gradient catastrophe and cubic limit."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import exprfn


class CharacteristicsError(RuntimeError):
    pass


class NoBracket(CharacteristicsError):
    pass


class NotMonotone(CharacteristicsError):
    pass


class Degenerate(CharacteristicsError):
    pass


class WrongSign(CharacteristicsError):
    pass


class NoConvergence(CharacteristicsError):
    pass


class MultipleRoots(CharacteristicsError):
    pass


@dataclass(frozen=True)
class CharacteristicData:
    a: exprfn.Expr
    b: exprfn.Expr
    v_bracket: tuple[float, float] = (-10.0, 10.0)
    monotone_samples: int = 2001

    @classmethod
    def from_strings(cls, a: str, b: str, v_bracket=(-10.0, 10.0)) -> "CharacteristicData":
        return cls(exprfn.parse(a), exprfn.parse(b), tuple(map(float, v_bracket)))

    def derivs(self, name: str, upto: int = 3) -> list:
        e = self.a if name == "a" else self.b
        return [exprfn.derivative(e, k) if k else e for k in range(upto + 1)]

    def phi(self, v, t):
        return exprfn.evaluate(self.a, v) * t + exprfn.evaluate(self.b, v)

    def dphi(self, v, t):
        da = exprfn.derivative(self.a, 1)
        db = exprfn.derivative(self.b, 1)
        return exprfn.evaluate(da, v) * t + exprfn.evaluate(db, v)


@dataclass(frozen=True)
class CatastrophePoint:
    x0: float
    t0: float
    v0: float
    kappa: float
    a0: float
    a0p: float
    residuals: tuple[float, float, float]

    def to_dict(self) -> dict:
        return {"x0": self.x0, "t0": self.t0, "v0": self.v0, "kappa": self.kappa,
                "a0": self.a0, "a0p": self.a0p, "residuals": list(self.residuals)}


def check_monotone(data: CharacteristicData, t: float) -> int:
    """Sign of d/dv (a t + b) on the bracket; raises NotMonotone if it changes."""
    lo, hi = data.v_bracket
    v = np.linspace(lo, hi, data.monotone_samples)
    d = data.dphi(v, t)
    if np.all(d > 0):
        return 1
    if np.all(d < 0):
        return -1
    raise NotMonotone(f"a(v) t + b(v) is not monotone on {data.v_bracket} at t = {t}")


def solve_v(data: CharacteristicData, x, t: float, tol: float = 1e-12, check: bool = True):
    """Root v of a(v) t + b(v) = x in the bracket (scalar or array x).

    Newton steps safeguarded by bisection on a maintained bracket.
    """
    sign = check_monotone(data, t) if check else 1
    lo, hi = data.v_bracket
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    flo = data.phi(lo, t) - x_arr
    fhi = data.phi(hi, t) - x_arr
    if np.any(flo * fhi > 0):
        raise NoBracket(f"x outside the image of the bracket {data.v_bracket} at t = {t}")
    a = np.full_like(x_arr, lo)
    b = np.full_like(x_arr, hi)
    # orient so that phi(a) - x <= 0 <= phi(b) - x
    if sign < 0:
        a, b = b, a
    v = 0.5 * (a + b)
    scale = tol * (1.0 + np.abs(x_arr))
    for _ in range(200):
        f = data.phi(v, t) - x_arr
        done = np.abs(f) <= scale
        if np.all(done):
            break
        neg = f < 0
        a = np.where(neg, v, a)
        b = np.where(neg, b, v)
        d = data.dphi(v, t)
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = v - f / d
        inside = (newton - np.minimum(a, b)) * (newton - np.maximum(a, b)) <= 0
        v = np.where(done, v, np.where(inside & np.isfinite(newton), newton, 0.5 * (a + b)))
    else:
        raise NoConvergence("solve_v did not converge")
    return float(v[0]) if np.ndim(x) == 0 else v


def _scan_roots(fn, lo, hi, n=4001):
    v = np.linspace(lo, hi, n)
    with np.errstate(all="ignore"):
        y = fn(v)
    roots = []
    for i in range(n - 1):
        if not (np.isfinite(y[i]) and np.isfinite(y[i + 1])):
            continue
        if y[i] == 0:
            roots.append(v[i])
        elif y[i] * y[i + 1] < 0:
            roots.append(0.5 * (v[i] + v[i + 1]))
    return roots, y


def find_catastrophe(data: CharacteristicData, tol: float = 1e-10, max_iter: int = 60) -> CatastrophePoint:
    """Earliest inflection point: a' t + b' = 0 and a'' t + b'' = 0 with t > 0."""
    a = data.derivs("a")
    b = data.derivs("b")
    ev = exprfn.evaluate

    def h(v):
        # t = -b'/a' substituted into a'' t + b'' (multiplied through by a')
        return ev(a[1], v) * ev(b[2], v) - ev(a[2], v) * ev(b[1], v)

    lo, hi = data.v_bracket
    seeds, hv = _scan_roots(h, lo, hi)
    if np.all(np.abs(hv[np.isfinite(hv)]) < 1e-14):
        raise Degenerate("a' b'' - a'' b' vanishes identically: no isolated inflection (kappa = 0)")
    candidates = []
    for v in seeds:
        da = ev(a[1], v)
        if da == 0:
            continue
        t = -ev(b[1], v) / da
        # Newton on F(v, t) = (a' t + b', a'' t + b'')
        for _ in range(max_iter):
            F = np.array([ev(a[1], v) * t + ev(b[1], v), ev(a[2], v) * t + ev(b[2], v)])
            Jm = np.array([[ev(a[2], v) * t + ev(b[2], v), ev(a[1], v)],
                           [ev(a[3], v) * t + ev(b[3], v), ev(a[2], v)]])
            if np.max(np.abs(F)) <= 1e-15:
                break
            try:
                step = np.linalg.solve(Jm, F)
            except np.linalg.LinAlgError:
                break
            v, t = v - step[0], t - step[1]
            if np.max(np.abs(step)) <= 1e-16 * (1 + abs(v) + abs(t)):
                break
        r2 = ev(a[1], v) * t + ev(b[1], v)
        r3 = ev(a[2], v) * t + ev(b[2], v)
        if abs(r2) <= tol and abs(r3) <= tol and t > 0 and lo <= v <= hi:
            candidates.append((t, v))
    if not candidates:
        raise NoConvergence("no catastrophe with t0 > 0 found in the bracket")
    t0, v0 = min(candidates)
    x0 = ev(a[0], v0) * t0 + ev(b[0], v0)
    kappa = -(ev(a[3], v0) * t0 + ev(b[3], v0))
    a0, a0p = ev(a[0], v0), ev(a[1], v0)
    res = (abs(a0 * t0 + ev(b[0], v0) - x0), abs(ev(a[1], v0) * t0 + ev(b[1], v0)),
           abs(ev(a[2], v0) * t0 + ev(b[2], v0)))
    if abs(kappa) < 1e-12:
        raise Degenerate("kappa = 0: genericity fails")
    if kappa * a0p <= 0:
        raise WrongSign(f"kappa * a'(v0) = {kappa * a0p} <= 0")
    return CatastrophePoint(float(x0), float(t0), float(v0), float(kappa), float(a0), float(a0p),
                            tuple(float(r) for r in res))


def cubic_limit(xbar, tbar: float, a0p: float, kappa: float):
    """Real root of xbar = a0' v tbar - kappa v^3/6 (Cardano)."""
    if kappa * a0p <= 0:
        raise WrongSign("cubic_limit needs kappa * a0' > 0")
    x = np.asarray(xbar, dtype=float)
    # v^3 + P v + Qc = 0
    P = -6.0 * a0p * tbar / kappa
    Qc = 6.0 * x / kappa
    D = (Qc / 2) ** 2 + (P / 3) ** 3
    if np.any(D < 0):
        raise MultipleRoots("xbar lies inside the fold region (three real roots)")
    s = np.sqrt(D)
    v = np.cbrt(-Qc / 2 + s) + np.cbrt(-Qc / 2 - s)
    # one Newton polish step against cancellation
    g = v ** 3 + P * v + Qc
    dg = 3 * v ** 2 + P
    with np.errstate(divide="ignore", invalid="ignore"):
        v = np.where(dg != 0, v - g / dg, v)
    return float(v) if np.ndim(xbar) == 0 else v
