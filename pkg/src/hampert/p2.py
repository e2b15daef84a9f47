"""Smooth solution U(X; T) of X = T U - [U^3/6 + (U'^2 + 2 U U'')/24 + U''''/240].

Finite differences of fourth order on a uniform grid, Newton iteration with a
banded Jacobian, boundary values from the large-|X| asymptotic series, and
continuation in T.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.linalg import solve_banded

from .characteristics import cubic_limit

GHOST = 3  # the fourth-derivative stencil reaches three points out


class P2Error(RuntimeError):
    pass


class NotInAsymptoticRegime(P2Error):
    pass


class NewtonDiverged(P2Error):
    def __init__(self, msg, last_good_T=None):
        super().__init__(msg)
        self.last_good_T = last_good_T


class BlowUpDetected(P2Error):
    pass


class ResolutionTooCoarse(P2Error):
    pass


class GridMismatch(P2Error):
    pass


@dataclass(frozen=True)
class P2Config:
    L: float = 40.0
    N: int = 1601
    tol: float = 1e-10
    max_iter: int = 30
    boundary_terms: int = 3


@dataclass
class P2Solution:
    T: float
    grid: np.ndarray
    U: np.ndarray
    residual_norm: float
    boundary_order: int
    iterations: int = 0
    history: list = field(default_factory=list)

    @property
    def h(self) -> float:
        return float(self.grid[1] - self.grid[0])

    def to_meta(self) -> dict:
        return {"T": self.T, "L": float(self.grid[-1]), "N": int(self.grid.size),
                "residual": self.residual_norm, "boundary_terms": self.boundary_order,
                "iterations": self.iterations}

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\r\n")
            w.writerow(["X", "U"])
            for x, u in zip(self.grid, self.U):
                w.writerow([f"{x:.17g}", f"{u:.17g}"])

    def write_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_meta(), sort_keys=True, indent=2))


# ---------------------------------------------------------------- asymptotics

def cubic_root(X, T: float):
    """Leading order: the real root U0 of X = T U0 - U0^3/6 on the outer branch."""
    X = np.asarray(X, dtype=float)
    if T <= 0:
        return cubic_limit(X, T, 1.0, 1.0) if X.ndim else float(cubic_limit(float(X), T, 1.0, 1.0))
    # past T = 0 three roots exist for small |X|; take the branch continuing from |X| large
    roots = np.array([np.roots([-1.0 / 6.0, 0.0, T, -x]) for x in np.atleast_1d(X)])
    out = np.empty(roots.shape[0])
    for i, (x, r) in enumerate(zip(np.atleast_1d(X), roots)):
        real = r[np.abs(r.imag) < 1e-9 * (1 + np.abs(r.real))].real
        out[i] = real.min() if x > 0 else real.max()
    return out if X.ndim else float(out[0])


def _corrections(U0, T):
    d = U0 * U0 - 2.0 * T
    c1 = (3.0 * U0 ** 2 + 2.0 * T) / (3.0 * d ** 4)
    c2 = -U0 * (189.0 * U0 ** 4 + 972.0 * T * U0 ** 2 + 436.0 * T ** 2) / (9.0 * d ** 9)
    return c1, c2


def asymptotic_U(X, T: float, terms: int = 3, check: bool = True):
    """Large-|X| (or strongly negative T) expansion of the smooth solution, 1 to 3 terms."""
    if terms not in (1, 2, 3):
        raise ValueError("terms must be 1, 2 or 3")
    U0 = cubic_root(X, T)
    scale = np.maximum(np.abs(U0), np.sqrt(abs(T)))
    if check and np.any(scale == 0):
        raise NotInAsymptoticRegime("X = T = 0 is the center of the expansion")
    with np.errstate(divide="ignore", invalid="ignore"):
        c1, c2 = _corrections(U0, T)
    if check and np.any(~np.isfinite(c1) | (np.abs(c1) > 0.1 * scale)):
        raise NotInAsymptoticRegime(f"first correction exceeds 10% of the leading term at T = {T}")
    out = U0
    if terms >= 2:
        out = out + c1
    if terms >= 3:
        out = out + c2
    return out


# ---------------------------------------------------------------- discretization

def _pad(U, left, right):
    return np.concatenate([left, U, right])


def derivatives(Up, h):
    """Fourth-order central differences on a padded array (GHOST points each side)."""
    g = GHOST
    n = Up.size - 2 * g
    s = lambda k: Up[g + k:g + k + n]  # noqa: E731
    d1 = (-s(2) + 8 * s(1) - 8 * s(-1) + s(-2)) / (12 * h)
    d2 = (-s(2) + 16 * s(1) - 30 * s(0) + 16 * s(-1) - s(-2)) / (12 * h * h)
    d3 = (-s(3) + 8 * s(2) - 13 * s(1) + 13 * s(-1) - 8 * s(-2) + s(-3)) / (8 * h ** 3)
    d4 = (-s(3) + 12 * s(2) - 39 * s(1) + 56 * s(0) - 39 * s(-1) + 12 * s(-2) - s(-3)) / (6 * h ** 4)
    return s(0), d1, d2, d3, d4


_C1 = np.array([1, -8, 0, 8, -1]) / 12.0
_C2 = np.array([-1, 16, -30, 16, -1]) / 12.0
_C4 = np.array([-1, 12, -39, 56, -39, 12, -1]) / 6.0


def ode_residual(U, X, T, h, left, right):
    u, d1, d2, _, d4 = derivatives(_pad(U, left, right), h)
    return T * u - (u ** 3 / 6 + (d1 ** 2 + 2 * u * d2) / 24 + d4 / 240) - X


def _jacobian_banded(U, T, h, left, right):
    u, d1, d2, _, _ = derivatives(_pad(U, left, right), h)
    n = U.size
    ab = np.zeros((7, n))  # ab[3 + i - j, j] = J[i, j]
    def put(offset, vals):
        # J[i, i + offset] += vals[i]
        j = np.arange(n) + offset
        ok = (j >= 0) & (j < n)
        ab[3 - offset, j[ok]] += vals[ok]
    put(0, T - u ** 2 / 2 - d2 / 12)
    for k, off in enumerate(range(-2, 3)):
        c = _C1[k] / h
        put(off, -(d1 / 12) * c)
        put(off, -(u / 12) * (_C2[k] / (h * h)))
    for k, off in enumerate(range(-3, 4)):
        put(off, -np.full(n, _C4[k] / (240 * h ** 4)))
    return ab


@dataclass(frozen=True)
class _Grid:
    X: np.ndarray
    h: float
    left_X: np.ndarray
    right_X: np.ndarray


def make_grid(L: float, N: int) -> _Grid:
    X = np.linspace(-L, L, N)
    h = X[1] - X[0]
    return _Grid(X, h, -L - h * np.arange(GHOST, 0, -1), L + h * np.arange(1, GHOST + 1))


def rounding_floor(U, h) -> float:
    """Residual level set by cancellation in the fourth-difference stencil."""
    return 64 * np.finfo(float).eps * float(np.max(np.abs(U))) * (160 / 6) / (240 * h ** 4)


def blowup_bound(T, L):
    return 10.0 * (abs(T) ** 0.5 + (6 * L) ** (1 / 3))


def solve_bvp(T: float, L: float = 40.0, N: int = 1601, guess=None, tol: float = 1e-10,
              max_iter: int = 30, boundary_terms: int = 3) -> P2Solution:
    """Newton solve of the discretized ODE on [-L, L] with asymptotic ghost values."""
    if N < 16:
        raise ValueError("N too small")
    g = make_grid(L, N)
    left = asymptotic_U(g.left_X, T, boundary_terms)
    right = asymptotic_U(g.right_X, T, boundary_terms)
    if guess is None:
        U = asymptotic_U(g.X, T, boundary_terms, check=False) if T < 0 else cubic_root(g.X, T)
        U = np.where(np.isfinite(U), U, cubic_root(g.X, T))
    else:
        U = np.array(guess, dtype=float)
    bound = blowup_bound(T, L)
    tol = max(tol, rounding_floor(U, g.h))
    R = ode_residual(U, g.X, T, h := g.h, left, right)
    res = float(np.max(np.abs(R)))
    history = [res]
    it = 0
    while res > tol:
        if it >= max_iter:
            raise NewtonDiverged(f"no convergence at T = {T}: residual {res:.3e} after {it} steps")
        ab = _jacobian_banded(U, T, h, left, right)
        step = solve_banded((3, 3), ab, -R)
        lam = 1.0
        while True:
            trial = U + lam * step
            Rt = ode_residual(trial, g.X, T, h, left, right)
            rt = float(np.max(np.abs(Rt)))
            if np.isfinite(rt) and (rt < res or lam < 1e-3):
                break
            lam *= 0.5
        if not np.isfinite(rt) or rt >= res:
            # stagnation at the rounding floor or divergence
            raise NewtonDiverged(f"Newton stalled at T = {T}: residual {res:.3e}")
        U, R, res = trial, Rt, rt
        it += 1
        history.append(res)
        if np.max(np.abs(U)) > bound:
            raise BlowUpDetected(f"|U| exceeded {bound:.3g} at T = {T}")
    return P2Solution(float(T), g.X, U, res, boundary_terms, it, history)


def oscillation_wavenumber(U, T):
    """Largest real k with k^4 - 20 U k^2 - 240 (T - U^2/2) = 0 (NaN where none)."""
    U = np.asarray(U, dtype=float)
    disc = 100 * U ** 2 + 240 * (T - U ** 2 / 2)
    with np.errstate(invalid="ignore"):
        k2 = 10 * U + np.sqrt(disc)
        k = np.sqrt(np.where((disc >= 0) & (k2 > 0), k2, np.nan))
    return k


def check_resolution(U, T, h, points_per_wave: int = 8) -> None:
    if T <= 0:
        return
    k = oscillation_wavenumber(U, T)
    kmax = np.nanmax(k) if np.any(np.isfinite(k)) else 0.0
    if kmax > 0 and 2 * np.pi / kmax < points_per_wave * h:
        raise ResolutionTooCoarse(f"T = {T}: wavelength {2 * np.pi / kmax:.3g} needs h <= "
                                  f"{2 * np.pi / kmax / points_per_wave:.3g}, have {h:.3g}")


def continuation_in_T(Tlist, L: float = 40.0, N: int = 1601, tol: float = 1e-10,
                      max_iter: int = 30, min_step: float = 1e-3) -> list[P2Solution]:
    """Solve along ascending T, seeding each solve with the previous solution."""
    Tlist = [float(t) for t in Tlist]
    if not Tlist:
        return []
    if Tlist[0] > -8:
        raise NewtonDiverged(f"continuation must start at T <= -8 (got {Tlist[0]})", None)
    if any(b <= a for a, b in zip(Tlist, Tlist[1:])):
        raise ValueError("Tlist must be strictly ascending")
    sols = [solve_bvp(Tlist[0], L, N, tol=tol, max_iter=max_iter)]
    prev = sols[0]
    for T in Tlist[1:]:
        cur_T, target = prev.T, T
        while cur_T < target:
            step = target - cur_T
            while True:
                nxt = min(cur_T + step, target)
                check_resolution(prev.U, nxt, prev.h)
                try:
                    sol = solve_bvp(nxt, L, N, guess=prev.U, tol=tol, max_iter=max_iter)
                    break
                except (NewtonDiverged, BlowUpDetected) as exc:
                    step /= 2
                    if step < min_step:
                        raise NewtonDiverged(f"continuation failed before T = {nxt}: {exc}",
                                             last_good_T=prev.T) from exc
            prev, cur_T = sol, sol.T
        sols.append(prev)
    return sols


def kdv_residual(sm: P2Solution, s0: P2Solution, sp: P2Solution, margin: int = 8) -> dict:
    """Max of U_T + U U' + U'''/12 at interior points (centered differences in T)."""
    for s in (sm, sp):
        if s.grid.shape != s0.grid.shape or np.max(np.abs(s.grid - s0.grid)) > 0:
            raise GridMismatch("solutions must share one grid")
    delta = 0.5 * (sp.T - sm.T)
    g = make_grid(float(s0.grid[-1]), s0.grid.size)
    left = asymptotic_U(g.left_X, s0.T, s0.boundary_order, check=False)
    right = asymptotic_U(g.right_X, s0.T, s0.boundary_order, check=False)
    u, d1, _, d3, _ = derivatives(_pad(s0.U, left, right), g.h)
    spatial = u * d1 + d3 / 12
    sl = slice(margin, -margin)
    if delta == 0:
        return {"residual": float(np.max(np.abs(spatial[sl]))), "degenerate": True, "delta": 0.0}
    ut = (sp.U - sm.U) / (2 * delta)
    return {"residual": float(np.max(np.abs((ut + spatial)[sl]))), "degenerate": False,
            "delta": float(delta)}


def default_delta(T: float) -> float:
    return 1e-3 * max(1.0, abs(T))


@dataclass
class P2Table:
    """U on a rectangular (X, T) grid, for interpolation."""

    X: np.ndarray
    T: np.ndarray
    U: np.ndarray  # shape (len(X), len(T))
    residuals: list

    def spline(self):
        from scipy.interpolate import RectBivariateSpline
        return RectBivariateSpline(self.X, self.T, self.U, kx=3, ky=3)


def build_table(T_values, L: float = 40.0, N: int = 1601, X_max: float | None = None,
                T_start: float = -10.0, tol: float = 1e-10) -> P2Table:
    """Solve on each T (ascending) by continuation from T_start and tabulate."""
    T_values = np.asarray(sorted(T_values), dtype=float)
    Ts = list(T_values)
    if Ts[0] > T_start:
        Ts = [T_start] + Ts
    sols = continuation_in_T(Ts, L, N, tol=tol)
    sols = [s for s in sols if np.any(np.isclose(s.T, T_values))]
    X = sols[0].grid
    keep = slice(None) if X_max is None else (np.abs(X) <= X_max + 4 * sols[0].h)
    U = np.stack([s.U[keep] for s in sols], axis=1)
    return P2Table(X[keep], T_values, U, [s.residual_norm for s in sols])
