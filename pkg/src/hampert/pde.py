"""Pseudo-spectral solver for u_t + d_x(dH/du) = 0 with H the perturbed Riemann Hamiltonian.

The flux dH/du is built exactly by the algebra engine and evaluated on the
grid; the equation is advanced in conservative form so the mean is preserved
to rounding at every step.
"""
from __future__ import annotations

import json
import math
import re
import time
from fractions import Fraction
from dataclasses import asdict, dataclass, field

import numpy as np

from . import exprfn
from .characteristics import CharacteristicData, solve_v
from .diffalg import JET, J, Poly, variational_derivative
from .models import ModelParams, build_hf_density, build_quasitriviality_map
from .numeric import PolyEvaluator, characteristic_jets


class PDEError(RuntimeError):
    pass


class Instability(PDEError):
    pass


class ConfigInvalid(PDEError, ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    """One run of the perturbed Riemann equation on a periodic interval.

    ``initial`` is "characteristics" (u = b^{-1}(x)), "quasi" (the
    eps^4-truncated quasitriviality image of b^{-1}), "quasi2" (eps^2 part
    only) or an expression in x.
    """

    eps: float = 0.05
    c: str = "1"
    p: str = "0"
    Lx: float = 4 * math.pi
    N: int = 1024
    dt: float = 1e-3
    t_end: float = 0.5
    initial: str = "characteristics"
    a: str = "u"
    b: str = "-u-u^3"
    v_bracket: tuple = (-10.0, 10.0)
    window: float = 4.0
    blend_width: float = 1.5
    blend_value: float = 0.0
    dealias: bool = True
    include_eps4: bool | None = None  # None: include iff p is not identically zero
    snapshots: tuple = ()
    stiffness_C: float = 0.5
    growth_limit: float = 1e6

    def __post_init__(self):
        if not self.eps > 0:
            raise ConfigInvalid("eps must be positive")
        if self.N < 256 or self.N & (self.N - 1):
            raise ConfigInvalid("N must be a power of two, at least 256")
        if not (self.dt > 0 and self.t_end >= 0 and self.Lx > 0):
            raise ConfigInvalid("dt, Lx must be positive and t_end non-negative")
        if any(s < 0 or s > self.t_end for s in self.snapshots):
            raise ConfigInvalid("snapshot times must lie in [0, t_end]")
        if self.initial in ("characteristics", "quasi", "quasi2"):
            if self.window + self.blend_width >= self.Lx / 2:
                raise ConfigInvalid("window plus blend does not fit in the periodic domain")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["v_bracket"] = list(self.v_bracket)
        d["snapshots"] = list(self.snapshots)
        return d

    @property
    def eps4(self) -> bool:
        if self.include_eps4 is not None:
            return self.include_eps4
        return not exprfn.equal(exprfn.parse(self.p), exprfn.ZERO)

    def characteristic_data(self) -> CharacteristicData:
        return CharacteristicData.from_strings(self.a, self.b, self.v_bracket)


@dataclass
class Trajectory:
    x: np.ndarray
    times: list
    u: list
    monitors: dict
    config: SimConfig
    wall_time: float = 0.0
    steps: int = 0
    notes: dict = field(default_factory=dict)

    def at(self, t: float) -> np.ndarray:
        i = int(np.argmin(np.abs(np.asarray(self.times) - t)))
        if abs(self.times[i] - t) > 1e-12 * max(1.0, abs(t)):
            raise KeyError(f"no snapshot at t = {t}")
        return self.u[i]

    def manifest(self) -> dict:
        return {"config": self.config.to_dict(), "times": list(map(float, self.times)),
                "monitors": {k: list(map(float, v)) for k, v in self.monitors.items()},
                "wall_time": self.wall_time, "steps": self.steps}

    def to_json(self) -> str:
        return json.dumps(self.manifest(), sort_keys=True, indent=2)


# ---------------------------------------------------------------- grid helpers

def grid(Lx: float, N: int) -> np.ndarray:
    return -Lx / 2 + Lx * np.arange(N) / N


def wavenumbers(Lx: float, N: int) -> np.ndarray:
    """Wavenumbers of the real FFT; the Nyquist mode is treated as zero in derivatives."""
    k = 2 * np.pi / Lx * np.arange(N // 2 + 1)
    k[-1] = 0.0
    return k


def dealias_mask(N: int) -> np.ndarray:
    return np.arange(N // 2 + 1) <= N / 3


def spectral_jets(u, Lx: float, order: int, mask=None):
    """u and its first ``order`` x-derivatives by FFT."""
    k = wavenumbers(Lx, u.size)
    n = u.size
    uh = np.fft.rfft(u)
    if mask is not None:
        uh = uh * mask
    out = [np.fft.irfft(uh, n) if mask is not None else np.asarray(u, dtype=float)]
    ik = 1j * k
    cur = uh
    for _ in range(order):
        cur = cur * ik
        out.append(np.fft.irfft(cur, n))
    return out


def smooth_step(r):
    """C-infinity step: 0 for r <= 0, 1 for r >= 1."""
    r = np.clip(np.asarray(r, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        f = np.where(r > 0, np.exp(-1.0 / np.where(r > 0, r, 1.0)), 0.0)
        g = np.where(r < 1, np.exp(-1.0 / np.where(r < 1, 1.0 - r, 1.0)), 0.0)
    return f / (f + g)


def bump(x, window: float, width: float):
    """1 on |x| <= window, 0 on |x| >= window + width, smooth in between."""
    return 1.0 - smooth_step((np.abs(x) - window) / width)


# ---------------------------------------------------------------- model pieces

def _u_poly(expr: str):
    return exprfn.coerce(expr)


def _as_concrete(e: exprfn.Expr):
    """A Poly if e is polynomial in u, else None."""
    poly = exprfn.as_polynomial(e)
    if poly is None:
        return None
    out = Poly()
    for k, c in poly.items():
        out = out + (J(0) ** k * Poly.const(c) if k else Poly.const(c))
    return out


def _params(c: exprfn.Expr, p: exprfn.Expr) -> tuple[ModelParams, dict]:
    cp, pp = _as_concrete(c), _as_concrete(p)
    funcs = {}
    if cp is None:
        funcs["c"] = c
    if pp is None:
        funcs["p"] = p
    return ModelParams(c=cp, p=pp, s_choice="zero"), funcs


def hamiltonian_density(c, p, include_eps4=True):
    """Exact density u^3/6 - eps^2 c u_x^2/24 + eps^4 p u_xx^2 (s = 0) and its symbol values."""
    params, funcs = _params(_u_poly(c), _u_poly(p))
    h = build_hf_density(params, f=J(0) ** 3 * Poly.const(Fraction(1, 6)))
    if not include_eps4:
        h = h.truncate(2)
    return h, funcs


def flux_series(c, p, include_eps4=True):
    """dH/du as an eps-series of Polys."""
    h, funcs = hamiltonian_density(c, p, include_eps4)
    return variational_derivative(h), funcs


def _split_linear(series, eps):
    """Linear constant-coefficient part (as {order: coeff}) and the remainder, summed in eps."""
    linear: dict[int, float] = {}
    rest = []
    for k in series.orders():
        w = eps ** k
        for mono, coeff in series[k]:
            if len(mono) == 1 and mono[0][1] == 1 and mono[0][0][0] == JET and mono[0][0][2] >= 1:
                n = mono[0][0][2]
                linear[n] = linear.get(n, 0.0) + w * float(coeff)
            else:
                rest.append((k, mono, coeff))
    return linear, rest


class _Flux:
    """Numerical flux F(u) = sum_k eps^k F_k(u, u_x, ...)."""

    def __init__(self, series, funcs, eps, split: bool):
        self.eps = eps
        if split:
            self.linear, rest = _split_linear(series, eps)
            parts: dict[int, Poly] = {}
            for k, mono, coeff in rest:
                parts[k] = parts.get(k, Poly()) + Poly({mono: coeff})
        else:
            self.linear = {}
            parts = {k: series[k] for k in series.orders()}
        self.evaluators = [(eps ** k, PolyEvaluator(P, funcs)) for k, P in parts.items() if P]
        self.order = max([ev.max_order for _, ev in self.evaluators] + [0])

    def __call__(self, jets):
        out = np.zeros_like(jets[0])
        for w, ev in self.evaluators:
            out += w * ev(jets)
        return out

    def linear_symbol(self, k):
        """Fourier symbol of -d_x applied to the linear part of the flux."""
        s = np.zeros_like(k, dtype=complex)
        for n, coeff in self.linear.items():
            s += coeff * (1j * k) ** n
        return -1j * k * s


def _is_constant(e: exprfn.Expr) -> bool:
    return exprfn.equal(exprfn.derivative(e, 1), exprfn.ZERO)


# ---------------------------------------------------------------- initial data

def initial_from_characteristics(data: CharacteristicData, window: float, Lx: float, N: int,
                                 blend_width: float = 1.5, blend_value: float = 0.0,
                                 mode: str = "characteristics", eps: float = 0.0,
                                 c="1", p="0"):
    """u(x, 0) = b^{-1}(x) on the window (or its quasitriviality image), blended to a constant."""
    x = grid(Lx, N)
    inner = np.abs(x) < window + blend_width
    v = solve_v(data, x[inner], 0.0)
    if mode == "characteristics":
        vals = v
    elif mode in ("quasi", "quasi2"):
        vals = quasi_map_values(data, v, 0.0, eps, c, p, 4 if mode == "quasi" else 2)
    else:
        raise ConfigInvalid(f"unknown initial mode {mode!r}")
    phi = bump(x[inner], window, blend_width)
    u = np.full(N, float(blend_value))
    u[inner] = phi * vals + (1 - phi) * blend_value
    return u


def quasi_map_values(data: CharacteristicData, v, t: float, eps: float, c="1", p="0",
                     max_order: int = 4):
    """The quasitriviality map applied to the characteristic solution at the points v."""
    params, funcs = _params(_u_poly(c), _u_poly(p))
    qmap = build_quasitriviality_map(params.c_poly() if "c" not in funcs else None,
                                     params.p_poly() if "p" not in funcs else None)
    jets = characteristic_jets(data.a, data.b, v, t, 6)
    out = np.zeros_like(np.asarray(v, dtype=float))
    for k in qmap.orders():
        if k > max_order:
            continue
        out = out + eps ** k * PolyEvaluator(qmap[k], funcs)(jets)
    return out


def initial_data(cfg: SimConfig) -> np.ndarray:
    if cfg.initial in ("characteristics", "quasi", "quasi2"):
        return initial_from_characteristics(cfg.characteristic_data(), cfg.window, cfg.Lx, cfg.N,
                                            cfg.blend_width, cfg.blend_value, cfg.initial,
                                            cfg.eps, cfg.c, cfg.p)
    text = re.sub(r"\bx\b", "u", cfg.initial)
    try:
        e = exprfn.parse(text)
    except exprfn.ExprSyntaxError as exc:
        raise ConfigInvalid(f"initial data: {exc}") from exc
    return np.asarray(exprfn.evaluate(e, grid(cfg.Lx, cfg.N)), dtype=float) * np.ones(cfg.N)


def influence_free_radius(cfg: SimConfig, u0=None) -> float:
    """Half-width around 0 that boundary effects of the blend cannot reach by t_end."""
    if cfg.initial not in ("characteristics", "quasi", "quasi2"):
        return float("inf")
    u0 = initial_data(cfg) if u0 is None else u0
    a = exprfn.parse(cfg.a)
    speed = float(np.max(np.abs(exprfn.evaluate(a, u0))))
    return cfg.window - speed * cfg.t_end


# ---------------------------------------------------------------- monitors

def monitors(u, cfg: SimConfig, h_eval=None) -> dict:
    dx = cfg.Lx / cfg.N
    out = {"mean": float(np.sum(u) * dx), "momentum": float(np.sum(u * u) / 2 * dx),
           "l1": float(np.sum(np.abs(u)) * dx)}
    if h_eval is not None:
        jets = spectral_jets(u, cfg.Lx, h_eval.order)
        dens = h_eval(jets)
        out["hamiltonian"] = float(np.sum(dens) * dx)
        out["hamiltonian_abs"] = float(np.sum(np.abs(dens)) * dx)
    return out


class _Density:
    def __init__(self, cfg: SimConfig):
        h, funcs = hamiltonian_density(cfg.c, cfg.p, cfg.eps4)
        self.evals = [(cfg.eps ** k, PolyEvaluator(h[k], funcs)) for k in h.orders() if h[k]]
        self.order = max(ev.max_order for _, ev in self.evals)

    def __call__(self, jets):
        return sum(w * ev(jets) for w, ev in self.evals)


def monitor_invariants(traj: Trajectory) -> dict:
    """Drift of mean, momentum and Hamiltonian, relative to the L1 size of each density."""
    m = traj.monitors
    def drift(key, scale_key):
        vals = np.asarray(m[key])
        scale = max(abs(vals[0]), m[scale_key][0]) if m[scale_key][0] > 0 else 0.0
        d = float(np.max(np.abs(vals - vals[0])))
        return d / scale if scale > 0 else d
    out = {"mean": drift("mean", "l1"), "momentum": drift("momentum", "momentum")}
    if "hamiltonian" in m:
        out["hamiltonian"] = drift("hamiltonian", "hamiltonian_abs")
    return out


# ---------------------------------------------------------------- time stepping

def simulate(cfg: SimConfig, u0=None) -> Trajectory:
    """Advance to t_end, storing the initial state, each snapshot time and t_end."""
    start = time.perf_counter()
    c, p = _u_poly(cfg.c), _u_poly(cfg.p)
    constant = _is_constant(c) and _is_constant(p)
    series, funcs = flux_series(cfg.c, cfg.p, cfg.eps4)
    flux = _Flux(series, funcs, cfg.eps, split=constant)
    x = grid(cfg.Lx, cfg.N)
    u = initial_data(cfg) if u0 is None else np.array(u0, dtype=float)
    if u.shape != x.shape:
        raise ConfigInvalid("initial data has the wrong size")
    if not constant:
        cmax = float(np.max(np.abs(exprfn.evaluate(c, u))))
        bound = cfg.stiffness_C * (cfg.Lx / cfg.N) ** 3 / (cfg.eps ** 2 * max(cmax, 1e-300))
        if cfg.dt > bound:
            raise ConfigInvalid(f"dt = {cfg.dt} exceeds the stiffness bound {bound:.3e} for variable c")
    k = wavenumbers(cfg.Lx, cfg.N)
    mask = dealias_mask(cfg.N) if cfg.dealias else np.ones(k.size, dtype=bool)
    N = cfg.N
    ik = 1j * k
    Lsym = flux.linear_symbol(k)
    order = flux.order

    def nonlinear(vh):
        vh = vh * mask
        jets = [np.fft.irfft(vh, N)]
        cur = vh
        for _ in range(order):
            cur = cur * ik
            jets.append(np.fft.irfft(cur, N))
        Fh = np.fft.rfft(flux(jets)) * mask
        return -ik * Fh

    dens = _Density(cfg)
    times, snaps = [0.0], [u.copy()]
    mon = {key: [val] for key, val in monitors(u, cfg, dens).items()}
    targets = sorted(set([float(s) for s in cfg.snapshots if s > 0] + [float(cfg.t_end)]))
    vh = np.fft.rfft(u)
    t = 0.0
    steps = 0
    limit = cfg.growth_limit * max(1.0, float(np.max(np.abs(u))))
    cache: dict = {}
    for target in targets:
        if target <= t:
            continue
        n = max(1, int(math.ceil((target - t) / cfg.dt - 1e-9)))
        h = (target - t) / n
        if h not in cache:
            E = np.exp(Lsym * h / 2)
            cache[h] = (E, E * E)
        E, E2 = cache[h]
        for _ in range(n):
            if constant:
                a_ = h * nonlinear(vh)
                b_ = h * nonlinear(E * (vh + a_ / 2))
                c_ = h * nonlinear(E * vh + b_ / 2)
                d_ = h * nonlinear(E2 * vh + E * c_)
                vh = E2 * vh + (E2 * a_ + 2 * E * (b_ + c_) + d_) / 6
            else:
                a_ = h * nonlinear(vh)
                b_ = h * nonlinear(vh + a_ / 2)
                c_ = h * nonlinear(vh + b_ / 2)
                d_ = h * nonlinear(vh + c_)
                vh = vh + (a_ + 2 * (b_ + c_) + d_) / 6
            steps += 1
            if steps % 50 == 0 or _ == n - 1:
                us = np.fft.irfft(vh, N)
                if not np.all(np.isfinite(us)) or np.max(np.abs(us)) > limit:
                    raise Instability(f"solution blew up near t = {t + (_ + 1) * h:.6g}; "
                                      f"reduce dt (now {cfg.dt})")
        t = target
        u = np.fft.irfft(vh, N)
        times.append(t)
        snaps.append(u.copy())
        for key, val in monitors(u, cfg, dens).items():
            mon[key].append(val)
    return Trajectory(x, times, snaps, mon, cfg, time.perf_counter() - start, steps,
                      {"integrator": "IF-RK4" if constant else "RK4", "eps4": cfg.eps4})


def soliton(x, t, A: float, eps: float, x0: float = 0.0, Lx: float | None = None):
    """3A sech^2(sqrt(A/(4 eps^2)) (x - x0 - A t)) for u_t + u u_x + eps^2 u_xxx = 0."""
    s = x - x0 - A * t
    if Lx is not None:
        s = (s + Lx / 2) % Lx - Lx / 2
    return 3 * A / np.cosh(np.sqrt(A / (4 * eps * eps)) * s) ** 2
