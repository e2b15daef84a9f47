"""Universal critical profile, comparison with direct simulation, exponent fits."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from . import exprfn
from .characteristics import CatastrophePoint, CharacteristicData, find_catastrophe, solve_v
from .models import build_string_density
from .numeric import PolyEvaluator, characteristic_jets
from .p2 import P2Table, build_table
from .pde import SimConfig, Trajectory, influence_free_radius, quasi_map_values, spectral_jets


class UniversalityError(RuntimeError):
    pass


class OutOfTable(UniversalityError):
    pass


class WindowNotCovered(UniversalityError):
    pass


class InsufficientData(UniversalityError):
    pass


class RegionTooCloseToCatastrophe(UniversalityError):
    pass


class NonConstantC(UniversalityError):
    pass


class FrameInvalid(UniversalityError):
    pass


# powers of eps in the x-scale, the t-scale and the amplitude
SCALE_EXPONENTS = {"x": Fraction(6, 7), "t": Fraction(4, 7), "amplitude": Fraction(2, 7)}


@dataclass(frozen=True)
class CriticalFrame:
    x0: float
    t0: float
    v0: float
    a0: float
    a0p: float
    kappa: float
    c0: float

    def __post_init__(self):
        if self.kappa == 0:
            raise FrameInvalid("kappa = 0")
        if self.c0 == 0:
            raise FrameInvalid("c0 = c(v0) = 0: the solution is not generic")
        if self.kappa * self.a0p <= 0:
            raise FrameInvalid("kappa * a0' must be positive")

    @classmethod
    def from_catastrophe(cls, cp: CatastrophePoint, c="1") -> "CriticalFrame":
        c0 = float(exprfn.evaluate(exprfn.coerce(c), cp.v0))
        return cls(cp.x0, cp.t0, cp.v0, cp.a0, cp.a0p, cp.kappa, c0)

    @classmethod
    def from_data(cls, data: CharacteristicData, c="1") -> "CriticalFrame":
        return cls.from_catastrophe(find_catastrophe(data), c)

    def scales(self, eps: float) -> dict:
        """x-scale (kappa c0^3 eps^6)^(1/7), t-scale (kappa^3 c0^2 eps^4)^(1/7), amplitude (eps^2 c0/kappa^2)^(1/7)."""
        k, c = self.kappa, self.c0
        return {"x": (k * c ** 3 * eps ** 6) ** (1 / 7), "t": (k ** 3 * c ** 2 * eps ** 4) ** (1 / 7),
                "amplitude": (eps ** 2 * c / k ** 2) ** (1 / 7)}

    def scaled(self, x, t, eps):
        s = self.scales(eps)
        X = (np.asarray(x) - self.a0 * (t - self.t0) - self.x0) / s["x"]
        T = self.a0p * (t - self.t0) / s["t"]
        return X, T

    def time_of(self, T, eps):
        return self.t0 + np.asarray(T) * self.scales(eps)["t"] / self.a0p

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Window:
    """Scaled window |X| <= X_max, T in [T_min, T_max], sampled at n_T times."""

    X_max: float = 2.0
    T_min: float = -1.0
    T_max: float = 0.0
    n_T: int = 11

    def T_values(self):
        if self.n_T == 1 or self.T_min == self.T_max:
            return np.array([self.T_max])
        return np.linspace(self.T_min, self.T_max, self.n_T)


class Profile:
    """u = v0 + amplitude * U(X; T) by bicubic interpolation of a P2 table."""

    def __init__(self, table: P2Table):
        self.table = table
        self._spline = table.spline()

    def U(self, X, T):
        X = np.asarray(X, dtype=float)
        T = np.broadcast_to(np.asarray(T, dtype=float), X.shape)
        t = self.table
        if X.size and (np.max(np.abs(X)) > min(-t.X[0], t.X[-1]) + 1e-12
                       or np.min(T) < t.T[0] - 1e-12 or np.max(T) > t.T[-1] + 1e-12):
            raise OutOfTable(f"(X, T) outside the table X in [{t.X[0]}, {t.X[-1]}], "
                             f"T in [{t.T[0]}, {t.T[-1]}]")
        out = self._spline.ev(X, T)
        return out if out.ndim else float(out)


def make_profile(window: Window = Window(), L: float = 40.0, N: int = 1601, n_T: int = 21,
                 X_margin: float = 4.0) -> Profile:
    T_values = np.linspace(window.T_min, window.T_max, n_T) if window.T_min < window.T_max \
        else np.array([window.T_max])
    if len(T_values) < 4:
        # bicubic in T needs four nodes; pad downward
        T_values = np.linspace(window.T_max - 1.0, window.T_max, 4)
    return Profile(build_table(T_values, L, N, X_max=window.X_max + X_margin))


def universal_profile(x, t, frame: CriticalFrame, eps: float, profile: Profile):
    X, T = frame.scaled(x, t, eps)
    return frame.v0 + frame.scales(eps)["amplitude"] * profile.U(X, T)


@dataclass
class Comparison:
    eps: float
    residual: float
    normalized: float  # residual / eps^(2/7)
    per_time: list
    amplitude_observed: float
    amplitude_predicted: float
    points: int

    @property
    def amplitude_error(self) -> float:
        return abs(self.amplitude_observed / self.amplitude_predicted - 1)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["amplitude_error"] = self.amplitude_error
        return d


def snapshot_times(frame: CriticalFrame, eps: float, window: Window = Window()) -> tuple:
    return tuple(float(t) for t in frame.time_of(window.T_values(), eps))


def compare(traj: Trajectory, frame: CriticalFrame, eps: float, profile: Profile | None = None,
            window: Window = Window(), reference=None) -> Comparison:
    """sup |u_sim - reference| over grid points of the scaled window.

    ``reference(x, t)`` defaults to the universal profile.
    """
    if reference is None:
        if profile is None:
            raise ValueError("need a profile or a reference")
        reference = lambda x, t: universal_profile(x, t, frame, eps, profile)  # noqa: E731
    s = frame.scales(eps)
    radius = influence_free_radius(traj.config, traj.u[0])
    per_time = []
    total = 0.0
    npts = 0
    for T in window.T_values():
        t = float(frame.time_of(T, eps))
        try:
            u = traj.at(t)
        except KeyError as exc:
            raise WindowNotCovered(f"trajectory has no snapshot at t = {t}") from exc
        X, _ = frame.scaled(traj.x, t, eps)
        m = np.abs(X) <= window.X_max
        if not np.any(m):
            m = np.zeros_like(m)
            m[np.argmin(np.abs(X))] = True
        xs = traj.x[m]
        if np.max(np.abs(xs)) > radius:
            raise WindowNotCovered("window reaches the region influenced by the blended boundary")
        r = float(np.max(np.abs(u[m] - reference(xs, t))))
        per_time.append({"T": float(T), "t": t, "residual": r})
        total = max(total, r)
        npts += int(m.sum())
    # amplitude at (X, T) = (0, 0)
    amp_obs = float("nan")
    if profile is not None:
        try:
            u0 = traj.at(frame.t0)
            X0, _ = frame.scaled(traj.x, frame.t0, eps)
            i = int(np.argmin(np.abs(X0)))
            U00 = profile.U(np.array(X0[i]), 0.0)
            amp_obs = float((u0[i] - frame.v0) / U00)
        except KeyError:
            pass
    return Comparison(eps, total, total / eps ** float(SCALE_EXPONENTS["amplitude"]), per_time,
                      amp_obs, s["amplitude"], npts)


@dataclass
class FitResult:
    slope: float
    intercept: float
    stderr: float
    eps: list
    values: list

    def to_dict(self) -> dict:
        return asdict(self)


def fit_exponent(eps_list, residuals) -> FitResult:
    """Least-squares slope of log(residual) against log(eps)."""
    e = np.asarray(eps_list, dtype=float)
    r = np.asarray(residuals, dtype=float)
    if len(set(e.tolist())) < 3:
        raise InsufficientData("need at least three distinct eps values")
    if np.any(r <= 0) or np.any(~np.isfinite(r)):
        raise ValueError("residuals must be positive and finite")
    x, y = np.log(e), np.log(r)
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    fit = A @ coef
    dof = len(x) - 2
    s2 = float(np.sum((y - fit) ** 2) / dof) if dof > 0 else 0.0
    se = float(np.sqrt(s2 / np.sum((x - x.mean()) ** 2)))
    return FitResult(float(coef[0]), float(coef[1]), se, e.tolist(), r.tolist())


# ---------------------------------------------------------------- end-to-end runs

@dataclass(frozen=True)
class UniversalityRun:
    """KdV universality study: one simulation per eps, compared on the scaled window."""

    a: str = "u"
    b: str = "-u-u^3+u^4/4"
    c: str = "1"
    v_bracket: tuple = (-2.5, 2.5)
    eps_list: tuple = (0.08, 0.04, 0.02)
    N_list: tuple = (2048, 4096, 4096)
    dt: float = 2.5e-4
    Lx: float = 4 * np.pi
    window_x: float = 4.0
    blend_width: float = 1.5
    X_max: float = 2.0
    T_min: float = -1.0
    T_max: float = 0.0
    n_T: int = 11
    p2_L: float = 40.0
    p2_N: int = 1601

    @property
    def window(self) -> Window:
        return Window(self.X_max, self.T_min, self.T_max, self.n_T)


@dataclass
class UniversalityReport:
    frame: dict
    comparisons: list
    fit: dict
    window: dict
    notes: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2)


def run_simulations(configs, simulate_fn=None, workers: int = 1) -> list:
    """Independent runs, in parallel processes when workers > 1; order is preserved."""
    from .pde import simulate
    simulate_fn = simulate_fn or simulate
    configs = list(configs)
    if workers <= 1 or len(configs) <= 1:
        return [simulate_fn(c) for c in configs]
    from concurrent.futures import ProcessPoolExecutor
    with ProcessPoolExecutor(max_workers=min(workers, len(configs))) as ex:
        return list(ex.map(simulate_fn, configs))


def run_universality(run: UniversalityRun = UniversalityRun(), profile: Profile | None = None,
                     simulate_fn=None, workers: int = 1, fit: bool = True) -> UniversalityReport:
    data = CharacteristicData.from_strings(run.a, run.b, run.v_bracket)
    frame = CriticalFrame.from_data(data, run.c)
    profile = profile or make_profile(run.window, run.p2_L, run.p2_N)
    if len(run.N_list) != len(run.eps_list):
        raise ValueError("eps_list and N_list must have equal length")
    cfgs = []
    for eps, N in zip(run.eps_list, run.N_list):
        times = snapshot_times(frame, eps, run.window)
        cfgs.append(SimConfig(eps=eps, c=run.c, p="0", Lx=run.Lx, N=N, dt=run.dt, t_end=max(times),
                        initial="characteristics", a=run.a, b=run.b, v_bracket=run.v_bracket,
                        window=run.window_x, blend_width=run.blend_width,
                        snapshots=tuple(t for t in times if t < max(times))))
    trajs = run_simulations(cfgs, simulate_fn, workers)
    comps = [compare(tr, frame, eps, profile, run.window) for tr, eps in zip(trajs, run.eps_list)]
    result = fit_exponent([c.eps for c in comps], [c.residual for c in comps]).to_dict() if fit else {}
    return UniversalityReport(frame.to_dict(), [c.to_dict() for c in comps], result,
                              asdict(run.window), {"target_slope": float(Fraction(4, 7))})


# ---------------------------------------------------------------- quasitriviality numerics

@dataclass(frozen=True)
class QuasiRun:
    a: str = "u"
    b: str = "-u-u^3"
    c: str = "1"
    p: str = "0"
    eps_list: tuple = (0.1, 0.05, 0.025)
    t: float = 0.2
    region: float = 1.0
    max_order: int = 4
    N: int = 1024
    dt: float = 1e-3
    Lx: float = 4 * np.pi
    window_x: float = 4.0
    blend_width: float = 1.5
    v_bracket: tuple = (-10.0, 10.0)
    min_vx: float = 0.05
    min_gap: float = 0.1  # required t0 - t, as a fraction of t0


def check_region(data: CharacteristicData, t: float, region: float, min_vx: float = 0.05,
                 min_gap: float = 0.1, n: int = 201) -> None:
    cp = find_catastrophe(data)
    if t >= cp.t0 * (1 - min_gap):
        raise RegionTooCloseToCatastrophe(f"t = {t} is within {min_gap:.0%} of t0 = {cp.t0}")
    x = np.linspace(-region, region, n)
    v = solve_v(data, x, t)
    vx = characteristic_jets(data.a, data.b, v, t, 1)[1]
    if np.min(np.abs(vx)) < min_vx:
        raise RegionTooCloseToCatastrophe(f"|v_x| drops to {np.min(np.abs(vx)):.3g} < {min_vx}")


def quasi_residual(traj: Trajectory, data: CharacteristicData, c, p, eps: float, t: float,
                   region: float, max_order: int = 4) -> float:
    u = traj.at(t)
    m = np.abs(traj.x) <= region
    if np.max(np.abs(traj.x[m])) > influence_free_radius(traj.config, traj.u[0]):
        raise WindowNotCovered("region reaches the influence of the blended boundary")
    v = solve_v(data, traj.x[m], t)
    uq = quasi_map_values(data, v, t, eps, c, p, max_order)
    return float(np.max(np.abs(u[m] - uq)))


def quasitriviality_compare(run: QuasiRun = QuasiRun(), simulate_fn=None, workers: int = 1) -> dict:
    """sup |u_sim - Q(v)| on the region for each eps, and the fitted slope.

    The simulation starts from Q(v) at t = 0, truncated at the same order.
    """
    data = CharacteristicData.from_strings(run.a, run.b, run.v_bracket)
    check_region(data, run.t, run.region, run.min_vx, run.min_gap)
    mode = "quasi" if run.max_order >= 4 else "quasi2"
    cfgs = [SimConfig(eps=eps, c=run.c, p=run.p, Lx=run.Lx, N=run.N, dt=run.dt, t_end=run.t,
                      initial=mode, a=run.a, b=run.b, v_bracket=run.v_bracket,
                      window=run.window_x, blend_width=run.blend_width) for eps in run.eps_list]
    trajs = run_simulations(cfgs, simulate_fn, workers)
    res = [quasi_residual(tr, data, run.c, run.p, eps, run.t, run.region, run.max_order)
           for tr, eps in zip(trajs, run.eps_list)]
    fit = fit_exponent(run.eps_list, res)
    return {"eps": list(run.eps_list), "residuals": res, "slope": fit.slope, "stderr": fit.stderr,
            "max_order": run.max_order, "t": run.t, "region": run.region}


# ---------------------------------------------------------------- string relation

def string_residual_values(u, x, Lx: float, data: CharacteristicData, c0: float, p0: float,
                           eps: float, t: float, include_missing_term: bool = True):
    """x - [t a(u) + b(u) + eps^2 (...) + eps^4 (...)] with spectral derivatives of u."""
    S = build_string_density(include_missing_term=include_missing_term)
    jets = spectral_jets(u, Lx, 6)
    total = np.zeros_like(u)
    for k in S.orders():
        ev = PolyEvaluator(S[k], {"a": data.a, "b": data.b}, {"c0": c0, "p0": p0, "t": t})
        total = total + eps ** k * ev(jets)
    return x - total


def string_residual(traj: Trajectory, data: CharacteristicData, eps: float, t: float,
                    region: float = 1.0, include_missing_term: bool = True) -> float:
    cfg = traj.config
    c, p = exprfn.parse(cfg.c), exprfn.parse(cfg.p)
    for name, e in (("c", c), ("p", p)):
        if not exprfn.equal(exprfn.derivative(e, 1), exprfn.ZERO):
            raise NonConstantC(f"{name}(u) = {exprfn.render(e)} is not constant")
    c0 = float(exprfn.evaluate(c, 0.0))
    p0 = float(exprfn.evaluate(p, 0.0))
    u = traj.at(t)
    r = string_residual_values(u, traj.x, cfg.Lx, data, c0, p0, eps, t, include_missing_term)
    m = np.abs(traj.x) <= region
    if np.max(np.abs(traj.x[m])) > influence_free_radius(cfg, traj.u[0]):
        raise WindowNotCovered("region reaches the influence of the blended boundary")
    return float(np.max(np.abs(r[m])))


@dataclass(frozen=True)
class StringRun:
    a: str = "u"
    b: str = "-u-u^3"
    c: str = "1"
    eps_list: tuple = (0.1, 0.05)
    t: float = 0.2
    region: float = 1.0
    N: int = 2048
    dt: float = 2.5e-4
    Lx: float = 4 * np.pi
    window_x: float = 4.0
    blend_width: float = 1.5
    v_bracket: tuple = (-10.0, 10.0)


def string_study(run: StringRun = StringRun(), simulate_fn=None, workers: int = 1) -> dict:
    """String-relation residual on simulations started from the quasitriviality image of b^{-1}."""
    data = CharacteristicData.from_strings(run.a, run.b, run.v_bracket)
    cfgs = [SimConfig(eps=eps, c=run.c, p="0", Lx=run.Lx, N=run.N, dt=run.dt, t_end=run.t,
                      initial="quasi", a=run.a, b=run.b, v_bracket=run.v_bracket,
                      window=run.window_x, blend_width=run.blend_width) for eps in run.eps_list]
    trajs = run_simulations(cfgs, simulate_fn, workers)
    res = [string_residual(tr, data, eps, run.t, run.region) for tr, eps in zip(trajs, run.eps_list)]
    ratios = [res[i] / res[i + 1] for i in range(len(res) - 1)]
    return {"eps": list(run.eps_list), "residuals": res, "ratios": ratios, "t": run.t,
            "region": run.region}
