"""Universal profile, comparisons with simulation and exponent fits."""
from fractions import Fraction

import numpy as np
import pytest

from hampert.characteristics import CharacteristicData, solve_v
from hampert.p2 import continuation_in_T, cubic_root
from hampert.pde import SimConfig, grid, simulate
from hampert.universality import (SCALE_EXPONENTS, CriticalFrame, FrameInvalid, InsufficientData,
                                  NonConstantC, OutOfTable, RegionTooCloseToCatastrophe,
                                  WindowNotCovered, Window, check_region, compare, fit_exponent,
                                  make_profile, snapshot_times, string_residual,
                                  string_residual_values, universal_profile)

KDV = CharacteristicData.from_strings("u", "-u-u^3", (-10, 10))
GENERIC = CharacteristicData.from_strings("u", "-u-u^3+u^4/4", (-2.5, 2.5))


@pytest.fixture(scope="module")
def profile():
    return make_profile()


# --- scales

def test_scale_exponents_are_rational():
    x, t, amp = (SCALE_EXPONENTS[k] for k in ("x", "t", "amplitude"))
    assert (x, t, amp) == (Fraction(6, 7), Fraction(4, 7), Fraction(2, 7))
    # Hopf balance U_T ~ U U_X and dispersive balance U U_X ~ eps^2 U_XXX
    assert x == amp + t
    assert 2 * x == 2 - amp


def test_x_scale_at_unit_kappa():
    frame = CriticalFrame(0, 1, 0, 0, 1, 1.0, 2.5)
    for eps in (0.1, 0.01):
        assert frame.scales(eps)["x"] == pytest.approx(eps ** (6 / 7) * 2.5 ** (3 / 7), rel=1e-14)
    s = frame.scales(0.05)
    assert s["t"] * s["amplitude"] == pytest.approx(s["x"], rel=1e-14)


def test_frame_from_catastrophe_constant_c():
    frame = CriticalFrame.from_data(KDV, "3")
    assert frame.c0 == 3.0
    assert (frame.x0, frame.t0, frame.v0, frame.kappa) == pytest.approx((0, 1, 0, 6), abs=1e-10)


@pytest.mark.parametrize("kw", [{"kappa": 0.0}, {"c0": 0.0}, {"kappa": -6.0}])
def test_frame_invalid(kw):
    base = dict(x0=0, t0=1, v0=0, a0=0, a0p=1, kappa=6.0, c0=1.0)
    base.update(kw)
    with pytest.raises(FrameInvalid):
        CriticalFrame(**base)


# --- profile

def test_profile_at_origin(profile):
    frame = CriticalFrame.from_data(KDV)
    eps = 0.04
    sol = continuation_in_T([-10.0, -6.0, -3.0, -1.0, 0.0], 40.0, 1601)[-1]
    U00 = sol.U[np.argmin(np.abs(sol.grid))]
    got = universal_profile(np.array(frame.x0), frame.t0, frame, eps, profile)
    assert got == pytest.approx(frame.v0 + frame.scales(eps)["amplitude"] * U00, abs=1e-8)


def test_profile_out_of_table(profile):
    with pytest.raises(OutOfTable):
        profile.U(np.array([100.0]), 0.0)
    with pytest.raises(OutOfTable):
        profile.U(np.array([0.0]), -5.0)


def test_far_field_is_cubic_root(profile):
    near = abs(profile.U(np.array(2.0), -1.0) - cubic_root(np.array([2.0]), -1.0)[0])
    far = abs(profile.U(np.array(6.0), -1.0) - cubic_root(np.array([6.0]), -1.0)[0])
    assert far < 1e-3 and far < near / 2


def _far_mismatch(data, eps, profile, X=6.0, T=-1.0):
    frame = CriticalFrame.from_data(data)
    s = frame.scales(eps)
    t = float(frame.time_of(T, eps))
    x = frame.x0 + frame.a0 * (t - frame.t0) + s["x"] * X
    up = universal_profile(np.array([x]), t, frame, eps, profile)[0]
    return abs(up - solve_v(data, x, t)) / s["amplitude"]


def test_far_field_matches_characteristics(profile):
    # the cubic is exact for the symmetric fixture, so only the P2 correction remains
    assert _far_mismatch(KDV, 1e-2, profile) < 1e-3
    # generic data: the mismatch shrinks like eps^(2/7)
    r = _far_mismatch(GENERIC, 1e-2, profile) / _far_mismatch(GENERIC, 1e-4, profile)
    assert 100 ** (2 / 7) / 1.5 <= r <= 100 ** (2 / 7) * 1.5


# --- comparison

@pytest.fixture(scope="module")
def kdv_run():
    frame = CriticalFrame.from_data(KDV)
    eps = 0.04
    times = snapshot_times(frame, eps)
    cfg = SimConfig(eps=eps, N=4096, dt=2.5e-4, t_end=max(times), window=4.0,
                    snapshots=tuple(t for t in times if t < max(times)))
    return simulate(cfg), frame, eps


def test_residual_below_amplitude(kdv_run, profile):
    traj, frame, eps = kdv_run
    comp = compare(traj, frame, eps, profile)
    assert np.isfinite(comp.residual)
    assert comp.residual < frame.scales(eps)["amplitude"]
    assert comp.normalized == pytest.approx(comp.residual / eps ** (2 / 7))
    assert len(comp.per_time) == 11 and comp.points > 0


def test_self_comparison_is_zero(kdv_run):
    traj, frame, eps = kdv_run
    x = traj.x

    def itself(xs, t):
        return traj.at(t)[np.isin(x, xs)]

    assert compare(traj, frame, eps, reference=itself).residual == 0.0


def test_zero_window_is_pointwise(kdv_run, profile):
    traj, frame, eps = kdv_run
    w = Window(X_max=0.0, T_min=0.0, T_max=0.0, n_T=1)
    comp = compare(traj, frame, eps, profile, w)
    i = int(np.argmin(np.abs(traj.x - frame.x0)))
    u = traj.at(frame.t0)[i]
    ref = universal_profile(traj.x[i:i + 1], frame.t0, frame, eps, profile)[0]
    assert comp.points == 1 and comp.residual == pytest.approx(abs(u - ref), rel=1e-14)


def test_missing_snapshot(kdv_run, profile):
    traj, frame, eps = kdv_run
    with pytest.raises(WindowNotCovered):
        compare(traj, frame, eps, profile, Window(n_T=7))


# --- exponent fit

def test_fit_recovers_synthetic_exponent():
    eps = np.array([0.08, 0.04, 0.02, 0.01])
    fit = fit_exponent(eps, 3.7 * eps ** (4 / 7))
    assert abs(fit.slope - 4 / 7) <= 1e-12
    assert fit.stderr <= 1e-12


def test_fit_needs_three_values():
    with pytest.raises(InsufficientData):
        fit_exponent([0.1, 0.05], [1.0, 0.5])
    with pytest.raises(InsufficientData):
        fit_exponent([0.1, 0.1, 0.05], [1.0, 1.0, 0.5])


# --- quasitriviality region and the string relation

def test_region_too_close_to_catastrophe():
    with pytest.raises(RegionTooCloseToCatastrophe):
        check_region(KDV, 0.95, 1.0)
    check_region(KDV, 0.2, 1.0)


def test_string_relation_exact_at_order_zero():
    Lx, N, t = 4 * np.pi, 1024, 0.2
    x = grid(Lx, N)
    u = np.zeros(N)
    m = np.abs(x) <= 4.0
    u[m] = solve_v(KDV, x[m], t)
    r = string_residual_values(u, x, Lx, KDV, 1.0, 0.0, 0.0, t)
    assert np.max(np.abs(r[np.abs(x) <= 1.0])) <= 1e-8


def test_string_needs_constant_c():
    traj = simulate(SimConfig(c="1 + u^2/4", N=256, dt=1e-3, t_end=0.01))
    with pytest.raises(NonConstantC):
        string_residual(traj, KDV, 0.1, 0.01)
