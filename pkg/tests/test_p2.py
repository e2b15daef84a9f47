"""Boundary value solver for the special fourth order Painleve solution."""
import json

import numpy as np
import pytest

from hampert.p2 import (BlowUpDetected, GridMismatch, NewtonDiverged, NotInAsymptoticRegime,
                        ResolutionTooCoarse, asymptotic_U, blowup_bound, build_table,
                        check_resolution, continuation_in_T, cubic_root, default_delta,
                        derivatives, kdv_residual, solve_bvp)


# --- asymptotic expansion

def test_asymptotic_center():
    # w = 0: only the first correction survives
    assert asymptotic_U(0.0, -10.0, 3) == pytest.approx(-1 / 24000, rel=1e-12)


def test_asymptotic_at_w_minus_two():
    T = -4.0
    w = -2.0
    X = -((-T) ** 1.5) * (w + w**3 / 6)
    assert X == pytest.approx(80 / 3)
    lead = (-T) ** 0.5 * w
    c1 = (-T) ** 0.5 * (-T) ** -3.5 * (3 * w**2 - 2) / (3 * (w**2 + 2) ** 4)
    c2 = -(-T) ** 0.5 * (-T) ** -7 * w * (189 * w**4 - 972 * w**2 + 436) / (9 * (w**2 + 2) ** 9)
    assert asymptotic_U(X, T, 1) == pytest.approx(lead, rel=1e-14)
    assert asymptotic_U(X, T, 2) == pytest.approx(lead + c1, rel=1e-14)
    assert asymptotic_U(X, T, 3) == pytest.approx(lead + c1 + c2, rel=1e-14)
    assert asymptotic_U(X, T, 3) == pytest.approx(-4 + 4.019e-5, abs=1e-8)


def test_asymptotic_marginal_at_minus_one():
    assert asymptotic_U(0.0, -1.0, 2) == pytest.approx(-1 / 24, rel=1e-12)


def test_asymptotic_out_of_regime():
    with pytest.raises(NotInAsymptoticRegime):
        asymptotic_U(0.0, -0.1, 3)
    with pytest.raises(NotInAsymptoticRegime):
        asymptotic_U(0.0, 0.0, 3)
    # far field is fine at any T
    assert np.isfinite(asymptotic_U(200.0, 1.0, 3))


def test_cubic_root_is_leading_order():
    X = np.linspace(-30, 30, 13)
    for T in (-5.0, 0.0, 2.0):
        U = cubic_root(X, T)
        assert np.allclose(T * U - U**3 / 6, X, rtol=0, atol=1e-10 * (1 + np.abs(X)).max())


# --- BVP solve

@pytest.fixture(scope="module")
def sol10():
    return solve_bvp(-10.0, 40.0, 1601)


def test_bvp_matches_asymptotics(sol10):
    # start from the leading-order cubic so the comparison is not against the initial guess
    s = solve_bvp(-10.0, 40.0, 1601, guess=cubic_root(sol10.grid, -10.0))
    assert s.iterations >= 1
    m = np.abs(s.grid) <= 5
    err = np.max(np.abs(s.U[m] - asymptotic_U(s.grid[m], -10.0, 3)))
    assert err <= 1e-6


def test_bvp_converges_quickly(sol10):
    assert sol10.iterations <= 6
    assert sol10.residual_norm <= 1e-10


def test_bvp_slope_at_origin(sol10):
    i = np.argmin(np.abs(sol10.grid))
    d1 = derivatives(np.concatenate([[0] * 3, sol10.U, [0] * 3]), sol10.h)[1][i]
    U0 = sol10.U[i]
    assert d1 == pytest.approx(1 / (-10.0 - U0**2 / 2), rel=1e-2)


def test_bvp_monotone_at_strongly_negative_T(sol10):
    assert np.all(np.diff(sol10.U) < 0)


def test_bvp_blowup_bound(sol10):
    assert np.max(np.abs(sol10.U)) < blowup_bound(-10.0, 40.0)


def test_bvp_rejects_small_N():
    with pytest.raises(ValueError):
        solve_bvp(-10.0, 40.0, 8)


def test_bvp_blowup_guard():
    with pytest.raises((BlowUpDetected, NewtonDiverged)):
        solve_bvp(-10.0, 40.0, 1601, guess=np.full(1601, 1e4), max_iter=3)


def test_grid_convergence_fourth_order():
    ref = solve_bvp(-1.0, 20.0, 3201)
    errs = []
    for N in (201, 401, 801):
        s = solve_bvp(-1.0, 20.0, N)
        errs.append(np.max(np.abs(s.U - ref.U[:: 3200 // (N - 1)])))
    ratios = [errs[i] / errs[i + 1] for i in range(2)]
    for r in ratios:
        assert 16 / 1.5 <= r <= 16 * 1.5


def test_boundary_insensitivity():
    T = [-10.0, -6.0, -3.0, -1.0, 0.0]
    a = continuation_in_T(T, 40.0, 1601)[-1]
    b = continuation_in_T(T, 50.0, 2001)[-1]
    ma, mb = np.abs(a.grid) <= 20, np.abs(b.grid) <= 20
    assert np.allclose(a.grid[ma], b.grid[mb], rtol=0, atol=1e-12)
    assert np.max(np.abs(a.U[ma] - b.U[mb])) < 1e-6


# --- continuation

def test_continuation_to_zero():
    sols = continuation_in_T(np.arange(-10, 1, 2), 40.0, 1601)
    assert [s.T for s in sols] == [-10.0, -8.0, -6.0, -4.0, -2.0, 0.0]
    assert all(s.residual_norm <= 1e-8 for s in sols)


def test_continuation_single_is_solve(sol10):
    (s,) = continuation_in_T([-10.0], 40.0, 1601)
    assert np.array_equal(s.U, sol10.U)


def test_continuation_needs_seed():
    with pytest.raises(NewtonDiverged):
        continuation_in_T([2.0, 3.0], 40.0, 1601)


def test_continuation_needs_ascending():
    with pytest.raises(ValueError):
        continuation_in_T([-10.0, -12.0], 40.0, 1601)


def test_resolution_check():
    U = np.zeros(11)
    with pytest.raises(ResolutionTooCoarse):
        check_resolution(U, 5.0, 1.0)
    check_resolution(U, 5.0, 0.01)
    check_resolution(U, -5.0, 10.0)


# --- KdV flow in T

def test_kdv_residual_small(sol10):
    d = default_delta(-10.0)
    assert d == pytest.approx(1e-2)
    sm = solve_bvp(-10.0 - 1e-3, 40.0, 1601)
    sp = solve_bvp(-10.0 + 1e-3, 40.0, 1601)
    r = kdv_residual(sm, sol10, sp)
    assert not r["degenerate"] and r["residual"] <= 1e-4


def test_kdv_residual_degenerate(sol10):
    r = kdv_residual(sol10, sol10, sol10)
    assert r["degenerate"] and r["delta"] == 0.0


def test_kdv_residual_grid_mismatch(sol10):
    other = solve_bvp(-10.0, 40.0, 801)
    with pytest.raises(GridMismatch):
        kdv_residual(other, sol10, sol10)


def test_cubic_root_solves_hopf():
    # the cubic X = T U - U^3/6 solves U_T + U U_X = 0 exactly
    X = np.linspace(-20, 20, 9)
    T, d = -3.0, 1e-5
    U = cubic_root(X, T)
    UT = (cubic_root(X, T + d) - cubic_root(X, T - d)) / (2 * d)
    UX = (cubic_root(X + d, T) - cubic_root(X - d, T)) / (2 * d)
    assert np.max(np.abs(UT + U * UX)) < 1e-8


# --- outputs

def test_solution_serialization(tmp_path, sol10):
    sol10.write_csv(tmp_path / "u.csv")
    sol10.write_json(tmp_path / "u.json")
    raw = (tmp_path / "u.csv").read_bytes()
    assert raw.startswith(b"X,U\r\n") and raw.count(b"\r\n") == sol10.grid.size + 1
    meta = json.loads((tmp_path / "u.json").read_text())
    assert meta["T"] == -10.0 and meta["N"] == 1601


def test_table_covers_window():
    table = build_table(np.linspace(-1, 0, 5), 40.0, 1601, X_max=2.0)
    assert table.U.shape == (table.X.size, 5)
    assert table.X.min() <= -2.0 and table.X.max() >= 2.0
    spl = table.spline()
    assert float(spl.ev(0.0, 0.0)) == pytest.approx(-0.4151928, abs=1e-6)
