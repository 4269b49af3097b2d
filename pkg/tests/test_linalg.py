import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays
from scipy.optimize import minimize_scalar

from mrslmr.errors import NumericError, ShapeError
from mrslmr.linalg import inf_norm, soft_threshold, solve_spd, svt

finite = st.floats(-50, 50, allow_nan=False, allow_infinity=False)
small = arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 6)), elements=finite)


def test_svt_diag():
    np.testing.assert_allclose(svt(np.diag([3.0, 1.0]), 1.0), np.diag([2.0, 0.0]), atol=1e-12)


def test_svt_zero_threshold_is_identity():
    M = np.random.default_rng(3).standard_normal((4, 7))
    np.testing.assert_allclose(svt(M, 0.0), M, atol=1e-10)


def test_svt_spectrum_on_random_matrices():
    rng = np.random.default_rng(2024)
    for _ in range(50):
        M = rng.standard_normal((5, 5))
        s = np.linalg.svd(M, compute_uv=False)
        out = np.linalg.svd(svt(M, 0.7), compute_uv=False)
        np.testing.assert_allclose(np.sort(out), np.sort(np.maximum(s - 0.7, 0)), atol=1e-8)


def test_svt_rejects_nonfinite():
    with pytest.raises(NumericError):
        svt(np.array([[np.nan, 1.0]]), 1.0)


@given(small, st.floats(0, 10))
def test_svt_nonexpansive(M, theta):
    N = M + np.random.default_rng(0).standard_normal(M.shape)
    lhs = np.linalg.norm(svt(M, theta) - svt(N, theta))
    assert lhs <= np.linalg.norm(M - N) + 1e-8


@given(small, st.floats(0, 10))
def test_svt_does_not_raise_rank(M, theta):
    rank = lambda A: int(np.sum(np.linalg.svd(A, compute_uv=False) > 1e-10))
    assert rank(svt(M, theta)) <= rank(M)


@pytest.mark.parametrize("m,theta,expected", [(1.5, 1.0, 0.5), (-0.3, 1.0, 0.0), (-2.0, 0.5, -1.5)])
def test_soft_threshold_examples(m, theta, expected):
    assert soft_threshold([[m]], theta)[0, 0] == pytest.approx(expected, abs=1e-15)


def brute_prox_l1(m, theta):
    f = lambda s: theta * abs(s) + 0.5 * (s - m) ** 2
    grid = np.linspace(-abs(m) - 1, abs(m) + 1, 4001)
    s0 = grid[np.argmin([f(s) for s in grid])]
    step = grid[1] - grid[0]
    return minimize_scalar(f, bounds=(s0 - step, s0 + step), method="bounded",
                           options={"xatol": 1e-10}).x


@given(arrays(np.float64, (2, 3), elements=st.floats(-5, 5)), st.floats(0, 3))
def test_soft_threshold_matches_brute_force(M, theta):
    out = soft_threshold(M, theta)
    for ij in np.ndindex(M.shape):
        assert abs(out[ij] - brute_prox_l1(M[ij], theta)) <= 1e-6


def test_solve_identity():
    B = np.random.default_rng(0).standard_normal((3, 5))
    S, fired = solve_spd(np.eye(3), B)
    assert not fired
    np.testing.assert_array_equal(S, B)


def test_solve_random_spd_residual():
    rng = np.random.default_rng(11)
    G = rng.standard_normal((6, 6))
    A = G @ G.T + 0.1 * np.eye(6)
    B = rng.standard_normal((6, 4))
    S, fired = solve_spd(A, B)
    assert not fired
    assert inf_norm(A @ S - B) <= 1e-8


def test_solve_singular_uses_ridge():
    S, fired = solve_spd(np.zeros((2, 2)), np.eye(2))
    assert fired
    assert np.all(np.isfinite(S))


def test_solve_rank_deficient_uses_ridge():
    v = np.array([[1.0], [2.0], [3.0]])
    S, fired = solve_spd(v @ v.T, np.ones((3, 1)))
    assert fired and np.all(np.isfinite(S))


def test_solve_shape_errors():
    with pytest.raises(ShapeError):
        solve_spd(np.ones((2, 3)), np.ones((2, 1)))
    with pytest.raises(ShapeError):
        solve_spd(np.eye(2), np.ones((3, 1)))


@pytest.mark.parametrize("M,expected", [([[1, -3], [2, 0]], 3.0), (np.zeros((2, 2)), 0.0), ([[-5.5]], 5.5)])
def test_inf_norm(M, expected):
    assert inf_norm(M) == expected
