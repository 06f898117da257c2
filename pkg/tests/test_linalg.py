import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from phgrasp.exceptions import ContractViolation, FactorizationError
from phgrasp.linalg import (cholesky_factor, solve_general, solve_lower, solve_lower_t,
                            solve_spd, solve_upper)


def test_identity_factor():
    np.testing.assert_array_equal(cholesky_factor(np.eye(3)), np.eye(3))


def test_scalar_factor():
    np.testing.assert_array_equal(cholesky_factor([[4.0]]), [[2.0]])


def test_two_by_two_factor():
    T = cholesky_factor([[4.0, 2.0], [2.0, 5.0]])
    np.testing.assert_allclose(T, [[2.0, 0.0], [1.0, 2.0]], rtol=0, atol=1e-15)
    np.testing.assert_allclose(T @ T.T, [[4.0, 2.0], [2.0, 5.0]], rtol=1e-15)


@pytest.mark.parametrize("M, pivot", [
    ([[0.0]], 0),
    ([[-1.0]], 0),
    ([[1.0, 2.0], [2.0, 1.0]], 1),
    ([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -3.0]], 2),
])
def test_non_spd_reports_pivot(M, pivot):
    with pytest.raises(FactorizationError) as info:
        cholesky_factor(M)
    assert info.value.pivot == pivot


def test_rejects_non_square():
    with pytest.raises(ContractViolation):
        cholesky_factor(np.ones((2, 3)))


def _spd(a):
    n = a.shape[0]
    return a @ a.T + n * np.eye(n)


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, (5, 5), elements=st.floats(-2, 2)))
def test_factor_matches_numpy(a):
    M = _spd(a)
    T = cholesky_factor(M)
    np.testing.assert_allclose(T, np.linalg.cholesky(M), rtol=1e-12, atol=1e-12)
    assert np.all(np.triu(T, 1) == 0.0)
    assert np.all(np.diag(T) > 0)


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, (4, 4), elements=st.floats(-2, 2)),
       arrays(np.float64, (4,), elements=st.floats(-5, 5)))
def test_triangular_solves(a, b):
    T = cholesky_factor(_spd(a))
    np.testing.assert_allclose(T @ solve_lower(T, b), b, atol=1e-12)
    np.testing.assert_allclose(T.T @ solve_lower_t(T, b), b, atol=1e-12)
    np.testing.assert_allclose(T.T @ solve_upper(T.T, b), b, atol=1e-12)
    np.testing.assert_allclose(_spd(a) @ solve_spd(_spd(a), b), b, atol=1e-10)


def test_matrix_right_hand_side():
    T = np.array([[2.0, 0.0], [1.0, 3.0]])
    B = np.array([[1.0, 2.0], [3.0, 4.0]])
    np.testing.assert_allclose(solve_lower(T, B), np.linalg.solve(T, B), rtol=1e-15)


def test_solve_general_scalar_and_matrix():
    np.testing.assert_allclose(solve_general(np.array([[4.0]]), np.array([2.0])), [0.5])
    A = np.array([[0.0, 2.0], [1.0, 1.0]])
    np.testing.assert_allclose(A @ solve_general(A, np.array([1.0, 2.0])), [1.0, 2.0])
