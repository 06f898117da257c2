"""Small dense Cholesky factorization and triangular solves.

Sized for the handful of degrees of freedom a manipulator has (n <= ~10),
where per-call overhead matters more than asymptotic cost.
"""

import math

import numpy as np

from .exceptions import ContractViolation, FactorizationError


def cholesky_factor(M):
    """Lower-triangular ``T`` with positive diagonal and ``T @ T.T == M``.

    Raises:
        FactorizationError: a pivot is not strictly positive; carries the
            pivot index.
    """
    M = np.atleast_2d(np.asarray(M, dtype=float))
    n = M.shape[0]
    if M.shape != (n, n):
        raise ContractViolation(f"expected a square matrix, got {M.shape}")
    if n == 1:
        if not M[0, 0] > 0.0:
            raise FactorizationError(0, M[0, 0])
        return np.array([[math.sqrt(M[0, 0])]])
    T = np.zeros_like(M)
    for j in range(n):
        d = M[j, j] - T[j, :j] @ T[j, :j]
        if not d > 0.0:
            raise FactorizationError(j, d)
        T[j, j] = math.sqrt(d)
        if j + 1 < n:
            T[j + 1:, j] = (M[j + 1:, j] - T[j + 1:, :j] @ T[j, :j]) / T[j, j]
    return T


def solve_lower(L, b):
    """Solve ``L x = b`` for lower-triangular ``L`` (vector or matrix ``b``)."""
    b = np.asarray(b, dtype=float)
    n = L.shape[0]
    if n == 1:
        return b / L[0, 0]
    x = np.array(b, dtype=float, copy=True)
    for i in range(n):
        x[i] = (x[i] - L[i, :i] @ x[:i]) / L[i, i]
    return x


def solve_upper(U, b):
    """Solve ``U x = b`` for upper-triangular ``U``."""
    b = np.asarray(b, dtype=float)
    n = U.shape[0]
    if n == 1:
        return b / U[0, 0]
    x = np.array(b, dtype=float, copy=True)
    for i in range(n - 1, -1, -1):
        x[i] = (x[i] - U[i, i + 1:] @ x[i + 1:]) / U[i, i]
    return x


def solve_lower_t(L, b):
    """Solve ``L^T x = b`` given lower-triangular ``L``."""
    return solve_upper(L.T, b)


def solve_spd(M, b):
    """Solve ``M x = b`` for symmetric positive-definite ``M`` via Cholesky."""
    T = cholesky_factor(M)
    return solve_lower_t(T, solve_lower(T, b))


def solve_general(A, b):
    """Solve ``A x = b`` for a general invertible square ``A``."""
    if A.shape[0] == 1:
        return np.asarray(b, dtype=float) / A[0, 0]
    return np.linalg.solve(A, b)
