"""Change of coordinates to an identity mass-inertia matrix.

With ``M(q) = T(q) T(q)^T`` (``T`` lower triangular) the map::

    qbar = q - q_f,    pbar = T(q)^-1 p

turns the mechanical system into one with Hamiltonian
``1/2 pbar^T pbar + V(qbar + q_f)``.  The momentum map depends on ``q``, so the
transformed dynamics pick up a skew-symmetric gyroscopic term ``J2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import MechanicalPHSystem, PlantState, as_vector
from .exceptions import ContractViolation
from .linalg import solve_lower, solve_lower_t

FD_STEP = 1e-6


@dataclass(frozen=True)
class TransformedState:
    """Shifted coordinates ``qbar`` and normalized momenta ``pbar``.

    ``phat`` is filled in by the rest-length controller when it adapts the
    momenta; it is not needed by the transformation itself.
    """

    qbar: np.ndarray
    pbar: np.ndarray
    phat: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, "qbar", np.atleast_1d(np.asarray(self.qbar, dtype=float)))
        object.__setattr__(self, "pbar", np.atleast_1d(np.asarray(self.pbar, dtype=float)))
        if self.qbar.shape != self.pbar.shape:
            raise ContractViolation("qbar and pbar must have equal shape")


@dataclass(frozen=True)
class TransformedSystem:
    """A mechanical system seen through the Cholesky coordinate change.

    Args:
        base: the original system.
        q_f: constant virtual desired position (the origin of ``qbar``).
        cholesky: optional ``q -> T(q)``; defaults to factoring ``base.M``.
        cholesky_jac: optional analytic ``(qbar, pbar) -> W`` where ``W`` is
            the Jacobian of ``q -> T(q)^-1 p`` at fixed physical momentum
            ``p = T pbar``.  Defaults to central differences.
        cholesky_rate: optional analytic ``(q, qdot) -> dT/dt``.
    """

    base: MechanicalPHSystem
    q_f: np.ndarray
    cholesky: Optional[Callable[[np.ndarray], np.ndarray]] = None
    cholesky_jac: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None
    cholesky_rate: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None
    _T_const: Optional[np.ndarray] = field(init=False, default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "q_f", as_vector(self.q_f, self.base.n, "q_f"))
        if self.base.constant_mass and self.cholesky is None:
            object.__setattr__(self, "_T_const", self._factor(self.q_f))

    @property
    def n(self):
        return self.base.n

    def _factor(self, q):
        if self.cholesky is not None:
            return np.asarray(self.cholesky(q), dtype=float).reshape(self.n, self.n)
        return self.base.mass_factor(q)

    def T(self, q):
        """Lower-triangular factor at physical configuration ``q``."""
        if self._T_const is not None:
            return self._T_const
        return self._factor(q)

    def momentum_jacobian(self, qbar, pbar):
        """``d(T(q)^-1 p)/dq`` at fixed ``p``, evaluated at ``q = qbar + q_f``."""
        n = self.n
        if self.base.constant_mass:
            return np.zeros((n, n))
        if self.cholesky_jac is not None:
            return np.asarray(self.cholesky_jac(qbar, pbar), dtype=float).reshape(n, n)
        q = qbar + self.q_f
        p = self.T(q) @ pbar
        W = np.empty((n, n))
        for j in range(n):
            h = FD_STEP * max(1.0, abs(q[j]))
            qp = q.copy()
            qm = q.copy()
            qp[j] += h
            qm[j] -= h
            W[:, j] = (solve_lower(self.T(qp), p) - solve_lower(self.T(qm), p)) / (2.0 * h)
        return W

    def factor_rate(self, q, qdot):
        """Time derivative of ``T`` along the velocity ``qdot``."""
        n = self.n
        if self.base.constant_mass:
            return np.zeros((n, n))
        if self.cholesky_rate is not None:
            return np.asarray(self.cholesky_rate(q, qdot), dtype=float).reshape(n, n)
        speed = float(np.linalg.norm(qdot))
        if speed == 0.0:
            return np.zeros((n, n))
        d = qdot / speed
        h = FD_STEP * max(1.0, float(np.max(np.abs(q))))
        return (self.T(q + h * d) - self.T(q - h * d)) * (speed / (2.0 * h))

    def Gbar(self, q):
        return solve_lower(self.T(q), self.base.G(q))

    def Bbar(self, q):
        return solve_lower(self.T(q), self.base.B(q))

    def Dbar(self, q, p):
        T = self.T(q)
        # T^-1 D T^-T
        left = solve_lower(T, self.base.D(q, p))
        return solve_lower(T, left.T).T


def to_transformed(ts, s):
    """Map ``(q, p)`` to ``(qbar, pbar) = (q - q_f, T(q)^-1 p)``."""
    if s.n != ts.n:
        raise ContractViolation(f"state dimension {s.n} != system n={ts.n}")
    return TransformedState(s.q - ts.q_f, solve_lower(ts.T(s.q), s.p))


def from_transformed(ts, xb, t=0.0):
    """Inverse map ``(qbar, pbar) -> (qbar + q_f, T(q) pbar)``."""
    qbar = as_vector(xb.qbar, ts.n, "qbar")
    pbar = as_vector(xb.pbar, ts.n, "pbar")
    q = qbar + ts.q_f
    return PlantState(q, ts.T(q) @ pbar, t)


def transformed_hamiltonian(ts, xb):
    """``1/2 pbar^T pbar + V(qbar + q_f)``."""
    return 0.5 * float(xb.pbar @ xb.pbar) + ts.base.V(xb.qbar + ts.q_f)


def gyroscopic_matrix(ts, xb, raw=False):
    """Skew-symmetric gyroscopic matrix ``J2 = W T^-T - T^-1 W^T``.

    ``W`` is :meth:`TransformedSystem.momentum_jacobian`.  The assembled matrix
    is antisymmetrized before it is returned unless ``raw`` is set.
    """
    q = xb.qbar + ts.q_f
    W = ts.momentum_jacobian(xb.qbar, xb.pbar)
    T = ts.T(q)
    TinvWt = solve_lower(T, W.T)
    J = TinvWt.T - TinvWt
    if raw:
        return J
    return 0.5 * (J - J.T)


def transformed_vector_field(ts, xb, v, f_e):
    """Dynamics in transformed coordinates.

    Returns:
        ``(dqbar/dt, dpbar/dt, ybar)`` with ``ybar = Gbar^T pbar``.
    """
    n = ts.n
    v = as_vector(v, n, "v")
    f_e = as_vector(f_e, n, "f_e")
    qbar = as_vector(xb.qbar, n, "qbar")
    pbar = as_vector(xb.pbar, n, "pbar")
    q = qbar + ts.q_f
    T = ts.T(q)
    p = T @ pbar
    J2 = gyroscopic_matrix(ts, TransformedState(qbar, pbar))
    Gbar = ts.Gbar(q)
    qbar_dot = solve_lower_t(T, pbar)
    pbar_dot = (-solve_lower(T, ts.base.dV(q)) + (J2 - ts.Dbar(q, p)) @ pbar
                + Gbar @ v + ts.Bbar(q) @ f_e)
    return qbar_dot, pbar_dot, Gbar.T @ pbar
