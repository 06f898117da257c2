"""Variable rest-length impedance grasping control and Hogan baselines.

The rest-length controller adds a virtual spring between the shifted
configuration ``qbar = q - q_f`` and a controller state ``q_rl`` whose
dynamics are driven by the passive output.  In transformed coordinates:

    phat    = pbar + T^T K_p (qbar - q_rl)
    yhat    = Gbar^T phat
    dq_rl   = -yhat - K_p (qbar - q_rl) - K_rl q_rl

and the input ``v`` shapes the closed loop around ``(qbar, phat, q_rl) = 0``
with the candidate energy

    Hhat = 1/2 phat^T phat + 1/2 (qbar - q_rl)^T K_p (qbar - q_rl)
           + 1/2 q_rl^T K_rl q_rl

``mass_factor="identity"`` evaluates the same expressions with ``T = I``
(momenta left unnormalized), which is the form used for the one-DOF gripper
study; with a constant unit mass the two coincide.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import as_vector
from .exceptions import ContractViolation, FactorizationError
from .linalg import cholesky_factor, solve_general, solve_lower, solve_lower_t
from .transform import TransformedState, TransformedSystem, gyroscopic_matrix

MASS_FACTORS = ("cholesky", "identity")


def spd_gain(K, n, name="gain"):
    """Return ``K`` as a symmetric positive-definite ``(n, n)`` matrix.

    Scalars are broadcast to ``K * I``.
    """
    K = np.asarray(K, dtype=float)
    if K.ndim == 0:
        K = float(K) * np.eye(n)
    K = np.atleast_2d(K)
    if K.shape != (n, n):
        raise ContractViolation(f"{name} must be ({n}, {n}), got {K.shape}")
    if not np.allclose(K, K.T, rtol=1e-12, atol=1e-14):
        raise ContractViolation(f"{name} must be symmetric")
    try:
        cholesky_factor(K)
    except FactorizationError as exc:
        raise ContractViolation(f"{name} must be positive definite ({exc})") from exc
    return K


def desired_force_to_target(K_p, f_d):
    """Virtual desired position ``q_f = K_p^-1 f_d``."""
    f_d = np.atleast_1d(np.asarray(f_d, dtype=float))
    K_p = spd_gain(K_p, f_d.shape[0], "K_p")
    return np.linalg.solve(K_p, f_d)


def workspace_desired_force(jac, q_f, F_d):
    """Joint-space desired force ``J(q_f)^T F_d``."""
    q_f = as_vector(q_f, jac.n, "q_f")
    F_d = as_vector(F_d, jac.N, "F_d")
    return jac(q_f).T @ F_d


def desired_force_residual(jac, K_p, q_f, F_d):
    """Infinity-norm mismatch between ``J(q_f)^T F_d`` and ``K_p q_f``."""
    q_f = as_vector(q_f, jac.n, "q_f")
    f_d = workspace_desired_force(jac, q_f, F_d)
    return float(np.max(np.abs(f_d - spd_gain(K_p, jac.n, "K_p") @ q_f)))


@dataclass(frozen=True)
class ControlSignals:
    """Everything the rest-length law computes at one state.

    Momenta and input maps are expressed in the controller's coordinates
    (normalized by ``T`` unless the controller uses the identity factor).
    """

    qbar: np.ndarray
    pbar: np.ndarray
    qhat: np.ndarray
    phat: np.ndarray
    yhat: np.ndarray
    qrl_dot: np.ndarray
    v: Optional[np.ndarray] = None


@dataclass
class RestLengthController:
    """Variable rest-length impedance controller.

    Args:
        transformed: the plant seen through the coordinate change; its
            ``q_f`` is the virtual desired position.
        K_p: virtual spring stiffness (SPD).
        K_rl: rest-length leakage gain (SPD).
        C: damping-injection gain (SPD).
        q_rl: initial rest-length state; zero by default.
        mass_factor: ``"cholesky"`` (``M = T T^T``) or ``"identity"``.
    """

    transformed: TransformedSystem
    K_p: np.ndarray
    K_rl: np.ndarray
    C: np.ndarray
    q_rl: Optional[np.ndarray] = None
    mass_factor: str = "cholesky"
    _eye: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        n = self.transformed.n
        self.K_p = spd_gain(self.K_p, n, "K_p")
        self.K_rl = spd_gain(self.K_rl, n, "K_rl")
        self.C = spd_gain(self.C, n, "C")
        self.q_rl = np.zeros(n) if self.q_rl is None else as_vector(self.q_rl, n, "q_rl")
        if self.mass_factor not in MASS_FACTORS:
            raise ContractViolation(f"mass_factor must be one of {MASS_FACTORS}")
        self._eye = np.eye(n)
        self._sc = self._scalar_constants() if self.scalar_ready else None

    @property
    def n(self):
        return self.transformed.n

    @property
    def scalar_ready(self):
        """True when :meth:`scalar_law` applies (one DOF, constant maps)."""
        sys = self.system
        return (self.n == 1 and sys.constant_maps
                and (sys.constant_mass or self.mass_factor == "identity"))

    def _scalar_constants(self):
        sys = self.system
        q = self.q_f
        z = np.zeros(1)
        return (float(self.factor(q)[0, 0]), float(sys.G(q)[0, 0]), float(sys.B(q)[0, 0]),
                float(sys.D(q, z)[0, 0]), float(self.K_p[0, 0]), float(self.K_rl[0, 0]),
                float(self.C[0, 0]), float(q[0]))

    def scalar_law(self, q, qdot, p, q_rl, dV, f_e):
        """The law on Python floats for a one-DOF plant with constant maps.

        Same expressions as :meth:`signals` with every matrix a scalar.

        Returns:
            ``(v, dq_rl/dt, qhat, phat, yhat)``.
        """
        t, g, b, d, kp, krl, c, qf = self._sc
        qhat = q - qf - q_rl
        kq = kp * qhat
        phat = p / t + t * kq
        gb = g / t
        yhat = gb * phat
        qrl_dot = -yhat - kq - krl * q_rl
        bracket = (dV / t + gb * krl * q_rl - b * f_e / t + gb * kq - kq
                   - (d / t) * kq - t * kp * (qdot - qrl_dot))
        return t * bracket / g - c * yhat, qrl_dot, qhat, phat, yhat

    @property
    def q_f(self):
        return self.transformed.q_f

    @property
    def system(self):
        return self.transformed.base

    @property
    def f_d(self):
        """Grasping force ``K_p q_f`` encoded by the virtual target."""
        return self.K_p @ self.q_f

    def factor(self, q):
        if self.mass_factor == "identity":
            return self._eye
        return self.transformed.T(q)

    def signals(self, q, p, q_rl=None, f_e=None):
        """Evaluate the law at physical state ``(q, p)``.

        ``v`` is only computed when ``f_e`` is given.
        """
        sys = self.system
        q_rl = self.q_rl if q_rl is None else q_rl
        qbar = q - self.q_f
        T = self.factor(q)
        pbar = solve_lower(T, p)
        qhat = qbar - q_rl
        Kq = self.K_p @ qhat
        phat = pbar + T.T @ Kq
        G = sys.G(q)
        Gbar = solve_lower(T, G)
        yhat = Gbar.T @ phat
        qrl_dot = -yhat - Kq - self.K_rl @ q_rl
        if f_e is None:
            return ControlSignals(qbar, pbar, qhat, phat, yhat, qrl_dot)

        qdot = sys.velocity(q, p)
        Dbar = solve_lower(T, solve_lower(T, sys.D(q, p)).T).T
        if self.mass_factor == "identity" or sys.constant_mass:
            J2_minus_D = -Dbar
            Tdot_t = None
        else:
            J2 = gyroscopic_matrix(self.transformed, TransformedState(qbar, pbar))
            J2_minus_D = J2 - Dbar
            Tdot_t = self.transformed.factor_rate(q, qdot).T
        TtKq = T.T @ Kq
        # (Gbar T^-T - T^-T + J2 - Dbar) T^T K_p qhat, with T^-T T^T = I
        bracket = (solve_lower(T, sys.dV(q))
                   + Gbar @ (self.K_rl @ q_rl)
                   - solve_lower(T, sys.B(q) @ f_e)
                   + Gbar @ Kq - Kq + J2_minus_D @ TtKq
                   - T.T @ (self.K_p @ (qdot - qrl_dot)))
        if Tdot_t is not None:
            bracket = bracket - Tdot_t @ Kq
        # Gbar^-1 x = G^-1 T x
        v = solve_general(G, T @ bracket) - self.C @ yhat
        return ControlSignals(qbar, pbar, qhat, phat, yhat, qrl_dot, v)

    def _physical(self, xb):
        q = np.asarray(xb.qbar, dtype=float) + self.q_f
        return q, self.transformed.T(q) @ np.asarray(xb.pbar, dtype=float)


def adapted_momentum(ctrl, xb, q_rl=None):
    """``phat = pbar + T^T K_p (qbar - q_rl)``."""
    q, p = ctrl._physical(xb)
    return ctrl.signals(q, p, q_rl).phat


def passive_output(ctrl, xb, q_rl=None):
    """``yhat = Gbar^T phat``."""
    q, p = ctrl._physical(xb)
    return ctrl.signals(q, p, q_rl).yhat


def rest_length_derivative(ctrl, xb, q_rl=None):
    """``dq_rl/dt = -yhat - K_p (qbar - q_rl) - K_rl q_rl``."""
    q, p = ctrl._physical(xb)
    return ctrl.signals(q, p, q_rl).qrl_dot


def rest_length_port(ctrl, xb, q_rl=None):
    """Rest-length port pair ``(u_rl, y_rl)``.

    ``u_rl = dq_rl/dt`` and ``y_rl = Gbar^T (K_p (qbar - q_rl) + K_rl q_rl)``.
    """
    q, p = ctrl._physical(xb)
    q_rl = ctrl.q_rl if q_rl is None else q_rl
    sig = ctrl.signals(q, p, q_rl)
    Gbar = solve_lower(ctrl.factor(q), ctrl.system.G(q))
    return sig.qrl_dot, Gbar.T @ (ctrl.K_p @ sig.qhat + ctrl.K_rl @ q_rl)


def control_law(ctrl, xb, f_e, q_rl=None):
    """Input ``v`` of the rest-length controller at transformed state ``xb``."""
    q, p = ctrl._physical(xb)
    f_e = as_vector(f_e, ctrl.n, "f_e")
    return ctrl.signals(q, p, q_rl, f_e).v


def lyapunov_function(ctrl, q, p, q_rl=None):
    """Candidate energy ``Hhat(qbar, phat, q_rl)`` at the physical state."""
    q_rl = ctrl.q_rl if q_rl is None else q_rl
    sig = ctrl.signals(q, p, q_rl)
    return 0.5 * float(sig.phat @ sig.phat + sig.qhat @ ctrl.K_p @ sig.qhat
                       + q_rl @ ctrl.K_rl @ q_rl)


def virtual_potential(ctrl, xb, q_rl=None):
    """Virtual spring energy ``Ubar(qbar, pbar, q_rl)``.

    ``Hbar + Ubar - Vbar`` equals :func:`lyapunov_function`: the potential of
    the plant is cancelled by the law and does not enter the candidate.
    """
    q_rl = ctrl.q_rl if q_rl is None else q_rl
    q, _ = ctrl._physical(xb)
    T = ctrl.factor(q)
    pbar = np.asarray(xb.pbar, dtype=float)
    if ctrl.mass_factor == "identity":
        pbar = ctrl.transformed.T(q) @ pbar
    qhat = np.asarray(xb.qbar, dtype=float) - q_rl
    Kq = ctrl.K_p @ qhat
    TtKq = T.T @ Kq
    return float(pbar @ TtKq + 0.5 * TtKq @ TtKq + 0.5 * qhat @ Kq
                 + 0.5 * q_rl @ ctrl.K_rl @ q_rl)


def power_balance_matrix(ctrl, q, p):
    """Block-diagonal weight ``U = diag(K_p K_p, Dbar + Gbar C Gbar^T, I)``."""
    n = ctrl.n
    sys = ctrl.system
    T = ctrl.factor(q)
    Gbar = solve_lower(T, sys.G(q))
    Dbar = solve_lower(T, solve_lower(T, sys.D(q, p)).T).T
    U = np.zeros((3 * n, 3 * n))
    U[:n, :n] = ctrl.K_p @ ctrl.K_p
    U[n:2 * n, n:2 * n] = Dbar + Gbar @ ctrl.C @ Gbar.T
    U[2 * n:, 2 * n:] = np.eye(n)
    return U


def quadratic_dissipation_rate(ctrl, q, p, q_rl=None):
    """``-z^T U z`` with ``z = (qhat, phat, K_p qhat + K_rl q_rl)``.

    This is the rate of ``Hhat`` asserted for the closed loop.  Compare it to
    :func:`lyapunov_rate`, which differentiates ``Hhat`` along the actual
    closed-loop vector field.
    """
    q_rl = ctrl.q_rl if q_rl is None else q_rl
    sig = ctrl.signals(q, p, q_rl)
    z = np.concatenate([sig.qhat, sig.phat, ctrl.K_p @ sig.qhat + ctrl.K_rl @ q_rl])
    return -float(z @ power_balance_matrix(ctrl, q, p) @ z)


def closed_loop_matrix(ctrl, q, p):
    """Interconnection-minus-damping matrix of the asserted closed loop.

    Rows/columns are ordered ``(qbar, phat, q_rl)``; the ``(phat, phat)``
    block is ``-Dtilde = J2 - Dbar - Gbar C Gbar^T``.
    """
    n = ctrl.n
    sys = ctrl.system
    T = ctrl.factor(q)
    pbar = solve_lower(T, p)
    Gbar = solve_lower(T, sys.G(q))
    Dbar = solve_lower(T, solve_lower(T, sys.D(q, p)).T).T
    if ctrl.mass_factor == "identity":
        J2 = np.zeros((n, n))
    else:
        J2 = gyroscopic_matrix(ctrl.transformed, TransformedState(q - ctrl.q_f, pbar))
    Tinv_t = solve_lower_t(T, np.eye(n))
    eye = np.eye(n)
    A = np.zeros((3 * n, 3 * n))
    A[:n, :n] = -eye
    A[:n, n:2 * n] = Tinv_t
    A[n:2 * n, :n] = -Tinv_t.T
    A[n:2 * n, n:2 * n] = J2 - Dbar - Gbar @ ctrl.C @ Gbar.T
    A[n:2 * n, 2 * n:] = Gbar
    A[2 * n:, n:2 * n] = -Gbar.T
    A[2 * n:, 2 * n:] = -eye
    return A


def closed_loop_field(ctrl, q, p, q_rl, f_e):
    """``(dq/dt, dp/dt, dq_rl/dt)`` of the plant driven by the law."""
    sys = ctrl.system
    sig = ctrl.signals(q, p, q_rl, f_e)
    qdot = sys.velocity(q, p)
    pdot = -sys.dH_dq(q, p) - sys.D(q, p) @ qdot + sys.G(q) @ sig.v + sys.B(q) @ f_e
    return qdot, pdot, sig.qrl_dot


def lyapunov_rate(ctrl, q, p, q_rl, f_e, step=1e-7):
    """``dHhat/dt`` along the actual closed loop (directional central difference)."""
    dq, dp, dr = closed_loop_field(ctrl, q, p, q_rl, f_e)
    scale = max(float(np.max(np.abs(np.concatenate([dq, dp, dr])))), 1e-300)
    h = step / scale
    plus = lyapunov_function(ctrl, q + h * dq, p + h * dp, q_rl + h * dr)
    minus = lyapunov_function(ctrl, q - h * dq, p - h * dp, q_rl - h * dr)
    return (plus - minus) / (2.0 * h)


def gripper_reference_law(m_g, d_g, K_p, K_rl, C, q_f, q, qdot, q_rl, dVdq, f_e):
    """Scalar one-DOF rest-length law written out term by term.

    ``v = dV/dq - d_g K_p qhat - K_p (qdot - dq_rl) + K_rl q_rl
    - C (m_g qdot + K_p qhat) - f_e`` with ``qhat = q - q_f - q_rl`` and the
    rest-length rate built from the output ``m_g qdot + K_p qhat``.
    """
    qhat = q - q_f - q_rl
    y = m_g * qdot + K_p * qhat
    qrl_dot = -y - K_p * qhat - K_rl * q_rl
    return (dVdq - d_g * K_p * qhat - K_p * (qdot - qrl_dot) + K_rl * q_rl
            - C * y - f_e)


@dataclass
class HoganController:
    """Classical impedance control, optionally with external-force feedback.

    ``ubar = D qdot + dV/dq - K_Hp (q - q_f) - K_Hd (qdot - qdot_f)`` and,
    when ``compensate_external`` is set, ``u = ubar - f_e``.
    """

    K_Hp: np.ndarray
    K_Hd: np.ndarray
    q_f: np.ndarray
    qdot_f: Optional[np.ndarray] = None
    compensate_external: bool = False

    def __post_init__(self):
        self.q_f = np.atleast_1d(np.asarray(self.q_f, dtype=float))
        n = self.q_f.shape[0]
        self.K_Hp = spd_gain(self.K_Hp, n, "K_Hp")
        self.K_Hd = spd_gain(self.K_Hd, n, "K_Hd")
        self.qdot_f = np.zeros(n) if self.qdot_f is None else as_vector(self.qdot_f, n, "qdot_f")

    @property
    def n(self):
        return self.q_f.shape[0]

    def scalar_input(self, d, q, qdot, dV, f_e):
        """One-DOF law on Python floats; ``d`` is the plant damping."""
        u = (d * qdot + dV - self.K_Hp[0, 0] * (q - self.q_f[0])
             - self.K_Hd[0, 0] * (qdot - self.qdot_f[0]))
        return u - f_e if self.compensate_external else u

    def input(self, sys, q, p, f_e):
        qdot = sys.velocity(q, p)
        u = (sys.D(q, p) @ qdot + sys.dV(q) - self.K_Hp @ (q - self.q_f)
             - self.K_Hd @ (qdot - self.qdot_f))
        if self.compensate_external:
            u = u - f_e
        return u


def hogan_control(ctrl, sys, s, f_e):
    """Input of the classical impedance law at plant state ``s``."""
    if s.n != ctrl.n or sys.n != ctrl.n:
        raise ContractViolation("dimension mismatch between controller, system and state")
    return ctrl.input(sys, s.q, s.p, as_vector(f_e, ctrl.n, "f_e"))
