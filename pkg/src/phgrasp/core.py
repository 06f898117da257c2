"""Forced mechanical port-Hamiltonian systems.

A mechanical system with configuration ``q`` and momenta ``p`` evolves as::

    dq/dt = M(q)^-1 p
    dp/dt = -dH/dq - D(q, p) M(q)^-1 p + G(q) u + B(q) f_e
    y     = G(q)^T M(q)^-1 p

with Hamiltonian ``H = 1/2 p^T M^-1 p + V(q)``; for a configuration-dependent
mass the momentum equation uses the full ``dH/dq``, which adds the kinetic
term ``d/dq (1/2 p^T M(q)^-1 p)`` to ``dV/dq``.  Work-space forces reach the
joint space through the transpose of the geometric Jacobian.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .exceptions import ContractViolation, FactorizationError, SingularMassError
from .linalg import cholesky_factor, solve_lower, solve_lower_t

#: Tolerance on the smallest eigenvalue when checking damping for PSD.
EPS_PSD = 1e-9
#: Relative step of the central finite differences.
FD_REL_STEP = 1e-6


def as_vector(x, n, name="vector"):
    """Coerce ``x`` to a finite float vector of length ``n``."""
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if arr.ndim != 1 or arr.shape[0] != n:
        raise ContractViolation(f"{name} must have shape ({n},), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ContractViolation(f"{name} has non-finite entries: {arr}")
    return arr


def as_matrix(a, n, name="matrix"):
    arr = np.atleast_2d(np.asarray(a, dtype=float))
    if arr.shape != (n, n):
        raise ContractViolation(f"{name} must have shape ({n}, {n}), got {arr.shape}")
    return arr


def central_difference_gradient(f, x, rel_step=FD_REL_STEP):
    """Central finite-difference gradient of a scalar function.

    The step for coordinate ``i`` is ``rel_step * max(1, |x_i|)``.
    """
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(x.size):
        h = rel_step * max(1.0, abs(x[i]))
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        g[i] = (f(xp) - f(xm)) / (2.0 * h)
    return g


def _identity_map(n):
    eye = np.eye(n)
    return lambda q: eye


@dataclass(frozen=True)
class MechanicalPHSystem:
    """A fully actuated mechanical port-Hamiltonian system.

    Args:
        n: degrees of freedom.
        mass: ``q -> M(q)``, symmetric positive definite ``(n, n)``.
        potential: ``q -> V(q)``.
        potential_grad: ``q -> dV/dq``.  When omitted a central finite
            difference of ``potential`` is used and ``fd_gradient`` is True.
        damping: ``(q, p) -> D(q, p)``, symmetric PSD.  Defaults to zero.
        input_map: ``q -> G(q)``, invertible.  Defaults to identity.
        ext_force_map: ``q -> B(q)``.  Defaults to identity.
        constant_mass: promise that ``M`` does not depend on ``q``; lets the
            transformation skip derivative evaluations.
        constant_maps: promise that ``D``, ``G`` and ``B`` do not depend on
            the state; enables the scalar one-DOF simulation kernel.
        name: label used in run metadata.
    """

    n: int
    mass: Callable[[np.ndarray], np.ndarray]
    potential: Callable[[np.ndarray], float]
    potential_grad: Optional[Callable[[np.ndarray], np.ndarray]] = None
    damping: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None
    input_map: Optional[Callable[[np.ndarray], np.ndarray]] = None
    ext_force_map: Optional[Callable[[np.ndarray], np.ndarray]] = None
    constant_mass: bool = False
    constant_maps: bool = False
    name: str = "system"
    _zero: np.ndarray = field(init=False, repr=False, compare=False)
    _cache: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ContractViolation(f"n must be a positive integer, got {self.n}")
        object.__setattr__(self, "_zero", np.zeros((self.n, self.n)))
        object.__setattr__(self, "_cache", {})
        if self.input_map is None:
            object.__setattr__(self, "input_map", _identity_map(self.n))
        if self.ext_force_map is None:
            object.__setattr__(self, "ext_force_map", _identity_map(self.n))

    @property
    def fd_gradient(self):
        """True when ``dV/dq`` comes from the finite-difference fallback."""
        return self.potential_grad is None

    def M(self, q):
        return np.asarray(self.mass(q), dtype=float).reshape(self.n, self.n)

    def V(self, q):
        return float(self.potential(q))

    def dV(self, q):
        if self.potential_grad is None:
            return central_difference_gradient(self.V, q)
        return np.asarray(self.potential_grad(q), dtype=float).reshape(self.n)

    def kinetic_grad(self, q, p):
        """``d/dq (1/2 p^T M(q)^-1 p)`` at fixed ``p``; zero for constant mass.

        Uses ``-1/2 qdot^T (dM/dq_i) qdot`` with central differences of ``M``.
        """
        if self.constant_mass:
            return np.zeros(self.n)
        qdot = self.velocity(q, p)
        g = np.empty(self.n)
        for i in range(self.n):
            h = FD_REL_STEP * max(1.0, abs(q[i]))
            qp = np.array(q, dtype=float)
            qm = qp.copy()
            qp[i] += h
            qm[i] -= h
            dM = (self.M(qp) - self.M(qm)) / (2.0 * h)
            g[i] = -0.5 * qdot @ dM @ qdot
        return g

    def dH_dq(self, q, p):
        """``dH/dq`` at fixed momentum: potential plus kinetic contributions."""
        return self.dV(q) + self.kinetic_grad(q, p)

    def D(self, q, p):
        if self.damping is None:
            return self._zero
        return np.asarray(self.damping(q, p), dtype=float).reshape(self.n, self.n)

    def G(self, q):
        return np.asarray(self.input_map(q), dtype=float).reshape(self.n, self.n)

    def B(self, q):
        return np.asarray(self.ext_force_map(q), dtype=float).reshape(self.n, self.n)

    def mass_factor(self, q):
        """Lower Cholesky factor of ``M(q)``; computed once for constant mass.

        Raises:
            SingularMassError: ``M(q)`` is not positive definite.
        """
        if self.constant_mass:
            T = self._cache.get("T")
            if T is None:
                T = self._cache["T"] = self._factor(q)
            return T
        return self._factor(q)

    def _factor(self, q):
        try:
            return cholesky_factor(self.M(q))
        except FactorizationError as exc:
            raise SingularMassError(f"mass matrix not SPD at q={q}: {exc}") from exc

    def velocity(self, q, p):
        """``M(q)^-1 p``, raising :class:`SingularMassError` for a bad mass."""
        T = self.mass_factor(q)
        return solve_lower_t(T, solve_lower(T, p))


@dataclass(frozen=True)
class PlantState:
    """Generalized coordinates ``q``, momenta ``p`` and time ``t``."""

    q: np.ndarray
    p: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        q = np.atleast_1d(np.asarray(self.q, dtype=float))
        p = np.atleast_1d(np.asarray(self.p, dtype=float))
        if q.shape != p.shape or q.ndim != 1:
            raise ContractViolation(f"q and p must be vectors of equal length, got {q.shape}, {p.shape}")
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p)) and np.isfinite(self.t)):
            raise ContractViolation("PlantState has non-finite entries")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @property
    def n(self):
        return self.q.shape[0]


@dataclass(frozen=True)
class GeometricJacobian:
    """Stacked linear/angular Jacobian ``q -> J(q)`` of shape ``(N, n)``."""

    jac: Callable[[np.ndarray], np.ndarray]
    N: int
    n: int

    def __post_init__(self):
        if self.N not in (1, 2, 3, 6):
            raise ContractViolation(f"work-space dimension N must be 1, 2, 3 or 6, got {self.N}")

    def __call__(self, q):
        J = np.atleast_2d(np.asarray(self.jac(q), dtype=float))
        if J.shape != (self.N, self.n):
            raise ContractViolation(f"Jacobian must be ({self.N}, {self.n}), got {J.shape}")
        return J


def _check_state(sys, s):
    if s.n != sys.n:
        raise ContractViolation(f"state has dimension {s.n}, system has n={sys.n}")


def hamiltonian(sys, s):
    """Total energy ``1/2 p^T M(q)^-1 p + V(q)``."""
    _check_state(sys, s)
    qdot = sys.velocity(s.q, s.p)
    return 0.5 * float(s.p @ qdot) + sys.V(s.q)


def plant_vector_field(sys, s, u, f_e):
    """Evaluate the forced dynamics.

    Returns:
        ``(dq/dt, dp/dt, y)`` where ``y = G^T M^-1 p`` is the passive output.
    """
    _check_state(sys, s)
    u = as_vector(u, sys.n, "u")
    f_e = as_vector(f_e, sys.n, "f_e")
    q, p = s.q, s.p
    qdot = sys.velocity(q, p)
    G = sys.G(q)
    pdot = -sys.dH_dq(q, p) - sys.D(q, p) @ qdot + G @ u + sys.B(q) @ f_e
    return qdot, pdot, G.T @ qdot


def power_balance(sys, s, u, f_e):
    """Analytic ``dH/dt = -qdot^T D qdot + y^T u + qdot^T B f_e``."""
    qdot = sys.velocity(s.q, s.p)
    u = np.asarray(u, dtype=float).reshape(sys.n)
    f_e = np.asarray(f_e, dtype=float).reshape(sys.n)
    y = sys.G(s.q).T @ qdot
    return float(-qdot @ sys.D(s.q, s.p) @ qdot + y @ u + qdot @ sys.B(s.q) @ f_e)


def map_workspace_force(jac, q, F_e):
    """Joint-space force ``J(q)^T F_e`` for a work-space force ``F_e``."""
    q = as_vector(q, jac.n, "q")
    F_e = as_vector(F_e, jac.N, "F_e")
    return jac(q).T @ F_e


def check_mass(sys, q):
    """Raise :class:`SingularMassError` unless ``M(q)`` is symmetric PD."""
    M = sys.M(q)
    if not np.allclose(M, M.T, rtol=1e-12, atol=1e-14):
        raise SingularMassError(f"mass matrix not symmetric at q={q}")
    try:
        cholesky_factor(M)
    except FactorizationError as exc:
        raise SingularMassError(str(exc)) from exc


def check_damping(sys, q, p, eps=EPS_PSD):
    """Raise :class:`ContractViolation` unless ``D(q, p)`` is symmetric PSD."""
    D = sys.D(q, p)
    if not np.allclose(D, D.T, rtol=1e-12, atol=1e-14):
        raise ContractViolation(f"damping not symmetric at q={q}")
    lam = np.linalg.eigvalsh(0.5 * (D + D.T)).min()
    if lam < -eps:
        raise ContractViolation(f"damping has eigenvalue {lam:.3g} < -{eps}")


def potential_grad_error(sys, samples, rel_step=1e-6):
    """Largest relative error between ``potential_grad`` and finite differences.

    The relative error at one sample is ``|g - g_fd| / max(|g_fd|, 1e-12)``
    measured in the infinity norm; ``1e-12`` only guards zero gradients.
    """
    worst = 0.0
    for q in samples:
        q = as_vector(q, sys.n, "q")
        g = sys.dV(q)
        g_fd = central_difference_gradient(sys.V, q, rel_step)
        err = np.max(np.abs(g - g_fd)) / max(np.max(np.abs(g_fd)), 1e-12)
        worst = max(worst, float(err))
    return worst
