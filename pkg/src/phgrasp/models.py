"""Gripper, grasped objects and the contact between them.

The gripper is a one-DOF mass with viscous damping and a spring whose
stiffness switches smoothly between two values around its structural
rest-length ``c_g``.  Objects are either a stiff penalty wall ("rigid") or a
mass-spring-damper coupled to the gripper through a power-preserving
interconnection ("compliant").
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import MechanicalPHSystem
from .exceptions import ContractViolation

CONTACT_MODES = ("rigid", "compliant")


@dataclass(frozen=True)
class GripperModel:
    """One-DOF gripper parameters.

    ``flip_stiffness`` negates the odd term of the smoothed stiffness so that
    ``k_g1`` is reached on the closing side (``q < c_g``) instead.
    """

    m_g: float = 0.5
    d_g: float = 0.1
    k_g1: float = 0.21
    k_g2: float = 0.06
    c_g: float = 0.3
    alpha_f: float = 0.001
    flip_stiffness: bool = False

    def __post_init__(self):
        for name in ("m_g", "k_g1", "k_g2", "alpha_f"):
            if not getattr(self, name) > 0:
                raise ContractViolation(f"{name} must be positive")
        if self.d_g < 0:
            raise ContractViolation("d_g must be non-negative")

    @property
    def _sign(self):
        return -1.0 if self.flip_stiffness else 1.0


@dataclass(frozen=True)
class CompliantBody:
    """Linear mass-spring-damper object with rest position ``q_c``."""

    m_c: float = 0.1
    d_c: float = 0.1
    K_c: float = 0.1
    q_c: float = 0.3

    def __post_init__(self):
        if not (self.m_c > 0 and self.K_c > 0):
            raise ContractViolation("m_c and K_c must be positive")
        if self.d_c < 0:
            raise ContractViolation("d_c must be non-negative")


@dataclass(frozen=True)
class ContactCoupling:
    """How and where the gripper meets the object.

    Contact engages once ``q <= engage_position`` and releases once
    ``q > engage_position + hysteresis``.
    """

    mode: str = "rigid"
    engage_position: float = 0.2
    rigid_stiffness: float = 50.0
    rigid_damping: float = 1.0
    hysteresis: float = 1e-4

    def __post_init__(self):
        if self.mode not in CONTACT_MODES:
            raise ContractViolation(f"mode must be one of {CONTACT_MODES}, got {self.mode!r}")
        if self.mode == "rigid" and not (self.rigid_stiffness > 0 and self.rigid_damping > 0):
            raise ContractViolation("rigid contact needs positive stiffness and damping")
        if self.hysteresis < 0:
            raise ContractViolation("hysteresis must be non-negative")


def _scalar(q):
    return q if isinstance(q, float) else float(np.squeeze(q))


def gripper_stiffness(g, q):
    """Smoothed bimodal stiffness ``K_g(q)``."""
    x = _scalar(q) - g.c_g
    return (0.5 * (g.k_g1 + g.k_g2)
            + g._sign * 0.5 * (g.k_g1 - g.k_g2) * x / math.sqrt(g.alpha_f + x * x))


def gripper_spring_force(g, q):
    """Spring force ``K_g(q) (q - c_g)``, the gradient of :func:`gripper_potential`."""
    return gripper_stiffness(g, q) * (_scalar(q) - g.c_g)


def gripper_potential(g, q):
    """Spring energy with ``dV/dq = K_g(q) (q - c_g)`` and ``V(c_g) = 0``.

    Closed form::

        V = 1/4 (k1 + k2) x^2
            + 1/4 (k1 - k2) (x sqrt(a + x^2) - a asinh(x / sqrt(a)))

    with ``x = q - c_g`` and ``a = alpha_f``.
    """
    x = _scalar(q) - g.c_g
    a = g.alpha_f
    odd = x * math.sqrt(a + x * x) - a * math.asinh(x / math.sqrt(a))
    return 0.25 * (g.k_g1 + g.k_g2) * x * x + g._sign * 0.25 * (g.k_g1 - g.k_g2) * odd


def gripper_potential_printed(g, q):
    """Four-term closed form as printed for the gripper (diagnostic only).

    Its derivative is ``1/2 (k1 + k2) x + (k1 - k2) x^2 / sqrt(a + x^2)``,
    twice the odd part of the spring force; use :func:`gripper_potential`.
    """
    x = _scalar(q) - g.c_g
    a = g.alpha_f
    dk = g.k_g1 - g.k_g2
    r = math.sqrt(a + x * x)
    return (0.25 * (g.k_g1 + g.k_g2) * x * x + 0.5 * a * dk * math.log(math.sqrt(a))
            + 0.5 * dk * x * r - 0.5 * a * dk * math.log(x + r))


def gripper_system(g):
    """The gripper as a one-DOF mechanical PH system (``G = B = 1``)."""
    M = np.array([[g.m_g]])
    D = np.array([[g.d_g]])
    return MechanicalPHSystem(
        n=1,
        mass=lambda q: M,
        potential=lambda q: gripper_potential(g, q[0]),
        potential_grad=lambda q: np.array([gripper_spring_force(g, q[0])]),
        damping=lambda q, p: D,
        constant_mass=True,
        constant_maps=True,
        name="gripper",
    )


def compliant_system(c):
    """The compliant object as a one-DOF mechanical PH system."""
    M = np.array([[c.m_c]])
    D = np.array([[c.d_c]])
    return MechanicalPHSystem(
        n=1,
        mass=lambda q: M,
        potential=lambda q: 0.5 * c.K_c * (q[0] - c.q_c) ** 2,
        potential_grad=lambda q: np.array([c.K_c * (q[0] - c.q_c)]),
        damping=lambda q, p: D,
        constant_mass=True,
        constant_maps=True,
        name="compliant_body",
    )


def update_engagement(cpl, q, engaged):
    """Engagement flag after observing gripper position ``q``."""
    if engaged:
        return not q > cpl.engage_position + cpl.hysteresis
    return q <= cpl.engage_position


def contact_force(cpl, q_g, y_g, y_c=0.0, engaged=True):
    """Force on the gripper and input to the object.

    Args:
        cpl: contact description.
        q_g: gripper position.
        y_g: gripper velocity output ``p / m_g``.
        y_c: object velocity output ``p_c / m_c`` (compliant mode).
        engaged: current engagement flag.

    Returns:
        ``(f_e, u_c)``.  Compliant: ``(-y_c, y_g)``.  Rigid: a one-sided
        spring-damper ``k * depth + d * depth_rate`` (never pulling) on the
        penetration depth ``engage_position - q_g``, and ``u_c = 0``.
    """
    if not engaged:
        return 0.0, 0.0
    if cpl.mode == "compliant":
        return -y_c, y_g
    depth = cpl.engage_position - q_g
    if depth <= 0.0:
        return 0.0, 0.0
    return max(0.0, cpl.rigid_stiffness * depth - cpl.rigid_damping * y_g), 0.0
