import math

import numpy as np
import pytest
from scipy.integrate import quad

from phgrasp.core import (GeometricJacobian, MechanicalPHSystem, PlantState,
                          central_difference_gradient, check_damping, check_mass, hamiltonian,
                          map_workspace_force, plant_vector_field, potential_grad_error,
                          power_balance)
from phgrasp.exceptions import ContractViolation, SingularMassError
from phgrasp.models import gripper_spring_force, gripper_system

from conftest import diag_mass_system, two_link_mass


def point_mass(m=0.5, V=None):
    return MechanicalPHSystem(n=1, mass=lambda q: np.array([[m]]),
                              potential=V or (lambda q: 0.0),
                              potential_grad=lambda q: np.zeros(1), constant_mass=True)


def test_kinetic_only_energy():
    assert hamiltonian(point_mass(), PlantState([0.7], [1.0])) == pytest.approx(1.0, abs=1e-15)


def test_zero_state_zero_energy():
    assert hamiltonian(point_mass(), PlantState([0.0], [0.0])) == 0.0


def test_gripper_energy_at_rest_point(plant, gripper):
    assert hamiltonian(plant, PlantState([gripper.c_g], [0.0])) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("q", [0.0, 0.2, 0.29, 0.31, 0.6])
def test_gripper_energy_matches_quadrature(plant, gripper, q):
    ref, _ = quad(lambda s: gripper_spring_force(gripper, s), gripper.c_g, q,
                  epsabs=1e-14, epsrel=1e-13, points=[gripper.c_g], limit=200)
    assert hamiltonian(plant, PlantState([q], [0.0])) == pytest.approx(ref, abs=1e-12)


def test_equilibrium_field_is_zero(plant):
    dq, dp, y = plant_vector_field(plant, PlantState([0.3], [0.0]), [0.0], [0.0])
    assert dq[0] == 0.0 and dp[0] == 0.0 and y[0] == 0.0


def test_gripper_field_example(plant):
    dq, dp, y = plant_vector_field(plant, PlantState([0.30], [0.05]), [0.0], [0.0])
    assert dq[0] == pytest.approx(0.1, abs=1e-15)
    assert dp[0] == pytest.approx(-0.01, abs=1e-15)
    assert y[0] == pytest.approx(0.1, abs=1e-15)


def _directional_rate(sys, s, u, f_e, h=1e-6):
    dq, dp, _ = plant_vector_field(sys, s, u, f_e)
    plus = hamiltonian(sys, PlantState(s.q + h * dq, s.p + h * dp))
    minus = hamiltonian(sys, PlantState(s.q - h * dq, s.p - h * dp))
    return (plus - minus) / (2 * h)


@pytest.mark.parametrize("make", [gripper_system, None])
def test_power_balance_matches_chain_rule(make, gripper, rng):
    sys = make(gripper) if make else diag_mass_system()
    n = sys.n
    for _ in range(20):
        q = rng.uniform(0.0, 0.6, n)
        s = PlantState(q, rng.normal(size=n))
        u, f_e = rng.normal(size=n), rng.normal(size=n)
        assert power_balance(sys, s, u, f_e) == pytest.approx(
            _directional_rate(sys, s, u, f_e), rel=1e-7, abs=1e-10)


def test_passivity_inequality_with_damping(rng):
    sys = diag_mass_system()
    for _ in range(20):
        s = PlantState(rng.normal(size=2), rng.normal(size=2))
        u, f_e = rng.normal(size=2), rng.normal(size=2)
        qdot = sys.velocity(s.q, s.p)
        supplied = (sys.G(s.q).T @ qdot) @ u + qdot @ f_e
        assert power_balance(sys, s, u, f_e) <= supplied + 1e-12


def test_input_cancels_external_force(rng):
    sys = diag_mass_system()
    for _ in range(10):
        s = PlantState(rng.normal(size=2), rng.normal(size=2))
        f_e = rng.normal(size=2)
        u = -np.linalg.solve(sys.G(s.q), sys.B(s.q) @ f_e)
        forced = plant_vector_field(sys, s, u, f_e)
        free = plant_vector_field(sys, s, np.zeros(2), np.zeros(2))
        for a, b in zip(forced, free):
            np.testing.assert_allclose(a, b, rtol=0, atol=1e-14)


def test_kinetic_gradient_matches_finite_difference(rng):
    sys = MechanicalPHSystem(n=2, mass=two_link_mass, potential=lambda q: 0.0,
                             potential_grad=lambda q: np.zeros(2))
    for _ in range(10):
        q, p = rng.uniform(-1, 1, 2), rng.normal(size=2)
        kin = lambda qq: 0.5 * p @ np.linalg.solve(two_link_mass(qq), p)
        np.testing.assert_allclose(sys.kinetic_grad(q, p), central_difference_gradient(kin, q),
                                   rtol=1e-6, atol=1e-9)


def test_workspace_force_zero():
    jac = GeometricJacobian(lambda q: np.vstack([np.eye(2), np.zeros((1, 2))]), N=3, n=2)
    np.testing.assert_array_equal(map_workspace_force(jac, [0.1, 0.2], np.zeros(3)), np.zeros(2))


def test_workspace_force_scalar():
    jac = GeometricJacobian(lambda q: np.array([[1.0]]), N=1, n=1)
    assert map_workspace_force(jac, [0.3], [0.2])[0] == pytest.approx(0.2)


def test_workspace_force_picks_first_row(rng):
    J = rng.normal(size=(3, 2))
    jac = GeometricJacobian(lambda q: J, N=3, n=2)
    np.testing.assert_array_equal(map_workspace_force(jac, [0.0, 0.0], [1.0, 0.0, 0.0]), J[0])


def test_jacobian_shape_checked():
    jac = GeometricJacobian(lambda q: np.ones((3, 3)), N=3, n=2)
    with pytest.raises(ContractViolation):
        jac(np.zeros(2))
    with pytest.raises(ContractViolation):
        GeometricJacobian(lambda q: np.ones((4, 2)), N=4, n=2)


def test_dimension_mismatch_raises(plant):
    with pytest.raises(ContractViolation):
        hamiltonian(plant, PlantState([0.1, 0.2], [0.0, 0.0]))
    with pytest.raises(ContractViolation):
        plant_vector_field(plant, PlantState([0.1], [0.0]), [0.0, 0.0], [0.0])


def test_nan_input_raises(plant):
    with pytest.raises(ContractViolation):
        plant_vector_field(plant, PlantState([0.1], [0.0]), [math.nan], [0.0])
    with pytest.raises(ContractViolation):
        PlantState([math.nan], [0.0])


def test_singular_mass_raises():
    sys = MechanicalPHSystem(n=1, mass=lambda q: np.array([[q[0]]]), potential=lambda q: 0.0)
    with pytest.raises(SingularMassError):
        hamiltonian(sys, PlantState([-1.0], [1.0]))
    with pytest.raises(SingularMassError):
        check_mass(sys, np.array([0.0]))


def test_damping_check():
    good = MechanicalPHSystem(n=1, mass=lambda q: np.eye(1), potential=lambda q: 0.0,
                              damping=lambda q, p: np.array([[-1e-12]]))
    check_damping(good, np.zeros(1), np.zeros(1))
    bad = MechanicalPHSystem(n=1, mass=lambda q: np.eye(1), potential=lambda q: 0.0,
                             damping=lambda q, p: np.array([[-1e-3]]))
    with pytest.raises(ContractViolation):
        check_damping(bad, np.zeros(1), np.zeros(1))


def test_finite_difference_fallback_flagged(gripper):
    from phgrasp.models import gripper_potential
    sys = MechanicalPHSystem(n=1, mass=lambda q: np.array([[0.5]]),
                             potential=lambda q: gripper_potential(gripper, q[0]))
    assert sys.fd_gradient
    assert not gripper_system(gripper).fd_gradient
    for q in (0.1, 0.25, 0.35, 0.5):
        assert sys.dV(np.array([q]))[0] == pytest.approx(gripper_spring_force(gripper, q), rel=1e-6)


def test_gripper_gradient_check(plant, rng):
    assert potential_grad_error(plant, rng.uniform(0.0, 0.6, (100, 1))) <= 1e-5


def test_bad_dimension_rejected():
    with pytest.raises(ContractViolation):
        MechanicalPHSystem(n=0, mass=lambda q: np.eye(1), potential=lambda q: 0.0)
