import math

import numpy as np
import pytest
from scipy.integrate import quad, solve_ivp

from phgrasp.core import PlantState, central_difference_gradient, hamiltonian, plant_vector_field
from phgrasp.exceptions import ContractViolation
from phgrasp.models import (CompliantBody, ContactCoupling, GripperModel, compliant_system,
                            contact_force, gripper_potential, gripper_potential_printed,
                            gripper_spring_force, gripper_stiffness, gripper_system,
                            update_engagement)


def test_stiffness_at_rest_length(gripper):
    assert gripper_stiffness(gripper, 0.3) == pytest.approx(0.135, abs=1e-15)


def test_stiffness_example(gripper):
    ref = 0.135 + 0.075 * 0.1 / math.sqrt(0.011)
    assert gripper_stiffness(gripper, 0.4) == pytest.approx(ref, rel=1e-14)
    assert ref == pytest.approx(0.2065, abs=1e-4)
    # within the smoothing scale of the non-smooth branch value
    assert abs(gripper_stiffness(gripper, 0.4) - 0.21) <= 0.15 * 0.03


def test_stiffness_limits(gripper):
    assert gripper_stiffness(gripper, -1e4) == pytest.approx(0.06, abs=1e-8)
    assert gripper_stiffness(gripper, 1e4) == pytest.approx(0.21, abs=1e-8)
    flipped = GripperModel(flip_stiffness=True)
    assert gripper_stiffness(flipped, -1e4) == pytest.approx(0.21, abs=1e-8)
    assert gripper_stiffness(flipped, 0.3) == pytest.approx(0.135, abs=1e-15)


def test_stiffness_monotone_and_smooth(gripper):
    q = np.linspace(-0.5, 1.0, 3001)
    k = np.array([gripper_stiffness(gripper, x) for x in q])
    assert np.all(np.diff(k) > 0)
    assert np.all((k >= 0.06) & (k <= 0.21))
    h = q[1] - q[0]
    second = np.diff(k, 2) / h ** 2
    # bounded by the analytic maximum of |K_g''|, about 0.075 * 1.3 / alpha_f
    assert np.max(np.abs(second)) < 0.075 * 1.3 / 0.001


@pytest.mark.parametrize("q", np.linspace(0.0, 0.6, 13))
def test_potential_matches_quadrature(gripper, q):
    ref, _ = quad(lambda s: gripper_stiffness(gripper, s) * (s - 0.3), 0.3, q,
                  epsabs=1e-14, epsrel=1e-13, limit=200)
    assert gripper_potential(gripper, q) - gripper_potential(gripper, 0.3) == pytest.approx(
        ref, abs=1e-8)


@pytest.mark.parametrize("q", np.linspace(0.0, 0.6, 25))
def test_potential_gradient_matches_difference(gripper, q):
    fd = central_difference_gradient(lambda x: gripper_potential(gripper, x[0]), np.array([q]))[0]
    assert gripper_spring_force(gripper, q) == pytest.approx(fd, rel=1e-6, abs=1e-12)


def test_force_vanishes_at_rest(gripper):
    assert gripper_spring_force(gripper, 0.3) == 0.0
    assert gripper_potential(gripper, 0.3) == 0.0


def test_printed_potential_has_doubled_odd_force(gripper):
    # the four-term printed form does not integrate the spring force
    for q in (0.1, 0.25, 0.5):
        d = central_difference_gradient(lambda x: gripper_potential_printed(gripper, x[0]),
                                        np.array([q]))[0]
        x = q - 0.3
        odd = 0.5 * 0.15 * x * x / math.sqrt(0.001 + x * x)
        assert d == pytest.approx(0.5 * 0.27 * x + 2 * odd, rel=1e-6)
        assert abs(d - gripper_spring_force(gripper, q)) > 1e-4


def test_potential_bounded_below_on_interval(gripper):
    V = [gripper_potential(gripper, q) for q in np.linspace(0.0, 0.6, 601)]
    assert min(V) >= 0.0


def test_gripper_system_rest_point_and_output(plant):
    dq, dp, y = plant_vector_field(plant, PlantState([0.3], [0.0]), [0.0], [0.0])
    assert (dq[0], dp[0]) == (0.0, 0.0)
    _, _, y = plant_vector_field(plant, PlantState([0.1], [0.2]), [0.0], [0.0])
    assert y[0] == pytest.approx(0.2 / 0.5)


def test_gripper_free_oscillation_is_passive(plant):
    def f(t, y):
        dq, dp, _ = plant_vector_field(plant, PlantState(y[:1], y[1:]), [0.0], [0.0])
        return np.concatenate([dq, dp])

    sol = solve_ivp(f, (0, 10), [0.5, 0.0], rtol=1e-10, atol=1e-12, max_step=0.01)
    H = [hamiltonian(plant, PlantState(sol.y[:1, k], sol.y[1:, k])) for k in range(sol.t.size)]
    assert np.all(np.diff(H) <= 1e-10)
    assert H[-1] < H[0]


def test_compliant_rest_point():
    body = CompliantBody()
    dq, dp, _ = plant_vector_field(compliant_system(body), PlantState([body.q_c], [0.0]),
                                   [0.0], [0.0])
    assert (dq[0], dp[0]) == (0.0, 0.0)


def test_compliant_frequency_matches_spectrum():
    body = CompliantBody(d_c=0.0)
    sys = compliant_system(body)

    def f(t, y):
        dq, dp, _ = plant_vector_field(sys, PlantState(y[:1], y[1:]), [0.0], [0.0])
        return np.concatenate([dq, dp])

    dt, n = 0.1, 2 ** 11
    t = np.arange(n) * dt
    sol = solve_ivp(f, (0, t[-1]), [body.q_c + 0.1, 0.0], t_eval=t, rtol=1e-10, atol=1e-12)
    x = sol.y[0] - body.q_c
    amp = np.abs(np.fft.rfft(x * np.hanning(n)))
    freqs = np.fft.rfftfreq(n, dt)
    k = int(np.argmax(amp[1:])) + 1
    # parabolic interpolation of the peak
    a, b, c = np.log(amp[k - 1:k + 2])
    peak = freqs[k] + 0.5 * (a - c) / (a - 2 * b + c) * (freqs[1] - freqs[0])
    assert 2 * math.pi * peak == pytest.approx(math.sqrt(body.K_c / body.m_c), rel=0.02)


def test_undamped_compliant_conserves_energy():
    body = CompliantBody(d_c=0.0)
    sys = compliant_system(body)

    def f(t, y):
        dq, dp, _ = plant_vector_field(sys, PlantState(y[:1], y[1:]), [0.0], [0.0])
        return np.concatenate([dq, dp])

    sol = solve_ivp(f, (0, 10), [body.q_c + 0.1, 0.0], method="DOP853", rtol=1e-12, atol=1e-14)
    H = np.array([hamiltonian(sys, PlantState(sol.y[:1, k], sol.y[1:, k]))
                  for k in range(sol.t.size)])
    assert np.max(np.abs(H - H[0])) / H[0] <= 1e-6


def test_contact_disengaged():
    cpl = ContactCoupling(mode="compliant")
    assert contact_force(cpl, 0.1, 0.02, 0.05, engaged=False) == (0.0, 0.0)
    assert contact_force(ContactCoupling(), 0.1, 0.02, engaged=False) == (0.0, 0.0)


def test_contact_compliant_pair():
    f_e, u_c = contact_force(ContactCoupling(mode="compliant"), 0.19, 0.02, 0.05)
    assert (f_e, u_c) == (-0.05, 0.02)
    # power out of the gripper port equals power into the object port
    assert f_e * 0.02 + u_c * 0.05 == 0.0


def test_contact_rigid_penalty():
    cpl = ContactCoupling(rigid_stiffness=50.0, rigid_damping=1.0)
    assert contact_force(cpl, 0.21, -0.1) == (0.0, 0.0)
    f_e, _ = contact_force(cpl, 0.19, -0.1)
    assert f_e == pytest.approx(50.0 * 0.01 + 1.0 * 0.1)
    # a separating gripper is never pulled back
    assert contact_force(cpl, 0.199, 5.0)[0] == 0.0


def test_engagement_hysteresis():
    cpl = ContactCoupling(hysteresis=1e-3)
    assert not update_engagement(cpl, 0.2001, False)
    assert update_engagement(cpl, 0.2, False)
    assert update_engagement(cpl, 0.2005, True)
    assert not update_engagement(cpl, 0.2011, True)


@pytest.mark.parametrize("kwargs", [dict(m_g=0.0), dict(d_g=-0.1), dict(alpha_f=0.0),
                                    dict(k_g1=-1.0)])
def test_gripper_parameters_validated(kwargs):
    with pytest.raises(ContractViolation):
        GripperModel(**kwargs)


def test_contact_parameters_validated():
    with pytest.raises(ContractViolation):
        ContactCoupling(mode="sticky")
    with pytest.raises(ContractViolation):
        ContactCoupling(rigid_stiffness=0.0)
    with pytest.raises(ContractViolation):
        CompliantBody(m_c=0.0)
    with pytest.raises(ContractViolation):
        CompliantBody(d_c=-1.0)
