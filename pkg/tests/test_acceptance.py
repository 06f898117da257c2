"""Acceptance criteria at their stated tolerances, one test per criterion.

Each test prints a single ``[PASS]``/``[FAIL]`` line, collected again in the
terminal summary, and asserts the criterion.
"""

import pytest

from phgrasp import verify

from conftest import ACCEPTANCE_LINES


def _report(result):
    print(result.line())
    ACCEPTANCE_LINES.append(result.line())
    assert result.passed, result.line()


def test_criterion_01_rigid_contact_times():
    _report(verify.check_rigid_contact_times())


def test_criterion_02_rigid_impact_forces():
    _report(verify.check_rigid_impact())


def test_criterion_03_compliant_contact():
    _report(verify.check_compliant())


def test_criterion_04_rigid_settling():
    _report(verify.check_rigid_settling())


def test_criterion_05_steady_state_error():
    _report(verify.check_steady_state())


def test_criterion_06_specialization():
    _report(verify.check_specialization())


def test_criterion_07_lyapunov():
    _report(verify.check_lyapunov())


@pytest.fixture(scope="module")
def power_balance():
    return verify.check_power_balance()


def test_criterion_08a_power_balance(power_balance):
    _report(power_balance[0])


def test_criterion_08b_extra_dissipation_block(power_balance):
    _report(power_balance[1])


def test_criterion_09_structure():
    _report(verify.check_structure())


def test_criterion_10_gradients():
    _report(verify.check_gradients())


def test_criterion_11_energy():
    _report(verify.check_energy())


def test_criterion_12_convergence():
    _report(verify.check_convergence())


def test_sensitivity_report():
    rows = verify.sensitivity()
    for name, param, value, m in rows:
        print(f"sensitivity {name} {param}={value:g}: "
              + ", ".join(f"{k}={m[k]}" for k in ("contact_time", "impact_force",
                                                   "settling_time", "steady_state_error")))
    assert len(rows) == 18
