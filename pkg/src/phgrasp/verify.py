"""Headless acceptance and invariant checks.

Each ``check_*`` function returns a :class:`CheckResult`.  :func:`run_all`
evaluates every criterion; the ``verify`` CLI command prints one line per
criterion and exits non-zero when any fails.  Thresholds are module constants.
"""

from __future__ import annotations

import functools
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .controller import (RestLengthController, gripper_reference_law, power_balance_matrix,
                         quadratic_dissipation_rate)
from .core import MechanicalPHSystem, PlantState, potential_grad_error
from .linalg import cholesky_factor
from .models import (CompliantBody, GripperModel, compliant_system, gripper_potential,
                     gripper_spring_force, gripper_system)
from .scenario import load_scenario, preset_path
from .sim import ClosedLoop, IntegratorConfig, fd_derivative, run, simulate, switch_mask
from .transform import (TransformedState, TransformedSystem, from_transformed,
                        gyroscopic_matrix, to_transformed, transformed_vector_field)

RIGID = ("rigid_restlength", "rigid_hogan_fe", "rigid_hogan")
COMPLIANT = ("compliant_restlength", "compliant_hogan_fe", "compliant_hogan")
STUDY_SCENARIOS = RIGID + COMPLIANT
RUNTIME_LIMIT = 1.0
SEED = 20240601


@dataclass
class CheckResult:
    """Outcome of one acceptance criterion."""

    id: str
    title: str
    passed: bool
    detail: str = ""
    values: dict = field(default_factory=dict)

    def line(self):
        return f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.id}: {self.title} -- {self.detail}"


@functools.lru_cache(maxsize=None)
def _timed_run(name, dt=None):
    scn = load_scenario(preset_path(name))
    if dt is not None:
        scn = scn.with_overrides(**{"integrator.dt": dt})
    t0 = time.perf_counter()
    rec = run(scn)
    return rec, time.perf_counter() - t0


def scenario_metrics(name, dt=None):
    rec, _ = _timed_run(name, dt)
    return rec.metadata["metrics"]


def _within(value, ref, tol):
    return value is not None and abs(value - ref) <= tol


def _fmt(v):
    return "absent" if v is None else f"{v:.4g}"


def check_rigid_contact_times():
    m = {n: scenario_metrics(n) for n in RIGID}
    runtimes = {n: _timed_run(n)[1] for n in RIGID}
    ok_rl = _within(m["rigid_restlength"]["contact_time"], 0.60, 0.15)
    ok_h = all(_within(m[n]["contact_time"], 0.80, 0.2) for n in RIGID[1:])
    ok_t = all(t < RUNTIME_LIMIT for t in runtimes.values())
    detail = (", ".join(f"{n}: t_c={_fmt(m[n]['contact_time'])}" for n in RIGID)
              + f"; max runtime {max(runtimes.values()):.2f} s")
    return CheckResult("1", "rigid contact times and runtime", ok_rl and ok_h and ok_t, detail,
                       {"metrics": m, "runtimes": runtimes})


def _impact_check(cid, title, names, refs, tols):
    m = {n: scenario_metrics(n) for n in names}
    f = [m[n]["impact_force"] for n in names]
    ok_vals = all(_within(v, r, t) for v, r, t in zip(f, refs, tols))
    ok_order = None not in f and f[0] <= f[1] < f[2] and (f[0] < f[1] or f[0] == 0.0)
    detail = ", ".join(f"{n}: {_fmt(v)} (ref {r})" for n, v, r in zip(names, f, refs))
    return CheckResult(cid, title, ok_vals and ok_order, detail + f"; ordering {'ok' if ok_order else 'violated'}",
                       {"impact": dict(zip(names, f))})


def check_rigid_impact():
    refs = (0.10, 0.40, 0.60)
    return _impact_check("2", "rigid impact forces and ordering", RIGID, refs,
                         tuple(0.5 * r for r in refs))


def check_compliant():
    m = {n: scenario_metrics(n) for n in COMPLIANT}
    ok_t = (_within(m["compliant_restlength"]["contact_time"], 0.80, 0.3)
            and all(_within(m[n]["contact_time"], 1.30, 0.3) for n in COMPLIANT[1:]))
    # a zero reference has no relative band; 0.05 N is half the smallest
    # non-zero reference used for the rigid case
    res = _impact_check("3", "compliant contact times, impact forces and ordering", COMPLIANT,
                        (0.0, 0.20, 0.30), (0.05, 0.10, 0.15))
    times = ", ".join(f"{n}: t_c={_fmt(m[n]['contact_time'])}" for n in COMPLIANT)
    return CheckResult("3", res.title, ok_t and res.passed, times + "; " + res.detail,
                       {"metrics": m})


def check_rigid_settling(t_check=1.5, band=0.01):
    rec, _ = _timed_run("rigid_restlength")
    f = rec.data["f_e"][:, 0]
    after = rec.t >= t_check - 1e-12
    worst = float(np.max(np.abs(f[after] - rec.metadata["f_d"])))
    return CheckResult("4", f"rest-length rigid |f_e - f_d| <= {band} N for t >= {t_check} s",
                       worst <= band, f"max deviation after {t_check} s: {worst:.4g} N",
                       {"max_dev": worst})


def check_steady_state(tol=1e-3):
    errs = {n: scenario_metrics(n)["steady_state_error"]
            for n in ("rigid_restlength", "compliant_restlength")}
    return CheckResult("5", f"rest-length steady-state error <= {tol} N", all(e <= tol for e in errs.values()),
                       ", ".join(f"{n}: {e:.4g} N" for n, e in errs.items()), errs)


def _random_gripper_states(rng, count):
    q = rng.uniform(0.0, 0.6, count)
    qdot = rng.uniform(-1.0, 1.0, count)
    q_rl = rng.uniform(-0.2, 0.2, count)
    f_e = rng.uniform(-1.0, 1.0, count)
    return q, qdot, q_rl, f_e


def specialization_deviation(mass_factor, count=1000, seed=SEED, m_g=0.5):
    """Max ``|v_general - v_specialized|`` over random gripper states."""
    g = GripperModel(m_g=m_g)
    plant = gripper_system(g)
    K_p, K_rl, C, q_f = 1.0, 0.5, 3.0, 0.2
    ctrl = RestLengthController(TransformedSystem(plant, [q_f]), K_p, K_rl, C,
                                mass_factor=mass_factor)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for q, qd, r, fe in zip(*_random_gripper_states(rng, count)):
        v = ctrl.signals(np.array([q]), np.array([g.m_g * qd]), np.array([r]), np.array([fe])).v[0]
        ref = gripper_reference_law(g.m_g, g.d_g, K_p, K_rl, C, q_f, q, qd, r,
                                    gripper_spring_force(g, q), fe)
        worst = max(worst, abs(v - ref))
    return worst


def check_specialization(tol=1e-10):
    dev = specialization_deviation("cholesky")
    dev_id = specialization_deviation("identity")
    dev_unit = specialization_deviation("cholesky", m_g=1.0)
    return CheckResult("6", f"general law equals the one-DOF specialized law (<= {tol:g})", bool(dev <= tol),
                       f"M = T T^T factor: {dev:.3g}; identity factor: {dev_id:.3g}; "
                       f"M = T T^T with m_g = 1: {dev_unit:.3g}",
                       {"cholesky": dev, "identity": dev_id, "unit_mass": dev_unit})


def check_lyapunov():
    out = {}
    for n in ("rigid_restlength", "compliant_restlength"):
        rec, _ = _timed_run(n)
        out[n] = rec.monitors["lyapunov"]
    ok = all(v["violations"] == 0 for v in out.values())
    detail = ", ".join(f"{n}: {v['violations']} increasing steps, max step increase {v['max_increase']:.3g}"
                       for n, v in out.items())
    return CheckResult("7", "candidate energy non-increasing on rest-length runs", ok, detail, out)


def power_balance_error(rec, ctrl):
    """Largest ``|(-z^T U z) - dHhat/dt|`` over the run, relative to ``max |dHhat/dt|``.

    ``dHhat/dt`` is the fourth-order finite difference of the recorded
    candidate energy; samples near contact switches are excluded.
    """
    d = rec.data
    dt = rec.t[1] - rec.t[0]
    fd = fd_derivative(d["Hhat"], dt)
    claim = np.array([quadratic_dissipation_rate(ctrl, d["q"][k], d["p"][k], d["q_rl"][k])
                      for k in range(len(rec))])
    keep = ~switch_mask(rec)
    scale = float(np.max(np.abs(fd[keep])))
    return float(np.max(np.abs(claim[keep] - fd[keep]))) / scale


def check_power_balance(tol=1e-5):
    errs = {}
    for n in ("rigid_restlength", "compliant_restlength"):
        rec, _ = _timed_run(n)
        loop, *_ = load_scenario(preset_path(n)).build()
        errs[n] = power_balance_error(rec, loop.controller)
    ctrl = loop.controller
    U = power_balance_matrix(ctrl, np.array([0.25]), np.array([0.01]))
    block_ok = bool(np.array_equal(U[:1, :1], ctrl.K_p @ ctrl.K_p))
    a = CheckResult("8a", f"-z^T U z matches finite-difference dHhat/dt (<= {tol:g} relative)",
                    all(e <= tol for e in errs.values()),
                    ", ".join(f"{n}: {e:.3g}" for n, e in errs.items()), errs)
    b = CheckResult("8b", "U(1,1) block equals K_p K_p", block_ok,
                    f"U11={float(U[0, 0])!r}, K_p K_p={float((ctrl.K_p @ ctrl.K_p)[0, 0])!r}")
    return a, b


def varying_mass_system():
    """Two-DOF test plant with ``M = diag(1, 2 + sin q1)`` and a quartic well."""
    return MechanicalPHSystem(
        n=2,
        mass=lambda q: np.diag([1.0, 2.0 + math.sin(q[0])]),
        potential=lambda q: 0.5 * q[0] ** 2 + 0.25 * q[1] ** 4 + 0.5 * q[1] ** 2,
        potential_grad=lambda q: np.array([q[0], q[1] ** 3 + q[1]]),
        damping=lambda q, p: np.array([[0.2, 0.05], [0.05, 0.1]]),
        name="varying_mass_2dof",
    )


def two_link_system():
    """Planar two-link arm mass matrix with spring potentials at both joints."""
    def mass(q):
        c = math.cos(q[1])
        return np.array([[3.0 + 2.0 * c, 1.0 + c], [1.0 + c, 1.0]])

    return MechanicalPHSystem(
        n=2, mass=mass,
        potential=lambda q: 0.5 * (2.0 * q[0] ** 2 + q[1] ** 2),
        potential_grad=lambda q: np.array([2.0 * q[0], q[1]]),
        damping=lambda q, p: 0.1 * np.eye(2),
        name="two_link",
    )


def rk4_fixed(f, y0, dt, steps):
    y = np.array(y0, dtype=float)
    for _ in range(steps):
        k1 = f(y)
        k2 = f(y + 0.5 * dt * k1)
        k3 = f(y + 0.5 * dt * k2)
        k4 = f(y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return y


def equivalence_error(sys, q_f, q0, p0, t_end=2.0, dt=1e-3):
    """Max state mismatch between original and transformed simulations.

    Both are driven by the same physical feedback ``u = -q - qdot``; the
    transformed run maps its state back with ``from_transformed``.
    """
    ts = TransformedSystem(sys, q_f)
    n = sys.n

    def u_of(q, p):
        return -q - sys.velocity(q, p)

    def f_orig(y):
        q, p = y[:n], y[n:]
        qdot = sys.velocity(q, p)
        pdot = -sys.dH_dq(q, p) - sys.D(q, p) @ qdot + sys.G(q) @ u_of(q, p)
        return np.concatenate([qdot, pdot])

    def f_tr(y):
        xb = TransformedState(y[:n], y[n:])
        q = y[:n] + ts.q_f
        p = ts.T(q) @ y[n:]
        # v = u: G u = T Gbar v with Gbar = T^-1 G
        dq, dp, _ = transformed_vector_field(ts, xb, u_of(q, p), np.zeros(n))
        return np.concatenate([dq, dp])

    steps = int(round(t_end / dt))
    worst = 0.0
    y = np.concatenate([q0, p0])
    xb0 = to_transformed(ts, PlantState(q0, p0))
    yb = np.concatenate([xb0.qbar, xb0.pbar])
    chunk = 100
    for _ in range(steps // chunk):
        y = rk4_fixed(f_orig, y, dt, chunk)
        yb = rk4_fixed(f_tr, yb, dt, chunk)
        s = from_transformed(ts, TransformedState(yb[:n], yb[n:]))
        worst = max(worst, float(np.max(np.abs(np.concatenate([s.q, s.p]) - y))))
    return worst


def check_structure(count=200, seed=SEED):
    rng = np.random.default_rng(seed)
    skew = raw = recon = 0.0
    for sys in (varying_mass_system(), two_link_system()):
        ts = TransformedSystem(sys, np.zeros(2))
        for _ in range(count):
            q = rng.uniform(-1.5, 1.5, 2)
            pb = rng.normal(size=2)
            xb = TransformedState(q, pb)
            J = gyroscopic_matrix(ts, xb)
            Jr = gyroscopic_matrix(ts, xb, raw=True)
            skew = max(skew, float(np.max(np.abs(J + J.T))))
            raw = max(raw, float(np.max(np.abs(Jr + Jr.T))))
            M = sys.M(q)
            T = cholesky_factor(M)
            recon = max(recon, float(np.linalg.norm(T @ T.T - M) / np.linalg.norm(M)))
    eq = max(equivalence_error(varying_mass_system(), np.array([0.1, -0.2]),
                               np.array([0.8, -0.5]), np.array([0.3, 0.4])),
             equivalence_error(two_link_system(), np.array([0.0, 0.0]),
                               np.array([0.6, 0.9]), np.array([-0.2, 0.5])))
    ok = skew <= 1e-12 and raw <= 1e-6 and recon <= 1e-10 and eq <= 1e-6
    return CheckResult("9", "skew-symmetry, factorization and coordinate equivalence", ok,
                       f"|J2+J2^T| {skew:.2g} (raw {raw:.2g}); M=TT^T rel {recon:.2g}; "
                       f"trajectory mismatch over 2 s {eq:.2g}",
                       {"skew": skew, "raw": raw, "recon": recon, "equivalence": eq})


def gauss_legendre(f, a, b, pieces=64, order=20):
    """Composite Gauss-Legendre quadrature of a smooth scalar function."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, pieces + 1)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        total += half * sum(wi * f(mid + half * xi) for xi, wi in zip(x, w))
    return total


def check_gradients(count=100, seed=SEED):
    rng = np.random.default_rng(seed)
    g = GripperModel()
    grip = gripper_system(g)
    errs = {
        "gripper": potential_grad_error(grip, rng.uniform(0.0, 0.6, (count, 1))),
        "compliant_body": potential_grad_error(compliant_system(CompliantBody()),
                                               rng.uniform(0.0, 0.6, (count, 1))),
        "varying_mass_2dof": potential_grad_error(varying_mass_system(),
                                                  rng.uniform(-1, 1, (count, 2))),
        "two_link": potential_grad_error(two_link_system(), rng.uniform(-1, 1, (count, 2))),
    }
    quad = 0.0
    for q in np.linspace(0.0, 0.6, 13):
        ref = gauss_legendre(lambda s: gripper_spring_force(g, s), g.c_g, q)
        quad = max(quad, abs(gripper_potential(g, q) - gripper_potential(g, g.c_g) - ref))
    ok = all(e <= 1e-5 for e in errs.values()) and quad <= 1e-8
    return CheckResult("10", "potential gradients and closed-form potential", ok,
                       ", ".join(f"{k}: {v:.2g}" for k, v in errs.items())
                       + f"; V vs quadrature {quad:.2g}", {**errs, "quadrature": quad})


def oscillator_run(dt, t_end=10.0, d_c=0.0, method="rk4"):
    body = CompliantBody(d_c=d_c)
    sys = compliant_system(body)
    loop = ClosedLoop(sys)
    x0 = loop.pack([body.q_c + 0.1], [0.0])
    return body, simulate(loop, x0, IntegratorConfig(method=method, dt=dt, t_end=t_end),
                          q_f=[body.q_c])


def check_energy():
    rec, _ = _timed_run("compliant_restlength")
    d = rec.data
    scn = load_scenario(preset_path("compliant_restlength")).doc
    y_g = d["p"][:, 0] / scn["plant"]["m_g"]
    y_c = d["x"][:, 4] / scn["contact"]["body"]["m_c"]
    u_c = d["u_c"]
    f_e = d["f_e"][:, 0]
    # power delivered into the gripper port plus power into the object port
    mismatch = float(np.max(np.abs(f_e * y_g + u_c * y_c)))
    scale = float(np.max(np.abs(f_e * y_g))) or 1.0
    _, osc = oscillator_run(1e-3)
    H = osc.data["H"]
    drift = float(np.max(np.abs(H - H[0])) / H[0])
    ok = mismatch <= 1e-14 * max(scale, 1.0) and drift <= 1e-6
    return CheckResult("11", "lossless interconnection and undamped energy conservation", ok,
                       f"port power mismatch {mismatch:.2g}; oscillator energy drift {drift:.2g} over 10 s",
                       {"port_mismatch": mismatch, "drift": drift})


def _metric_close(a, b, rel=0.01, floor=1e-9):
    if a is None or b is None:
        return a is None and b is None
    return abs(a - b) <= max(rel * max(abs(a), abs(b)), floor)


def richardson_exponent(dt=0.02, t_end=10.0):
    """Observed order from errors against the exact oscillator solution."""
    errs = []
    for h in (dt, dt / 2):
        body, rec = oscillator_run(h, t_end)
        w = math.sqrt(body.K_c / body.m_c)
        t = rec.t[-1]
        q_exact = body.q_c + 0.1 * math.cos(w * t)
        p_exact = -body.m_c * 0.1 * w * math.sin(w * t)
        errs.append(math.hypot(rec.data["q"][-1, 0] - q_exact, rec.data["p"][-1, 0] - p_exact))
    return math.log2(errs[0] / errs[1])


def check_convergence():
    bad = []
    for n in STUDY_SCENARIOS:
        a, b = scenario_metrics(n), scenario_metrics(n, dt=5e-4)
        for key in ("contact_time", "impact_force", "settling_time", "steady_state_error"):
            if not _metric_close(a[key], b[key]):
                bad.append(f"{n}.{key}: {_fmt(a[key])} vs {_fmt(b[key])}")
    p = richardson_exponent()
    ok = not bad and 3.5 <= p <= 4.5
    detail = f"RK4 observed order {p:.3f}; " + ("metrics stable under dt halving" if not bad
                                                else "unstable: " + "; ".join(bad))
    return CheckResult("12", "grid convergence and RK4 order", ok, detail, {"order": p, "unstable": bad})


def run_all():
    results = [check_rigid_contact_times(), check_rigid_impact(), check_compliant(),
               check_rigid_settling(), check_steady_state(), check_specialization(),
               check_lyapunov()]
    results.extend(check_power_balance())
    results.extend([check_structure(), check_gradients(), check_energy(), check_convergence()])
    return results


def sensitivity():
    """Metric rows for the penalty stiffness and object mass sweeps."""
    rows = []
    for name in RIGID:
        base = load_scenario(preset_path(name))
        for k in (20.0, 50.0, 100.0):
            rec = run(base.with_overrides(**{"contact.rigid_stiffness": k}))
            rows.append((name, "k_wall", k, rec.metadata["metrics"]))
    for name in COMPLIANT:
        base = load_scenario(preset_path(name))
        for m in (0.05, 0.1, 0.2):
            rec = run(base.with_overrides(**{"contact.body.m_c": m}))
            rows.append((name, "m_c", m, rec.metadata["metrics"]))
    return rows
