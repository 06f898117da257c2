"""Fixed-step simulation of plant, controller and grasped object.

The combined state vector is laid out as ``[q, p, q_rl, q_obj, p_obj]`` where
the object block exists only for compliant contact.  Contact engagement is
decided at step boundaries and held fixed during a step.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .controller import HoganController, RestLengthController
from .core import as_vector
from .exceptions import ConfigError, ContractViolation, DivergenceError
from .models import compliant_system, contact_force, update_engagement

METHODS = ("rk4", "semi-implicit-euler")
CSV_COLUMNS = ("t", "q", "p", "q_rl", "qbar", "phat", "f_e", "u", "H", "Hhat",
               "pb_residual", "engaged")

#: Relative per-step tolerance of the energy audit.
ENERGY_AUDIT_TOL = 1e-5
#: Allowed per-step growth of the candidate energy, relative to its peak.
LYAPUNOV_TOL = 1e-8
#: Steps after a contact or hold switch where monitors only warn.
SWITCH_GUARD = 3
#: States larger than this are treated as divergence.
DIVERGENCE_BOUND = 1e8


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step integration settings.

    ``zoh`` is an optional zero-order-hold period for the controller output;
    ``None`` evaluates the controller continuously (at every RK4 stage).
    """

    method: str = "rk4"
    dt: float = 1e-3
    t_end: float = 3.0
    zoh: Optional[float] = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {self.method!r}")
        if not (isinstance(self.dt, (int, float)) and math.isfinite(self.dt) and self.dt > 0):
            raise ConfigError(f"dt must be positive, got {self.dt!r}")
        if not (math.isfinite(self.t_end) and self.t_end >= 0):
            raise ConfigError(f"t_end must be non-negative, got {self.t_end!r}")
        if self.zoh is not None and not self.zoh >= self.dt * (1 - 1e-9):
            raise ConfigError("zoh period must be at least one step")

    @property
    def n_steps(self):
        return int(round(self.t_end / self.dt))

    @property
    def hold_every(self):
        if self.zoh is None:
            return None
        return max(1, int(round(self.zoh / self.dt)))


class Aux(NamedTuple):
    """Signals computed alongside the vector field at one state.

    ``qhat``, ``phat`` and ``yhat`` are set for the rest-length controller.
    """

    f_e: np.ndarray
    u: np.ndarray
    u_c: float
    qdot: np.ndarray
    qrl_dot: np.ndarray
    qhat: Optional[np.ndarray] = None
    phat: Optional[np.ndarray] = None
    yhat: Optional[np.ndarray] = None


class ClosedLoop:
    """Plant, optional controller and optional contact, as one vector field.

    One-DOF plants with constant maps run on a scalar kernel that evaluates
    the same expressions on Python floats; other plants use the matrix path.

    Args:
        plant: the controlled :class:`~phgrasp.core.MechanicalPHSystem`.
        controller: a :class:`RestLengthController`, a
            :class:`HoganController` or ``None`` (zero input).
        coupling: a :class:`~phgrasp.models.ContactCoupling` or ``None``.
        body: :class:`~phgrasp.models.CompliantBody` for compliant contact.
        scalar: allow the scalar kernel when applicable.
    """

    def __init__(self, plant, controller=None, coupling=None, body=None, scalar=True):
        self.plant = plant
        self.controller = controller
        self.coupling = coupling
        self.body = body
        n = plant.n
        self.n = n
        if coupling is not None and n != 1:
            raise ContractViolation("contact coupling is defined for one-DOF plants only")
        self.compliant = coupling is not None and coupling.mode == "compliant"
        if self.compliant and body is None:
            raise ContractViolation("compliant contact needs a CompliantBody")
        self.body_sys = compliant_system(body) if self.compliant else None
        if controller is not None and not isinstance(controller, (RestLengthController,
                                                                  HoganController)):
            raise ContractViolation(f"unsupported controller {type(controller).__name__}")
        if controller is not None and controller.n != n:
            raise ContractViolation("controller dimension does not match the plant")
        self.size = 3 * n + (2 if self.compliant else 0)
        self.rest_length = isinstance(controller, RestLengthController)
        self._zeros = np.zeros(n)
        self.scalar = bool(scalar and n == 1 and plant.constant_mass and plant.constant_maps
                           and (not self.rest_length or controller.scalar_ready))
        if self.scalar:
            z = np.zeros(1)
            self._m = float(plant.M(z)[0, 0])
            self._d = float(plant.D(z, z)[0, 0])
            self._g = float(plant.G(z)[0, 0])
            self._b = float(plant.B(z)[0, 0])

    def pack(self, q, p, q_rl=None, q_obj=None, p_obj=0.0):
        n = self.n
        x = np.zeros(self.size)
        x[:n] = as_vector(q, n, "q")
        x[n:2 * n] = as_vector(p, n, "p")
        if q_rl is not None:
            x[2 * n:3 * n] = as_vector(q_rl, n, "q_rl")
        if self.compliant:
            x[3 * n] = self.body.q_c if q_obj is None else q_obj
            x[3 * n + 1] = p_obj
        return x

    def control(self, x, f_e):
        """Controller output ``(u, dq_rl/dt, signals)`` at state ``x``."""
        n = self.n
        q, p = x[:n], x[n:2 * n]
        ctrl = self.controller
        if ctrl is None:
            return self._zeros, self._zeros, None
        if self.rest_length:
            sig = ctrl.signals(q, p, x[2 * n:3 * n], f_e)
            return sig.v, sig.qrl_dot, sig
        return ctrl.input(self.plant, q, p, f_e), self._zeros, None

    def _object_rate(self, x, engaged, u_c):
        if not engaged:
            return 0.0, 0.0
        body = self.body
        i = 3 * self.n
        y_c = x[i + 1] / body.m_c
        return y_c, -body.K_c * (x[i] - body.q_c) - body.d_c * y_c + u_c

    def evaluate(self, x, engaged, held=None, aux=False):
        """Vector field at ``x`` with contact ``engaged`` held fixed.

        Args:
            held: ``(u, dq_rl/dt)`` from a zero-order hold, or ``None`` to
                evaluate the controller at ``x``.
            aux: also return the :class:`Aux` signals.

        Returns:
            ``dx``, or ``(dx, aux)``.
        """
        if self.scalar:
            return self._evaluate_scalar(x, engaged, held, aux)
        n = self.n
        plant = self.plant
        q, p = x[:n], x[n:2 * n]
        qdot = plant.velocity(q, p)
        u_c = 0.0
        if self.coupling is not None:
            y_c = x[3 * n + 1] / self.body.m_c if self.compliant else 0.0
            fe, u_c = contact_force(self.coupling, q[0], qdot[0], y_c, engaged)
            f_e = np.array([fe])
        else:
            f_e = self._zeros
        sig = None
        if held is None:
            u, qrl_dot, sig = self.control(x, f_e)
        else:
            u, qrl_dot = held
        pdot = -plant.dH_dq(q, p) - plant.D(q, p) @ qdot + plant.G(q) @ u + plant.B(q) @ f_e
        dx = np.empty(self.size)
        dx[:n] = qdot
        dx[n:2 * n] = pdot
        dx[2 * n:3 * n] = qrl_dot
        if self.compliant:
            dx[3 * n:] = self._object_rate(x, engaged, u_c)
        if not aux:
            return dx
        if self.rest_length and sig is None:
            sig = self.controller.signals(q, p, x[2 * n:3 * n])
        if sig is None:
            return dx, Aux(f_e, u, u_c, qdot, qrl_dot)
        return dx, Aux(f_e, u, u_c, qdot, qrl_dot, sig.qhat, sig.phat, sig.yhat)

    def _evaluate_scalar(self, x, engaged, held, aux):
        q, p, r = float(x[0]), float(x[1]), float(x[2])
        qdot = p / self._m
        dV = float(self.plant.dV(x[:1])[0])
        fe = u_c = 0.0
        if engaged and self.coupling is not None:
            y_c = x[4] / self.body.m_c if self.compliant else 0.0
            fe, u_c = contact_force(self.coupling, q, qdot, y_c, True)
        ctrl = self.controller
        sig = None
        if held is not None:
            u, qrl_dot = float(held[0][0]), float(held[1][0])
        elif ctrl is None:
            u = qrl_dot = 0.0
        elif self.rest_length:
            u, qrl_dot, *sig = ctrl.scalar_law(q, qdot, p, r, dV, fe)
        else:
            u = ctrl.scalar_input(self._d, q, qdot, dV, fe)
            qrl_dot = 0.0
        pdot = -dV - self._d * qdot + self._g * u + self._b * fe
        if self.compliant:
            dx = np.array((qdot, pdot, qrl_dot) + tuple(self._object_rate(x, engaged, u_c)))
        else:
            dx = np.array((qdot, pdot, qrl_dot))
        if not aux:
            return dx
        if self.rest_length and sig is None:
            sig = ctrl.scalar_law(q, qdot, p, r, dV, fe)[2:]
        vec = np.array
        if sig is None:
            return dx, Aux(vec([fe]), vec([u]), u_c, vec([qdot]), vec([qrl_dot]))
        return dx, Aux(vec([fe]), vec([u]), u_c, vec([qdot]), vec([qrl_dot]),
                       vec([sig[0]]), vec([sig[1]]), vec([sig[2]]))


@dataclass
class SimState:
    """Integrator state carried between steps."""

    t: float
    x: np.ndarray
    engaged: bool = False
    held: Optional[tuple] = None


def _rk4(loop, x, dt, engaged, held, k1):
    k2 = loop.evaluate(x + (0.5 * dt) * k1, engaged, held)
    k3 = loop.evaluate(x + (0.5 * dt) * k2, engaged, held)
    k4 = loop.evaluate(x + dt * k3, engaged, held)
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _semi_implicit_euler(loop, x, dt, engaged, held, k1):
    n = loop.n
    # momenta and the rest-length first, then positions from the new momenta
    pos = [slice(0, n)]
    if loop.compliant:
        pos.append(slice(3 * n, 3 * n + 1))
    mid = x + dt * k1
    for s in pos:
        mid[s] = x[s]
    k2 = loop.evaluate(mid, engaged, held)
    out = mid.copy()
    for s in pos:
        out[s] = x[s] + dt * k2[s]
    return out


def _update_contact(loop, state):
    if loop.coupling is None:
        return state.engaged
    return update_engagement(loop.coupling, state.x[0], state.engaged)


def _sample_hold(loop, cfg, k, x, engaged, held):
    if cfg.hold_every is None:
        return None
    if k % cfg.hold_every == 0:
        a = loop.evaluate(x, engaged, None, aux=True)[1]
        return (a.u, a.qrl_dot)
    return held


def _advance(state, loop, cfg, engaged, held, k1):
    integrate = _rk4 if cfg.method == "rk4" else _semi_implicit_euler
    x = integrate(loop, state.x, cfg.dt, engaged, held, k1)
    t = state.t + cfg.dt
    if not np.all(np.isfinite(x)) or np.max(np.abs(x)) > DIVERGENCE_BOUND:
        raise DivergenceError(f"state diverged at t={t:.6g}", t)
    return SimState(t, x, engaged, held)


def step(state, loop, cfg, k=0):
    """Advance one step of size ``cfg.dt``.

    Engagement is updated from the state at the start of the step and held
    for all stages.  With a zero-order hold the controller output is
    resampled every ``cfg.hold_every`` steps (``k`` is the step index).

    Raises:
        DivergenceError: the new state is non-finite or unbounded.
    """
    engaged = _update_contact(loop, state)
    held = _sample_hold(loop, cfg, k, state.x, engaged, state.held)
    k1 = loop.evaluate(state.x, engaged, held)
    return _advance(state, loop, cfg, engaged, held, k1)


@dataclass
class Metrics:
    """Grasp metrics derived from a run record.

    Contact-dependent fields are ``None`` when no contact occurred.
    """

    contact: bool
    contact_time: Optional[float]
    impact_force: Optional[float]
    settling_time: Optional[float]
    steady_state_error: float

    def as_dict(self):
        return {
            "contact": self.contact,
            "contact_time": self.contact_time,
            "impact_force": self.impact_force,
            "settling_time": self.settling_time,
            "steady_state_error": self.steady_state_error,
        }


@dataclass
class RunRecord:
    """Uniformly sampled trajectory plus monitor results and metadata."""

    data: dict
    n: int
    metadata: dict = field(default_factory=dict)
    events: list = field(default_factory=list)
    monitors: dict = field(default_factory=dict)

    @property
    def t(self):
        return self.data["t"]

    def __len__(self):
        return len(self.data["t"])

    def header(self):
        cols = []
        for name in CSV_COLUMNS:
            if self.data[name].ndim == 2 and self.n > 1:
                cols.extend(f"{name}[{i}]" for i in range(self.n))
            else:
                cols.append(name)
        return cols

    def rows(self):
        arrays = []
        for name in CSV_COLUMNS:
            a = self.data[name]
            arrays.append(a.reshape(len(a), -1) if a.ndim == 2 else a.reshape(-1, 1))
        return np.hstack([a.astype(float) for a in arrays])

    def to_csv(self, path=None):
        """Write the fixed-order CSV; returns the text when ``path`` is None."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header())
        engaged_col = self.rows().shape[1] - 1
        for row in self.rows():
            w.writerow([str(int(v)) if i == engaged_col else repr(float(v))
                        for i, v in enumerate(row)])
        text = buf.getvalue()
        if path is None:
            return text
        with open(path, "w", newline="") as fh:
            fh.write(text)
        return path

    def write_event_log(self, path):
        """One JSON object per line: run metadata, events, monitor summary."""
        with open(path, "w") as fh:
            fh.write(json.dumps({"event": "run_start", **_jsonable(self.metadata)}, sort_keys=True) + "\n")
            for ev in self.events:
                fh.write(json.dumps(_jsonable(ev), sort_keys=True) + "\n")
            fh.write(json.dumps({"event": "run_end", "monitors": _jsonable(self.monitors)},
                                sort_keys=True) + "\n")
        return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    return obj


def scenario_hash(doc):
    """Stable SHA-256 of a JSON-serializable scenario description."""
    return hashlib.sha256(json.dumps(_jsonable(doc), sort_keys=True).encode()).hexdigest()


def simulate(loop, x0, cfg, q_f=None, metadata=None):
    """Integrate ``loop`` from ``x0`` and record every step.

    Raises:
        DivergenceError: the state became non-finite or unbounded.
    """
    n = loop.n
    N = cfg.n_steps
    rows = N + 1
    data = {
        "t": np.arange(rows) * cfg.dt,
        "q": np.zeros((rows, n)), "p": np.zeros((rows, n)), "q_rl": np.zeros((rows, n)),
        "qbar": np.zeros((rows, n)), "phat": np.full((rows, n), np.nan),
        "f_e": np.zeros((rows, n)), "u": np.zeros((rows, n)), "u_c": np.zeros(rows),
        "H": np.zeros(rows), "Hhat": np.full(rows, np.nan),
        "dHdt": np.zeros(rows), "pb_residual": np.zeros(rows),
        "engaged": np.zeros(rows, dtype=bool), "yhat": np.full((rows, n), np.nan),
        "x": np.zeros((rows, loop.size)),
    }
    if q_f is None:
        q_f = getattr(loop.controller, "q_f", np.zeros(n))
    q_f = np.asarray(q_f, dtype=float).reshape(n)
    plant = loop.plant
    events = []
    state = SimState(0.0, np.asarray(x0, dtype=float).copy())
    prev_engaged = state.engaged
    ctrl = loop.controller
    for k in range(rows):
        engaged = _update_contact(loop, state)
        held = _sample_hold(loop, cfg, k, state.x, engaged, state.held)
        k1, a = loop.evaluate(state.x, engaged, held, aux=True)
        x = state.x
        q, p, q_rl = x[:n], x[n:2 * n], x[2 * n:3 * n]
        qdot = a.qdot
        data["x"][k] = x
        data["q"][k] = q
        data["p"][k] = p
        data["q_rl"][k] = q_rl
        data["qbar"][k] = q - q_f
        data["f_e"][k] = a.f_e
        data["u"][k] = a.u
        data["u_c"][k] = a.u_c
        data["engaged"][k] = engaged
        data["H"][k] = 0.5 * float(p @ qdot) + plant.V(q)
        data["dHdt"][k] = float(-qdot @ plant.D(q, p) @ qdot + (plant.G(q).T @ qdot) @ a.u
                                + qdot @ plant.B(q) @ a.f_e)
        if a.phat is not None:
            data["phat"][k] = a.phat
            data["yhat"][k] = a.yhat
            data["Hhat"][k] = 0.5 * float(a.phat @ a.phat + a.qhat @ ctrl.K_p @ a.qhat
                                          + q_rl @ ctrl.K_rl @ q_rl)
        if engaged != prev_engaged:
            events.append({"event": "contact_engaged" if engaged else "contact_released",
                           "t": float(data["t"][k]), "step": k})
            prev_engaged = engaged
        if k == N:
            break
        try:
            state = _advance(state, loop, cfg, engaged, held, k1)
        except DivergenceError as exc:
            events.append({"event": "divergence", "t": exc.t, "step": k + 1})
            raise
    record = RunRecord(data=data, n=n, metadata=dict(metadata or {}), events=events)
    record.metadata.setdefault("dt", cfg.dt)
    record.metadata.setdefault("method", cfg.method)
    record.metadata.setdefault("zoh", cfg.zoh)
    record.metadata.setdefault("potential_grad",
                               "finite-difference" if plant.fd_gradient else "analytic")
    _run_monitors(record, cfg)
    return record


def switch_mask(record, guard=SWITCH_GUARD, hold_every=None):
    """Steps within ``guard`` of a contact change or a controller hold update.

    ``mask[k]`` is True when step ``k`` lies in ``[s - 2, s + guard]`` for a
    switch at ``s``.  Contact changes include the penalty force turning on or
    off while engaged.
    """
    engaged = record.data["engaged"]
    active = np.any(record.data["f_e"] != 0.0, axis=1)
    flips = np.flatnonzero((engaged[1:] != engaged[:-1]) | (active[1:] != active[:-1])) + 1
    if hold_every is not None:
        flips = np.union1d(flips, np.arange(0, len(engaged), hold_every))
    mask = np.zeros(len(engaged), dtype=bool)
    for s in flips:
        mask[max(0, s - 2):s + guard + 1] = True
    return mask


def fd_derivative(f, dt):
    """Fourth-order finite-difference derivative of a uniformly sampled series.

    Five-point central stencil in the interior, five-point one-sided stencils
    for the first and last two samples.
    """
    f = np.asarray(f, dtype=float)
    if f.size < 5:
        raise ContractViolation("need at least 5 samples")
    out = np.empty_like(f)
    out[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / (12.0 * dt)
    a = f[:5]
    out[0] = (-25 * a[0] + 48 * a[1] - 36 * a[2] + 16 * a[3] - 3 * a[4]) / (12.0 * dt)
    out[1] = (-3 * a[0] - 10 * a[1] + 18 * a[2] - 6 * a[3] + a[4]) / (12.0 * dt)
    b = f[-5:]
    out[-1] = (25 * b[4] - 48 * b[3] + 36 * b[2] - 16 * b[1] + 3 * b[0]) / (12.0 * dt)
    out[-2] = (3 * b[4] + 10 * b[3] - 18 * b[2] + 6 * b[1] - b[0]) / (12.0 * dt)
    return out


def _run_monitors(record, cfg):
    d = record.data
    dt = cfg.dt
    mask = switch_mask(record, hold_every=cfg.hold_every)
    H = d["H"]
    fd = fd_derivative(H, dt) if len(H) >= 5 else d["dHdt"].copy()
    d["pb_residual"] = fd - d["dHdt"]
    scale = float(np.max(np.abs(d["dHdt"]))) if len(H) else 0.0
    scale = scale if scale > 0 else 1.0
    rel = np.abs(d["pb_residual"]) / scale
    hard = np.flatnonzero((rel > ENERGY_AUDIT_TOL) & ~mask)
    warn = np.flatnonzero((rel > ENERGY_AUDIT_TOL) & mask)
    mon = {
        "energy_audit": {
            "max_rel_residual": float(np.max(rel[~mask])) if np.any(~mask) else 0.0,
            "violations": int(hard.size), "guarded_warnings": int(warn.size),
            "passed": bool(hard.size == 0),
        }
    }
    for k in hard[:5]:
        record.events.append({"event": "energy_audit_violation", "t": float(d["t"][k]),
                              "step": int(k), "rel_residual": float(rel[k])})
    Hh = d["Hhat"]
    if np.all(np.isfinite(Hh)) and len(Hh) > 1:
        peak = float(np.max(np.abs(Hh)))
        inc = np.diff(Hh)
        bad = inc > LYAPUNOV_TOL * peak
        guarded = mask[1:] | mask[:-1]
        viol = np.flatnonzero(bad & ~guarded)
        mon["lyapunov"] = {
            "violations": int(viol.size),
            "guarded_warnings": int(np.count_nonzero(bad & guarded)),
            "max_increase": float(np.max(inc)) if inc.size else 0.0,
            "peak": peak,
            "passed": bool(viol.size == 0),
        }
        for k in viol[:5]:
            record.events.append({"event": "lyapunov_increase", "t": float(d["t"][k + 1]),
                                  "step": int(k + 1), "increase": float(inc[k])})
        mon["detectability"] = _detectability(record)
    record.monitors = mon


def _detectability(record, window=0.5, y_tol=1e-9, x_tol=1e-6):
    """Flag stretches where the output vanishes but the state does not settle."""
    d = record.data
    if len(d["t"]) < 2:
        return {"flagged": False}
    dt = d["t"][1] - d["t"][0]
    w = max(2, int(round(window / dt)))
    ynorm = np.max(np.abs(d["yhat"]), axis=1)
    xnorm = np.sqrt(np.sum(d["qbar"] ** 2, axis=1) + np.sum(d["phat"] ** 2, axis=1)
                    + np.sum(d["q_rl"] ** 2, axis=1))
    quiet = ynorm < y_tol
    for start in range(0, len(quiet) - w + 1, w):
        seg = slice(start, start + w)
        if np.all(quiet[seg]) and xnorm[seg].min() > x_tol and xnorm[start + w - 1] >= xnorm[start]:
            record.events.append({"event": "detectability_flag", "t": float(d["t"][start])})
            return {"flagged": True, "t": float(d["t"][start])}
    return {"flagged": False}


def metrics(record, f_d=None, window=0.2, band=0.02):
    """Contact time, impact force, settling time and steady-state error.

    * contact_time: first sample with contact engaged.
    * impact_force: ``max |f_e|`` over ``[contact_time, contact_time + window]``.
    * settling_time: first time after which ``|f_e - f_d| <= band`` holds for
      the rest of the record.
    * steady_state_error: ``|f_e(t_end) - f_d|``.
    """
    d = record.data
    if f_d is None:
        f_d = record.metadata.get("f_d", 0.0)
    f_d = float(np.squeeze(f_d))
    t = d["t"]
    fe = d["f_e"][:, 0]
    sse = float(abs(fe[-1] - f_d))
    idx = np.flatnonzero(d["engaged"])
    if idx.size == 0:
        return Metrics(False, None, None, None, sse)
    k0 = int(idx[0])
    tc = float(t[k0])
    win = (t >= tc) & (t <= tc + window + 1e-12)
    impact = float(np.max(np.abs(fe[win])))
    outside = np.flatnonzero(np.abs(fe - f_d) > band)
    if outside.size == 0:
        settle = float(t[0])
    elif outside[-1] + 1 < len(t):
        settle = float(t[outside[-1] + 1])
    else:
        settle = None
    return Metrics(True, tc, impact, settle, sse)


def run(scenario):
    """Build and simulate a :class:`~phgrasp.scenario.Scenario`."""
    loop, x0, cfg, meta = scenario.build()
    record = simulate(loop, x0, cfg, q_f=scenario.q_f_vector(), metadata=meta)
    record.metadata["metrics"] = metrics(record).as_dict()
    return record
