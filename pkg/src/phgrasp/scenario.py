"""Scenario files: loading, validation, defaults and overrides.

Scenarios are YAML documents validated against ``scenario.schema.json``
(shipped with the package).  Unknown keys are rejected.  Missing keys take the
gripper-study defaults below; :meth:`Scenario.to_dict` always writes the fully
resolved document so saved files are explicit.
"""

from __future__ import annotations

import copy
import fnmatch
import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np
import yaml

from .controller import HoganController, RestLengthController
from .exceptions import ConfigError, ContractViolation
from .models import CompliantBody, ContactCoupling, GripperModel, gripper_system
from .sim import ClosedLoop, IntegratorConfig, scenario_hash
from .transform import TransformedSystem

#: Largest RK4 step accepted for the gripper scenarios.
RK4_MAX_DT = 0.005
#: Allowed mismatch between ``f_d`` and the gain times ``q_f``.
TARGET_RESIDUAL_TOL = 1e-9

DEFAULTS = {
    "description": "",
    "plant": {"model": "gripper", "m_g": 0.5, "d_g": 0.1, "k_g1": 0.21, "k_g2": 0.06,
              "c_g": 0.3, "alpha_f": 0.001, "flip_stiffness": False},
    "initial": {"q": 0.3, "p": 0.0, "q_rl": 0.0},
    "controller": {
        "restlength": {"K_p": 1.0, "K_rl": 0.5, "C": 3.0, "mass_factor": "identity"},
        "hogan": {"K_Hp": 1.0, "K_Hd": 3.0, "compensate_external": False},
        "none": {},
    },
    "contact": {"engage_position": 0.2, "rigid_stiffness": 50.0, "rigid_damping": 1.0,
                "hysteresis": 1e-4},
    "body": {"m_c": 0.1, "d_c": 0.1, "K_c": 0.1, "q_c": 0.3},
    "integrator": {"method": "rk4", "dt": 0.001, "zoh": None},
    "output": {},
}

_RL_KEYS = {"K_p", "K_rl", "C", "mass_factor"}
_HOGAN_KEYS = {"K_Hp", "K_Hd", "compensate_external"}
_RIGID_KEYS = {"rigid_stiffness", "rigid_damping"}


def load_schema():
    text = resources.files("phgrasp").joinpath("scenario.schema.json").read_text()
    return json.loads(text)


_SCHEMA = None


def _schema():
    global _SCHEMA
    if _SCHEMA is None:
        _SCHEMA = load_schema()
    return _SCHEMA


def _field_path(err):
    return ".".join(str(p) for p in err.absolute_path) or "<root>"


def validate_document(doc):
    """Raise :class:`ConfigError` naming the offending field, if any."""
    if not isinstance(doc, dict):
        raise ConfigError("scenario must be a mapping at the top level")
    validator = jsonschema.Draft7Validator(_schema())
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise ConfigError(f"{_field_path(err)}: {err.message}")


def _resolve(doc):
    """Fill defaults and derive ``q_f``/``f_d``; checks cross-field rules."""
    out = copy.deepcopy(doc)
    out.setdefault("description", DEFAULTS["description"])
    out["plant"] = {**DEFAULTS["plant"], **out.get("plant", {})}
    out["initial"] = {**DEFAULTS["initial"], **out.get("initial", {})}
    ctrl = dict(out["controller"])
    kind = ctrl["type"]
    foreign = (_HOGAN_KEYS if kind == "restlength" else _RL_KEYS if kind == "hogan"
               else _RL_KEYS | _HOGAN_KEYS) & set(ctrl)
    if foreign:
        raise ConfigError(f"controller: keys {sorted(foreign)} do not apply to type {kind!r}")
    ctrl = {**DEFAULTS["controller"][kind], **ctrl}
    gain = ctrl.get("K_p", ctrl.get("K_Hp", 1.0))
    if "q_f" in ctrl and "f_d" in ctrl:
        residual = abs(ctrl["f_d"] - gain * ctrl["q_f"])
        if residual > TARGET_RESIDUAL_TOL:
            raise ConfigError(f"controller.f_d: f_d={ctrl['f_d']} is inconsistent with "
                              f"gain*q_f={gain * ctrl['q_f']} (residual {residual:.3g})")
    elif "f_d" in ctrl:
        ctrl["q_f"] = ctrl["f_d"] / gain
    else:
        ctrl.setdefault("q_f", 0.2)
        ctrl["f_d"] = gain * ctrl["q_f"]
    out["controller"] = ctrl

    contact = dict(out["contact"])
    mode = contact["mode"]
    if mode != "rigid" and _RIGID_KEYS & set(contact):
        raise ConfigError(f"contact: penalty parameters only apply to rigid mode, got {mode!r}")
    if mode != "compliant" and "body" in contact:
        raise ConfigError("contact.body: only valid in compliant mode")
    if mode != "none":
        contact = {**DEFAULTS["contact"], **contact}
        if mode != "rigid":
            for k in _RIGID_KEYS:
                contact.pop(k)
    if mode == "compliant":
        contact["body"] = {**DEFAULTS["body"], **contact.get("body", {})}
    out["contact"] = contact

    integ = {**DEFAULTS["integrator"], **out.get("integrator", {})}
    integ.setdefault("t_end", 4.0 if mode == "compliant" else 3.0)
    if integ["method"] == "rk4" and integ["dt"] > RK4_MAX_DT:
        raise ConfigError(f"integrator.dt: rk4 needs dt <= {RK4_MAX_DT}, got {integ['dt']}")
    out["integrator"] = integ
    out["output"] = {**DEFAULTS["output"], **out.get("output", {})}
    for section in ("plant", "initial", "controller", "contact", "integrator"):
        for key, val in out[section].items():
            if isinstance(val, float) and not math.isfinite(val):
                raise ConfigError(f"{section}.{key}: must be finite")
    validate_document(out)
    return out


@dataclass
class Scenario:
    """A validated, fully resolved scenario document."""

    doc: dict

    @classmethod
    def from_dict(cls, doc):
        validate_document(doc)
        return cls(_resolve(doc))

    @property
    def name(self):
        return self.doc["name"]

    @property
    def controller_type(self):
        return self.doc["controller"]["type"]

    @property
    def contact_mode(self):
        return self.doc["contact"]["mode"]

    @property
    def f_d(self):
        return float(self.doc["controller"]["f_d"])

    def q_f_vector(self):
        return np.array([float(self.doc["controller"]["q_f"])])

    def to_dict(self):
        return copy.deepcopy(self.doc)

    def hash(self):
        return scenario_hash(self.doc)

    def with_overrides(self, **dotted):
        """Copy with ``section.key=value`` overrides applied and re-validated.

        ``integrator.dt=0.0005`` and ``contact.body.m_c=0.2`` are examples.
        Changing a gain keeps ``f_d`` and re-derives ``q_f``; overriding only
        ``q_f`` re-derives ``f_d``.
        """
        doc = copy.deepcopy(self.doc)
        keys = set(dotted)
        ctrl = doc["controller"]
        if "controller.q_f" in keys and "controller.f_d" not in keys:
            ctrl.pop("f_d", None)
        elif "controller.q_f" not in keys and keys & {"controller.f_d", "controller.K_p",
                                                      "controller.K_Hp"}:
            ctrl.pop("q_f", None)
        for path, value in dotted.items():
            set_path(doc, path, value)
        return Scenario.from_dict(doc)

    def build(self):
        """Assemble ``(loop, x0, cfg, metadata)`` for :func:`phgrasp.sim.simulate`."""
        d = self.doc
        try:
            pl = {k: v for k, v in d["plant"].items() if k != "model"}
            gripper = GripperModel(**pl)
            plant = gripper_system(gripper)
            c = d["controller"]
            q_f = self.q_f_vector()
            if c["type"] == "restlength":
                ctrl = RestLengthController(TransformedSystem(plant, q_f), c["K_p"], c["K_rl"],
                                            c["C"], q_rl=[d["initial"]["q_rl"]],
                                            mass_factor=c["mass_factor"])
            elif c["type"] == "hogan":
                ctrl = HoganController(c["K_Hp"], c["K_Hd"], q_f,
                                       compensate_external=c["compensate_external"])
            else:
                ctrl = None
            ct = d["contact"]
            coupling = body = None
            if ct["mode"] != "none":
                kw = {k: v for k, v in ct.items() if k != "body"}
                coupling = ContactCoupling(**kw)
                if ct["mode"] == "compliant":
                    body = CompliantBody(**ct["body"])
            loop = ClosedLoop(plant, ctrl, coupling, body)
            cfg = IntegratorConfig(**d["integrator"])
        except ContractViolation as exc:
            raise ConfigError(str(exc)) from exc
        ini = d["initial"]
        x0 = loop.pack(ini["q"], ini["p"], ini["q_rl"])
        meta = {
            "scenario": self.name,
            "scenario_hash": self.hash(),
            "controller": c["type"],
            "contact": ct["mode"],
            "f_d": self.f_d,
            "q_f": float(q_f[0]),
            "decisions": {
                "q_rl0": ini["q_rl"],
                "mass_factor": c.get("mass_factor"),
                "flip_stiffness": d["plant"]["flip_stiffness"],
                "force_sensor": "ideal",
                "contact_model": ("penalty" if ct["mode"] == "rigid" else ct["mode"]),
                "control": "zoh" if cfg.zoh else "continuous",
            },
        }
        return loop, x0, cfg, meta


def set_path(doc, path, value):
    """Set ``doc[a][b][c] = value`` for ``path == "a.b.c"``, creating mappings."""
    keys = path.split(".")
    if not all(keys):
        raise ConfigError(f"bad parameter path {path!r}")
    node = doc
    for k in keys[:-1]:
        nxt = node.get(k)
        if nxt is None:
            nxt = node[k] = {}
        if not isinstance(nxt, dict):
            raise ConfigError(f"{path}: {k!r} is not a section")
        node = nxt
    node[keys[-1]] = value


def parse_scalar(text):
    """YAML-typed scalar from a command-line value (``0.2``, ``true``, ``rk4``)."""
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse value {text!r}") from exc


def load_scenario(path):
    """Load and validate a scenario file.

    Raises:
        ConfigError: unreadable file, YAML syntax error (with line), schema
            violation (with field path) or a cross-field rule violation.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from exc
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" line {mark.line + 1}" if mark is not None else ""
        raise ConfigError(f"{path}:{where} YAML parse error: {getattr(exc, 'problem', exc)}") from exc
    if doc is None:
        raise ConfigError(f"{path}: empty scenario file")
    try:
        return Scenario.from_dict(doc)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def save_scenario(scn, path):
    Path(path).write_text(yaml.safe_dump(scn.to_dict(), sort_keys=False))
    return path


def preset_names():
    root = resources.files("phgrasp").joinpath("presets")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".yaml"))


def preset_path(name):
    path = resources.files("phgrasp").joinpath("presets", f"{name}.yaml")
    if not path.is_file():
        raise ConfigError(f"no preset named {name!r}; available: {', '.join(preset_names())}")
    return Path(str(path))


def resolve_scenarios(arg):
    """Paths for a scenario argument.

    Accepts a file path, a preset name, ``presets/<name>`` or a glob over
    preset names such as ``presets/rigid_*``.
    """
    p = Path(arg)
    if p.is_file():
        return [p]
    name = arg[len("presets/"):] if arg.startswith("presets/") else arg
    if name.endswith(".yaml"):
        name = name[:-5]
    if any(ch in name for ch in "*?["):
        hits = [n for n in preset_names() if fnmatch.fnmatchcase(n, name)]
        if not hits:
            raise ConfigError(f"pattern {arg!r} matches no preset")
        return [preset_path(n) for n in hits]
    return [preset_path(name)]
