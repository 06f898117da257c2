"""Variable rest-length impedance grasping control on port-Hamiltonian plants."""

from .controller import HoganController, RestLengthController
from .core import GeometricJacobian, MechanicalPHSystem, PlantState
from .exceptions import (ConfigError, ContractViolation, DivergenceError,
                         FactorizationError, SingularMassError)
from .models import (CompliantBody, ContactCoupling, GripperModel, compliant_system,
                     gripper_system)
from .scenario import Scenario, load_scenario
from .sim import ClosedLoop, IntegratorConfig, RunRecord, metrics, run, simulate
from .transform import TransformedState, TransformedSystem

__version__ = "0.1.0"

__all__ = [
    "ClosedLoop", "CompliantBody", "ConfigError", "ContactCoupling", "ContractViolation",
    "DivergenceError", "FactorizationError", "GeometricJacobian", "GripperModel",
    "HoganController", "IntegratorConfig", "MechanicalPHSystem", "PlantState",
    "RestLengthController", "RunRecord", "Scenario", "SingularMassError",
    "TransformedState", "TransformedSystem", "compliant_system", "gripper_system",
    "load_scenario", "metrics", "run", "simulate",
]
