"""Exception types shared across the package."""

import numpy as np


class ContractViolation(ValueError):
    """An argument broke a documented precondition (shape, finiteness, sign)."""


class SingularMassError(np.linalg.LinAlgError):
    """The mass-inertia matrix is not symmetric positive definite."""


class FactorizationError(np.linalg.LinAlgError):
    """Cholesky factorization hit a non-positive pivot.

    Attributes:
        pivot: zero-based index of the failing pivot.
        value: the offending pivot value.
    """

    def __init__(self, pivot, value):
        self.pivot = int(pivot)
        self.value = float(value)
        super().__init__(f"matrix is not positive definite: pivot {self.pivot} = {self.value:.6g}")


class ConfigError(ValueError):
    """Invalid scenario or command-line configuration."""


class DivergenceError(RuntimeError):
    """A simulation produced non-finite values."""

    def __init__(self, message, t=None):
        self.t = t
        super().__init__(message)
