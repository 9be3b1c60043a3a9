"""Exact correlation kernels for weighted domino tilings of the Aztec diamond."""

__version__ = "0.1.0"

from .errors import (
    AztecError,
    CapacityError,
    ConfigError,
    ConsistencyError,
    DimensionError,
    DomainError,
    ExtentError,
    QuadratureError,
    SingularMatrixError,
)
from .numerics import ExactMatrix, GaussianRational, I_UNIT, exact_abs, i_pow

__all__ = [
    "AztecError",
    "CapacityError",
    "ConfigError",
    "ConsistencyError",
    "DimensionError",
    "DomainError",
    "ExtentError",
    "QuadratureError",
    "SingularMatrixError",
    "ExactMatrix",
    "GaussianRational",
    "I_UNIT",
    "exact_abs",
    "i_pow",
    "__version__",
]
