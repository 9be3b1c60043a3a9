"""Exception hierarchy shared across the package.

Every error raised deliberately by this package derives from AztecError,
so callers can catch one type at the boundary.  The CLI maps subclasses
to distinct exit codes.
"""


class AztecError(Exception):
    """Base class for all package errors."""


class DimensionError(AztecError):
    """Operands have incompatible shapes or an index is out of range."""


class SingularMatrixError(AztecError):
    """A matrix that must be invertible has determinant zero."""


class ExtentError(AztecError):
    """A weight field does not cover the index rectangle an operation needs."""


class CapacityError(AztecError):
    """A windowed operator product cannot be certified on the requested window."""


class ConsistencyError(AztecError):
    """An internal cross-check failed (conservation law, equivalence, gauge)."""


class QuadratureError(AztecError):
    """Contour integration failed to certify the requested tolerance."""


class DomainError(AztecError):
    """An evaluation point lies outside the region where a formula is valid."""


class ConfigError(AztecError):
    """Invalid combination of user-supplied parameters."""
