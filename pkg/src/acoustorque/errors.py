"""Exception hierarchy shared by all modules."""


class AcoustorqueError(Exception):
    """Base class for all library errors."""


class DomainError(AcoustorqueError, ValueError):
    """An argument lies outside the domain of the operation."""


class GeometryError(AcoustorqueError, ValueError):
    """A geometric precondition failed (radii, source positions, shapes)."""


class InvalidShapeError(GeometryError):
    """Mapping coefficients that do not describe a simple, closed body."""


class ConditioningError(AcoustorqueError, ArithmeticError):
    """A linear system or projection is too ill-conditioned to trust."""


class TruncationError(AcoustorqueError, ArithmeticError):
    """The requested truncation order cannot hold the required accuracy."""


class IntegrationError(AcoustorqueError, ArithmeticError):
    """Time integration received non-finite forcing or state."""


class ConfigError(AcoustorqueError, ValueError):
    """Malformed scene configuration (missing section, wrong type, unknown key)."""
