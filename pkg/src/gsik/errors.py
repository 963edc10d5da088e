"""Exception types raised by the library."""


class GsikError(Exception):
    """Base class for all library errors."""


class DimensionError(GsikError, ValueError):
    """Vector/matrix sizes do not agree (pose vs skeleton, A vs b, ...)."""


class ValidationError(GsikError, ValueError):
    """An input violates a documented invariant (bad rotation, bad limits)."""


class SingularDiagonalError(GsikError, ValueError):
    """A Gauss-Seidel sweep was asked to divide by a zero diagonal entry."""


class EmptyTaskError(GsikError, ValueError):
    """A Jacobian build was requested with no enabled goal constraints."""


class SchemaError(GsikError, ValueError):
    """A JSON document does not match the documented file schema."""
