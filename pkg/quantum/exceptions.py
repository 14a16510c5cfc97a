"""
Exceptions raised by the numerical core.

Every error is a ``ValueError`` so callers validating user input
can catch the whole family at once.
"""


class QNDError(ValueError):
    """Base class for all measurement-engine errors."""


class InvalidDimensionError(QNDError):
    """Truncation dimension below the supported minimum."""


class DimensionMismatchError(QNDError):
    """Operands live in Fock spaces of different dimension."""


class InvalidResolutionError(QNDError):
    """Measurement resolution outside the modelled range."""


class GridRangeError(QNDError):
    """Quadrature grid too narrow for the requested levels."""


class GridCoverageError(QNDError):
    """Outcome grid does not cover enough of the distribution."""


class TruncationError(QNDError):
    """
    Amplitude leaks past the top of the truncated basis.

    ``required_dim`` carries the smallest dimension estimated
    to bring the leakage back under tolerance, when known.
    """

    def __init__(self, message, required_dim=None):
        super().__init__(message)
        self.required_dim = required_dim


class EigendecompositionError(QNDError):
    """Hermitian eigensolver failed to converge."""


class UnnormalizableOutcomeError(QNDError):
    """Outcome density too small to normalize the post state."""


class EdgeContaminationError(QNDError):
    """State has weight in the levels excluded by the edge rule."""


class IntegrationError(QNDError):
    """Adaptive quadrature failed to reach its tolerance."""


class UnsupportedOrderError(QNDError):
    """Requested moment order beyond the closed-form table."""
