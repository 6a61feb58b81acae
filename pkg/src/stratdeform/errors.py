"""Exception hierarchy.

Two families matter to callers: ValidationError for inputs that break a
documented contract (bad dimensions, incompatible root vectors, invalid
systems), and NumericalError for runs that start from legal inputs but fail
numerically (non-convergence, tracking breakdown, overflow).  The CLI maps
them to exit codes 2 and 3 respectively.
"""


class StratdeformError(Exception):
    """Base class for all library errors."""


class ValidationError(StratdeformError):
    """Input violates a documented precondition or data contract."""


class XiViolationError(ValidationError):
    """(a, b) is not merging-compatible: equal a-entries need equal
    b-entries and zero a-entries need zero b-entries."""


class SystemInvalidError(ValidationError):
    """A polynomial chain fails one of the structural system conditions."""


class DimensionError(ValidationError):
    """Vector/point length does not match the expected variable count."""


class SingularMatrixError(ValidationError):
    """An exact coordinate-change matrix is not invertible."""


class CapExceededError(ValidationError):
    """Degree or term-count cap exceeded during exact computation."""


class NumericalError(StratdeformError):
    """A numerical procedure failed on otherwise legal input."""


class RootFindingError(NumericalError):
    """Root solver did not reach the residual target."""

    def __init__(self, message, achieved_residual=None):
        super().__init__(message)
        self.achieved_residual = achieved_residual


class AmbiguousClusterError(NumericalError):
    """Two candidate clusterings fit inside the tolerance band."""


class AmbiguousZeroTestError(NumericalError):
    """A zero test landed too close to its threshold to classify."""

    def __init__(self, message, margin=None, level=None):
        super().__init__(message)
        self.margin = margin
        self.level = level


class ContractionError(NumericalError):
    """The bi-Lipschitz gate C*(gamma+|eta|) < 1 does not hold."""


class ConvergenceError(NumericalError):
    """Fixed-point or Newton iteration ran out of iterations."""


class TypeDriftError(NumericalError):
    """Root multiplicity structure changed along a tracking path; the
    deformation parameter is outside the certified neighborhood."""


class PathTooWildError(NumericalError):
    """Continuation step control underflowed without a cluster collision."""


class RangeOverflowError(NumericalError):
    """A log-domain value left the representable floating range."""


class RankDeficiencyError(NumericalError):
    """Equation gradients are rank-deficient at the requested point."""
