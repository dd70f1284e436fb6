"""Exception types raised across the package."""


class PidError(Exception):
    """Base class for all package errors."""


class AllZeroCounts(PidError, ValueError):
    pass


class NegativeCount(PidError, ValueError):
    pass


class ShapeMismatch(PidError, ValueError):
    pass


class AbsoluteContinuityViolation(PidError, ValueError):
    """Raised when the first argument of a KL divergence has mass where the second has none."""


class DegenerateMarginals(PidError, ValueError):
    pass


class NonFiniteState(PidError, FloatingPointError):
    """A log-domain Sinkhorn quantity became inf/nan (usually a mis-set epsilon floor)."""


class InconsistentInputs(PidError, ValueError):
    pass


class RefuseTooLarge(PidError, ValueError):
    pass


class InfeasibleGrid(PidError, RuntimeError):
    pass


class TooFewSamples(PidError, ValueError):
    pass


class LengthMismatch(PidError, ValueError):
    pass


class SingularCovariance(PidError, ValueError):
    pass


class RowCountMismatch(PidError, ValueError):
    pass


class FileFormatError(PidError, ValueError):
    pass


class IncompleteTriple(PidError, FileNotFoundError):
    pass
