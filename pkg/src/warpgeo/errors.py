"""Exception types shared across the package."""


class WarpGeoError(Exception):
    """Base class for all package errors."""


class MathDomainError(WarpGeoError):
    """Raised when a quantity is evaluated outside its mathematical domain."""


class DegenerateMetric(MathDomainError):
    pass


class IllConditioned(MathDomainError):
    pass


class DegeneratePlane(MathDomainError):
    pass


class ChartExit(MathDomainError):
    """A trajectory left the chart domain.

    ``trajectory`` holds the partial result computed before the exit.
    """

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class StepUnderflow(MathDomainError):
    pass


class PoleHit(MathDomainError):
    pass


class InvalidRegime(MathDomainError):
    pass


class NotDefinite(MathDomainError):
    pass


class DomainExceeded(MathDomainError):
    pass


class EmptyLevelSet(MathDomainError):
    pass


class AlphaOne(MathDomainError):
    pass


class DegenerateHessian(MathDomainError):
    pass


class NonHomogeneous(MathDomainError):
    pass


class PoleInDomain(MathDomainError):
    pass


class Inconclusive(MathDomainError):
    pass


class NotPositiveDefinite(MathDomainError):
    pass


class NegativeAlpha(MathDomainError):
    pass


class HypothesisNotMet(MathDomainError):
    pass


class DescriptorError(WarpGeoError):
    """Malformed or unsupported JSON descriptor."""
