"""Exception hierarchy shared by all tracekit modules."""


class TracekitError(Exception):
    """Base class for every error raised by the library."""


class NumericalError(TracekitError):
    """A computation could not reach its accuracy contract."""


class DataError(TracekitError):
    """Input data violates a structural constraint."""


# quadrature
class QuadratureFailure(NumericalError):
    def __init__(self, message, value=None, error=None):
        super().__init__(message)
        self.value = value
        self.error = error


class MaxSubdivisions(QuadratureFailure):
    pass


class UncertifiedTail(QuadratureFailure):
    pass


class StepUnderflow(NumericalError):
    pass


# operators
class NonConvergent(NumericalError):
    pass


class PoleAtC(NumericalError):
    pass


# transforms
class DecayUncertified(NumericalError):
    pass


class SingularityHandlingFailure(QuadratureFailure):
    pass


class ParameterOrdering(DataError):
    pass


# geometry / spectrum / plancherel
class DomainError(TracekitError):
    pass


class C2Invalid(DataError):
    pass


class SpectrumError(DataError):
    pass


class DegenerateDenominator(NumericalError):
    pass


class TailUnbounded(NumericalError):
    pass


# zeta
class PoleProximity(NumericalError):
    pass


class ContourPoleClash(NumericalError):
    pass


class TruncationError(NumericalError):
    pass
