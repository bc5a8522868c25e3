"""Exception hierarchy shared by all modules."""


class SL2RError(Exception):
    """Base class for domain and solver errors."""


class NonInteriorPoint(SL2RError, ValueError):
    pass


class AtInfinity(SL2RError, ValueError):
    pass


class NotUnitDeterminant(SL2RError, ValueError):
    pass


class NegativeRadius(SL2RError, ValueError):
    pass


class NegativeArcLength(SL2RError, ValueError):
    pass


class ChartOverflow(SL2RError, ValueError):
    pass


class OutOfChart(SL2RError, ValueError):
    pass


class RadiusOutOfRange(SL2RError, ValueError):
    pass


class InvalidParams(SL2RError, ValueError):
    pass


class SingularStart(SL2RError, ValueError):
    pass


class StepSizeUnderflow(SL2RError, RuntimeError):
    pass


class QuadratureFailure(SL2RError, RuntimeError):
    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class NoConvergence(SL2RError, RuntimeError):
    def __init__(self, message, best_residual=None):
        super().__init__(message)
        self.best_residual = best_residual


class ConventionFailure(SL2RError, RuntimeError):
    pass


class DegenerateNullspace(SL2RError, RuntimeError):
    pass


class EndpointMismatch(SL2RError, RuntimeError):
    pass


class NonMonotoneAngle(SL2RError, RuntimeError):
    pass
