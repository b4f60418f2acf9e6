"""Error types raised by the asymptotics engine."""


class StruveAsymptoticsError(Exception):
    """Root of every error the engine raises on purpose."""


class SeriesReversionError(StruveAsymptoticsError, ValueError):
    pass


class InadmissibleParameters(StruveAsymptoticsError, ValueError):
    pass


class DomainError(StruveAsymptoticsError, ValueError):
    pass


class PoleAtNonpositiveInteger(StruveAsymptoticsError):
    pass


class MaxStepsExceeded(StruveAsymptoticsError):
    """Path tracing ran out of steps, winding budget or step size."""


class ContinuationAmbiguous(StruveAsymptoticsError):
    """log(1+u^2) cannot be carried to the target without passing a branch point."""


class BracketInvalid(StruveAsymptoticsError):
    pass


class NoConvergence(StruveAsymptoticsError):
    pass


class StepTooLarge(StruveAsymptoticsError):
    pass


class OnTransitionUnsupported(StruveAsymptoticsError):
    """The origin path runs into a saddle; no single expansion applies."""
