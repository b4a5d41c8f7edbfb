"""Exception types raised by the simulator."""


class BiphotonError(Exception):
    """Base class for all simulator errors."""


class InvalidParameterError(BiphotonError, ValueError):
    """A physical parameter is outside its allowed domain."""


class DegenerateWavelengthError(InvalidParameterError):
    """Pump and coupling wave numbers coincide, so the velocity acceptance is unbounded."""


class SingularDenominatorError(BiphotonError, ArithmeticError):
    """The resonant denominator of the two-photon amplitude vanished."""


class ConvergenceError(BiphotonError, RuntimeError):
    """Adaptive quadrature did not converge within its subdivision budget.

    Carries the last two estimates so callers can judge how far off they were.
    ``tau_index`` is filled in when the failure happens inside a trace.
    """

    def __init__(self, message, previous=None, current=None, tau=None, tau_index=None):
        super().__init__(message)
        self.previous = previous
        self.current = current
        self.tau = tau
        self.tau_index = tau_index


class ResolutionError(InvalidParameterError):
    """A sampled kernel would be too coarse to represent its width."""


class NormalizationError(BiphotonError, ValueError):
    """A trace has no positive maximum to normalize by."""


class WidthUnboundedError(BiphotonError, ValueError):
    """A trace never drops below half maximum on one side of its peak within the grid."""


class ManifestError(BiphotonError, ValueError):
    """A manifest failed validation. ``violations`` lists every problem found."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid manifest:\n" + "\n".join(f"  - {v}" for v in self.violations))
