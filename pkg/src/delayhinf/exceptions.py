"""Exception hierarchy shared by all modules."""


class DelayHinfError(Exception):
    """Base class for every error raised by this package."""


class DomainError(DelayHinfError, ValueError):
    """An argument lies outside the domain an operation accepts."""


class ParameterError(DomainError):
    """Physical parameter out of range (non-positive mass, stiffness, ...)."""


class SingularityError(DelayHinfError, ArithmeticError):
    """A matrix that must be inverted is singular to working precision."""


class FactorizationDegeneracyError(SingularityError):
    """I - XY (or Phi1) is singular, so the filter cannot be recovered."""


class InternalConsistencyError(DelayHinfError, RuntimeError):
    """An internally assembled quantity violates a structural invariant."""


class NumericalFailureError(DelayHinfError, RuntimeError):
    """An iterative numerical routine failed to converge."""


class DelayContractError(DomainError):
    """A delay sample fell outside [tau_min, tau_max]."""


class SynthesisInfeasibleError(DelayHinfError):
    """No q1 on the search grid made the synthesis LMIs strictly feasible.

    ``margins`` maps each q1 tried to the best lambda_max the solver reached.
    """

    def __init__(self, message, margins=None):
        super().__init__(message)
        self.margins = dict(margins or {})


class CertificationFailureError(DelayHinfError):
    """Recovered gains did not pass the delay-dependent verification LMI."""

    def __init__(self, message, margin=None):
        super().__init__(message)
        self.margin = margin


class FormatError(DelayHinfError, ValueError):
    """A config, artifact, or trace file is malformed or has the wrong schema."""
