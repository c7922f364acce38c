"""
Exception hierarchy for the gyromagnet library
"""


class GyroError(Exception):
    """Base class for every library error"""


class InputError(GyroError, ValueError):
    """Invalid arguments; the CLI reports these with exit code 1"""


class DomainError(InputError):
    """Value outside the domain of an operation (|q| > 1, non-unit vector, ...)"""


class ZeroFieldError(DomainError):
    """Operation needs a nonzero field"""


class PeriodError(InputError):
    """Operation needs a periodic field"""


class NotApplicableError(InputError):
    """Rule applied outside the branches it covers"""


class NumericalError(GyroError, RuntimeError):
    """Computation failed; the CLI reports these with exit code 2"""


class IntegrationError(NumericalError):
    """Step control could not meet the requested tolerance"""


class NormBlowupError(IntegrationError):
    """Norm drift exceeded its per-period budget"""


class SingularityError(IntegrationError):
    """Canonical chart reached a pole"""


class DegenerateError(NumericalError):
    """Input data carry no information (fixed-point orbit, Ω = 0 separatrix, ...)"""


class EmptyCurveError(NumericalError):
    """Contour level has no real solution"""


class NoBracketError(NumericalError):
    """Root search range has no sign change"""
