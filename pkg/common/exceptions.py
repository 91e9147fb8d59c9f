"""
Error hierarchy
Every error carries the exit code the CLI reports for it
"""


class OscillatorError(Exception):
    """Base class for all library errors"""

    exit_code: int = 1


class DeformationDomainError(OscillatorError, ValueError):
    """Deformation parameters or integer arguments outside their domain"""

    exit_code = 2


class ForbiddenParameterError(OscillatorError, ValueError):
    """A denominator factor of a basic hypergeometric series vanishes"""

    exit_code = 2


class QOverflowError(OscillatorError, OverflowError):
    """A float-domain result would not be finite; retry in the log domain"""

    exit_code = 3


class SeriesConvergenceError(OscillatorError):
    """An infinite series did not reach its tail bound, or diverges"""

    exit_code = 3


class RouteError(OscillatorError):
    """A construction route for P_n is not applicable to the given (q, t)"""

    exit_code = 3


class TruncationError(OscillatorError):
    """Fock-space truncation too short for the requested tail tolerance"""

    exit_code = 3


class EigenConvergenceError(OscillatorError):
    """Jacobi sweeps or the dimension-doubling loop did not converge"""

    exit_code = 3


class SpectrumConsistencyError(OscillatorError):
    """Spectrum table lost strict monotonicity (precision collapse)"""

    exit_code = 3


class VerificationFailure(OscillatorError):
    """At least one verification check exceeded its tolerance"""

    exit_code = 4
