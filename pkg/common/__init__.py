"""
Common utilities shared across all components
"""

from .config import Settings, get_settings
from .exceptions import (
    DeformationDomainError,
    EigenConvergenceError,
    ForbiddenParameterError,
    OscillatorError,
    QOverflowError,
    RouteError,
    SeriesConvergenceError,
    SpectrumConsistencyError,
    TruncationError,
    VerificationFailure,
)
from .logging import configure_logging, get_logger

__all__ = [
    "configure_logging",
    "get_logger",
    "Settings",
    "get_settings",
    "OscillatorError",
    "DeformationDomainError",
    "ForbiddenParameterError",
    "QOverflowError",
    "SeriesConvergenceError",
    "RouteError",
    "TruncationError",
    "EigenConvergenceError",
    "SpectrumConsistencyError",
    "VerificationFailure",
]
