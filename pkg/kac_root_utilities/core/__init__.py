"""Core utilities and configuration for Kac Root Utilities."""

from .config import Config
from .exceptions import (
    CertificationError,
    ConfigurationError,
    DataError,
    InfeasibleError,
    KacRootUtilitiesError,
    NumericalError,
    ResourceGuardError,
    ValidationError,
)
from .utils import parse_rational, render_rational

__all__ = [
    "Config",
    "KacRootUtilitiesError",
    "ConfigurationError",
    "ValidationError",
    "InfeasibleError",
    "ResourceGuardError",
    "CertificationError",
    "NumericalError",
    "DataError",
    "parse_rational",
    "render_rational",
]
