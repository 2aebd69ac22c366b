"""Kac Root Utilities - real roots of random polynomials, exactly and by simulation."""

__version__ = "1.0.0"
__author__ = "Jon"
__email__ = "jon@zer0day.net"
__description__ = (
    "Exact oracles, quadrature and Monte Carlo for the real roots of Kac polynomials"
)

from .core.config import Config
from .engine.polycore import Poly, parse_atom
from .engine.roots import count_real_roots

__all__ = [
    "Config",
    "Poly",
    "parse_atom",
    "count_real_roots",
    "__version__",
]
