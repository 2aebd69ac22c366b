"""Computational engine: polynomials, root counting, quadrature, exact counts, simulation."""

from . import ekq, exact, mc, polycore, roots

__all__ = ["ekq", "exact", "mc", "polycore", "roots"]
