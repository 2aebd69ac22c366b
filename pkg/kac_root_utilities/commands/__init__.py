"""Command modules for Kac Root Utilities."""

from . import ek, exact, experiment, simulate

__all__ = [
    "ek",
    "exact",
    "experiment",
    "simulate",
]
