"""Data models for Kac Root Utilities."""

from .atoms import Atom, AtomKind, RngSpec, stream_seed
from .reports import (
    CltRow,
    DegreeSummary,
    DoubleRootMCReport,
    DoubleRootResult,
    EdgeMomentReport,
    EdgeMomentRow,
    EkRow,
    MatchReport,
    MatchStatus,
    NearDoubleEvent,
    ParityCertificate,
    QuadResult,
    RootMatch,
    RootReport,
    RunManifest,
    SeparationResult,
    SeparationVariant,
    SimConfig,
    SimSummary,
    TruncationReport,
    UniversalityReport,
    VarianceRatioRow,
)

__all__ = [
    "Atom",
    "AtomKind",
    "RngSpec",
    "stream_seed",
    "CltRow",
    "DegreeSummary",
    "DoubleRootMCReport",
    "DoubleRootResult",
    "EdgeMomentReport",
    "EdgeMomentRow",
    "EkRow",
    "MatchReport",
    "MatchStatus",
    "NearDoubleEvent",
    "ParityCertificate",
    "QuadResult",
    "RootMatch",
    "RootReport",
    "RunManifest",
    "SeparationResult",
    "SeparationVariant",
    "SimConfig",
    "SimSummary",
    "TruncationReport",
    "UniversalityReport",
    "VarianceRatioRow",
]
