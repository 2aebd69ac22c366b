"""Result models produced by the engine and written by the commands."""

import math
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional, Set, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .atoms import Atom

Interval = Tuple[Fraction, Fraction]


class _ExactModel(BaseModel):
    """Base model for results that carry exact rationals."""

    model_config = ConfigDict(arbitrary_types_allowed=True)


# ---------------------------------------------------------------------------
# roots
# ---------------------------------------------------------------------------


class RootReport(_ExactModel):
    """Isolated and refined distinct real roots of one polynomial.

    Intervals are open ``(lo, hi)`` brackets around a simple root, or
    degenerate ``(r, r)`` when the root ``r`` was hit exactly.
    """

    distinct_count: int = Field(..., ge=0, description="Number of distinct roots")
    intervals: List[Interval] = Field(default_factory=list)
    exact_roots: List[bool] = Field(
        default_factory=list, description="Whether each interval is an exact root"
    )
    refined_roots: List[float] = Field(default_factory=list)
    min_gap: Optional[float] = Field(None, description="Smallest consecutive gap")
    multiple_root_flag: Optional[bool] = Field(
        None, description="gcd(P, P') nonconstant; None when unknown"
    )
    width: Fraction = Field(..., description="Requested refinement width")
    method: str = Field(..., description="sturm or certified")

    @model_validator(mode="after")
    def _check_intervals(self) -> "RootReport":
        if self.distinct_count != len(self.intervals):
            raise ValueError("distinct_count must equal the number of intervals")
        for (lo1, hi1), (lo2, _) in zip(self.intervals, self.intervals[1:]):
            if not (lo1 <= hi1 <= lo2):
                raise ValueError("intervals must be sorted and disjoint")
        return self


class NearDoubleEvent(_ExactModel):
    """A point where |P| and |P'| are both below the threshold."""

    interval: Interval = Field(..., description="Bracket containing the point")
    p_bound: float = Field(..., ge=0, description="Upper bound on |P|")
    dp_bound: float = Field(..., ge=0, description="Upper bound on |P'|")
    threshold: float = Field(..., gt=0, description="n^-B")
    exact: bool = Field(False, description="P and P' vanish exactly")

    @property
    def location(self) -> float:
        lo, hi = self.interval
        return float((lo + hi) / 2)


class MatchStatus(str, Enum):
    MATCHED = "matched"
    UNMATCHED = "unmatched"


class RootMatch(_ExactModel):
    """Pairing of one root of F with a root of G."""

    root: float = Field(..., description="Refined root x0 of F")
    status: MatchStatus
    reason: Optional[str] = None
    interval: Optional[Tuple[float, float]] = Field(
        None, description="Interval on which G changes sign"
    )
    derivative: float = Field(..., description="|F'(x0)|")
    second_derivative_bound: float = Field(..., description="sup |F''| on I")
    difference_bound: float = Field(..., description="sup |F - G| on I")


class MatchReport(_ExactModel):
    eps1: Optional[float] = None
    M: Optional[float] = None
    matches: List[RootMatch] = Field(default_factory=list)

    @property
    def matched_count(self) -> int:
        return sum(1 for m in self.matches if m.status is MatchStatus.MATCHED)

    @property
    def unmatched_count(self) -> int:
        return len(self.matches) - self.matched_count

    @property
    def all_matched(self) -> bool:
        return self.unmatched_count == 0


# ---------------------------------------------------------------------------
# ekq
# ---------------------------------------------------------------------------


class QuadResult(BaseModel):
    """Quadrature value with an interval-halving error estimate."""

    value: float
    error_estimate: float = Field(..., ge=0)
    subintervals: int = Field(..., ge=0)

    @field_validator("value")
    @classmethod
    def _finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("quadrature value must be finite")
        return v


class EkRow(BaseModel):
    n: int
    expected: float
    residual: float
    quad_error: float


# ---------------------------------------------------------------------------
# exact
# ---------------------------------------------------------------------------


class ParityCertificate(str, Enum):
    EVEN_PARITY = "EvenParityObstruction"
    FOUR_K_PLUS_ONE = "FourKPlusOneObstruction"
    EXHAUSTIVE = "ExhaustiveObstruction"
    FEASIBLE = "Feasible"

    @property
    def is_obstruction(self) -> bool:
        return self is not ParityCertificate.FEASIBLE


class DoubleRootResult(_ExactModel):
    """Exact probabilities of a double root at 1, at -1 and at either."""

    n: int
    N: int
    p1: Fraction
    pm1: Fraction
    p_union: Fraction
    certificate: ParityCertificate

    @model_validator(mode="after")
    def _check_bracket(self) -> "DoubleRootResult":
        for p in (self.p1, self.pm1, self.p_union):
            if not 0 <= p <= 1:
                raise ValueError("probabilities must lie in [0, 1]")
        if not max(self.p1, self.pm1) <= self.p_union <= self.p1 + self.pm1:
            raise ValueError("p_union must lie in [max(p1, pm1), p1 + pm1]")
        return self


class CltRow(_ExactModel):
    n: int
    N: int
    exact: Fraction
    approx: float
    ratio: float


class SeparationVariant(str, Enum):
    CLAIM1 = "claim1"
    CLAIM2 = "claim2"
    UNIFORM = "uniform"


class SeparationResult(_ExactModel):
    variant: SeparationVariant
    x: Fraction
    ell: int
    k: int
    N: int
    value_count: int = 0
    min_gap: Optional[Fraction] = None
    bound: Optional[Fraction] = None
    passed: bool = False
    reason: Optional[str] = None


# ---------------------------------------------------------------------------
# mc
# ---------------------------------------------------------------------------

STATISTICS = ("mean", "residual", "variance", "gaps", "near-double")
COUNT_METHODS = ("auto", "sturm", "certified")


class SimConfig(_ExactModel):
    """Monte Carlo configuration for per-degree root statistics."""

    atom: Atom
    degrees: List[int]
    trials: int = Field(..., ge=1)
    seed: int
    interval: Optional[Tuple[float, float]] = None
    B: float = Field(16.0, gt=0)
    epsilon: Fraction = Field(Fraction(1, 8), description="I0/I1 exponent slack")
    stats: Set[str] = Field(default_factory=lambda: {"mean", "residual"})
    workers: int = Field(1, ge=1)
    root_method: str = Field(
        "auto",
        description="auto and sturm count exact polynomials by Sturm sequences; "
        "certified scans first and uses Sturm only when the scan cannot certify",
    )

    @field_validator("degrees")
    @classmethod
    def _sorted_degrees(cls, v: List[int]) -> List[int]:
        if not v:
            raise ValueError("degrees must be nonempty")
        if any(n < 1 for n in v):
            raise ValueError("degrees must be positive")
        return sorted(set(v))

    @field_validator("stats")
    @classmethod
    def _known_stats(cls, v: Set[str]) -> Set[str]:
        unknown = set(v) - set(STATISTICS)
        if unknown:
            raise ValueError(f"unknown statistics: {sorted(unknown)}")
        return set(v)

    @field_validator("root_method")
    @classmethod
    def _known_method(cls, v: str) -> str:
        if v not in COUNT_METHODS:
            raise ValueError(f"root_method must be one of {', '.join(COUNT_METHODS)}")
        return v

    @field_validator("epsilon", mode="before")
    @classmethod
    def _exact_epsilon(cls, v: Any) -> Fraction:
        return Fraction(v)


class DegreeSummary(BaseModel):
    n: int
    trials: int
    excluded: int = 0
    mean: float
    variance: float
    residual: float
    ci_half_width: float
    near_double_freq: Optional[float] = None
    min_gap_p01: Optional[float] = None
    min_gap_p50: Optional[float] = None
    seed: int


class SimSummary(BaseModel):
    atom: str
    seed: int
    rows: List[DegreeSummary] = Field(default_factory=list)

    def row(self, n: int) -> DegreeSummary:
        for r in self.rows:
            if r.n == n:
                return r
        raise KeyError(n)


class VarianceRatioRow(BaseModel):
    n: int
    trials: int
    variance: float
    ratio: float
    jackknife_error: float
    target: float


class TruncationReport(_ExactModel):
    n: int
    m: int
    r: Fraction
    J: Tuple[float, float]
    trials: int
    mean_abs_discrepancy: float
    mismatch_fraction: float
    excluded: int = 0
    required_m: float
    precondition_satisfied: bool


class UniversalityReport(BaseModel):
    atom_a: str
    atom_b: str
    n: int
    r: float
    trials: int
    mean_a: float
    half_width_a: float
    mean_b: float
    half_width_b: float
    difference: float
    combined_standard_error: float
    r_condition: Dict[str, float] = Field(default_factory=dict)


class EdgeMomentRow(BaseModel):
    n: int
    k: int
    trials: int
    median: float
    scaled_median: float = Field(..., description="median / n^(k+1/2)")
    second_moment: float
    second_moment_se: float
    exact_second_moment: float


class EdgeMomentReport(BaseModel):
    k: int
    rows: List[EdgeMomentRow] = Field(default_factory=list)
    slope: Optional[float] = Field(None, description="Fit of log median on log n")


class DoubleRootMCReport(_ExactModel):
    n: int
    N: int
    trials: int
    B: float
    double_at_one: int
    double_at_minus_one: int
    double_freq: float
    near_double_trials: int
    near_double_freq: float
    excluded: int = 0
    exact_p_union: Optional[Fraction] = None


# ---------------------------------------------------------------------------
# cli
# ---------------------------------------------------------------------------


class RunManifest(BaseModel):
    """Everything needed to reproduce a command's outputs."""

    command: str
    argv: List[str]
    parameters: Dict[str, Any] = Field(default_factory=dict)
    seed: Optional[int] = None
    version: str
    csv_schema_version: int
    started_at: str
    duration_seconds: float = Field(..., ge=0)
    outputs: Dict[str, str] = Field(
        default_factory=dict, description="File name to sha256 digest"
    )
