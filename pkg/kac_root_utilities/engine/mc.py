"""Reproducible Monte Carlo experiments on random Kac polynomials.

Every degree gets its own seed derived from the master seed, and every trial
its own counter-based stream keyed by (seed, trial). Trials run in any order
on the worker pool; the reductions below are exact integer or Fraction sums
taken in trial order, so the summaries do not depend on the worker count.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from ..core.exceptions import (
    CertificationError,
    KacRootUtilitiesError,
    NumericalError,
    ValidationError,
)
from ..core.utils import parallel_map
from ..models.atoms import Atom, AtomKind, RngSpec, stream_seed
from ..models.reports import (
    DegreeSummary,
    DoubleRootMCReport,
    EdgeMomentReport,
    EdgeMomentRow,
    SimConfig,
    SimSummary,
    TruncationReport,
    UniversalityReport,
    VarianceRatioRow,
)
from .exact import double_root_prob_exact
from .polycore import Poly, atom_moments, sample_coefficients, sample_poly
from .roots import (
    Bound,
    RootMethod,
    bulk_interval,
    count_real_roots,
    isolate_and_refine,
    near_double_scan,
)

logger = logging.getLogger(__name__)

TWO_OVER_PI = 2.0 / math.pi
MASLOVA = (4.0 / math.pi) * (1.0 - 2.0 / math.pi)
Z95 = 1.96
EXACT_ENUMERATION_LIMIT = 1 << 20


def count_roots(
    p: Poly,
    interval: Optional[Tuple[Bound, Bound]] = None,
    method: Union[str, RootMethod] = RootMethod.AUTO,
) -> Optional[int]:
    """Distinct real roots, or None when a float count cannot be certified.

    Exact polynomials are counted by Sturm sequences. With ``certified`` the
    interval scan runs first and Sturm is only the fallback, so exact
    polynomials still always get a count.
    """
    method = RootMethod(method)
    if p.exact and method is not RootMethod.CERTIFIED:
        return count_real_roots(p, interval, method=RootMethod.STURM)
    try:
        return count_real_roots(p, interval, method=RootMethod.CERTIFIED)
    except CertificationError:
        if p.exact:
            return count_real_roots(p, interval, method=RootMethod.STURM)
        logger.debug("uncertified trial for %r", p)
        return None


def _type_one_n(atom: Atom) -> int:
    return atom.N if atom.kind is AtomKind.TYPE_I and atom.N else 1


@dataclass(frozen=True)
class _Trial:
    count: Optional[int]
    min_gap: Optional[float] = None
    near_double: Optional[bool] = None


@dataclass
class _DegreeSamples:
    n: int
    seed: int
    trials: List[_Trial]

    @property
    def counts(self) -> List[int]:
        return [t.count for t in self.trials if t.count is not None]

    @property
    def excluded(self) -> int:
        return sum(1 for t in self.trials if t.count is None)


def _run_trial(cfg: SimConfig, n: int, seed: int, trial: int) -> _Trial:
    p = sample_poly(cfg.atom, n, RngSpec(seed=seed, trial=trial))
    count = count_roots(p, cfg.interval, cfg.root_method)
    if count is None:
        return _Trial(count=None)
    gap = None
    near = None
    try:
        if "gaps" in cfg.stats:
            gap = isolate_and_refine(p, cfg.interval).min_gap
        if "near-double" in cfg.stats and n >= 2:
            bulk = bulk_interval(n, _type_one_n(cfg.atom), cfg.epsilon)
            near = bool(near_double_scan(p, cfg.B, bulk))
    except CertificationError:
        return _Trial(count=None)
    return _Trial(count=count, min_gap=gap, near_double=near)


def _collect(cfg: SimConfig, show_progress: bool = False) -> List[_DegreeSamples]:
    samples = []
    for n in cfg.degrees:
        seed = stream_seed(cfg.seed, n)
        trials = parallel_map(
            lambda t: _run_trial(cfg, n, seed, t),
            range(cfg.trials),
            max_workers=cfg.workers,
            show_progress=show_progress,
            description=f"n={n}",
        )
        samples.append(_DegreeSamples(n=n, seed=seed, trials=trials))
        logger.info("n=%d: %d trials, %d excluded", n, len(trials), samples[-1].excluded)
    return samples


def _moments(counts: Sequence[int]) -> Tuple[Fraction, Fraction]:
    """Exact sample mean and unbiased sample variance."""
    m = len(counts)
    s1 = sum(counts)
    s2 = sum(c * c for c in counts)
    mean = Fraction(s1, m)
    if m < 2:
        return mean, Fraction(0)
    return mean, (s2 - Fraction(s1 * s1, m)) / (m - 1)


def _summarize(sample: _DegreeSamples) -> DegreeSummary:
    counts = sample.counts
    if not counts:
        raise NumericalError(f"every trial at n={sample.n} was excluded")
    mean, variance = _moments(counts)
    m = len(counts)

    gaps = [t.min_gap for t in sample.trials if t.min_gap is not None]
    quantiles = np.quantile(gaps, [0.01, 0.5]) if gaps else (None, None)
    flags = [t.near_double for t in sample.trials if t.near_double is not None]

    return DegreeSummary(
        n=sample.n,
        trials=m,
        excluded=sample.excluded,
        mean=float(mean),
        variance=float(variance),
        residual=float(mean) - TWO_OVER_PI * math.log(sample.n),
        ci_half_width=Z95 * math.sqrt(float(variance) / m),
        near_double_freq=sum(flags) / len(flags) if flags else None,
        min_gap_p01=None if quantiles[0] is None else float(quantiles[0]),
        min_gap_p50=None if quantiles[1] is None else float(quantiles[1]),
        seed=sample.seed,
    )


def run_expectation(cfg: SimConfig, show_progress: bool = False) -> SimSummary:
    """Mean, variance, residual and the optional gap and near-double statistics."""
    return run_simulation(cfg, show_progress)[0]


def _variance_row(sample: _DegreeSamples) -> VarianceRatioRow:
    counts = np.asarray(sample.counts, dtype=np.float64)
    m = len(counts)
    if m < 3:
        raise ValidationError("the jackknife needs at least 3 usable trials", "trials")
    _, variance = _moments(sample.counts)
    log_n = math.log(sample.n)
    rest1 = counts.sum() - counts
    rest2 = (counts * counts).sum() - counts * counts
    leave_one_out = (rest2 - rest1 * rest1 / (m - 1)) / (m - 2) / log_n
    spread = ((leave_one_out - leave_one_out.mean()) ** 2).sum()
    return VarianceRatioRow(
        n=sample.n,
        trials=m,
        variance=float(variance),
        ratio=float(variance) / log_n,
        jackknife_error=math.sqrt((m - 1) / m * spread),
        target=MASLOVA,
    )


def variance_ratio(cfg: SimConfig, show_progress: bool = False) -> List[VarianceRatioRow]:
    """Var(N_n) / ln n with a leave-one-out jackknife error."""
    if cfg.degrees[0] < 2:
        raise ValidationError("variance ratios need n >= 2", "degrees")
    return [_variance_row(sample) for sample in _collect(cfg, show_progress)]


def run_simulation(
    cfg: SimConfig, show_progress: bool = False
) -> Tuple[SimSummary, Optional[List[VarianceRatioRow]]]:
    """One pass over the trials giving the summary and, with the
    ``variance`` statistic and n >= 2, the variance ratios."""
    samples = _collect(cfg, show_progress)
    summary = SimSummary(
        atom=str(cfg.atom), seed=cfg.seed, rows=[_summarize(s) for s in samples]
    )
    ratios = None
    if "variance" in cfg.stats and cfg.degrees[0] >= 2:
        ratios = [_variance_row(s) for s in samples]
    return summary, ratios


def residual_curve(
    source: Union[SimConfig, SimSummary], show_progress: bool = False
) -> pd.DataFrame:
    """One row per degree: n, mean, residual, ci_half_width."""
    if isinstance(source, SimConfig):
        source = run_expectation(source, show_progress)
    frame = pd.DataFrame([row.model_dump() for row in source.rows])
    return frame[["n", "mean", "residual", "ci_half_width"]]


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------


def truncation_compare(
    atom: Atom,
    n: int,
    m: int,
    r: Fraction,
    J: Tuple[Bound, Bound],
    trials: int,
    seed: int,
    B: float = 16.0,
    workers: int = 1,
) -> TruncationReport:
    """Root counts on J of P_n against its own truncation P_m."""
    r = Fraction(r)
    if not Fraction(1, n) < r < 1:
        raise ValidationError("r must lie in (1/n, 1)", "r")
    if not 0 <= m <= n:
        raise ValidationError("the truncation degree must satisfy 0 <= m <= n", "m")
    if trials < 1:
        raise ValidationError("trials must be positive", "trials")
    lo, hi = float(Fraction(J[0])), float(Fraction(J[1]))
    if lo < 0 or hi > 1 - r:
        logger.warning("J=(%s, %s] lies outside (0, 1-r]; no comparison bound applies", lo, hi)
    required_m = 4 * B * math.log(n) / float(r)
    stream = stream_seed(seed, n, m)

    def trial(t: int) -> Optional[int]:
        p = sample_poly(atom, n, RngSpec(seed=stream, trial=t))
        q = p.truncate(m).trim()
        full = count_roots(p, J, RootMethod.CERTIFIED)
        if q.degree == 0:
            return full
        part = count_roots(q, J, RootMethod.CERTIFIED)
        if full is None or part is None:
            return None
        return abs(full - part)

    results = parallel_map(trial, range(trials), max_workers=workers)
    diffs = [d for d in results if d is not None]
    if not diffs:
        raise NumericalError("every truncation trial was excluded")
    return TruncationReport(
        n=n,
        m=m,
        r=r,
        J=(lo, hi),
        trials=len(diffs),
        mean_abs_discrepancy=float(Fraction(sum(diffs), len(diffs))),
        mismatch_fraction=sum(1 for d in diffs if d) / len(diffs),
        excluded=len(results) - len(diffs),
        required_m=required_m,
        precondition_satisfied=m >= required_m,
    )


def near_one_universality(
    atom_a: Atom,
    atom_b: Atom,
    n: int,
    r: float,
    trials: int,
    seed: int,
    eps_prime: float = 0.1,
    workers: int = 1,
) -> UniversalityReport:
    """Mean root counts on (1-r, 1) for two atoms, sharing trial streams."""
    if not 0 < r < 1:
        raise ValidationError("r must lie in (0, 1)", "r")
    if trials < 2:
        raise ValidationError("at least two trials are needed", "trials")
    interval = (Fraction(1) - Fraction(r), 1)
    stream = stream_seed(seed, n)

    def estimate(atom: Atom) -> Tuple[float, float]:
        counts = parallel_map(
            lambda t: count_roots(
                sample_poly(atom, n, RngSpec(seed=stream, trial=t)),
                interval,
                RootMethod.CERTIFIED,
            ),
            range(trials),
            max_workers=workers,
        )
        usable = [c for c in counts if c is not None]
        if len(usable) < 2:
            raise NumericalError(f"too few certified trials for {atom}")
        mean, variance = _moments(usable)
        return float(mean), float(variance) / len(usable)

    mean_a, var_a = estimate(atom_a)
    mean_b, var_b = estimate(atom_b)
    threshold = float(n) ** (-eps_prime)
    return UniversalityReport(
        atom_a=str(atom_a),
        atom_b=str(atom_b),
        n=n,
        r=float(r),
        trials=trials,
        mean_a=mean_a,
        half_width_a=Z95 * math.sqrt(var_a),
        mean_b=mean_b,
        half_width_b=Z95 * math.sqrt(var_b),
        difference=mean_a - mean_b,
        combined_standard_error=math.sqrt(var_a + var_b),
        r_condition={
            "eps_prime": eps_prime,
            "n_power": threshold,
            "satisfied": float(r < threshold),
        },
    )


def edge_moment_growth(
    ns: Sequence[int],
    k: int,
    trials: int,
    seed: int,
    atom: Optional[Atom] = None,
    workers: int = 1,
) -> EdgeMomentReport:
    """Size of sum_i C(i, k) xi_i, exactly per trial, against n^(k + 1/2)."""
    atom = atom or Atom.type_one(1)
    if not atom.is_discrete:
        raise ValidationError("edge moments are computed for discrete atoms", "atom")
    if trials < 2:
        raise ValidationError("at least two trials are needed", "trials")
    _, sigma2 = atom_moments(atom)
    rows = []
    for n in sorted(ns):
        if not 0 <= k <= n:
            raise ValidationError(f"k must satisfy 0 <= k <= n (n={n})", "k")
        weights = [math.comb(i, k) for i in range(n + 1)]
        stream = stream_seed(seed, n, k)

        def magnitude(t: int) -> int:
            xi = sample_coefficients(atom, n + 1, RngSpec(seed=stream, trial=t))
            return abs(sum(w * int(x) for w, x in zip(weights, xi)))

        values = parallel_map(magnitude, range(trials), max_workers=workers)
        squares = [v * v for v in values]
        second = Fraction(sum(squares), trials)
        sq = np.asarray([float(s) for s in squares])
        median = float(np.median([float(v) for v in values]))
        rows.append(
            EdgeMomentRow(
                n=n,
                k=k,
                trials=trials,
                median=median,
                scaled_median=median / float(n) ** (k + 0.5),
                second_moment=float(second),
                second_moment_se=float(sq.std(ddof=1)) / math.sqrt(trials),
                exact_second_moment=float(sigma2 * sum(w * w for w in weights)),
            )
        )
        logger.info("edge moments n=%d k=%d median=%.6g", n, k, median)

    fit = [(math.log(r.n), math.log(r.median)) for r in rows if r.median > 0]
    slope = None
    if len(fit) >= 2:
        slope = float(np.polyfit([a for a, _ in fit], [b for _, b in fit], 1)[0])
    return EdgeMomentReport(k=k, rows=rows, slope=slope)


def _double_at(coeffs: Sequence[int], point: int) -> bool:
    value = sum(a * point**i for i, a in enumerate(coeffs))
    slope = sum(i * a * point ** (i - 1) for i, a in enumerate(coeffs) if i)
    return value == 0 and slope == 0


def double_root_mc(
    n: int,
    N: int,
    trials: int,
    seed: int,
    B: float = 16.0,
    eps: Fraction = Fraction(1, 8),
    workers: int = 1,
    with_exact: bool = True,
) -> DoubleRootMCReport:
    """Empirical double roots at +-1 and near-double events over I0."""
    if n < 2:
        raise ValidationError("double-root experiments need n >= 2", "n")
    atom = Atom.type_one(N)
    bulk = bulk_interval(n, N, eps)
    stream = stream_seed(seed, n, N)

    def trial(t: int) -> Tuple[bool, bool, Optional[bool]]:
        p = sample_poly(atom, n, RngSpec(seed=stream, trial=t))
        at_one = _double_at(p.coeffs, 1)
        at_minus_one = _double_at(p.coeffs, -1)
        try:
            near = bool(near_double_scan(p, B, bulk))
        except CertificationError:
            near = None
        return at_one, at_minus_one, near

    results = parallel_map(trial, range(trials), max_workers=workers)
    either = sum(1 for a, b, _ in results if a or b)
    scanned = [near for _, _, near in results if near is not None]

    exact_p = None
    if with_exact:
        try:
            exact_p = double_root_prob_exact(n, N).p_union
        except KacRootUtilitiesError as e:
            logger.warning("no exact cross-check for n=%d: %s", n, e)

    return DoubleRootMCReport(
        n=n,
        N=N,
        trials=trials,
        B=B,
        double_at_one=sum(1 for a, _, _ in results if a),
        double_at_minus_one=sum(1 for _, b, _ in results if b),
        double_freq=either / trials,
        near_double_trials=sum(scanned),
        near_double_freq=sum(scanned) / len(scanned) if scanned else 0.0,
        excluded=len(results) - len(scanned),
        exact_p_union=exact_p,
    )


def exact_expected_roots(
    n: int, N: int = 1, interval: Optional[Tuple[Bound, Bound]] = None
) -> Fraction:
    """E N_n for Type I coefficients by enumerating every coefficient vector.

    P and -P have the same roots, so only vectors with a positive leading
    coefficient are visited.
    """
    if n < 0 or N < 1:
        raise ValidationError("need n >= 0 and N >= 1", "n")
    total = (2 * N) ** (n + 1)
    if total > EXACT_ENUMERATION_LIMIT:
        raise ValidationError(
            f"(2N)^(n+1) = {total} exceeds the enumeration limit {EXACT_ENUMERATION_LIMIT}",
            "n",
        )
    values = [v for v in range(-N, N + 1) if v]
    counts: Dict[int, int] = {}
    for head in itertools.product(values, repeat=n):
        for lead in range(1, N + 1):
            c = count_real_roots(Poly(head + (lead,)), interval, method=RootMethod.STURM)
            counts[c] = counts.get(c, 0) + 1
    return Fraction(2 * sum(c * k for c, k in counts.items()), total)
