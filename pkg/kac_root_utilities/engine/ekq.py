"""Real-zero density of Gaussian Kac polynomials and its integrals.

The density is

    rho_n(t) = (1/pi) * sqrt(1/(t^2-1)^2 - (n+1)^2 t^(2n) / (t^(2n+2)-1)^2)

which is even in t and satisfies rho_n(1/t) = t^2 rho_n(t). Both radicand
terms grow like (1-|t|)^-2 near |t| = 1 and cancel to the finite limit
n(n+2)/12, so points within 1e-3 of the fold, or within 8/(n+1) of it, are
evaluated with mpmath at a precision scaled to the cancellation.
"""

import logging
import math
from typing import Iterable, List, Optional, Tuple, Union

import mpmath
import numpy as np

from ..core.exceptions import NumericalError, ValidationError
from ..core.utils import parallel_map
from ..models.reports import EkRow, QuadResult

logger = logging.getLogger(__name__)

C_GAU = 0.625738072
TWO_OVER_PI = 2.0 / math.pi

NEAR_ONE = 1e-3
NEAR_ONE_SCALED = 8.0
CLAMP_WINDOW = 1e-3
GAUSS_POINTS = 10
DEFAULT_TOLERANCE = 1e-12
MAX_PANEL_DEPTH = 40

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(GAUSS_POINTS)

Endpoint = Union[None, float, int]


def _check_degree(n: int) -> None:
    if n < 1:
        raise ValidationError("the density needs n >= 1", "n")


def ek_density_limit(n: int) -> float:
    """Value of the density at |t| = 1, sqrt(n(n+2)/12)/pi."""
    _check_degree(n)
    return math.sqrt(n * (n + 2) / 12.0) / math.pi


def _density_mp(n: int, t: float) -> float:
    u = 1.0 - t
    if u == 0.0:
        return ek_density_limit(n)
    digits = 30 + int(2 * math.log10(1.0 / u)) + len(str(n))
    with mpmath.workdps(digits):
        x = mpmath.mpf(t)
        t2 = x * x
        t2n = x ** (2 * n)
        radicand = 1 / (t2 - 1) ** 2 - (n + 1) ** 2 * t2n / (t2n * t2 - 1) ** 2
        if radicand < 0:
            if u >= CLAMP_WINDOW:
                raise NumericalError(
                    f"negative radicand {mpmath.nstr(radicand, 5)} at t={t}, n={n}"
                )
            radicand = mpmath.mpf(0)
        return float(mpmath.sqrt(radicand) / mpmath.pi)


def _density_unit(n: int, t: np.ndarray) -> np.ndarray:
    """Density on points of [0, 1]."""
    t = np.asarray(t, dtype=np.float64)
    u = 1.0 - t
    near = (u < NEAR_ONE) | ((n + 1) * u < NEAR_ONE_SCALED)
    out = np.empty_like(t)
    far = ~near
    if far.any():
        tf = t[far]
        t2 = tf * tf
        t2n = tf ** (2 * n)
        radicand = 1.0 / (t2 - 1.0) ** 2 - (n + 1) ** 2 * t2n / (t2n * t2 - 1.0) ** 2
        if np.any(radicand < 0):
            bad = float(tf[np.argmin(radicand)])
            raise NumericalError(f"negative radicand at t={bad}, n={n}")
        out[far] = np.sqrt(radicand) / math.pi
    for i in np.nonzero(near)[0]:
        out[i] = _density_mp(n, float(t[i]))
    return out


def ek_density(n: int, t: float) -> float:
    """Expected density of real zeros of a degree-n Gaussian Kac polynomial."""
    _check_degree(n)
    t = abs(float(t))
    if t == 1.0:
        return ek_density_limit(n)
    if t > 1.0:
        s = 1.0 / t
        return float(_density_unit(n, np.array([s]))[0]) * s * s
    return float(_density_unit(n, np.array([t]))[0])


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------


def _gauss(n: int, a: float, b: float) -> float:
    half = 0.5 * (b - a)
    x = half * _NODES + 0.5 * (a + b)
    return half * float(np.dot(_WEIGHTS, _density_unit(n, x)))


def _adaptive(
    n: int, a: float, b: float, whole: float, tol: float, depth: int
) -> Tuple[float, float, int]:
    m = 0.5 * (a + b)
    left = _gauss(n, a, m)
    right = _gauss(n, m, b)
    combined = left + right
    error = abs(combined - whole)
    if depth >= MAX_PANEL_DEPTH or error <= tol:
        return combined, error, 2
    lv, le, lc = _adaptive(n, a, m, left, tol / 2.0, depth + 1)
    rv, re, rc = _adaptive(n, m, b, right, tol / 2.0, depth + 1)
    return lv + rv, le + re, lc + rc


def _panel(args: Tuple[int, float, float, float]) -> Tuple[float, float, int]:
    n, a, b, tol = args
    return _adaptive(n, a, b, _gauss(n, a, b), tol, 0)


def _breakpoints(n: int, alpha: float, beta: float) -> List[float]:
    """Panel edges graded geometrically toward t = 1."""
    levels = math.ceil(math.log2(n + 1)) + 8
    grid = [1.0 - 2.0**-k for k in range(levels + 1)]
    inner = [g for g in grid if alpha < g < beta]
    return [alpha] + inner + [beta]


def _integrate_unit(
    n: int, alpha: float, beta: float, tol: float, workers: int
) -> Tuple[float, float, int]:
    if beta <= alpha:
        return 0.0, 0.0, 0
    edges = _breakpoints(n, alpha, beta)
    share = tol / (len(edges) - 1)
    jobs = [(n, a, b, share) for a, b in zip(edges, edges[1:])]
    results = parallel_map(_panel, jobs, max_workers=workers)
    value = math.fsum(r[0] for r in results)
    error = math.fsum(r[1] for r in results)
    return value, error, sum(r[2] for r in results)


def _endpoint(value: Endpoint) -> float:
    if value is None:
        return math.inf
    return float(value)


def _unit_pieces(a: float, b: float) -> List[Tuple[float, float]]:
    """Map (a, b) onto subintervals of [0, 1] with equal density integrals."""
    pieces = []

    def clip(lo: float, hi: float) -> Optional[Tuple[float, float]]:
        lo, hi = max(a, lo), min(b, hi)
        return (lo, hi) if lo < hi else None

    def inv(x: float) -> float:
        return 0.0 if math.isinf(x) else 1.0 / x

    part = clip(0.0, 1.0)
    if part:
        pieces.append(part)
    part = clip(-1.0, 0.0)
    if part:
        pieces.append((-part[1], -part[0]))
    part = clip(1.0, math.inf)
    if part:
        pieces.append((inv(part[1]), inv(part[0])))
    part = clip(-math.inf, -1.0)
    if part:
        pieces.append((inv(-part[0]), inv(-part[1])))
    return pieces


def ek_expected(
    n: int,
    interval: Optional[Tuple[Endpoint, Endpoint]] = None,
    tolerance: float = DEFAULT_TOLERANCE,
    workers: int = 1,
) -> QuadResult:
    """Expected number of real zeros of a Gaussian Kac polynomial.

    The whole line is folded onto (0, 1) with t -> -t and t -> 1/t, giving
    four times the unit integral; the fold points carry no mass.
    """
    _check_degree(n)
    if tolerance <= 0:
        raise ValidationError("tolerance must be positive", "tolerance")
    if interval is None:
        value, error, pieces = _integrate_unit(n, 0.0, 1.0, tolerance / 4, workers)
        return QuadResult(value=4 * value, error_estimate=4 * error, subintervals=pieces)

    a = -_endpoint(None) if interval[0] is None else float(interval[0])
    b = _endpoint(interval[1])
    if not a < b:
        raise ValidationError(f"empty interval ({a}, {b})", "interval")
    units = _unit_pieces(a, b)
    totals = [
        _integrate_unit(n, lo, hi, tolerance / max(1, len(units)), workers)
        for lo, hi in units
    ]
    logger.debug("n=%d interval=(%s, %s) folded into %d unit pieces", n, a, b, len(units))
    return QuadResult(
        value=math.fsum(t[0] for t in totals),
        error_estimate=math.fsum(t[1] for t in totals),
        subintervals=sum(t[2] for t in totals),
    )


def ek_residual(n: int, tolerance: float = DEFAULT_TOLERANCE, workers: int = 1) -> float:
    """E N_n - (2/pi) ln n on the whole line."""
    return ek_expected(n, None, tolerance, workers).value - TWO_OVER_PI * math.log(n)


def ek_limit_tail(C0: float) -> Tuple[float, float]:
    """(integral of 1/(pi(1-t^2)) over (0, 1-1/C0), C_Gau/4 minus that integral)."""
    if not C0 > 1:
        raise ValidationError("C0 must exceed 1", "C0")
    integral = math.atanh(1.0 - 1.0 / C0) / math.pi
    return integral, C_GAU / 4.0 - integral


def ek_sweep(
    ns: Iterable[int],
    interval: Optional[Tuple[Endpoint, Endpoint]] = None,
    tolerance: float = DEFAULT_TOLERANCE,
    workers: int = 1,
) -> List[EkRow]:
    """One row of (n, expected, residual, quad_error) per degree."""
    rows = []
    for n in ns:
        result = ek_expected(n, interval, tolerance, workers)
        rows.append(
            EkRow(
                n=n,
                expected=result.value,
                residual=result.value - TWO_OVER_PI * math.log(n),
                quad_error=result.error_estimate,
            )
        )
        logger.info("ek n=%d expected=%.12f", n, result.value)
    return rows
