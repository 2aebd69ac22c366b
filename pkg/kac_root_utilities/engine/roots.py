"""Certified counting, isolation and refinement of real roots.

Two isolators share one interface. The Sturm isolator works on the
squarefree part of an integer polynomial in exact arithmetic. The certified
isolator scans [-1, 1] for P and for its reversal x^n P(1/x) with interval
batches evaluated in floating point under rigorous rounding-error bounds, and
falls back to exact signs whenever a float sign is not certain. It raises
CertificationError instead of returning a count it cannot prove.
"""

import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from ..core.exceptions import CertificationError, ValidationError
from ..models.reports import (
    MatchReport,
    MatchStatus,
    NearDoubleEvent,
    RootMatch,
    RootReport,
)
from .polycore import (
    Poly,
    content,
    derivative,
    dyadic_integers,
    exact_sign,
    exact_value,
)

logger = logging.getLogger(__name__)

Bound = Union[None, int, float, Fraction, str]

UNIT_ROUNDOFF = 2.0**-53
DEFAULT_WIDTH = Fraction(1, 1 << 40)
MAX_SCAN_DEPTH = 60
_SAFE_INT = 1 << 53
_CHUNK = 1 << 22


class RootMethod(str, Enum):
    AUTO = "auto"
    STURM = "sturm"
    CERTIFIED = "certified"


@dataclass(frozen=True)
class _Bracket:
    """Root bracket in chart coordinates.

    The direct chart is x itself; the reciprocal chart is y = 1/x for the
    reversed polynomial. ``s_lo``/``s_hi`` are the chart polynomial's signs at
    the endpoints (``s_lo`` may be 0 on the Sturm path).
    """

    lo: Fraction
    hi: Fraction
    s_lo: int = 0
    s_hi: int = 0
    exact: bool = False
    chart: str = "direct"

    def x_interval(self) -> Tuple[Fraction, Fraction]:
        if self.chart == "direct":
            return self.lo, self.hi
        return 1 / self.hi, 1 / self.lo

    def x_width(self) -> Fraction:
        lo, hi = self.x_interval()
        return hi - lo

    def x_mid(self) -> Fraction:
        lo, hi = self.x_interval()
        return (lo + hi) / 2


def _point(x: Fraction, chart: str = "direct") -> _Bracket:
    return _Bracket(x, x, 0, 0, exact=True, chart=chart)


def _gamma(m: int) -> float:
    mu = m * UNIT_ROUNDOFF
    return mu / (1.0 - mu)


# ---------------------------------------------------------------------------
# Integer polynomial arithmetic
# ---------------------------------------------------------------------------


def _trim(c: Sequence[int]) -> List[int]:
    out = list(c)
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out or [0]


def _is_zero(c: Sequence[int]) -> bool:
    return len(c) == 1 and c[0] == 0


def _primitive(c: Sequence[int]) -> List[int]:
    g = content(c)
    if g <= 1:
        return list(c)
    return [a // g for a in c]


def _int_derivative(c: Sequence[int]) -> List[int]:
    if len(c) == 1:
        return [0]
    return [i * a for i, a in enumerate(c) if i]


def _prem(a: Sequence[int], b: Sequence[int]) -> List[int]:
    """Pseudo-remainder |lc(b)|^(deg a - deg b + 1) * a mod b."""
    db = len(b) - 1
    lc = b[-1]
    e = len(a) - len(b) + 1
    if e <= 0:
        return list(a)
    r = list(a)
    k = e
    while not _is_zero(r) and len(r) - 1 >= db:
        q = r[-1]
        shift = len(r) - 1 - db
        r = [lc * x for x in r]
        for j, bj in enumerate(b):
            r[shift + j] -= q * bj
        r = _trim(r)
        k -= 1
    if k > 0:
        scale = lc**k
        r = [scale * x for x in r]
    if lc < 0 and e % 2 == 1:
        r = [-x for x in r]
    return r


def _gcd(a: Sequence[int], b: Sequence[int]) -> List[int]:
    """Primitive gcd of two integer polynomials."""
    a, b = _primitive(_trim(a)), _primitive(_trim(b))
    if len(a) < len(b):
        a, b = b, a
    while not _is_zero(b):
        r = _trim(_prem(a, b))
        a, b = b, (_primitive(r) if not _is_zero(r) else r)
    a = _primitive(a)
    if a[-1] < 0:
        a = [-x for x in a]
    return a


def _exact_division(a: Sequence[int], b: Sequence[int]) -> List[int]:
    """Quotient a / b for b primitive dividing a over the rationals."""
    r = list(a)
    db = len(b) - 1
    lc = b[-1]
    q = [0] * (len(a) - db)
    for shift in range(len(a) - 1 - db, -1, -1):
        top = r[shift + db]
        if top % lc:
            raise ArithmeticError("inexact polynomial division")
        c = top // lc
        q[shift] = c
        if c:
            for j, bj in enumerate(b):
                r[shift + j] -= c * bj
    if any(r):
        raise ArithmeticError("nonzero remainder in exact division")
    return _trim(q)


def squarefree_part(coeffs: Sequence[int]) -> Tuple[List[int], int]:
    """Primitive squarefree part of an integer polynomial and deg gcd(P, P')."""
    c = _trim(coeffs)
    if len(c) <= 2:
        return _primitive(c), 0
    g = _gcd(c, _int_derivative(c))
    if len(g) == 1:
        return _primitive(c), 0
    return _primitive(_exact_division(c, g)), len(g) - 1


def _sturm_chain(sqf: Sequence[int]) -> List[List[int]]:
    chain = [list(sqf)]
    if len(sqf) == 1:
        return chain
    chain.append(_primitive(_int_derivative(sqf)))
    while True:
        r = _trim(_prem(chain[-2], chain[-1]))
        if _is_zero(r):
            break
        chain.append(_primitive([-x for x in r]))
        if len(r) == 1:
            break
    return chain


def sturm_sequence(p: Poly) -> List[Poly]:
    """Sturm sequence of the squarefree part of an integer polynomial."""
    q = _prepare(p)
    if not q.exact:
        raise ValidationError("Sturm sequences need integer coefficients", "p")
    sqf, _ = squarefree_part(q.coeffs)
    return [Poly(c, exact=True) for c in _sturm_chain(sqf)]


# ---------------------------------------------------------------------------
# Isolators
# ---------------------------------------------------------------------------


class _SturmIsolator:
    method = "sturm"

    def __init__(self, coeffs: Sequence[int]):
        self.sqf, gcd_degree = squarefree_part(coeffs)
        self.multiple = gcd_degree > 0
        self.chain = _sturm_chain(self.sqf)

    def sign(self, x: Fraction) -> int:
        return exact_sign(self.sqf, x)

    def _variations(self, x: Optional[Fraction], at_infinity: int = 1) -> int:
        signs = []
        for c in self.chain:
            if x is None:
                s = (c[-1] > 0) - (c[-1] < 0)
                if at_infinity < 0 and (len(c) - 1) % 2:
                    s = -s
            else:
                s = exact_sign(c, x)
            if s:
                signs.append(s)
        return sum(1 for u, v in zip(signs, signs[1:]) if u != v)

    def count(self, lo: Optional[Fraction], hi: Optional[Fraction]) -> int:
        """Distinct roots in the open interval (lo, hi)."""
        if len(self.sqf) == 1:
            return 0
        count = self._variations(lo, -1) - self._variations(hi, 1)
        if hi is not None and self.sign(hi) == 0:
            count -= 1
        return count

    def bound(self) -> Fraction:
        cauchy = 1 + Fraction(max(abs(a) for a in self.sqf[:-1]), abs(self.sqf[-1]))
        radius = Fraction(1)
        while radius < cauchy:
            radius *= 2
        return radius

    def isolate(self) -> List[_Bracket]:
        if len(self.sqf) == 1:
            return []
        radius = self.bound()
        cache = {}

        def variations(x: Fraction) -> int:
            if x not in cache:
                cache[x] = self._variations(x)
            return cache[x]

        out = []
        stack = [(-radius, radius)]
        while stack:
            a, b = stack.pop()
            roots = variations(a) - variations(b)
            if roots == 0:
                continue
            if roots == 1:
                s_b = self.sign(b)
                if s_b == 0:
                    out.append(_point(b))
                else:
                    out.append(_Bracket(a, b, self.sign(a), s_b))
                continue
            m = (a + b) / 2
            stack.append((a, m))
            stack.append((m, b))
        return sorted(out, key=lambda br: br.lo)

    def refine(self, br: _Bracket, width: Fraction) -> _Bracket:
        if br.exact:
            return br
        lo, hi, s_lo, s_hi = br.lo, br.hi, br.s_lo, br.s_hi
        while hi - lo > width or s_lo == 0:
            m = (lo + hi) / 2
            s_m = self.sign(m)
            if s_m == 0:
                return _point(m)
            if s_m == s_hi:
                hi = m
            else:
                lo, s_lo = m, s_m
        return _Bracket(lo, hi, s_lo, s_hi)


class _CertifiedIsolator:
    method = "certified"

    def __init__(self, p: Poly, max_depth: int = MAX_SCAN_DEPTH):
        coeffs = list(p.coeffs)
        low = 0
        while coeffs[low] == 0:
            low += 1
        self.zero_multiplicity = low
        core = coeffs[low:]
        if p.exact:
            if max(abs(a) for a in core) >= _SAFE_INT:
                raise ValidationError(
                    "certified scan needs integer coefficients below 2**53", "p"
                )
            self.ints = list(core)
        else:
            self.ints, _ = dyadic_integers(core)
        self.direct = np.asarray(core, dtype=np.float64)
        self.reversed = self.direct[::-1].copy()
        self.max_depth = max_depth
        self.multiple = low > 1

    # -- signs ---------------------------------------------------------------

    def _chart_ints(self, chart: str) -> List[int]:
        return self.ints if chart == "direct" else self.ints[::-1]

    def chart_sign(self, chart: str, y: Fraction) -> int:
        return exact_sign(self._chart_ints(chart), y)

    def sign(self, x: Fraction) -> int:
        return exact_sign(self.ints, x)

    def _coeffs(self, chart: str) -> np.ndarray:
        return self.direct if chart == "direct" else self.reversed

    def _float_sign(self, chart: str, y: float) -> int:
        value, err = bounded_value(self._coeffs(chart), np.array([y]))
        if abs(value[0]) > err[0]:
            return 1 if value[0] > 0 else -1
        return self.chart_sign(chart, Fraction(y))

    # -- isolation -----------------------------------------------------------

    def isolate(self) -> List[_Bracket]:
        out: List[_Bracket] = []
        if self.zero_multiplicity:
            out.append(_point(Fraction(0)))
        if len(self.ints) == 1:
            return out
        one, zero = Fraction(1), Fraction(0)
        for chart in ("direct", "reciprocal"):
            s_minus = self.chart_sign(chart, -one)
            s_zero = self.chart_sign(chart, zero)
            s_plus = self.chart_sign(chart, one)
            if chart == "direct":
                if s_minus == 0:
                    out.append(_point(-one))
                if s_plus == 0:
                    out.append(_point(one))
            for lo, hi, s_lo, s_hi in ((-1.0, 0.0, s_minus, s_zero),
                                       (0.0, 1.0, s_zero, s_plus)):
                for br in self._scan(chart, lo, hi, s_lo, s_hi):
                    out.append(self._detach_from_zero(br))
        out = [self._as_direct_exact(br) for br in out]
        return sorted(out, key=lambda br: br.x_interval()[0])

    def _as_direct_exact(self, br: _Bracket) -> _Bracket:
        if br.exact and br.chart == "reciprocal":
            return _point(1 / br.lo)
        return br

    def _detach_from_zero(self, br: _Bracket) -> _Bracket:
        """Move a reciprocal-chart endpoint off 0 so the x-interval is finite."""
        if br.exact or br.chart == "direct":
            return br
        while not br.exact and (br.lo == 0 or br.hi == 0):
            nxt = self._bisect(br)
            if nxt == br:
                raise CertificationError("cannot separate a root from infinity")
            br = nxt
        return br

    def _scan(
        self, chart: str, lo: float, hi: float, s_lo: int, s_hi: int
    ) -> List[_Bracket]:
        coeffs = self._coeffs(chart)
        n = len(coeffs) - 1
        index = np.arange(n + 1, dtype=np.float64)
        abs_c = np.abs(coeffs)
        d_c = coeffs[1:] * index[1:]
        abs_d = np.abs(d_c)
        second = index[2:] * (index[2:] - 1.0) * abs_c[2:]
        gamma = _gamma(2 * n + 8)
        tiny = (n + 1) * float(abs_c.max()) * 2.0**-1000
        slack = 1.0 + 8 * UNIT_ROUNDOFF

        found: List[_Bracket] = []
        left = np.array([lo])
        right = np.array([hi])
        sl = np.array([s_lo])
        sr = np.array([s_hi])
        for _ in range(self.max_depth):
            if left.size == 0:
                return found
            c = 0.5 * (left + right)
            r = 0.5 * (right - left)
            f = np.empty_like(c)
            f_abs = np.empty_like(c)
            d = np.zeros_like(c)
            d_abs = np.zeros_like(c)
            m2 = np.zeros_like(c)
            rho = np.minimum(1.0, np.abs(c) + r)
            step = max(1, _CHUNK // (n + 1))
            for s in range(0, c.size, step):
                sel = slice(s, s + step)
                pw = _powers(c[sel], n)
                f[sel] = pw @ coeffs
                f_abs[sel] = np.abs(pw) @ abs_c
                if n >= 1:
                    d[sel] = pw[:, :n] @ d_c
                    d_abs[sel] = np.abs(pw[:, :n]) @ abs_d
                if n >= 2:
                    m2[sel] = _powers(rho[sel], n - 2) @ second
            err_f = gamma * f_abs + tiny
            err_d = gamma * d_abs + tiny
            m2 = m2 * (1.0 + 2 * gamma) + tiny

            exclude = (np.abs(f) - err_f) > (
                r * (np.abs(d) + err_d) + 0.5 * m2 * r * r
            ) * slack
            monotone = ~exclude & ((np.abs(d) - err_d) > r * m2 * slack)
            for i in np.nonzero(monotone & (sl * sr < 0))[0]:
                found.append(
                    _Bracket(
                        Fraction(float(left[i])),
                        Fraction(float(right[i])),
                        int(sl[i]),
                        int(sr[i]),
                        chart=chart,
                    )
                )

            split = ~exclude & ~monotone
            if not split.any():
                return found
            mids = c[split]
            lefts = left[split]
            rights = right[split]
            if np.any((mids <= lefts) | (mids >= rights)):
                raise CertificationError(
                    "root cluster below floating-point resolution",
                    (float(lefts[0]), float(rights[0])),
                )
            certain = np.abs(f[split]) > err_f[split]
            s_mid = np.where(certain, np.sign(f[split]), 0).astype(np.int64)
            for j in np.nonzero(~certain)[0]:
                s_mid[j] = self.chart_sign(chart, Fraction(float(mids[j])))
                if s_mid[j] == 0:
                    found.append(_point(Fraction(float(mids[j])), chart))
            left = np.concatenate([lefts, mids])
            right = np.concatenate([mids, rights])
            sl = np.concatenate([sl[split], s_mid])
            sr = np.concatenate([s_mid, sr[split]])
        raise CertificationError(
            f"scan did not separate roots within {self.max_depth} bisections",
            (float(left.min()), float(right.max())),
        )

    # -- refinement ----------------------------------------------------------

    def _bisect(self, br: _Bracket) -> _Bracket:
        mid = 0.5 * (float(br.lo) + float(br.hi))
        m = Fraction(mid)
        if not br.lo < m < br.hi:
            return br
        s_m = self._float_sign(br.chart, mid)
        if s_m == 0:
            return _point(m, br.chart)
        if s_m == br.s_lo:
            return replace(br, lo=m, s_lo=s_m)
        return replace(br, hi=m, s_hi=s_m)

    def refine(self, br: _Bracket, width: Fraction) -> _Bracket:
        while not br.exact and br.x_width() > width:
            nxt = self._bisect(br)
            if nxt == br:
                logger.debug("refinement stopped at float resolution near %s", br)
                break
            br = nxt
        return self._as_direct_exact(br)


def _powers(x: np.ndarray, n: int) -> np.ndarray:
    """Rows [1, x, x^2, ..., x^n] for each entry of x."""
    pw = np.empty((x.size, n + 1), dtype=np.float64)
    pw[:, 0] = 1.0
    if n:
        pw[:, 1:] = x[:, None]
        np.cumprod(pw[:, 1:], axis=1, out=pw[:, 1:])
    return pw


def bounded_value(coeffs: np.ndarray, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Float values of a polynomial with a rigorous absolute error bound."""
    n = len(coeffs) - 1
    pw = _powers(np.asarray(x, dtype=np.float64), n)
    value = pw @ coeffs
    scale = np.abs(pw) @ np.abs(coeffs)
    tiny = (n + 1) * float(np.abs(coeffs).max()) * 2.0**-1000
    return value, _gamma(2 * n + 8) * scale + tiny


def _radius_sum(coeffs: Sequence[float], rho: float, order: int) -> float:
    """Upper bound on sup |P^(order)| over |x| <= rho (inf on overflow)."""
    a = np.abs(np.asarray(coeffs, dtype=np.float64))
    n = a.size - 1
    if n < order:
        return 0.0
    index = np.arange(order, n + 1, dtype=np.float64)
    weight = a[order:].copy()
    for j in range(order):
        weight *= index - j
    with np.errstate(over="ignore", invalid="ignore"):
        terms = np.where(weight > 0, weight * rho ** (index - order), 0.0)
        total = float(np.sum(terms))
    return total * (1.0 + _gamma(2 * n + 8))


# ---------------------------------------------------------------------------
# Helpers shared by the public operations
# ---------------------------------------------------------------------------


def _prepare(p: Poly) -> Poly:
    q = p.trim()
    if q.is_zero():
        raise ValidationError("the zero polynomial has no finite root count", "p")
    return q


def _as_bound(value: Bound, name: str) -> Optional[Fraction]:
    if value is None:
        return None
    if isinstance(value, float) and math.isinf(value):
        return None
    if isinstance(value, str) and value.strip().lower() in ("inf", "-inf", "+inf"):
        return None
    try:
        return Fraction(value)
    except (TypeError, ValueError):
        raise ValidationError(f"bad interval endpoint {value!r}", name)


def _resolve_interval(
    interval: Optional[Tuple[Bound, Bound]]
) -> Tuple[Optional[Fraction], Optional[Fraction]]:
    if interval is None:
        return None, None
    lo = _as_bound(interval[0], "interval")
    hi = _as_bound(interval[1], "interval")
    if lo is not None and hi is not None and not lo < hi:
        raise ValidationError(f"empty interval ({lo}, {hi})", "interval")
    return lo, hi


def _isolator(q: Poly, method: Union[str, RootMethod]):
    method = RootMethod(method)
    if method is RootMethod.AUTO:
        method = RootMethod.STURM if q.exact else RootMethod.CERTIFIED
    if method is RootMethod.STURM:
        if not q.exact:
            raise ValidationError(
                "the Sturm path needs integer coefficients; use certified", "method"
            )
        return _SturmIsolator(q.coeffs)
    return _CertifiedIsolator(q)


def _side(iso, br: _Bracket, q: Fraction) -> int:
    """-1 if the bracket's root lies below q, 0 if it equals q, 1 if above."""
    lo, hi = br.x_interval()
    if br.exact:
        return (lo > q) - (lo < q)
    if q <= lo:
        return 1
    if q >= hi:
        return -1
    s_q = iso.sign(q)
    if s_q == 0:
        return 0
    s_hi = iso.sign(hi)
    if s_hi == 0:
        return 1 if iso.sign(lo) == s_q else -1
    return -1 if s_q == s_hi else 1


def _inside(iso, br: _Bracket, lo: Optional[Fraction], hi: Optional[Fraction]) -> bool:
    if lo is not None and _side(iso, br, lo) <= 0:
        return False
    if hi is not None and _side(iso, br, hi) >= 0:
        return False
    return True


def _brackets(q: Poly, interval, method) -> Tuple[object, List[_Bracket]]:
    lo, hi = _resolve_interval(interval)
    iso = _isolator(q, method)
    if q.degree == 0:
        return iso, []
    return iso, [br for br in iso.isolate() if _inside(iso, br, lo, hi)]


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------


def count_real_roots(
    p: Poly,
    interval: Optional[Tuple[Bound, Bound]] = None,
    method: Union[str, RootMethod] = RootMethod.AUTO,
) -> int:
    """Number of distinct real roots of ``p`` in the open interval.

    Raises:
        ValidationError: For the zero polynomial or a bad interval
        CertificationError: If the certified scan cannot prove a count
    """
    q = _prepare(p)
    if q.degree == 0:
        return 0
    iso = _isolator(q, method)
    if isinstance(iso, _SturmIsolator):
        lo, hi = _resolve_interval(interval)
        return iso.count(lo, hi)
    lo, hi = _resolve_interval(interval)
    return sum(1 for br in iso.isolate() if _inside(iso, br, lo, hi))


def isolate_and_refine(
    p: Poly,
    interval: Optional[Tuple[Bound, Bound]] = None,
    width: Union[Fraction, float, str] = DEFAULT_WIDTH,
    method: Union[str, RootMethod] = RootMethod.AUTO,
) -> RootReport:
    """Isolate the distinct real roots and refine every bracket to ``width``.

    Brackets are refined further until each is at most a third of the gap to
    its neighbours, so the reported minimal gap is accurate to 2 * width.
    """
    width = Fraction(width)
    if width <= 0:
        raise ValidationError("refinement width must be positive", "width")
    q = _prepare(p)
    iso, brackets = _brackets(q, interval, method)
    brackets = [iso.refine(br, width) for br in brackets]

    for _ in range(64):
        brackets.sort(key=lambda br: br.x_interval()[0])
        changed = False
        for i in range(len(brackets) - 1):
            limit = (brackets[i + 1].x_mid() - brackets[i].x_mid()) / 3
            for j in (i, i + 1):
                br = brackets[j]
                if not br.exact and br.x_width() > limit:
                    tighter = iso.refine(br, limit)
                    if tighter.x_width() < br.x_width():
                        brackets[j] = tighter
                        changed = True
        if not changed:
            break

    intervals = [br.x_interval() for br in brackets]
    roots = [float(br.x_mid()) for br in brackets]
    return RootReport(
        distinct_count=len(brackets),
        intervals=intervals,
        exact_roots=[br.exact for br in brackets],
        refined_roots=roots,
        min_gap=_bracket_gap(intervals),
        multiple_root_flag=iso.multiple if q.degree else False,
        width=width,
        method=iso.method,
    )


def _bracket_gap(intervals: Sequence[Tuple[Fraction, Fraction]]) -> Optional[float]:
    mids = [(Fraction(lo) + Fraction(hi)) / 2 for lo, hi in intervals]
    gaps = [b - a for a, b in zip(mids, mids[1:])]
    return float(min(gaps)) if gaps else None


def min_gap(report: RootReport) -> Optional[float]:
    """Smallest distance between consecutive bracket midpoints, if any.

    Every bracket is at most ``report.width`` wide, so the value is within
    ``2 * width`` of the true minimal root gap.
    """
    return _bracket_gap(report.intervals)


def bulk_interval(
    n: int, N: int = 1, eps: Union[Fraction, float] = Fraction(1, 8)
) -> Tuple[float, float]:
    """The bulk interval I0 = (1/(N+1), 1 - n^(-2+eps))."""
    if n < 2:
        raise ValidationError("bulk interval needs n >= 2", "n")
    return 1.0 / (N + 1), 1.0 - float(n) ** (-2.0 + float(eps))


def edge_interval(
    n: int, N: int = 1, eps: Union[Fraction, float] = Fraction(1, 8)
) -> Tuple[float, float]:
    """The edge interval I1 = (1 - n^(-2+eps), 1)."""
    return bulk_interval(n, N, eps)[1], 1.0


class _ValueOracle:
    """Values of P and its derivatives with absolute error bounds."""

    def __init__(self, p: Poly):
        self.poly = p
        self.array = p.array()
        self.floats_exact = p.exact and max(abs(a) for a in p.coeffs) < _SAFE_INT
        if p.exact:
            self.ints, self.shift = list(p.coeffs), 0
        else:
            self.ints, self.shift = dyadic_integers(p.coeffs)

    def value(self, x: Fraction) -> Tuple[float, float]:
        if abs(x) <= 1 and (self.floats_exact or not self.poly.exact):
            xf = float(x)
            if Fraction(xf) == x:
                v, e = bounded_value(self.array, np.array([xf]))
                return float(v[0]), float(e[0])
        exact = exact_value(self.ints, x) / (1 << self.shift)
        approx = float(exact)
        if Fraction(approx) == exact:
            return approx, 0.0
        return approx, abs(approx) * 2.0**-52 + 5e-324

    def exact_sign(self, x: Fraction) -> int:
        return exact_sign(self.ints, x)

    def sup(self, rho: float, order: int) -> float:
        return _radius_sum(self.poly.coeffs, rho, order)


def _decide(value: float, err: float, spread: float, tau: float) -> Optional[bool]:
    if abs(value) + err + spread <= tau:
        return True
    if abs(value) - err - spread > tau:
        return False
    return None


def near_double_scan(
    p: Poly,
    B: float,
    interval: Optional[Tuple[Bound, Bound]] = None,
    method: Union[str, RootMethod] = RootMethod.AUTO,
    max_refinements: int = 200,
) -> List[NearDoubleEvent]:
    """Points where |P| <= n^-B and |P'| <= n^-B hold together.

    Candidates are the roots of P' (where |P'| = 0) and the roots of P (where
    |P| = 0); each is refined until the threshold comparison is certain.
    """
    if B <= 0:
        raise ValidationError("B must be positive", "B")
    q = _prepare(p)
    n = q.degree
    if n == 0:
        return []
    tau = float(n) ** (-float(B)) if n > 1 else 1.0
    oracle = _ValueOracle(q)
    dq = derivative(q).trim()
    d_oracle = _ValueOracle(dq)
    events: List[NearDoubleEvent] = []

    if dq.degree >= 1:
        iso, brackets = _brackets(dq, interval, method)
        for br in brackets:
            event = _check_candidate(
                iso, br, oracle, d_oracle, tau, max_refinements, critical=True
            )
            if event is not None:
                events.append(event)

    iso, brackets = _brackets(q, interval, method)
    for br in brackets:
        event = _check_candidate(
            iso, br, d_oracle, oracle, tau, max_refinements, critical=False
        )
        if event is None:
            continue
        lo, hi = event.interval
        if any(not (hi < e.interval[0] or e.interval[1] < lo) for e in events):
            continue
        events.append(event)
    return sorted(events, key=lambda e: e.interval[0])


def _check_candidate(
    iso,
    br: _Bracket,
    other: _ValueOracle,
    own: _ValueOracle,
    tau: float,
    max_refinements: int,
    critical: bool,
) -> Optional[NearDoubleEvent]:
    """Test the function ``other`` at the zero of ``own`` inside ``br``.

    For a critical point ``own`` is P' and ``other`` is P; for a root of P the
    roles swap. The spread over the bracket uses the derivative of ``other``.
    """
    decision: Optional[bool] = None
    bound = 0.0
    for _ in range(max_refinements):
        lo, hi = br.x_interval()
        mid = (lo + hi) / 2
        half = float(hi - lo) / 2
        value, err = other.value(mid)
        spread = 0.0
        if half:
            spread = half * other.sup(float(abs(mid)) + half, 1)
        decision = _decide(value, err, spread, tau)
        bound = abs(value) + err + spread
        if decision is not None:
            break
        nxt = iso.refine(br, (hi - lo) / 2)
        if nxt.x_width() >= br.x_width() and not nxt.exact:
            break
        br = nxt
    if decision is None:
        decision = abs(value) <= tau
        logger.debug("near-double decision at resolution limit near %s", float(mid))
    if not decision:
        return None
    exact = br.exact and other.exact_sign(br.x_interval()[0]) == 0
    p_bound, dp_bound = (bound, 0.0) if critical else (0.0, bound)
    if exact:
        p_bound = dp_bound = 0.0
    return NearDoubleEvent(
        interval=br.x_interval(),
        p_bound=p_bound,
        dp_bound=dp_bound,
        threshold=tau,
        exact=exact,
    )


def root_match(
    F: Poly,
    G: Poly,
    eps1: Optional[float] = None,
    M: Optional[float] = None,
    interval: Optional[Tuple[Bound, Bound]] = None,
    width: Union[Fraction, float] = DEFAULT_WIDTH,
    method: Union[str, RootMethod] = RootMethod.AUTO,
) -> MatchReport:
    """Pair each root of F with a root of G by a certified sign change.

    A root x0 of F qualifies when |F'(x0)| >= eps1, |F''| <= M on
    I = [x0 - eps1/M, x0 + eps1/M] and sup_I |F - G| <= eps1^2/(4M); G then
    changes sign on I. Without ``eps1`` the value |F'(x0)| is used; without
    ``M`` the bound on |F''| over [x0 - 1, x0 + 1] is used.
    """
    if eps1 is not None and eps1 <= 0:
        raise ValidationError("eps1 must be positive", "eps1")
    if M is not None and M <= 0:
        raise ValidationError("M must be positive", "M")
    f = _prepare(F)
    g_oracle = _ValueOracle(G.trim())
    f_oracle = _ValueOracle(f)
    df_oracle = _ValueOracle(derivative(f).trim())
    length = max(len(F.coeffs), len(G.coeffs))
    diff = [
        abs(float(_coeff(F, i)) - float(_coeff(G, i))) for i in range(length)
    ]

    report = isolate_and_refine(f, interval, width, method)
    matches = []
    for (lo, hi) in report.intervals:
        x0 = (lo + hi) / 2
        slope = abs(df_oracle.value(x0)[0])
        e = eps1 if eps1 is not None else slope
        rho0 = float(abs(x0))
        bound_M = M if M is not None else max(f_oracle.sup(rho0 + 1.0, 2), e)
        radius = e / bound_M if bound_M > 0 else 0.0
        curvature = f_oracle.sup(rho0 + radius, 2)
        gap = _radius_sum(diff, rho0 + radius, 0)
        fields = dict(
            root=float(x0),
            derivative=slope,
            second_derivative_bound=curvature,
            difference_bound=gap,
        )
        reason = None
        if e <= 0 or slope < e * (1 - 1e-12):
            reason = "|F'(x0)| is below eps1"
        elif curvature > bound_M:
            reason = "|F''| exceeds M on I"
        elif gap > e * e / (4 * bound_M):
            reason = "sup |F - G| exceeds eps1^2/(4M) on I"
        if reason is None:
            a = x0 - Fraction(radius)
            b = x0 + Fraction(radius)
            s_a, s_b = g_oracle.exact_sign(a), g_oracle.exact_sign(b)
            if s_a * s_b <= 0:
                matches.append(
                    RootMatch(
                        status=MatchStatus.MATCHED,
                        interval=(float(a), float(b)),
                        **fields,
                    )
                )
                continue
            reason = "G has no sign change on I"
        matches.append(RootMatch(status=MatchStatus.UNMATCHED, reason=reason, **fields))
    return MatchReport(eps1=eps1, M=M, matches=matches)


def _coeff(p: Poly, i: int):
    return p.coeffs[i] if i < len(p.coeffs) else 0
