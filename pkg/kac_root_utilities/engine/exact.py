"""Exact combinatorial oracles for Type I coefficients.

Counts over {+-1, ..., +-N}^(n+1) are exact Python ints and probabilities are
``Fraction``s. The joint-sum dynamic program stores one packed big integer
per value of the first coordinate ``s``: field ``k`` of the row holds the
number of vectors with second coordinate ``t = k * step - offset``. Shifts
of a row move whole fields, and every field is wide enough for the largest
possible count, so additions never carry between fields.
"""

import itertools
import logging
import math
from collections import Counter
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import mpmath
import numpy as np

from ..core.exceptions import (
    DataError,
    InfeasibleError,
    ResourceGuardError,
    ValidationError,
)
from ..core.utils import ensure_directory, parallel_map, parse_rational
from ..models.reports import (
    CltRow,
    DoubleRootResult,
    ParityCertificate,
    SeparationResult,
    SeparationVariant,
)

logger = logging.getLogger(__name__)

DEFAULT_MAX_TABLE_BYTES = 2 * 1024**3
EXHAUSTIVE_HALF_LIMIT = 1 << 22
SMALLBALL_MAX_N_BERNOULLI = 50
SMALLBALL_MAX_N = 24
SMALLBALL_HALF_LIMIT = 1 << 26
SEPARATION_MAX_K = 22
SEPARATION_MAX_VALUES = 1 << 24
DEFAULT_C0 = Fraction(1, 50)

CACHE_MAGIC = b"KACJ"
CACHE_VERSION = 1

_CLT_ADVICE = "Use double_root_prob_clt for degrees beyond the exact table guard."

RationalLike = Union[Fraction, int, str]


class WeightFamily(str, Enum):
    """Weight vectors (w1_i, w2_i) paired with the coefficients."""

    U = "u"  # (1, i): P(1) and P'(1)
    V = "v"  # (1, (-1)^(i-1) i)
    MINUS_ONE = "minus_one"  # ((-1)^i, (-1)^(i-1) i): P(-1) and P'(-1)


_WEIGHT_CODES = {WeightFamily.U: 0, WeightFamily.V: 1, WeightFamily.MINUS_ONE: 2}


def weight_pairs(n: int, weights: Union[str, WeightFamily]) -> List[Tuple[int, int]]:
    family = WeightFamily(weights)
    pairs = []
    for i in range(n + 1):
        alternating = i if i % 2 else -i
        if family is WeightFamily.U:
            pairs.append((1, i))
        elif family is WeightFamily.V:
            pairs.append((1, alternating))
        else:
            pairs.append((1 if i % 2 == 0 else -1, alternating))
    return pairs


def atom_values(N: int) -> List[int]:
    return [v for v in range(-N, N + 1) if v]


def _check(n: int, N: int) -> None:
    if n < 0:
        raise ValidationError("degree must be nonnegative", "n")
    if N < 1:
        raise ValidationError("Type I parameter N must be positive", "N")


# ---------------------------------------------------------------------------
# Packed dynamic program
# ---------------------------------------------------------------------------


class _Layout:
    """Field width, lattice step and size estimate for a list of weight pairs."""

    def __init__(self, pairs: Sequence[Tuple[int, int]], N: int):
        self.pairs = list(pairs)
        self.N = N
        values = atom_values(N)
        step = 0
        for _, w2 in self.pairs:
            for v in values:
                step = math.gcd(step, w2 * v + N * abs(w2))
        self.step = step or 1
        self.offset = N * sum(abs(w2) for _, w2 in self.pairs)
        total_bits = ((2 * N) ** len(self.pairs)).bit_length()
        self.field_bits = 8 * ((total_bits + 8) // 8)
        self.fields = 2 * self.offset // self.step + 1
        s_span = 2 * N * len(self.pairs)
        self.rows = s_span // (2 if N == 1 else 1) + 1

    @property
    def estimated_bytes(self) -> int:
        return self.rows * self.fields * self.field_bits // 8

    def guard(self, operation: str, max_bytes: int) -> None:
        if self.estimated_bytes > max_bytes:
            raise ResourceGuardError(operation, self.estimated_bytes, max_bytes, _CLT_ADVICE)


def _propagate(layout: _Layout, target_only: bool) -> Tuple[Dict[int, int], int]:
    """Run the DP; returns packed rows keyed by s and the index of field 0.

    With ``target_only`` rows and fields that can no longer reach
    (s, t) = (0, 0) are dropped after every step.
    """
    N, B, g = layout.N, layout.field_bits, layout.step
    pairs = layout.pairs
    values = atom_values(N)
    remaining = [0] * len(pairs)
    acc = 0
    for i in range(len(pairs) - 1, -1, -1):
        remaining[i] = acc
        acc += abs(pairs[i][1])

    rows: Dict[int, int] = {0: 1}
    tbase = 0
    placed = 0
    for i, (w1, w2) in enumerate(pairs):
        moves: Dict[int, List[int]] = {}
        for v in values:
            moves.setdefault(w1 * v, []).append((w2 * v + N * abs(w2)) // g)
        s_room = N * (len(pairs) - 1 - i)
        new: Dict[int, int] = {}
        for s, row in rows.items():
            for ds, shifts in moves.items():
                s2 = s + ds
                if target_only and abs(s2) > s_room:
                    continue
                total = new.get(s2, 0)
                for sh in shifts:
                    total += row << (sh * B)
                new[s2] = total
        placed += N * abs(w2)

        if target_only:
            reach = N * remaining[i]
            lo = max(0, -(-(placed - reach) // g))
            hi = (placed + reach) // g
            if lo > tbase:
                drop = (lo - tbase) * B
                new = {s: row >> drop for s, row in new.items()}
                tbase = lo
            keep = (1 << ((hi - tbase + 1) * B)) - 1
            new = {s: row & keep for s, row in new.items()}
        rows = {s: row for s, row in new.items() if row}
        logger.debug("dp step %d/%d: %d rows", i + 1, len(pairs), len(rows))
    return rows, tbase


def _zero_count_pairs(
    pairs: Sequence[Tuple[int, int]], N: int, max_bytes: int, operation: str
) -> int:
    layout = _Layout(pairs, N)
    if layout.offset % layout.step:
        return 0
    layout.guard(operation, max_bytes)
    rows, tbase = _propagate(layout, target_only=True)
    index = layout.offset // layout.step - tbase
    if 0 not in rows or index < 0:
        return 0
    return (rows[0] >> (index * layout.field_bits)) & ((1 << layout.field_bits) - 1)


def zero_count(
    n: int,
    N: int,
    weights: Union[str, WeightFamily] = WeightFamily.U,
    max_bytes: int = DEFAULT_MAX_TABLE_BYTES,
) -> int:
    """Number of coefficient vectors with both weighted sums equal to zero."""
    _check(n, N)
    return _zero_count_pairs(weight_pairs(n, weights), N, max_bytes, "zero_count")


# ---------------------------------------------------------------------------
# Joint sum tables
# ---------------------------------------------------------------------------


class JointSumTable:
    """Exact counts of (sum w1_i xi_i, sum w2_i xi_i) over all coefficient vectors."""

    def __init__(
        self,
        n: int,
        N: int,
        weights: Union[str, WeightFamily],
        rows: Dict[int, int],
        field_bits: int,
        step: int,
        offset: int,
        fields: int,
    ):
        self.n = n
        self.N = N
        self.weights = WeightFamily(weights)
        self.rows = rows
        self.field_bits = field_bits
        self.step = step
        self.offset = offset
        self.fields = fields
        self._mask = (1 << field_bits) - 1

    def count(self, s: int, t: int) -> int:
        row = self.rows.get(s)
        shifted = t + self.offset
        if row is None or shifted < 0 or shifted % self.step:
            return 0
        index = shifted // self.step
        if index >= self.fields:
            return 0
        return (row >> (index * self.field_bits)) & self._mask

    def row_fields(self, s: int) -> List[int]:
        width = self.field_bits // 8
        raw = self.rows.get(s, 0).to_bytes(self.fields * width, "little")
        return [
            int.from_bytes(raw[k * width : (k + 1) * width], "little")
            for k in range(self.fields)
        ]

    def cells(self) -> Iterator[Tuple[int, int, int]]:
        """Nonzero cells as (s, t, count), ordered by s then t."""
        for s in sorted(self.rows):
            for k, c in enumerate(self.row_fields(s)):
                if c:
                    yield s, k * self.step - self.offset, c

    @property
    def counts(self) -> Dict[Tuple[int, int], int]:
        return {(s, t): c for s, t, c in self.cells()}

    @property
    def total(self) -> int:
        # each row's field sum stays below 2^B - 1, so the residue is the sum
        modulus = (1 << self.field_bits) - 1
        return sum(row % modulus for row in self.rows.values())

    def max_cell(self) -> Tuple[int, int, int]:
        best = (0, 0, 0)
        for s, t, c in self.cells():
            if c > best[2]:
                best = (s, t, c)
        return best

    def __repr__(self) -> str:
        return (
            f"JointSumTable(n={self.n}, N={self.N}, weights={self.weights.value}, "
            f"rows={len(self.rows)}, fields={self.fields})"
        )


def _write_varint(buf: bytearray, value: int) -> None:
    while True:
        byte = value & 0x7F
        value >>= 7
        if value:
            buf.append(byte | 0x80)
        else:
            buf.append(byte)
            return


def _read_varint(data: bytes, pos: int) -> Tuple[int, int]:
    value = 0
    shift = 0
    while True:
        if pos >= len(data):
            raise DataError("truncated table cache", "table")
        byte = data[pos]
        pos += 1
        value |= (byte & 0x7F) << shift
        if not byte & 0x80:
            return value, pos
        shift += 7


def _zigzag(v: int) -> int:
    return 2 * v if v >= 0 else -2 * v - 1


def _unzigzag(z: int) -> int:
    return z // 2 if z % 2 == 0 else -(z + 1) // 2


def dump_table(table: JointSumTable) -> bytes:
    """Serialize: magic, varint header, then every row's fields as varints."""
    keys = sorted(table.rows) or [0]
    s_min, s_max = keys[0], keys[-1]
    s_step = 0
    for s in keys:
        s_step = math.gcd(s_step, s - s_min)
    s_step = s_step or 1

    buf = bytearray(CACHE_MAGIC)
    header = [
        CACHE_VERSION,
        table.n,
        table.N,
        _WEIGHT_CODES[table.weights],
        table.step,
        table.field_bits,
        table.offset,
        table.fields,
        _zigzag(s_min),
        _zigzag(s_max),
        s_step,
    ]
    for value in header:
        _write_varint(buf, value)
    for s in range(s_min, s_max + 1, s_step):
        for c in table.row_fields(s):
            _write_varint(buf, c)
    return bytes(buf)


def load_table(data: bytes) -> JointSumTable:
    if data[: len(CACHE_MAGIC)] != CACHE_MAGIC:
        raise DataError("not a joint table cache (bad magic)", "table")
    pos = len(CACHE_MAGIC)
    header = []
    for _ in range(11):
        value, pos = _read_varint(data, pos)
        header.append(value)
    version, n, N, code, step, field_bits, offset, fields, zs_min, zs_max, s_step = header
    if version != CACHE_VERSION:
        raise DataError(f"unsupported table cache version {version}", "table")
    families = {v: k for k, v in _WEIGHT_CODES.items()}
    if code not in families or field_bits % 8 or s_step < 1:
        raise DataError("corrupt table cache header", "table")
    width = field_bits // 8
    rows = {}
    for s in range(_unzigzag(zs_min), _unzigzag(zs_max) + 1, s_step):
        chunk = bytearray()
        for _ in range(fields):
            c, pos = _read_varint(data, pos)
            chunk += c.to_bytes(width, "little")
        row = int.from_bytes(bytes(chunk), "little")
        if row:
            rows[s] = row
    if pos != len(data):
        raise DataError("trailing bytes in table cache", "table")
    return JointSumTable(n, N, families[code], rows, field_bits, step, offset, fields)


class TableCache:
    """Directory of serialized joint tables keyed by (n, N, weights)."""

    def __init__(self, data_dir: Union[str, Path]):
        self.data_dir = Path(data_dir)

    def path(self, n: int, N: int, weights: Union[str, WeightFamily]) -> Path:
        tag = WeightFamily(weights).value
        return self.data_dir / f"joint_n{n}_N{N}_{tag}.kjt"

    def load(
        self, n: int, N: int, weights: Union[str, WeightFamily]
    ) -> Optional[JointSumTable]:
        path = self.path(n, N, weights)
        if not path.exists():
            return None
        table = load_table(path.read_bytes())
        if (table.n, table.N, table.weights) != (n, N, WeightFamily(weights)):
            raise DataError(f"table cache {path.name} holds a different table", "table")
        logger.debug("Loaded joint table from %s", path)
        return table

    def store(self, table: JointSumTable) -> Path:
        ensure_directory(self.data_dir)
        path = self.path(table.n, table.N, table.weights)
        path.write_bytes(dump_table(table))
        logger.debug("Stored joint table in %s", path)
        return path


def build_joint_table(
    n: int,
    N: int = 1,
    weights: Union[str, WeightFamily] = WeightFamily.U,
    cache: Optional[TableCache] = None,
    max_bytes: int = DEFAULT_MAX_TABLE_BYTES,
) -> JointSumTable:
    """Exact joint table by dynamic programming over the coefficients."""
    _check(n, N)
    if cache is not None:
        cached = cache.load(n, N, weights)
        if cached is not None:
            return cached
    layout = _Layout(weight_pairs(n, weights), N)
    layout.guard("build_joint_table", max_bytes)
    rows, _ = _propagate(layout, target_only=False)
    table = JointSumTable(
        n, N, weights, rows, layout.field_bits, layout.step, layout.offset, layout.fields
    )
    if cache is not None:
        cache.store(table)
    return table


def exhaustive_joint_counts(
    n: int, N: int = 1, weights: Union[str, WeightFamily] = WeightFamily.U
) -> Counter:
    """Joint counts by enumerating both halves of the coefficients and convolving."""
    _check(n, N)
    pairs = weight_pairs(n, weights)
    values = atom_values(N)
    half = (n + 1) // 2
    if (2 * N) ** (n + 1 - half) > EXHAUSTIVE_HALF_LIMIT:
        raise ResourceGuardError(
            "exhaustive_joint_counts", (2 * N) ** (n + 1 - half), EXHAUSTIVE_HALF_LIMIT
        )

    def enumerate_half(part: Sequence[Tuple[int, int]]) -> Counter:
        counter: Counter = Counter()
        for combo in itertools.product(values, repeat=len(part)):
            s = sum(w1 * v for (w1, _), v in zip(part, combo))
            t = sum(w2 * v for (_, w2), v in zip(part, combo))
            counter[(s, t)] += 1
        return counter

    left = enumerate_half(pairs[:half])
    right = enumerate_half(pairs[half:])
    joint: Counter = Counter()
    for (s1, t1), c1 in left.items():
        for (s2, t2), c2 in right.items():
            joint[(s1 + s2, t1 + t2)] += c1 * c2
    return joint


# ---------------------------------------------------------------------------
# Double roots at +-1
# ---------------------------------------------------------------------------


def parity_certificate(
    n: int, N: int = 1, max_bytes: int = DEFAULT_MAX_TABLE_BYTES
) -> ParityCertificate:
    """Why a double root at +-1 is impossible, or Feasible.

    For N = 1, P(+-1) is odd when n is even, and when n = 4k+1 the
    conditions sum xi_i = 0 and sum i xi_i = 0 have opposite parity needs.
    For N >= 2 the answer comes from the exact zero counts.
    """
    _check(n, N)
    if N == 1:
        if n % 2 == 0:
            return ParityCertificate.EVEN_PARITY
        if n % 4 == 1:
            return ParityCertificate.FOUR_K_PLUS_ONE
        return ParityCertificate.FEASIBLE
    for family in (WeightFamily.U, WeightFamily.MINUS_ONE):
        if zero_count(n, N, family, max_bytes):
            return ParityCertificate.FEASIBLE
    return ParityCertificate.EXHAUSTIVE


def double_root_prob_exact(
    n: int, N: int = 1, max_bytes: int = DEFAULT_MAX_TABLE_BYTES
) -> DoubleRootResult:
    """Exact P(double root at 1), at -1 and at either.

    A double root at both points needs the four sums over even and odd
    indices to vanish separately, so the joint count factors into two
    independent (0, 0) counts.
    """
    _check(n, N)
    total = (2 * N) ** (n + 1)
    c1 = zero_count(n, N, WeightFamily.U, max_bytes)
    cm1 = zero_count(n, N, WeightFamily.MINUS_ONE, max_bytes)
    even = [(1, i) for i in range(0, n + 1, 2)]
    odd = [(1, i) for i in range(1, n + 1, 2)]
    both = 0
    if c1 and cm1:
        both = _zero_count_pairs(even, N, max_bytes, "double_root_prob_exact")
        if both:
            both *= _zero_count_pairs(odd, N, max_bytes, "double_root_prob_exact")
    p1 = Fraction(c1, total)
    pm1 = Fraction(cm1, total)
    result = DoubleRootResult(
        n=n,
        N=N,
        p1=p1,
        pm1=pm1,
        p_union=p1 + pm1 - Fraction(both, total),
        certificate=parity_certificate(n, N, max_bytes),
    )
    logger.info("double roots n=%d N=%d: p1=%s pm1=%s", n, N, p1, pm1)
    return result


def type_one_variance(N: int) -> Fraction:
    return Fraction((N + 1) * (2 * N + 1), 6)


def clt_covariance(n: int) -> Tuple[int, int, int, int]:
    """(Var sum, Cov, Var weighted sum, determinant) for unit-variance coefficients."""
    a = n + 1
    b = n * (n + 1) // 2
    c = n * (n + 1) * (2 * n + 1) // 6
    return a, b, c, a * c - b * b


def double_root_prob_clt(n: int, N: int = 1) -> float:
    """Local-limit approximation h / (2 pi sigma^2 sqrt(D)) of p1."""
    _check(n, N)
    if n < 3:
        raise ValidationError("the local-limit approximation needs n >= 3", "n")
    if N == 1:
        certificate = parity_certificate(n, 1)
        if certificate.is_obstruction:
            raise InfeasibleError(
                f"no double root at +-1 is possible for n={n}, N=1",
                certificate.value,
            )
    covolume = 4 if N == 1 else 1
    determinant = clt_covariance(n)[3]
    return covolume / (2 * math.pi * float(type_one_variance(N)) * math.sqrt(determinant))


def clt_calibration(
    ns: Sequence[int],
    N: int = 1,
    max_bytes: int = DEFAULT_MAX_TABLE_BYTES,
    workers: int = 1,
) -> List[CltRow]:
    """Exact p1 against the local-limit approximation for every n."""

    def row(n: int) -> CltRow:
        approx = double_root_prob_clt(n, N)
        exact = Fraction(zero_count(n, N, WeightFamily.U, max_bytes), (2 * N) ** (n + 1))
        return CltRow(n=n, N=N, exact=exact, approx=approx, ratio=float(exact) / approx)

    return parallel_map(row, list(ns), max_workers=workers)


def anticonc_sup(
    n: int,
    N: int = 1,
    weights: Union[str, WeightFamily] = WeightFamily.U,
    cache: Optional[TableCache] = None,
    max_bytes: int = DEFAULT_MAX_TABLE_BYTES,
) -> Fraction:
    """Largest point mass of the weighted sum pair."""
    table = build_joint_table(n, N, weights, cache, max_bytes)
    return Fraction(table.max_cell()[2], (2 * N) ** (n + 1))


# ---------------------------------------------------------------------------
# Small-ball probabilities
# ---------------------------------------------------------------------------


def _half_sums(coeffs: Sequence[int], values: Sequence[int], dtype: object) -> np.ndarray:
    sums = np.zeros(1, dtype=dtype)
    support = np.asarray(values, dtype=dtype)
    for c in coeffs:
        sums = (sums[:, None] + support[None, :] * c).ravel()
    return sums


def _exact_half_sum(index: int, coeffs: Sequence[int], values: Sequence[int]) -> int:
    # inverse of the digit order produced by _half_sums
    total = 0
    for c in reversed(coeffs):
        index, digit = divmod(index, len(values))
        total += values[digit] * c
    return total


def _count_window_wide(
    coeffs: Sequence[int],
    half: int,
    values: Sequence[int],
    window: int,
    scale: int,
    chunk: int = 1 << 20,
) -> int:
    """Count pairs with |a + b| <= window when the integer sums exceed int64.

    Half-sums are compared in float64 after dividing by ``scale``. Pairs
    whose float sum lies within the rounding bound of the window edge are
    settled with exact integers.
    """
    floats = [float(Fraction(c, scale)) for c in coeffs]
    left = _half_sums(floats[:half], values, np.float64)
    right_raw = _half_sums(floats[half:], values, np.float64)
    order = np.argsort(right_raw, kind="stable")
    right = right_raw[order]
    del right_raw

    w = float(Fraction(window, scale))
    magnitude = max(abs(v) for v in values) * sum(abs(f) for f in floats) + w + 1.0
    eps = 4 * (len(coeffs) + 4) * np.finfo(np.float64).eps * magnitude

    hits = 0
    for start in range(0, len(left), chunk):
        a = left[start : start + chunk]
        lo_sure = np.searchsorted(right, -w - a + eps, side="left")
        hi_sure = np.searchsorted(right, w - a - eps, side="right")
        lo_maybe = np.searchsorted(right, -w - a - eps, side="left")
        hi_maybe = np.searchsorted(right, w - a + eps, side="right")
        sure = np.maximum(hi_sure - lo_sure, 0)
        hits += int(sure.sum())

        for i in np.nonzero(hi_maybe - lo_maybe > sure)[0]:
            if hi_sure[i] > lo_sure[i]:
                bands = [(lo_maybe[i], lo_sure[i]), (hi_sure[i], hi_maybe[i])]
            else:
                bands = [(lo_maybe[i], hi_maybe[i])]
            exact_a = _exact_half_sum(start + int(i), coeffs[:half], values)
            for lo, hi in bands:
                for j in range(int(lo), int(hi)):
                    exact_b = _exact_half_sum(int(order[j]), coeffs[half:], values)
                    hits += abs(exact_a + exact_b) <= window
    return hits


def smallball_prob(
    n: int, N: int, x: RationalLike, delta: RationalLike
) -> Fraction:
    """Exact P(|sum xi_i x^i| <= delta) by meet-in-the-middle counting.

    With x = p/q every value scaled by q^n is an integer, so the window
    |S| <= delta q^n becomes |S| <= K for an integer K.
    """
    _check(n, N)
    x = parse_rational(x)
    delta = parse_rational(delta)
    if delta < 0:
        raise ValidationError("delta must be nonnegative", "delta")
    limit = SMALLBALL_MAX_N_BERNOULLI if N == 1 else SMALLBALL_MAX_N
    if n > limit:
        raise ResourceGuardError("smallball_prob", n, limit)

    p, q = x.numerator, x.denominator
    coeffs = [p**i * q ** (n - i) for i in range(n + 1)]
    window = delta.numerator * q**n // delta.denominator
    reach = N * sum(abs(c) for c in coeffs)
    total = (2 * N) ** (n + 1)
    if window >= reach:
        return Fraction(1)

    half = (n + 1) // 2
    entries = (2 * N) ** (n + 1 - half)
    if entries > SMALLBALL_HALF_LIMIT:
        raise ResourceGuardError("smallball_prob", entries, SMALLBALL_HALF_LIMIT)

    values = atom_values(N)
    if reach >= 1 << 62:
        hits = _count_window_wide(coeffs, half, values, window, q**n)
    else:
        left = _half_sums(coeffs[:half], values, np.int64)
        right = np.sort(_half_sums(coeffs[half:], values, np.int64))
        upper = np.searchsorted(right, window - left, side="right")
        lower = np.searchsorted(right, -window - left, side="left")
        hits = int((upper - lower).sum())
    return Fraction(hits, total)


# ---------------------------------------------------------------------------
# Lacunary separation
# ---------------------------------------------------------------------------


def _ell_threshold(N: int) -> Fraction:
    return Fraction(1, 2) if N == 1 else Fraction(1, 2 * N + 1)


def lacunary_ell(x: RationalLike, N: int = 1) -> int:
    """Smallest ell with x^ell below 1/2 (N = 1) or 1/(2N+1)."""
    x = parse_rational(x)
    if not 0 < x < 1:
        raise ValidationError("x must lie in (0, 1)", "x")
    threshold = _ell_threshold(N)
    ell, power = 1, x
    while power >= threshold:
        ell += 1
        power *= x
    return ell


def choose_lacunary_params(
    x: RationalLike, N: int, A: Union[RationalLike, float], n: int
) -> Tuple[int, int]:
    """(ell, k) with x^ell < theta <= x^(ell-1) and the largest k with x^(ell k) >= n^(-2A)."""
    x = parse_rational(x)
    if N < 1:
        raise ValidationError("Type I parameter N must be positive", "N")
    if not Fraction(1, N + 1) < x < 1:
        raise ValidationError(f"x must lie in (1/{N + 1}, 1)", "x")
    A = Fraction(A) if not isinstance(A, str) else parse_rational(A)
    if A <= 0 or n < 1:
        raise ValidationError("A and n must be positive", "A")

    ell = lacunary_ell(x, N)
    y = x**ell
    two_a = 2 * A
    if two_a.denominator == 1:
        target = Fraction(1, n ** two_a.numerator)
        k, power = 0, y
        while power >= target:
            k += 1
            power *= y
        return ell, k

    with mpmath.workdps(60):
        ratio = mpmath.mpf(two_a.numerator) / two_a.denominator * mpmath.log(n)
        ratio /= -mpmath.log(mpmath.mpf(y.numerator) / y.denominator)
        k = int(mpmath.floor(ratio))
    return ell, max(k, 0)


def _terms_claim(
    variant: SeparationVariant, ell: int, k: int
) -> List[int]:
    if variant is SeparationVariant.CLAIM2:
        return [2 * j for j in range(k + 1)] + [8 * j + 1 for j in range(k // 8 + 1)]
    return [j * ell for j in range(1, k + 1)]


def separation_check(
    variant: Union[str, SeparationVariant],
    x: RationalLike,
    N: int = 1,
    k: int = 1,
    ell: Optional[int] = None,
    c0: RationalLike = DEFAULT_C0,
) -> SeparationResult:
    """Exhaustively check that the lacunary value set is separated.

    Out-of-range parameters give a failed result with a reason; only the
    enumeration size guards raise.
    """
    variant = SeparationVariant(variant)
    x = parse_rational(x)
    c0 = parse_rational(c0)
    if k < 1:
        raise ValidationError("k must be at least 1", "k")

    def fail(reason: str, ell_value: int = 0) -> SeparationResult:
        return SeparationResult(
            variant=variant, x=x, ell=ell_value, k=k, N=N, passed=False, reason=reason
        )

    if variant is SeparationVariant.CLAIM2:
        if N != 1:
            return fail("the claim2 value set is defined for N = 1")
        if not Fraction(1, 2) < x < Fraction(1, 2) + c0:
            return fail(f"x must lie in (1/2, 1/2 + {c0})", 2)
        ell = 2
        signs = [-1, 1]
    else:
        if variant is SeparationVariant.CLAIM1 and N != 1:
            return fail("claim1 is stated for N = 1")
        if not 0 < x < 1:
            return fail("x must lie in (0, 1)")
        if ell is None:
            ell = lacunary_ell(x, N)
        if x**ell >= _ell_threshold(N):
            return fail(f"x^{ell} is not below {_ell_threshold(N)}", ell)
        signs = atom_values(N) if variant is SeparationVariant.UNIFORM else [-1, 1]

    exponents = _terms_claim(variant, ell, k)
    if variant is not SeparationVariant.UNIFORM and k > SEPARATION_MAX_K:
        raise ResourceGuardError("separation_check", k, SEPARATION_MAX_K)
    count = len(signs) ** len(exponents)
    if count > SEPARATION_MAX_VALUES:
        raise ResourceGuardError("separation_check", count, SEPARATION_MAX_VALUES)

    if variant is SeparationVariant.CLAIM1:
        bound = 2 * x ** (k * ell)
    elif variant is SeparationVariant.CLAIM2:
        bound = x ** (2 * k) / 8
    else:
        bound = x ** (k * ell)

    p, q = x.numerator, x.denominator
    top = max(exponents)
    coeffs = [p**e * q ** (top - e) for e in exponents]
    wide = N * sum(coeffs) >= 1 << 62
    sums = _half_sums(coeffs, signs, object if wide else np.int64)
    ordered = np.sort(sums)
    gaps = np.diff(ordered)
    smallest = min(int(g) for g in gaps) if len(gaps) else 0
    min_gap = Fraction(smallest, q**top)
    passed = min_gap >= bound
    logger.info(
        "separation %s x=%s k=%d: min gap %.6g vs bound %.6g",
        variant.value,
        x,
        k,
        float(min_gap),
        float(bound),
    )
    return SeparationResult(
        variant=variant,
        x=x,
        ell=ell,
        k=k,
        N=N,
        value_count=len(sums),
        min_gap=min_gap,
        bound=bound,
        passed=passed,
        reason=None if passed else "minimum gap below the claimed radius",
    )
