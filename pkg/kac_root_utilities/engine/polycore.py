"""Polynomial representation, evaluation, transforms and coefficient sampling."""

import logging
from enum import Enum
from fractions import Fraction
from math import gcd, lcm
from numbers import Integral
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..core.exceptions import ValidationError
from ..core.utils import parse_rational
from ..models.atoms import UNIFORM_HALF_WIDTH, Atom, AtomKind, RngSpec

logger = logging.getLogger(__name__)

Number = Union[int, float, Fraction]

# Dekker splitter for binary64
_SPLITTER = 134217729.0  # 2**27 + 1


class EvalMode(str, Enum):
    STANDARD = "standard"
    COMPENSATED = "compensated"
    EXACT = "exact-rational"


class TransformKind(str, Enum):
    DERIVATIVE = "derivative"
    RECIPROCAL = "reciprocal"
    NEGATE_ARG = "negate_arg"


class Poly:
    """Polynomial with coefficients a_0..a_n in ascending power order.

    The exact variant stores Python ints; the float variant stores binary64
    values. The nominal degree is ``len(coeffs) - 1`` even when the leading
    coefficient is zero; use :meth:`trim` to drop trailing zeros.
    """

    __slots__ = ("coeffs", "exact")

    def __init__(self, coeffs: Iterable[Number], exact: Optional[bool] = None):
        values = tuple(coeffs)
        if not values:
            values = (0,)
        if exact is None:
            exact = all(
                isinstance(c, Integral) and not isinstance(c, bool) for c in values
            )
        if exact:
            if not all(isinstance(c, Integral) for c in values):
                raise ValidationError("exact polynomials need integer coefficients")
            self.coeffs: Tuple = tuple(int(c) for c in values)
        else:
            self.coeffs = tuple(float(c) for c in values)
        self.exact: bool = bool(exact)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def trim(self) -> "Poly":
        """Drop trailing zero coefficients (keeps at least the constant)."""
        coeffs = list(self.coeffs)
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        return Poly(coeffs, exact=self.exact)

    def truncate(self, m: int) -> "Poly":
        """The degree-m truncation sum_{i<=m} a_i x^i."""
        if m < 0:
            raise ValidationError("truncation degree must be nonnegative", "m")
        return Poly(self.coeffs[: m + 1], exact=self.exact)

    def as_float(self) -> "Poly":
        return self if not self.exact else Poly(self.coeffs, exact=False)

    def array(self) -> np.ndarray:
        return np.asarray(self.coeffs, dtype=np.float64)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        return self.exact == other.exact and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.exact, self.coeffs))

    def __repr__(self) -> str:
        kind = "exact" if self.exact else "float"
        head = ", ".join(str(c) for c in self.coeffs[:6])
        tail = ", ..." if len(self.coeffs) > 6 else ""
        return f"Poly({kind}, n={self.degree}, [{head}{tail}])"


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------


def sample_coefficients(atom: Atom, count: int, rng: RngSpec) -> List[Number]:
    """Draw ``count`` iid coefficients from the atom's stream."""
    gen = rng.generator()
    if atom.kind is AtomKind.TYPE_I:
        support = np.asarray(atom.support(), dtype=np.int64)
        return support[gen.integers(0, len(support), size=count)].tolist()
    if atom.kind is AtomKind.CUSTOM:
        denominator = lcm(*(p.denominator for p in atom.probabilities))
        cumulative = np.cumsum(
            [p.numerator * (denominator // p.denominator) for p in atom.probabilities]
        )
        draws = gen.integers(0, denominator, size=count)
        index = np.searchsorted(cumulative, draws, side="right")
        return np.asarray(atom.values, dtype=np.int64)[index].tolist()
    if atom.kind is AtomKind.GAUSSIAN:
        return gen.standard_normal(count).tolist()
    return gen.uniform(-UNIFORM_HALF_WIDTH, UNIFORM_HALF_WIDTH, size=count).tolist()


def sample_poly(atom: Atom, n: int, rng: RngSpec) -> Poly:
    """Sample a degree-n Kac polynomial; exact variant for discrete atoms."""
    if n < 0:
        raise ValidationError("degree must be nonnegative", "n")
    return Poly(sample_coefficients(atom, n + 1, rng), exact=atom.is_discrete)


def atom_moments(atom: Atom) -> Tuple[Fraction, Fraction]:
    """Exact (mean, variance) of the atom."""
    if atom.kind is AtomKind.TYPE_I:
        support = atom.support()
        weight = Fraction(1, len(support))
        mean = sum(Fraction(v) for v in support) * weight
        second = sum(Fraction(v * v) for v in support) * weight
        return mean, second - mean * mean
    if atom.kind is AtomKind.CUSTOM:
        mean = sum(v * p for v, p in zip(atom.values, atom.probabilities))
        second = sum(v * v * p for v, p in zip(atom.values, atom.probabilities))
        return Fraction(mean), Fraction(second) - mean * mean
    return Fraction(0), Fraction(1)


def parse_atom(text: str) -> Atom:
    """Parse ``bernoulli | typeI:N | gaussian | uniform | custom:v:p,v:p,...``."""
    spec = text.strip()
    lowered = spec.lower()
    if lowered in ("bernoulli", "rademacher"):
        return Atom.type_one(1)
    if lowered in ("gaussian", "normal"):
        return Atom.gaussian()
    if lowered == "uniform":
        return Atom.uniform()
    if lowered.startswith("typei:"):
        try:
            N = int(spec.split(":", 1)[1])
        except ValueError:
            raise ValidationError(f"bad Type I parameter in '{text}'", "atom")
        if N < 1:
            raise ValidationError("Type I parameter N must be positive", "atom")
        return Atom.type_one(N)
    if lowered.startswith("custom:"):
        table = {}
        for item in spec.split(":", 1)[1].split(","):
            try:
                value, prob = item.split(":")
                table[int(value)] = parse_rational(prob)
            except ValueError:
                raise ValidationError(f"bad custom atom entry '{item}'", "atom")
        try:
            return Atom.custom(table, label=spec)
        except ValueError as e:
            raise ValidationError(str(e), "atom")
    raise ValidationError(
        f"unknown atom '{text}' (bernoulli, typeI:N, gaussian, uniform, custom:...)",
        "atom",
    )


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def _two_sum(a: float, b: float) -> Tuple[float, float]:
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _split(a: float) -> Tuple[float, float]:
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a: float, b: float) -> Tuple[float, float]:
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def horner(coeffs: Sequence[float], x: float) -> float:
    acc = 0.0
    for a in reversed(coeffs):
        acc = acc * x + a
    return acc


def compensated_horner(coeffs: Sequence[float], x: float) -> float:
    """Horner's rule with error-free transformations on every step."""
    s = float(coeffs[-1])
    c = 0.0
    for a in reversed(coeffs[:-1]):
        p, pi = _two_prod(s, x)
        s, sigma = _two_sum(p, float(a))
        c = c * x + (pi + sigma)
    return s + c


def exact_value(coeffs: Sequence[int], x: Fraction) -> Fraction:
    """Error-free value of an integer polynomial at a rational point."""
    num, den = x.numerator, x.denominator
    acc = coeffs[-1]
    scale = 1
    for a in reversed(coeffs[:-1]):
        scale *= den
        acc = acc * num + a * scale
    return Fraction(acc, den ** (len(coeffs) - 1))


def exact_sign(coeffs: Sequence[int], x: Fraction) -> int:
    """Sign of an integer polynomial at a rational point, without division."""
    num, den = x.numerator, x.denominator
    acc = coeffs[-1]
    scale = 1
    for a in reversed(coeffs[:-1]):
        scale *= den
        acc = acc * num + a * scale
    return (acc > 0) - (acc < 0)


def dyadic_integers(coeffs: Sequence[float]) -> Tuple[List[int], int]:
    """Write float coefficients exactly as ``ints / 2**shift``."""
    ratios = [float(c).as_integer_ratio() for c in coeffs]
    shift = max(d.bit_length() - 1 for _, d in ratios)
    return [n << (shift - (d.bit_length() - 1)) for n, d in ratios], shift


def evaluate(p: Poly, x: Number, mode: Union[str, EvalMode] = "standard") -> Number:
    """Evaluate ``p`` at ``x`` with Horner, compensated Horner or exactly."""
    mode = EvalMode(mode)
    if mode is EvalMode.EXACT:
        if not p.exact:
            raise ValidationError(
                "exact-rational evaluation needs integer coefficients", "mode"
            )
        try:
            point = Fraction(x)
        except (TypeError, ValueError):
            raise ValidationError(f"{x!r} is not a rational point", "x")
        return exact_value(p.coeffs, point)
    coeffs = [float(c) for c in p.coeffs]
    point_f = float(x)
    if mode is EvalMode.COMPENSATED:
        return compensated_horner(coeffs, point_f)
    return horner(coeffs, point_f)


# ---------------------------------------------------------------------------
# Transforms
# ---------------------------------------------------------------------------


def derivative(p: Poly) -> Poly:
    if p.degree == 0:
        return Poly((0,), exact=p.exact)
    return Poly((i * a for i, a in enumerate(p.coeffs) if i), exact=p.exact)


def transform(p: Poly, kind: Union[str, TransformKind]) -> Poly:
    """Derivative, reciprocal x^n P(1/x) or argument negation P(-x)."""
    kind = TransformKind(kind)
    if kind is TransformKind.DERIVATIVE:
        return derivative(p)
    if kind is TransformKind.RECIPROCAL:
        return Poly(reversed(p.coeffs), exact=p.exact)
    return Poly(
        (-a if i % 2 else a for i, a in enumerate(p.coeffs)), exact=p.exact
    )


def content(coeffs: Sequence[int]) -> int:
    g = 0
    for a in coeffs:
        g = gcd(g, a)
    return g
