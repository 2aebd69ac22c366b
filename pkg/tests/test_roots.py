"""Tests for certified root counting, isolation and near-double scans."""

import itertools
from fractions import Fraction

import pytest

from kac_root_utilities.core.exceptions import CertificationError, ValidationError
from kac_root_utilities.engine.polycore import Poly, evaluate, sample_poly, transform
from kac_root_utilities.engine.roots import (
    RootMethod,
    bulk_interval,
    count_real_roots,
    edge_interval,
    isolate_and_refine,
    min_gap,
    near_double_scan,
    root_match,
    squarefree_part,
    sturm_sequence,
)
from kac_root_utilities.models.atoms import Atom, RngSpec
from kac_root_utilities.models.reports import MatchStatus


def _taylor_shift(a, c):
    a = list(a)
    n = len(a) - 1
    for i in range(n):
        for j in range(n - 1, i - 1, -1):
            a[j] += c * a[j + 1]
    return a


def _divmod_poly(a, b):
    a = list(a)
    quotient = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    for k in range(len(a) - len(b), -1, -1):
        c = a[k + len(b) - 1] / b[-1]
        quotient[k] = c
        for j, bj in enumerate(b):
            a[k + j] -= c * bj
    rest = a[: len(b) - 1]
    while rest and rest[-1] == 0:
        rest.pop()
    return quotient, rest


def _squarefree(coeffs):
    p = [Fraction(c) for c in coeffs]
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    a, b = p, [i * c for i, c in enumerate(p) if i]
    while b:
        a, b = b, _divmod_poly(a, b)[1]
    return _divmod_poly(p, a)[0]


def _sign_variations(p, lo, hi):
    # positive roots of (1 + t)^n p((lo + hi t) / (1 + t)) are the roots in (lo, hi)
    shifted = _taylor_shift(p, lo)
    scaled = [c * (hi - lo) ** i for i, c in enumerate(shifted)]
    flipped = _taylor_shift(scaled[::-1], 1)
    signs = [c > 0 for c in flipped if c]
    return sum(1 for u, v in zip(signs, signs[1:]) if u != v)


def _distinct_roots(coeffs, bound=2):
    """Exact count of distinct real roots in (-bound, bound) by sign-rule bisection."""
    p = _squarefree(coeffs)
    if len(p) == 1:
        return 0

    def count(lo, hi):
        v = _sign_variations(p, lo, hi)
        if v <= 1:
            return v
        mid = (lo + hi) / 2
        at_mid = sum(c * mid**i for i, c in enumerate(p)) == 0
        return count(lo, mid) + count(mid, hi) + at_mid

    return count(Fraction(-bound), Fraction(bound))


def _sign_vectors(max_degree):
    # p and -p share their roots, so the leading sign is fixed
    for n in range(1, max_degree + 1):
        for signs in itertools.product((-1, 1), repeat=n):
            yield Poly(signs + (1,))

# ---------------------------------------------------------------------------
# count_real_roots
# ---------------------------------------------------------------------------


class TestCountRealRoots:
    @pytest.mark.parametrize(
        "coeffs,expected",
        [
            ([-1, 0, 1], 2),
            ([1, 0, 1], 0),
            ([1, -1, -1, 1], 2),
            ([1, 1, 1, 1], 1),
            ([5], 0),
        ],
    )
    def test_exact_examples(self, coeffs, expected):
        assert count_real_roots(Poly(coeffs)) == expected

    @pytest.mark.parametrize(
        "coeffs,expected",
        [([-1.0, 0.0, 1.0], 2), ([1.0, 0.0, 1.0], 0), ([-0.5, 1.0], 1)],
    )
    def test_certified_examples(self, coeffs, expected):
        assert count_real_roots(Poly(coeffs), method="certified") == expected

    def test_interval_is_open(self):
        p = Poly([-1, 0, 1])
        assert count_real_roots(p, (0, None)) == 1
        assert count_real_roots(p, (-1, 1)) == 0
        assert count_real_roots(p, ("-inf", "inf")) == 2
        assert count_real_roots(p, (Fraction(-3, 2), Fraction(3, 2))) == 2

    def test_zero_polynomial_rejected(self):
        with pytest.raises(ValidationError):
            count_real_roots(Poly([0, 0]))

    def test_empty_interval_rejected(self):
        with pytest.raises(ValidationError):
            count_real_roots(Poly([-1, 0, 1]), (1, 1))

    def test_sturm_needs_integers(self):
        with pytest.raises(ValidationError):
            count_real_roots(Poly([1.5, 1.0]), method=RootMethod.STURM)

    @pytest.mark.parametrize("coeffs", [[1, -1, -1, 1], [-1, 0, 1], [2, -3, 1], [1, 1, 1, 1]])
    def test_oracle_examples(self, coeffs):
        assert _distinct_roots(coeffs, bound=4) == count_real_roots(Poly(coeffs))

    def test_sturm_matches_exact_oracle_on_sign_vectors(self):
        for p in _sign_vectors(8):
            assert count_real_roots(p, method="sturm") == _distinct_roots(p.coeffs), p

    @pytest.mark.slow
    def test_sturm_matches_exact_oracle_to_degree_twelve(self):
        for p in _sign_vectors(12):
            assert count_real_roots(p, method="sturm") == _distinct_roots(p.coeffs), p

    def test_certified_agrees_when_it_certifies(self):
        certified = 0
        for p in _sign_vectors(8):
            try:
                scanned = count_real_roots(p.as_float(), method="certified")
            except CertificationError:
                continue
            certified += 1
            assert scanned == count_real_roots(p, method="sturm"), p
        assert certified > 0

    def test_random_type_one_degree_thirty(self, bernoulli):
        grid = [Fraction(k, 512) for k in range(-1023, 1024)]
        for trial in range(4):
            p = sample_poly(bernoulli, 30, RngSpec(seed=30, trial=trial))
            count = count_real_roots(p)
            assert count == _distinct_roots(p.coeffs)
            values = [evaluate(p, x, "exact-rational") for x in grid]
            changes = sum(1 for a, b in zip(values, values[1:]) if a * b < 0)
            zeros = sum(1 for v in values if v == 0)
            assert changes + zeros <= count

    @pytest.mark.parametrize("scale", [3, -7, 1024])
    def test_count_is_scale_invariant(self, bernoulli, scale):
        for trial in range(5):
            p = sample_poly(bernoulli, 15, RngSpec(seed=2, trial=trial))
            scaled = Poly([scale * a for a in p.coeffs])
            assert count_real_roots(scaled) == count_real_roots(p)
            assert count_real_roots(scaled, (0, 1)) == count_real_roots(p, (0, 1))

    def test_float_count_is_scale_invariant(self):
        p = sample_poly(Atom.gaussian(), 20, RngSpec(seed=3))
        halved = Poly([a / 2 for a in p.coeffs])
        assert count_real_roots(halved) == count_real_roots(p)

    def test_symmetry_counts(self):
        for p in _sign_vectors(7):
            negated = transform(p, "negate_arg")
            flipped = transform(p, "reciprocal")
            assert count_real_roots(negated, (0, None)) == count_real_roots(p, (None, 0))
            assert count_real_roots(negated) == count_real_roots(p)
            # P(0) != 0, so x -> 1/x maps the nonzero roots one to one
            assert count_real_roots(flipped) == count_real_roots(p)
            assert count_real_roots(flipped, (1, None)) == count_real_roots(p, (0, 1))
            assert count_real_roots(flipped, (-1, 0)) == count_real_roots(p, (None, -1))

    def test_float_count_on_random_gaussian(self):
        p = sample_poly(Atom.gaussian(), 40, RngSpec(seed=5))
        total = count_real_roots(p)
        left = count_real_roots(p, (None, 0))
        right = count_real_roots(p, (0, None))
        assert total == left + right


# ---------------------------------------------------------------------------
# Sturm helpers
# ---------------------------------------------------------------------------


class TestSturm:
    def test_squarefree_part_of_double_root(self):
        # (x - 1)^2 (x + 1)
        sqf, _ = squarefree_part([1, -1, -1, 1])
        assert len(sqf) - 1 == 2

    def test_sequence_starts_with_polynomial(self):
        chain = sturm_sequence(Poly([-1, 0, 1]))
        assert chain[0].coeffs == (-1, 0, 1)
        assert chain[-1].degree == 0


# ---------------------------------------------------------------------------
# isolate_and_refine / min_gap
# ---------------------------------------------------------------------------


class TestIsolate:
    def test_two_roots(self):
        report = isolate_and_refine(Poly([-1, 0, 1]), width=Fraction(1, 10**9))
        assert report.distinct_count == 2
        assert report.refined_roots == pytest.approx([-1.0, 1.0], abs=1e-9)
        assert min_gap(report) == pytest.approx(2.0, abs=2e-9)
        assert report.multiple_root_flag is False

    def test_cubic_with_one_real_root(self):
        report = isolate_and_refine(Poly([1, 1, 1, 1]))
        assert report.distinct_count == 1
        assert report.refined_roots[0] == pytest.approx(-1.0, abs=1e-9)
        assert min_gap(report) is None

    def test_double_root_collapses(self):
        report = isolate_and_refine(Poly([1, -1, -1, 1]))
        assert report.distinct_count == 2
        assert report.multiple_root_flag is True
        assert min_gap(report) == pytest.approx(2.0, abs=1e-9)

    def test_brackets_respect_width(self):
        width = Fraction(1, 2**30)
        # 2x^2 - 1 has irrational roots
        report = isolate_and_refine(Poly([-1, 0, 2]), width=width)
        for (lo, hi), exact in zip(report.intervals, report.exact_roots):
            assert exact or hi - lo <= width
        assert report.refined_roots == pytest.approx([-(0.5**0.5), 0.5**0.5], abs=1e-8)

    def test_min_gap_recomputed_from_brackets(self):
        report = isolate_and_refine(Poly([0, -4, 0, 1]), width=Fraction(1, 2**40))
        assert report.distinct_count == 3
        stripped = report.model_copy(update={"min_gap": None})
        assert min_gap(stripped) == pytest.approx(2.0, abs=1e-9)
        assert min_gap(stripped) == report.min_gap

    def test_nonpositive_width_rejected(self):
        with pytest.raises(ValidationError):
            isolate_and_refine(Poly([-1, 0, 1]), width=0)


# ---------------------------------------------------------------------------
# Intervals
# ---------------------------------------------------------------------------


class TestIntervals:
    def test_bulk_and_edge(self):
        lo, hi = bulk_interval(16, 1, Fraction(1, 2))
        assert lo == 0.5
        assert hi == pytest.approx(1 - 16**-1.5)
        assert edge_interval(16, 1, Fraction(1, 2)) == (hi, 1.0)

    def test_bulk_needs_degree_two(self):
        with pytest.raises(ValidationError):
            bulk_interval(1)


# ---------------------------------------------------------------------------
# near_double_scan
# ---------------------------------------------------------------------------


class TestNearDouble:
    def test_exact_double_root_fires(self):
        events = near_double_scan(Poly([1, -1, -1, 1]), 16)
        assert len(events) == 1
        event = events[0]
        assert event.exact
        lo, hi = event.interval
        assert lo <= 1 <= hi
        assert event.location == pytest.approx(1.0)

    def test_simple_roots_do_not_fire(self):
        assert near_double_scan(Poly([-1, 0, 1]), 16) == []

    def test_restricted_to_interval(self):
        assert near_double_scan(Poly([1, -1, -1, 1]), 16, (0, Fraction(1, 2))) == []

    def test_bad_exponent(self):
        with pytest.raises(ValidationError):
            near_double_scan(Poly([-1, 0, 1]), 0)

    def test_bulk_is_clean_for_small_sample(self, bernoulli):
        bulk = bulk_interval(50)
        for trial in range(20):
            p = sample_poly(bernoulli, 50, RngSpec(seed=9, trial=trial))
            assert near_double_scan(p, 16, bulk) == []


# ---------------------------------------------------------------------------
# root_match
# ---------------------------------------------------------------------------


class TestRootMatch:
    def test_shifted_line(self):
        report = root_match(Poly([-0.5, 1.0]), Poly([-0.49, 1.0]), eps1=1.0, M=1.0)
        assert report.all_matched
        match = report.matches[0]
        assert match.status is MatchStatus.MATCHED
        assert match.interval == pytest.approx((-0.5, 1.5))
        assert match.difference_bound == pytest.approx(0.01)

    def test_identical_polynomials(self):
        p = Poly([-1, 0, 1])
        report = root_match(p, p, eps1=1.0, M=4.0)
        assert report.matched_count == 2

    def test_far_perturbation_is_unmatched(self):
        report = root_match(Poly([-0.5, 1.0]), Poly([5.0, 1.0]), eps1=1.0, M=1.0)
        assert report.unmatched_count == 1
        assert "exceeds" in report.matches[0].reason

    def test_bad_parameters(self):
        with pytest.raises(ValidationError):
            root_match(Poly([-1, 1]), Poly([-1, 1]), eps1=0)
        with pytest.raises(ValidationError):
            root_match(Poly([-1, 1]), Poly([-1, 1]), M=-1)

    def test_degree_two_hundred_against_truncation(self, bernoulli):
        matched = 0
        for trial in range(10):
            F = sample_poly(bernoulli, 200, RngSpec(seed=200, trial=trial))
            G = F.truncate(100)
            report = root_match(F, G, eps1=0.1, M=1e4, interval=(-0.8, 0.8), method="certified")
            for match in report.matches:
                assert match.difference_bound < 1e-8
                if match.status is MatchStatus.MATCHED:
                    matched += 1
                    lo, hi = match.interval
                    assert hi - lo == pytest.approx(2e-5)
                    assert count_real_roots(G, (Fraction(lo), Fraction(hi))) >= 1
                else:
                    assert "below eps1" in match.reason
        assert matched > 0
