"""Tests for polynomial sampling, evaluation and transforms."""

from collections import Counter
from fractions import Fraction

import pytest

from kac_root_utilities.core.exceptions import ValidationError
from kac_root_utilities.engine.polycore import (
    Poly,
    atom_moments,
    evaluate,
    parse_atom,
    sample_coefficients,
    sample_poly,
    transform,
)
from kac_root_utilities.models.atoms import Atom, AtomKind, RngSpec, stream_seed

# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------


class TestSampling:
    def test_bernoulli_support(self, bernoulli, rng):
        p = sample_poly(bernoulli, 3, rng)
        assert p.degree == 3
        assert p.exact
        assert set(p.coeffs) <= {-1, 1}

    def test_same_spec_same_stream(self, bernoulli):
        first = sample_coefficients(bernoulli, 50, RngSpec(seed=7, trial=5))
        second = sample_coefficients(bernoulli, 50, RngSpec(seed=7, trial=5))
        assert first == second

    def test_trials_are_distinct_streams(self):
        atom = Atom.gaussian()
        a = sample_coefficients(atom, 20, RngSpec(seed=7, trial=0))
        b = sample_coefficients(atom, 20, RngSpec(seed=7, trial=1))
        assert a != b

    def test_counter_offset_continues_the_stream(self):
        spec = RngSpec(seed=11, trial=3)
        # one counter step is a block of four 64-bit words
        whole = spec.generator().random(8).tolist()
        tail = spec.advanced(1).generator().random(4).tolist()
        assert whole[4:] == tail

    def test_type_one_frequencies(self):
        atom = Atom.type_one(2)
        draws = 100_000
        counts = Counter(sample_coefficients(atom, draws, RngSpec(seed=3)))
        assert set(counts) == {-2, -1, 1, 2}
        tolerance = 4 * (3 / 16 / draws) ** 0.5
        for value in (-2, -1, 1, 2):
            assert abs(counts[value] / draws - 0.25) <= tolerance

    def test_gaussian_poly_is_float(self, rng):
        p = sample_poly(Atom.gaussian(), 5, rng)
        assert not p.exact
        assert len(p) == 6

    def test_custom_atom_draws_from_support(self, rng):
        atom = parse_atom("custom:-1:1/2,1:1/2")
        assert set(sample_coefficients(atom, 200, rng)) == {-1, 1}

    def test_negative_degree_rejected(self, bernoulli, rng):
        with pytest.raises(ValidationError):
            sample_poly(bernoulli, -1, rng)

    def test_stream_seed_depends_on_tags(self):
        assert stream_seed(1, 4) == stream_seed(1, 4)
        assert stream_seed(1, 4) != stream_seed(1, 5)


# ---------------------------------------------------------------------------
# Atoms
# ---------------------------------------------------------------------------


class TestAtoms:
    @pytest.mark.parametrize(
        "text,kind,N",
        [
            ("bernoulli", AtomKind.TYPE_I, 1),
            ("typeI:3", AtomKind.TYPE_I, 3),
            ("gaussian", AtomKind.GAUSSIAN, None),
            ("uniform", AtomKind.UNIFORM, None),
        ],
    )
    def test_parse_atom(self, text, kind, N):
        atom = parse_atom(text)
        assert atom.kind is kind
        assert atom.N == N

    @pytest.mark.parametrize(
        "text", ["poisson", "typeI:0", "typeI:x", "custom:1:1", "custom:-1:1/4,1:3/4"]
    )
    def test_parse_atom_rejects(self, text):
        with pytest.raises(ValidationError):
            parse_atom(text)

    def test_moments(self):
        assert atom_moments(Atom.type_one(1)) == (0, 1)
        assert atom_moments(Atom.type_one(2)) == (0, Fraction(5, 2))
        assert atom_moments(Atom.gaussian()) == (0, 1)

    def test_custom_moments_are_exact(self):
        atom = parse_atom("custom:-2:1/3,1:2/3")
        assert atom_moments(atom) == (0, Fraction(2))


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


class TestEvaluate:
    def test_small_values(self):
        assert evaluate(Poly([1, 1, 1]), 1) == 3
        assert evaluate(Poly([1, -1]), 1) == 0

    def test_exact_mode_returns_fraction(self):
        value = evaluate(Poly([1, 2, 3]), Fraction(1, 2), "exact-rational")
        assert value == Fraction(11, 4)

    def test_exact_mode_needs_integers(self):
        with pytest.raises(ValidationError):
            evaluate(Poly([0.5, 1.0]), 1, "exact-rational")

    def test_compensated_matches_exact(self, bernoulli):
        p = sample_poly(bernoulli, 20, RngSpec(seed=20240229))
        exact = evaluate(p, Fraction(0.999), "exact-rational")
        compensated = evaluate(p, 0.999, "compensated")
        scale = sum(0.999**i for i in range(21))
        assert abs(compensated - float(exact)) <= 1e-15 * scale

    def test_compensated_beats_plain_near_a_cluster(self):
        # (x - 1)^8 expanded, evaluated just off the root
        coeffs = [1, -8, 28, -56, 70, -56, 28, -8, 1]
        x = 1.0 + 2.0**-10
        exact = float(evaluate(Poly(coeffs), Fraction(x), "exact-rational"))
        plain = evaluate(Poly(coeffs), x)
        compensated = evaluate(Poly(coeffs), x, "compensated")
        assert abs(compensated - exact) <= abs(plain - exact)


# ---------------------------------------------------------------------------
# Transforms
# ---------------------------------------------------------------------------


class TestTransform:
    def test_examples(self):
        p = Poly([1, 2, 3])
        assert transform(p, "derivative").coeffs == (2, 6)
        assert transform(p, "reciprocal").coeffs == (3, 2, 1)
        assert transform(p, "negate_arg").coeffs == (1, -2, 3)

    def test_reciprocal_is_involution(self):
        p = Poly([2, -1, 0, 5])
        assert transform(transform(p, "reciprocal"), "reciprocal") == p

    def test_negate_arg_is_involution(self, bernoulli, rng):
        p = sample_poly(bernoulli, 25, rng)
        assert transform(transform(p, "negate_arg"), "negate_arg") == p
        q = Poly([0.5, -1.25, 3.0])
        assert transform(transform(q, "negate_arg"), "negate_arg") == q

    @pytest.mark.parametrize("x", [Fraction(1, 3), Fraction(-2), Fraction(5, 7), Fraction(-9, 4)])
    def test_reciprocal_identity(self, x):
        p = Poly([3, -1, 0, 2, 7])
        flipped = transform(p, "reciprocal")
        expected = x**p.degree * evaluate(p, 1 / x, "exact-rational")
        assert evaluate(flipped, x, "exact-rational") == expected
        assert evaluate(flipped.as_float(), float(x)) == pytest.approx(
            float(x) ** p.degree * evaluate(p.as_float(), 1 / float(x))
        )

    def test_negate_arg_values(self):
        p = Poly([1, -1, 1, 1, -1])
        negated = transform(p, "negate_arg")
        for x in (Fraction(1, 2), Fraction(-3), Fraction(7, 5)):
            assert evaluate(negated, x, "exact-rational") == evaluate(p, -x, "exact-rational")

    def test_derivative_of_constant(self):
        assert transform(Poly([4]), "derivative").coeffs == (0,)

    def test_trim_and_truncate(self):
        p = Poly([1, 2, 0, 0])
        assert p.degree == 3
        assert p.trim().coeffs == (1, 2)
        assert p.truncate(1).coeffs == (1, 2)
        with pytest.raises(ValidationError):
            p.truncate(-1)

    def test_exact_flag_detection(self):
        assert Poly([1, 2]).exact
        assert not Poly([1.0, 2]).exact
        with pytest.raises(ValidationError):
            Poly([1.5], exact=True)
