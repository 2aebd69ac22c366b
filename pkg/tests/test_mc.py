"""Tests for the Monte Carlo experiments."""

import math
from fractions import Fraction

import pytest

from kac_root_utilities.core.exceptions import CertificationError, ValidationError
from kac_root_utilities.engine.ekq import ek_expected
from kac_root_utilities.engine.mc import (
    MASLOVA,
    count_roots,
    double_root_mc,
    edge_moment_growth,
    exact_expected_roots,
    near_one_universality,
    residual_curve,
    run_expectation,
    run_simulation,
    truncation_compare,
    variance_ratio,
)
from kac_root_utilities.engine.polycore import Poly
from kac_root_utilities.engine.roots import RootMethod
from kac_root_utilities.models.atoms import Atom
from kac_root_utilities.models.reports import SimConfig


def _config(atom, degrees, trials, **kwargs):
    return SimConfig(atom=atom, degrees=degrees, trials=trials, seed=1234, **kwargs)


# ---------------------------------------------------------------------------
# Exact oracle
# ---------------------------------------------------------------------------


class TestExactExpectedRoots:
    def test_small_degrees(self):
        assert exact_expected_roots(0) == 0
        assert exact_expected_roots(1) == 1
        assert exact_expected_roots(2) == 1

    def test_positive_half_line(self):
        assert exact_expected_roots(2, 1, (0, None)) == Fraction(1, 2)

    def test_type_two(self):
        # a linear polynomial always has exactly one root
        assert exact_expected_roots(1, 3) == 1

    def test_enumeration_limit(self):
        with pytest.raises(ValidationError):
            exact_expected_roots(25)


# ---------------------------------------------------------------------------
# Root statistics
# ---------------------------------------------------------------------------


class TestExpectation:
    def test_count_roots(self):
        assert count_roots(Poly([-1, 0, 1])) == 2
        assert count_roots(Poly([1, -1, -1, 1])) == 2

    def test_uncertified_float_trial_is_excluded(self, mocker):
        mocker.patch(
            "kac_root_utilities.engine.mc.count_real_roots",
            side_effect=CertificationError("roots too close"),
        )
        assert count_roots(Poly([-1.0, 0.0, 1.0])) is None

    def test_exact_trial_counted_by_sturm(self, mocker):
        counter = mocker.patch(
            "kac_root_utilities.engine.mc.count_real_roots", return_value=2
        )
        assert count_roots(Poly([-1, 0, 1])) == 2
        counter.assert_called_once()
        assert counter.call_args.kwargs["method"] is RootMethod.STURM

    def test_certified_exact_trial_falls_back_to_sturm(self, mocker):
        counter = mocker.patch(
            "kac_root_utilities.engine.mc.count_real_roots",
            side_effect=[CertificationError("roots too close"), 2],
        )
        assert count_roots(Poly([-1, 0, 1]), method="certified") == 2
        assert counter.call_args.kwargs["method"] is RootMethod.STURM

    @pytest.mark.parametrize("method", ["auto", "certified"])
    def test_type_one_never_excludes(self, bernoulli, method):
        row = run_expectation(_config(bernoulli, [12], 200, root_method=method)).row(12)
        assert row.excluded == 0

    def test_count_methods_agree(self, bernoulli):
        sturm = run_expectation(_config(bernoulli, [10, 20], 150))
        scanned = run_expectation(_config(bernoulli, [10, 20], 150, root_method="certified"))
        assert sturm.model_dump() == scanned.model_dump()

    def test_gaussian_degree_one(self):
        row = run_expectation(_config(Atom.gaussian(), [1], 50)).row(1)
        assert row.mean == 1.0
        assert row.variance == 0.0
        assert row.residual == 1.0
        assert row.excluded == 0

    def test_bernoulli_degree_two(self, bernoulli):
        row = run_expectation(_config(bernoulli, [2], 2000)).row(2)
        assert row.mean == pytest.approx(1.0, abs=0.1)
        assert row.ci_half_width < 0.1

    def test_matches_exact_oracle(self, bernoulli):
        exact = float(exact_expected_roots(8))
        row = run_expectation(_config(bernoulli, [8], 3000)).row(8)
        assert abs(row.mean - exact) <= 2 * row.ci_half_width

    def test_worker_count_does_not_change_results(self, bernoulli):
        stats = {"mean", "gaps", "near-double"}
        one = run_simulation(_config(bernoulli, [6, 12], 60, stats=stats, workers=1))
        four = run_simulation(_config(bernoulli, [6, 12], 60, stats=stats, workers=4))
        assert one[0].model_dump() == four[0].model_dump()

    def test_optional_statistics(self, bernoulli):
        cfg = _config(bernoulli, [10], 100, stats={"mean", "gaps", "near-double"})
        row = run_expectation(cfg).row(10)
        assert row.min_gap_p01 is not None
        assert row.min_gap_p01 <= row.min_gap_p50
        assert row.near_double_freq == 0.0

    def test_interval_restriction(self, bernoulli):
        whole = run_expectation(_config(bernoulli, [10], 200)).row(10)
        positive = run_expectation(
            _config(bernoulli, [10], 200, interval=(0.0, math.inf))
        ).row(10)
        assert positive.mean <= whole.mean

    def test_residual_curve(self, bernoulli):
        curve = residual_curve(_config(bernoulli, [4, 8, 16], 100))
        assert list(curve.columns) == ["n", "mean", "residual", "ci_half_width"]
        assert list(curve["n"]) == [4, 8, 16]
        for _, row in curve.iterrows():
            assert row["residual"] == pytest.approx(
                row["mean"] - 2 / math.pi * math.log(row["n"])
            )

    def test_config_validation(self, bernoulli):
        with pytest.raises(ValueError):
            _config(bernoulli, [], 10)
        with pytest.raises(ValueError):
            _config(bernoulli, [4], 10, stats={"median"})
        with pytest.raises(ValueError):
            _config(bernoulli, [4], 10, root_method="sympy")

    @pytest.mark.slow
    def test_bernoulli_residual_bracket(self, bernoulli):
        row = run_expectation(
            _config(bernoulli, [4096], 10_000, workers=8, root_method="certified")
        ).row(4096)
        assert 0.1 <= row.residual <= 0.35

    @pytest.mark.slow
    def test_gaussian_mean_matches_quadrature(self):
        row = run_expectation(_config(Atom.gaussian(), [50], 200_000, workers=8)).row(50)
        expected = ek_expected(50)
        assert abs(row.mean - expected.value) <= 3 * math.sqrt(row.variance / row.trials)


# ---------------------------------------------------------------------------
# Variance ratio
# ---------------------------------------------------------------------------


class TestVarianceRatio:
    def test_target_constant(self):
        assert MASLOVA == pytest.approx(0.46264, abs=5e-6)

    def test_rows(self, bernoulli):
        rows = variance_ratio(_config(bernoulli, [16, 32], 300))
        assert [r.n for r in rows] == [16, 32]
        for r in rows:
            assert r.ratio == pytest.approx(r.variance / math.log(r.n))
            assert r.jackknife_error > 0
            assert r.target == MASLOVA

    def test_single_pass_gives_both(self, bernoulli):
        cfg = _config(bernoulli, [16], 200, stats={"mean", "variance"})
        summary, ratios = run_simulation(cfg)
        assert ratios[0].variance == summary.row(16).variance

    def test_degree_one_rejected(self, bernoulli):
        with pytest.raises(ValidationError):
            variance_ratio(_config(bernoulli, [1, 4], 50))

    @pytest.mark.slow
    @pytest.mark.parametrize("atom", [Atom.type_one(1), Atom.gaussian()])
    def test_ratio_near_target(self, atom):
        (row,) = variance_ratio(
            _config(atom, [4096], 100_000, workers=8, root_method="certified")
        )
        assert abs(row.ratio - MASLOVA) <= 0.2 * MASLOVA


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------


class TestTruncation:
    def test_no_truncation_no_discrepancy(self, bernoulli):
        report = truncation_compare(
            bernoulli, 30, 30, Fraction(1, 2), (0, Fraction(1, 2)), 50, seed=1
        )
        assert report.mean_abs_discrepancy == 0
        assert report.mismatch_fraction == 0
        assert report.trials == 50

    def test_precondition_reported(self, bernoulli):
        report = truncation_compare(
            bernoulli, 100, 10, Fraction(1, 2), (0, Fraction(1, 2)), 20, seed=1, B=1
        )
        assert report.required_m == pytest.approx(8 * math.log(100))
        assert not report.precondition_satisfied

    def test_bad_parameters(self, bernoulli):
        with pytest.raises(ValidationError):
            truncation_compare(bernoulli, 10, 5, Fraction(1, 20), (0, Fraction(1, 2)), 5, 1)
        with pytest.raises(ValidationError):
            truncation_compare(bernoulli, 10, 11, Fraction(1, 2), (0, Fraction(1, 2)), 5, 1)

    @pytest.mark.slow
    def test_coupling(self, bernoulli):
        report = truncation_compare(
            bernoulli, 400, 200, Fraction(1, 2), (0, Fraction(1, 2)), 1000, seed=1, workers=8
        )
        assert report.mismatch_fraction <= 0.05


class TestUniversality:
    def test_same_atom_gives_zero_difference(self, bernoulli):
        report = near_one_universality(bernoulli, bernoulli, 60, 0.25, 100, seed=4)
        assert report.difference == 0
        assert report.mean_a == report.mean_b

    def test_bernoulli_against_gaussian(self, bernoulli):
        report = near_one_universality(bernoulli, Atom.gaussian(), 100, 0.25, 400, seed=4)
        assert abs(report.difference) <= 3 * report.combined_standard_error + 0.1
        assert report.r_condition["eps_prime"] == 0.1

    def test_bad_window(self, bernoulli):
        with pytest.raises(ValidationError):
            near_one_universality(bernoulli, bernoulli, 10, 1.5, 10, seed=1)


class TestEdgeMoments:
    def test_clt_scale_for_k_zero(self):
        report = edge_moment_growth([100, 1000], 0, 400, seed=8)
        for row in report.rows:
            assert 0.4 <= row.median / math.sqrt(row.n + 1) <= 1.2
            assert row.exact_second_moment == row.n + 1

    def test_second_moment_identity(self):
        report = edge_moment_growth([64], 2, 2000, seed=8)
        row = report.rows[0]
        assert row.exact_second_moment == sum(math.comb(i, 2) ** 2 for i in range(65))
        assert abs(row.second_moment - row.exact_second_moment) <= 5 * row.second_moment_se

    def test_slope(self):
        report = edge_moment_growth([2**6, 2**8, 2**10], 2, 300, seed=8)
        assert report.slope == pytest.approx(2.5, abs=0.3)

    def test_needs_discrete_atom(self):
        with pytest.raises(ValidationError):
            edge_moment_growth([10], 1, 10, seed=1, atom=Atom.gaussian())

    def test_k_above_degree(self):
        with pytest.raises(ValidationError):
            edge_moment_growth([3], 4, 10, seed=1)


class TestDoubleRootMC:
    def test_degree_three(self):
        report = double_root_mc(3, 1, 4000, seed=5)
        assert report.double_freq == pytest.approx(0.25, abs=0.03)
        assert report.exact_p_union == Fraction(1, 4)
        assert report.near_double_trials == 0

    def test_impossible_degree(self):
        report = double_root_mc(9, 1, 500, seed=5, with_exact=False)
        assert report.double_freq == 0
        assert report.exact_p_union is None

    def test_needs_degree_two(self):
        with pytest.raises(ValidationError):
            double_root_mc(1, 1, 10, seed=1)

    @pytest.mark.slow
    def test_bulk_free_of_near_doubles(self):
        report = double_root_mc(50, 1, 10_000, seed=5, workers=8, with_exact=False)
        assert report.near_double_trials == 0
        assert report.excluded == 0
