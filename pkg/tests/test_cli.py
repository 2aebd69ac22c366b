"""Tests for CLI functionality."""

import csv
import json

from kac_root_utilities import __version__
from kac_root_utilities.cli import main


def _read_json(path):
    return json.loads(path.read_text())


def _read_csv(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


# ---------------------------------------------------------------------------
# Basics
# ---------------------------------------------------------------------------


def test_cli_help(runner):
    result = runner.invoke(main, ["--help"])
    assert result.exit_code == 0
    assert "Kac Root Utilities" in result.output
    for command in ("simulate", "ek", "exact", "experiment", "replay"):
        assert command in result.output


def test_cli_version(runner):
    result = runner.invoke(main, ["--version"])
    assert result.exit_code == 0
    assert __version__ in result.output


def test_info(runner):
    result = runner.invoke(main, ["--output", "json", "info"])
    assert result.exit_code == 0
    assert "Default Seed" in result.output
    assert "Log Level" in result.output
    assert "Workers" in result.output


def test_missing_config_file_is_usage_error(runner):
    result = runner.invoke(main, ["--config", "absent.env", "info"])
    assert result.exit_code == 1
    assert "Configuration Error" in result.output


def test_unknown_option_is_usage_error(runner):
    result = runner.invoke(main, ["simulate", "--degrees", "4", "--bogus"])
    assert result.exit_code == 1


def test_bad_atom_is_usage_error(runner):
    result = runner.invoke(main, ["simulate", "--atom", "poisson", "--degrees", "4"])
    assert result.exit_code == 1
    assert "Error" in result.output


# ---------------------------------------------------------------------------
# ek
# ---------------------------------------------------------------------------


class TestEk:
    def test_degree_one(self, runner, tmp_path):
        result = runner.invoke(main, ["ek", "--n", "1", "--out", "run"])
        assert result.exit_code == 0, result.output
        rows = _read_csv(tmp_path / "run" / "ek.csv")
        assert rows[0]["n"] == "1"
        assert rows[0]["expected"] == "1.0000000000"

    def test_needs_exactly_one_degree_option(self, runner):
        assert runner.invoke(main, ["ek"]).exit_code == 1
        assert runner.invoke(main, ["ek", "--n", "2", "--n-sweep", "3,4"]).exit_code == 1

    def test_tail(self, runner, tmp_path):
        result = runner.invoke(main, ["ek", "--n", "5", "--c0", "2", "--out", "run"])
        assert result.exit_code == 0, result.output
        tail = _read_json(tmp_path / "run" / "tail.json")
        assert tail["C0"] == 2.0


# ---------------------------------------------------------------------------
# exact
# ---------------------------------------------------------------------------


class TestExact:
    def test_double_root(self, runner, tmp_path):
        result = runner.invoke(main, ["exact", "double-root", "--n", "3", "--out", "run"])
        assert result.exit_code == 0, result.output
        data = _read_json(tmp_path / "run" / "double_root.json")
        assert data["p_union"]["exact"] == "1/4"
        assert data["certificate"] == "Feasible"

    def test_double_root_obstruction(self, runner, tmp_path):
        result = runner.invoke(main, ["exact", "double-root", "--n", "10", "--out", "run"])
        assert result.exit_code == 0, result.output
        data = _read_json(tmp_path / "run" / "double_root.json")
        assert data["p_union"]["exact"] == "0"
        assert data["certificate"] == "EvenParityObstruction"

    def test_table_guard_exit_code(self, runner):
        result = runner.invoke(
            main, ["exact", "double-root", "--n", "100", "--max-table-bytes", "10"]
        )
        assert result.exit_code == 3

    def test_infeasible_exit_code(self, runner):
        result = runner.invoke(main, ["exact", "clt-calibrate", "--n", "5"])
        assert result.exit_code == 2
        assert "n=5" in result.output

    def test_separation(self, runner, tmp_path):
        result = runner.invoke(
            main,
            ["exact", "separation", "--variant", "claim1", "--x", "4/5", "--k", "3", "--out", "run"],
        )
        assert result.exit_code == 0, result.output
        assert _read_json(tmp_path / "run" / "separation.json")["passed"] is True

    def test_small_ball(self, runner, tmp_path):
        result = runner.invoke(
            main,
            ["exact", "small-ball", "--n", "3", "--x", "1", "--delta", "0", "--out", "run"],
        )
        assert result.exit_code == 0, result.output
        data = _read_json(tmp_path / "run" / "small_ball.json")
        assert data["probability"]["exact"] == "3/8"


# ---------------------------------------------------------------------------
# simulate, manifests and replay
# ---------------------------------------------------------------------------


SIMULATE = ["simulate", "--atom", "bernoulli", "--degrees", "4,8", "--trials", "50", "--seed", "3"]


class TestSimulate:
    def test_gaussian_degree_one(self, runner, tmp_path):
        result = runner.invoke(
            main,
            ["simulate", "--atom", "gaussian", "--degrees", "1", "--trials", "20", "--out", "run"],
        )
        assert result.exit_code == 0, result.output
        (row,) = _read_csv(tmp_path / "run" / "summary.csv")
        assert row["mean"] == "1.0000000000"
        assert row["variance"] == "0.0000000000"

    def test_manifest(self, runner, tmp_path):
        result = runner.invoke(main, SIMULATE + ["--out", "run"])
        assert result.exit_code == 0, result.output
        manifest = _read_json(tmp_path / "run" / "manifest.json")
        assert manifest["command"] == "simulate"
        assert manifest["seed"] == 3
        assert manifest["version"] == __version__
        assert set(manifest["outputs"]) == {"summary.csv", "residual_curve.csv"}
        assert all(len(d) == 64 for d in manifest["outputs"].values())

    def test_threads_do_not_change_outputs(self, runner, tmp_path):
        one = runner.invoke(main, SIMULATE + ["--threads", "1", "--out", "one"])
        four = runner.invoke(main, SIMULATE + ["--threads", "4", "--out", "four"])
        assert one.exit_code == four.exit_code == 0
        first = _read_json(tmp_path / "one" / "manifest.json")["outputs"]
        second = _read_json(tmp_path / "four" / "manifest.json")["outputs"]
        assert first == second

    def test_variance_statistic(self, runner, tmp_path):
        result = runner.invoke(
            main, SIMULATE + ["--stat", "mean", "--stat", "variance", "--out", "run"]
        )
        assert result.exit_code == 0, result.output
        rows = _read_csv(tmp_path / "run" / "variance.csv")
        assert [r["n"] for r in rows] == ["4", "8"]


class TestReplay:
    def test_round_trip(self, runner, tmp_path):
        assert runner.invoke(main, SIMULATE + ["--out", "run"]).exit_code == 0
        result = runner.invoke(main, ["replay", "run/manifest.json", "--into", "again"])
        assert result.exit_code == 0, result.output
        assert "outputs reproduced" in result.output
        assert (tmp_path / "again" / "summary.csv").read_bytes() == (
            tmp_path / "run" / "summary.csv"
        ).read_bytes()

    def test_tampered_digest_fails(self, runner, tmp_path):
        assert runner.invoke(main, SIMULATE + ["--out", "run"]).exit_code == 0
        path = tmp_path / "run" / "manifest.json"
        manifest = _read_json(path)
        manifest["outputs"]["summary.csv"] = "0" * 64
        path.write_text(json.dumps(manifest))
        result = runner.invoke(main, ["replay", str(path), "--into", "again"])
        assert result.exit_code == 1
        assert "summary.csv" in result.output

    def test_missing_manifest(self, runner):
        assert runner.invoke(main, ["replay", "nowhere.json"]).exit_code == 1
