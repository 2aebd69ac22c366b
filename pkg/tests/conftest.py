"""Shared fixtures and the slow-test switch."""

import pytest
from click.testing import CliRunner

from kac_root_utilities.models.atoms import Atom, RngSpec


def pytest_addoption(parser):
    parser.addoption(
        "--run-slow",
        action="store_true",
        default=False,
        help="run acceptance-scale Monte Carlo tests",
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-slow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --run-slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def bernoulli():
    return Atom.type_one(1)


@pytest.fixture
def rng():
    return RngSpec(seed=7, trial=5)


@pytest.fixture
def runner(monkeypatch, tmp_path):
    """CliRunner isolated from user config files and KAC_* variables."""
    for name in (
        "KAC_WORKERS",
        "KAC_LOG_LEVEL",
        "KAC_DATA_DIR",
        "KAC_SEED",
        "KAC_OUTPUT_FORMAT",
        "KAC_VERBOSE",
        "KAC_DEBUG",
    ):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setenv("HOME", str(tmp_path / "home"))
    monkeypatch.chdir(tmp_path)
    return CliRunner()
