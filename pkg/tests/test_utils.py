"""Tests for argument parsing and file helpers."""

import json
from fractions import Fraction

import pytest

from kac_root_utilities.core.exceptions import ValidationError
from kac_root_utilities.core.utils import (
    file_digest,
    parallel_map,
    parse_int_list,
    parse_interval,
    parse_rational,
    save_to_file,
    to_jsonable,
    write_csv,
)


class TestParsing:
    @pytest.mark.parametrize(
        "text,expected",
        [
            ("4,8,1e3", [4, 8, 1000]),
            ("2^4..2^6", [16, 32, 64]),
            ("39..42", [39, 40, 41, 42]),
            ("7", [7]),
        ],
    )
    def test_int_list(self, text, expected):
        assert parse_int_list(text) == expected

    @pytest.mark.parametrize("text", ["", "1.5", "2^3..3^4", "x"])
    def test_int_list_rejects(self, text):
        with pytest.raises(ValidationError):
            parse_int_list(text)

    def test_rational(self):
        assert parse_rational("4/5") == Fraction(4, 5)
        assert parse_rational("0.999") == Fraction(999, 1000)
        with pytest.raises(ValidationError):
            parse_rational("1/0")

    def test_interval(self):
        assert parse_interval("0,1/2") == (0, Fraction(1, 2))
        assert parse_interval("-inf, 3") == (None, 3)
        with pytest.raises(ValidationError):
            parse_interval("1,1")
        with pytest.raises(ValidationError):
            parse_interval("1")


class TestOutputs:
    def test_rationals_render_exactly(self):
        assert to_jsonable({"p": Fraction(1, 4), "q": Fraction(3)}) == {
            "p": {"exact": "1/4", "float": 0.25},
            "q": {"exact": "3", "float": 3.0},
        }

    def test_json_is_sorted_and_stable(self, tmp_path):
        first = save_to_file({"b": 1, "a": Fraction(1, 3)}, tmp_path / "one.json")
        second = save_to_file({"a": Fraction(1, 3), "b": 1}, tmp_path / "two.json")
        assert first.read_bytes() == second.read_bytes()
        assert list(json.loads(first.read_text())) == ["a", "b"]
        assert file_digest(first) == file_digest(second)

    def test_csv_float_format(self, tmp_path):
        path = write_csv([{"n": 1, "x": 0.5}], tmp_path / "rows.csv", ["n", "x"])
        assert path.read_bytes() == b"n,x\n1,0.5000000000\n"


class TestParallelMap:
    @pytest.mark.parametrize("workers", [1, 3, 8])
    def test_keeps_input_order(self, workers):
        assert parallel_map(lambda x: x * x, range(20), max_workers=workers) == [
            x * x for x in range(20)
        ]
