"""
Unit tests for deterministic report rendering
"""

import json
from dataclasses import dataclass

import numpy as np

from bhconstruct.constants import ReportFormat, SignVerdict
from bhconstruct.utils.report import format_float, render_csv, render_json, to_plain


@dataclass(frozen=True)
class Sample:
    name: str
    value: float
    pair: tuple


class TestToPlain:
    """Test conversion to JSON-ready values"""

    def test_dataclass_and_enum(self):
        """Test nested dataclass fields and enum values"""
        plain = to_plain({"sample": Sample("a", 1.5, (1, 2)), "verdict": SignVerdict.AMBIGUOUS})
        assert plain == {"sample": {"name": "a", "value": 1.5, "pair": [1, 2]}, "verdict": "ambiguous"}

    def test_numpy_and_complex(self):
        """Test numpy scalars, arrays and complex numbers"""
        plain = to_plain({"a": np.float64(0.5), "b": np.arange(3), "c": 1 - 2j, "d": np.bool_(True)})
        assert plain == {"a": 0.5, "b": [0, 1, 2], "c": {"im": -2.0, "re": 1.0}, "d": True}
        assert type(plain["d"]) is bool


class TestRenderJson:
    """Test render_json()"""

    def test_sorted_keys_and_float_digits(self):
        """Test key order and 17 significant digits"""
        text = render_json({"b": 0.1, "a": 1})
        assert text == '{\n  "a": 1,\n  "b": 0.10000000000000001\n}\n'

    def test_round_trips_through_json(self):
        """Test that the output is valid JSON with the same content"""
        document = {"matrix": [[0.5, 1.0], [2.25, 0.5]], "name": "x", "empty": [], "none": None}
        assert json.loads(render_json(document)) == document

    def test_non_finite_values(self):
        """Test NaN and infinities"""
        assert json.loads(render_json({"x": float("nan"), "y": -float("inf")})) == {
            "x": "NaN", "y": "-Infinity"}

    def test_deterministic(self):
        """Test byte-identical output for equal input"""
        document = {"z": [1.0 / 3.0, 2.0 / 3.0], "a": {"k": 10 ** 20, "f": 1e-300}}
        assert render_json(document) == render_json(dict(reversed(list(document.items()))))

    def test_format_float(self):
        """Test the float format"""
        assert format_float(1.0) == "1"
        assert format_float(1e21) == "1e+21"


class TestRenderCsv:
    """Test render_csv()"""

    def test_sweep_table(self):
        """Test header, empty cells and float digits"""
        text = render_csv(ReportFormat.CSV_HEADER, [(0.5, 128, None, 1.0), (1.0 / 3.0, None, None, None)])
        lines = text.splitlines()
        assert lines[0] == "param,first_feasible_N,log10_paper_bound,min_margin"
        assert lines[1] == "0.5,128,,1"
        assert lines[2] == "0.33333333333333331,,,"
