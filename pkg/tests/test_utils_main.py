import csv
import json
import math
from dataclasses import dataclass

import numpy as np
import pytest

from cutoff_duality.types.error_types import PreconditionError
from cutoff_duality.utils.main import (
    check_ascending,
    format_float,
    make_json_safe,
    parse_grid,
    write_csv,
    write_json,
)


@dataclass
class Sample:
    value: float
    flag: bool


def test_parse_grid_list():
    assert parse_grid("0, 0.5,1") == [0.0, 0.5, 1.0]


def test_parse_grid_geometric():
    grid = parse_grid("1:100:3")
    assert grid == pytest.approx([1.0, 10.0, 100.0])


def test_parse_grid_single_point():
    assert parse_grid("1e4:1e8:1") == [1e4]


@pytest.mark.parametrize(
    "text, message",
    [
        ("", "grid is empty"),
        ("1,a", "cannot parse grid"),
        ("0:10:3", "positive bounds"),
        ("2,1", "strictly ascending"),
        ("1,1", "strictly ascending"),
        ("1:2", "cannot parse grid"),
    ],
)
def test_parse_grid_errors(text, message):
    with pytest.raises(PreconditionError) as exc_info:
        parse_grid(text)
    assert message in str(exc_info.value), f"Unexpected message for {text!r}"


def test_check_ascending_rejects_non_finite():
    with pytest.raises(PreconditionError) as exc_info:
        check_ascending([1.0, math.inf], "SNR grid")
    assert "SNR grid has non-finite entries" in str(exc_info.value)


@pytest.mark.parametrize(
    "value, expected",
    [
        (0.5, "0.5"),
        (True, "true"),
        (np.float64(0.25), "0.25"),
        (math.inf, "inf"),
        (3, "3"),
        ("e0", "e0"),
    ],
)
def test_format_float(value, expected):
    assert format_float(value) == expected


def test_format_float_round_trips():
    assert float(format_float(0.1)) == 0.1


def test_make_json_safe():
    payload = {
        "array": np.array([1.0, np.inf]),
        "scalar": np.int64(3),
        "flag": np.bool_(True),
        "nested": [Sample(value=-np.inf, flag=False)],
        "nan": float("nan"),
    }
    assert make_json_safe(payload) == {
        "array": [1.0, "inf"],
        "scalar": 3,
        "flag": True,
        "nested": [{"value": "-inf", "flag": False}],
        "nan": "nan",
    }


def test_write_csv(tmp_path):
    path = write_csv(
        tmp_path / "rows.csv",
        ("rho", "e0_nats"),
        [{"rho": 0.0, "e0_nats": 0.0}, {"rho": 1.0, "e0_nats": 0.2231435513142097}],
    )
    with path.open(newline="") as handle:
        rows = list(csv.reader(handle))
    assert rows[0] == ["rho", "e0_nats"]
    assert float(rows[2][1]) == 0.2231435513142097, "Value not written at full precision"


def test_write_json(tmp_path):
    path = write_json(tmp_path / "out.json", {"value": np.float64(1.5), "bad": math.inf})
    assert json.loads(path.read_text()) == {"value": 1.5, "bad": "inf"}
