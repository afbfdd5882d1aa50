import json
import math

import numpy as np

from ductpinn import DuctProblem
from ductpinn.analysis import FieldProfile, oracle_profile
from ductpinn.artifacts import CSV_HEADER, fields_csv, read_fields_csv, write_fields_csv, write_report


def test_csv_round_trip_is_exact(tmp_path):
    prof = oracle_profile(DuctProblem(f=500.0, M=0.3), 101)
    path = write_fields_csv(tmp_path / "f.csv", prof)
    back = read_fields_csv(path)
    assert np.array_equal(back.x, prof.x)
    assert np.array_equal(back.psi, prof.psi)
    assert np.array_equal(back.xi, prof.xi)
    assert np.array_equal(back.valid_Z, prof.valid_Z)
    ok = prof.valid_Z
    assert np.array_equal(back.Z[ok], prof.Z[ok])


def test_invalid_impedance_written_as_nan():
    prof = FieldProfile.from_fields([0.0, 0.5, 1.0], [1.0, 0.0, -1.0], [1.0, 0.0, 1.0])
    lines = fields_csv(prof).split("\n")
    assert lines[0] == CSV_HEADER
    mid = lines[2].split(",")
    assert mid[5] == "nan" and mid[6] == "nan" and mid[7] == "0"
    assert lines[1].endswith(",1")


def test_seventeen_significant_digits():
    prof = FieldProfile.from_fields([0.1], [1 / 3], [2 / 3])
    row = fields_csv(prof).split("\n")[1].split(",")
    assert row[0] == "0.10000000000000001"
    assert float(row[1]) == 1 / 3


def test_report_sorted_and_clean(tmp_path):
    path = write_report(tmp_path / "r.json", {"b": float("nan"), "a": 1 + 2j, "c": np.float64(2.5)})
    text = path.read_text()
    data = json.loads(text)
    assert list(data) == ["a", "b", "c"]
    assert data["a"] == {"re": 1.0, "im": 2.0}
    assert data["b"] is None and data["c"] == 2.5
    assert not any(p.name.endswith(".tmp") for p in tmp_path.iterdir())
    assert math.isclose(data["c"], 2.5)
