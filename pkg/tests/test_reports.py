import csv
import io
import json
import math

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from ricciforge.reports import CSV_COLUMNS, VerificationReport, dumps_csv, dumps_json, loads_json

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


def _report(margin=0.5, **kw):
    return VerificationReport("x.y", {"k": 2, "lambda": 128.0}, 10, margin, 1e-6, **kw)


@given(finite, finite)
def test_json_round_trip_is_exact(margin, tol):
    r = VerificationReport("c", {"k": 1, "lambda": None}, 3, margin, tol, value=[margin, 1])
    back = loads_json(dumps_json([r]))[0]
    assert back.worst_margin == margin and back.tolerance == tol
    assert back.as_dict() == r.as_dict()


def test_passed_follows_margin():
    assert _report(0.0).passed and not _report(-1e-300).passed


def test_json_handles_numpy_and_non_finite():
    r = _report(value=np.array([1.0, np.nan]), extra={"n": np.int64(3), "inf": math.inf})
    data = json.loads(dumps_json([r]))
    assert data[0]["value"] == [1.0, None]
    assert data[0]["extra"] == {"n": 3, "inf": None}
    assert dumps_json([r]).endswith("\n")


def test_csv_columns_and_values():
    text = dumps_csv([_report(), _report(-2.0, seed=7)])
    rows = list(csv.reader(io.StringIO(text)))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert rows[1][:3] == ["x.y", "2", "128"] and rows[1][6] == "true"
    assert rows[2][6] == "false" and rows[2][8] == "7"
    assert "\r" not in text
