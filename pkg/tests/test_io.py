import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from figchaos.errors import IngestError
from figchaos.io import format_value, ingest_series, read_json, save_series, write_csv, write_json
from figchaos.process import FigarchParams, SimConfig, TimeSeries, simulate


def test_two_row_file(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text("x\n1.0\n2.0\n")
    np.testing.assert_array_equal(ingest_series(p).values, [1.0, 2.0])


def test_nan_row_named(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text("x\n1.0\nNaN\n3\n")
    with pytest.raises(IngestError, match="rows 3"):
        ingest_series(p)


def test_missing_and_text_cells(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text("a,b\n1,2\n3,\n5,abc\n")
    np.testing.assert_array_equal(ingest_series(p, "a").values, [1, 3, 5])
    with pytest.raises(IngestError, match="rows 3, 4"):
        ingest_series(p, "b")
    with pytest.raises(IngestError):
        ingest_series(p, "c")
    with pytest.raises(IngestError):
        ingest_series(p, 5)


def test_empty_files(tmp_path):
    p = tmp_path / "e.csv"
    p.write_text("")
    with pytest.raises(IngestError, match="empty"):
        ingest_series(p)
    p.write_text("x\n")
    with pytest.raises(IngestError, match="no data"):
        ingest_series(p)
    with pytest.raises(IngestError):
        ingest_series(tmp_path / "missing.csv")


def test_round_trip_simulation(tmp_path):
    ts = simulate(FigarchParams.figarch11(0.35), SimConfig(n_points=500, seed=2))
    p = save_series(tmp_path / "s.csv", ts)
    assert p.read_text().splitlines()[0] == "u,sigma"
    back = ingest_series(p, "u", volatility="sigma")
    assert back == ts


@given(st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=1, max_size=50))
def test_round_trip_exact(tmp_path_factory, values):
    p = tmp_path_factory.mktemp("rt") / "s.csv"
    save_series(p, TimeSeries(values))
    np.testing.assert_array_equal(ingest_series(p).values, values)


def test_json_and_csv(tmp_path):
    write_json(tmp_path / "a.json", {"x": np.float64(1.5), "n": np.int64(3), "v": np.array([1, 2]), "bad": float("nan")})
    assert read_json(tmp_path / "a.json") == {"x": 1.5, "n": 3, "v": [1, 2], "bad": None}
    write_csv(tmp_path / "t.csv", ["a", "b"], [[1, None], [0.1, True]])
    assert (tmp_path / "t.csv").read_text() == "a,b\n1,\n0.1,true\n"
    assert not list(tmp_path.glob(".*tmp"))


def test_format_value():
    assert format_value(0.1 + 0.2) == "0.30000000000000004"
    assert format_value(float("nan")) == "nan"
    assert format_value(np.bool_(False)) == "false"
