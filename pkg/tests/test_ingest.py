from datetime import datetime, timedelta

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heatmarket.ingest import (
    ConfigError,
    GapError,
    NonMonotonicError,
    NoOverlapError,
    ParseError,
    align,
    load_scenario,
    load_series,
    save_scenario,
    series_from_array,
    write_series,
)

T0 = datetime(2019, 1, 1)


def _csv(tmp_path, stamps, values, name="s.csv"):
    p = tmp_path / name
    lines = ["timestamp,value"] + [f"{t:%Y-%m-%dT%H:%M},{v}" for t, v in zip(stamps, values)]
    p.write_text("\n".join(lines) + "\n")
    return p


def test_valid_day(tmp_path):
    stamps = [T0 + timedelta(hours=k) for k in range(24)]
    s = load_series(_csv(tmp_path, stamps, range(24)))
    assert len(s) == 24 and s.values[5] == 5.0


def test_gap_named(tmp_path):
    stamps = [T0 + timedelta(hours=k) for k in range(24) if k != 3]
    with pytest.raises(GapError, match="2019-01-01 03:00"):
        load_series(_csv(tmp_path, stamps, range(23)))


def test_duplicate_hour(tmp_path):
    stamps = [T0 + timedelta(hours=k) for k in range(5)] + [T0 + timedelta(hours=4)]
    with pytest.raises(NonMonotonicError):
        load_series(_csv(tmp_path, stamps, range(6)))


@pytest.mark.parametrize("body", ["time,v\n", "timestamp,value\n2019-01-01T00:00,abc\n",
                                  "timestamp,value\n2019-01-01T00:30,1\n", "timestamp,value\n"])
def test_parse_errors(tmp_path, body):
    p = tmp_path / "bad.csv"
    p.write_text(body)
    with pytest.raises(ParseError):
        load_series(p)


def test_full_year_alignment():
    ser = [series_from_array(T0, np.zeros(8760)) for _ in range(3)]
    axis, arrays = align(ser)
    assert axis.length == 8760 and all(a.size == 8760 for a in arrays)


def test_partial_overlap_is_intersection():
    a_end, b_start = datetime(2019, 7, 1), datetime(2019, 4, 1)
    a = series_from_array(T0, np.arange((a_end - T0) // timedelta(hours=1)))
    b = series_from_array(b_start, np.arange((datetime(2020, 1, 1) - b_start) // timedelta(hours=1)))
    axis, (xa, xb) = align([a, b])
    assert axis.start == b_start
    assert axis.timestamps()[-1] == datetime(2019, 6, 30, 23)
    assert axis.length == (a_end - b_start) // timedelta(hours=1)
    assert xa[0] == (b_start - T0) // timedelta(hours=1) and xb[0] == 0


def test_disjoint_series():
    with pytest.raises(NoOverlapError):
        align([series_from_array(T0, [1, 2]), series_from_array(T0 + timedelta(days=1), [1, 2])])


def test_align_idempotent():
    a = series_from_array(T0, np.arange(50.0))
    b = series_from_array(T0 + timedelta(hours=10), np.arange(20.0))
    axis, arrays = align([a, b])
    again = [series_from_array(axis.start, x) for x in arrays]
    axis2, arrays2 = align(again)
    assert axis2 == axis
    for x, y in zip(arrays, arrays2):
        np.testing.assert_array_equal(x, y)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=1, max_size=60))
def test_series_round_trip(tmp_path_factory, values):
    p = tmp_path_factory.mktemp("rt") / "s.csv"
    s = series_from_array(T0, values)
    assert load_series(write_series(s, p)) == s


def test_scenario_round_trip(tmp_path, demo):
    path = save_scenario(demo, tmp_path / "demo.toml")
    back = load_scenario(path)
    assert back.chps == demo.chps and back.fleets == demo.fleets and back.cop == demo.cop
    assert back.axis == demo.axis
    for key in ("heat_load", "elec_price", "ambient_temp"):
        np.testing.assert_array_equal(getattr(back, key), getattr(demo, key))


def test_unknown_key_rejected(tmp_path, demo):
    path = save_scenario(demo, tmp_path / "demo.toml")
    path.write_text(path.read_text() + "\n[[fleet]]\nid = \"x\"\nunit_count = 1\nbogus = 3\n")
    with pytest.raises(ConfigError, match="bogus"):
        load_scenario(path)


def test_missing_csv(tmp_path, demo):
    path = save_scenario(demo, tmp_path / "demo.toml")
    (tmp_path / "demo_heat_load.csv").unlink()
    with pytest.raises(FileNotFoundError):
        load_scenario(path)
