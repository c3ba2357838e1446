from dataclasses import replace
from datetime import datetime

import numpy as np
import pytest

from conftest import flat_chp, make_scenario
from heatmarket.domain import ExcessHeatFleet, TimeAxis, validate_scenario
from heatmarket.synthetic import DEFAULT_CHPS, copenhagen_like_year, default_fleet


def test_default_scenario_is_valid():
    assert validate_scenario(copenhagen_like_year()) == []


def test_short_heat_load():
    s = make_scenario(np.ones(24), chps=[flat_chp("a", 10, 50)])
    s = replace(s, heat_load=np.ones(23))
    assert "heat_load length mismatch" in validate_scenario(s)


def test_average_band_outside_hard_band():
    f = ExcessHeatFleet("f", 10, t_avg_min=9.0, t_avg_max=9.5)
    s = make_scenario(np.ones(24), chps=[flat_chp("a", 10, 50)], fleets=[f])
    assert "average band outside hard band" in validate_scenario(s)


def test_penalty_must_dominate_bids():
    s = make_scenario(np.ones(4), chps=[flat_chp("a", 6000, 50)])
    assert any("penalty" in m for m in validate_scenario(s))


def test_undersized_pump_flagged():
    f = ExcessHeatFleet("f", 10, b_scale=1.0)
    s = make_scenario(np.ones(4), chps=[flat_chp("a", 10, 50)], fleets=[f])
    assert any("pump too small" in m for m in validate_scenario(s))


def test_hold_extraction():
    f = ExcessHeatFleet("f", 1)
    # 0.1 * (25 - 4.5) / (4 / 21)
    assert f.hold_extraction_kw(4.5) == pytest.approx(10.7625)


def test_fleet_capacity():
    f = default_fleet(300)
    assert f.unit_count == 10000
    assert f.capacity_mw == pytest.approx(300.0)
    assert f.ramp_mw == pytest.approx(75.0)


def test_axis_blocks_and_months():
    ax = TimeAxis(datetime(2019, 1, 31, 20), 30, 24)
    assert ax.blocks() == [range(0, 24), range(24, 30)]
    keys = ax.month_keys()
    assert keys[3] == "2019-01" and keys[4] == "2019-02"


def test_axis_rejects_empty():
    with pytest.raises(ValueError):
        TimeAxis(datetime(2019, 1, 1), 0)


def test_scenario_arrays_read_only():
    s = make_scenario(np.ones(3), chps=DEFAULT_CHPS[:1])
    with pytest.raises(ValueError):
        s.heat_load[0] = 5.0
