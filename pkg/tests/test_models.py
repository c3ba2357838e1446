from dataclasses import replace

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from heatmarket.clearing import self_schedule
from heatmarket.domain import ChpParams, ExcessHeatFleet, FleetState
from heatmarket.lp_core import LinearProgram, Status, solve
from heatmarket.models import (
    averaging_windows,
    build_chp_block,
    build_excess_heat_block,
    fridge_step,
    steady_state_temp,
)
from oracles import fleet_oracle


def test_chp_block_bounds():
    lp = LinearProgram()
    chp = ChpParams("c", rho_e=2.2, rho_h=1.0, r=0.45, f_max=600.0, g_h_max=250.0, alpha=10.0)
    blk = build_chp_block(lp, chp, 24)
    lb, ub = lp.bounds
    assert blk.heat.size == 24 and lp.n_vars == 24
    assert np.all(lb == 0) and np.all(ub == 250.0)
    assert lp.matrix("==")[0].shape[0] == 0 and lp.matrix("<=")[0].shape[0] == 0


def test_chp_block_zero_and_fuel_limited():
    lp = LinearProgram()
    build_chp_block(lp, ChpParams("z", 2.2, 1.0, 0.45, 600.0, 0.0, 10.0), 1)
    build_chp_block(lp, ChpParams("f", 2.2, 1.0, 0.45, 400.0, 250.0, 10.0), 1)
    lb, ub = lp.bounds
    assert ub[0] == 0.0 == lb[0]
    assert ub[1] == pytest.approx(201.005, abs=1e-3)


def test_fridge_step_example():
    f = ExcessHeatFleet("x", 1, b_scale=1.0)
    # 21 kW heat at COP 3 -> 7 kW electricity, 14 kW net extraction
    assert fridge_step(f, 5.0, 21.0, 3.0) == pytest.approx(5 + 0.1 * 20 - 14 / 21, abs=1e-12)
    assert fridge_step(f, 5.0, 21.0, 3.0) == pytest.approx(6.3333, abs=1e-4)


def test_fridge_warms_without_cooling():
    f = ExcessHeatFleet("x", 1)
    t1 = fridge_step(f, 4.5, 0.0, 3.0)
    t2 = fridge_step(f, t1, 0.0, 3.0)
    assert t1 == pytest.approx(6.55)
    assert t2 == pytest.approx(6.55 + 0.1 * 18.45)
    assert t2 > f.t_fridge_max


def test_hard_band_forces_cooling_by_second_step():
    f = replace(ExcessHeatFleet("x", 1000), t_avg_min=2.0, t_avg_max=8.0)
    lp = LinearProgram()
    blk = build_excess_heat_block(lp, f, np.full(3, 3.0), FleetState(4.5), gen_cost=1.0, terminal_hold=False)
    sol = solve(lp)
    g = sol.x[blk.gen]
    assert g[0] == pytest.approx(0.0, abs=1e-9)
    assert g[1] > 1e-6
    assert np.all(sol.x[blk.temp] <= 8.0 + 1e-9)


def _first_output_range(f, last_mw):
    out = []
    for sign in (1.0, -1.0):
        lp = LinearProgram()
        blk = build_excess_heat_block(lp, f, np.full(1, 3.0), FleetState(5.0, last_mw),
                                      gen_cost=np.array([sign]), terminal_hold=False)
        sol = solve(lp)
        out.append(sol.x[blk.gen][0])
    return out


def test_ramp_window_after_full_output():
    wide = ExcessHeatFleet("x", 1, t_fridge_min=-100, t_avg_min=-100, t_avg_max=100, t_fridge_max=100,
                           t_fridge_init=5.0)
    lo, hi = _first_output_range(wide, 0.030)
    assert lo * 1000 == pytest.approx(22.5)
    assert hi * 1000 == pytest.approx(30.0)


def test_averaging_windows_partition():
    assert averaging_windows(24, 6) == [range(0, 6), range(6, 12), range(12, 18), range(18, 24)]
    assert averaging_windows(10, 6) == [range(0, 6), range(6, 10)]
    covered = sorted(k for w in averaging_windows(23, 6) for k in w)
    assert covered == list(range(23))


def test_rejects_cop_at_or_below_one(fleet):
    with pytest.raises(ValueError):
        build_excess_heat_block(LinearProgram(), fleet, np.array([3.0, 1.0]), FleetState(4.5))


def test_steady_state_is_fixed_point(fleet):
    g, cop = 16.0, 3.2
    t = 4.5
    for _ in range(500):
        t = fridge_step(fleet, t, g, cop)
    assert t == pytest.approx(steady_state_temp(fleet, g, cop), abs=1e-10)
    assert fridge_step(fleet, t, g, cop) == pytest.approx(t, abs=1e-12)


def test_energy_consistency(fleet):
    cop = np.linspace(2.2, 4.5, 24)
    mu = np.full(24, 100.0)
    sched = self_schedule(fleet, cop, mu, np.full(24, 30.0), FleetState(4.5))
    np.testing.assert_allclose(sched.gen, cop * sched.load, atol=1e-9)
    assert np.all(sched.gen - sched.load >= -1e-12)


@pytest.mark.parametrize("k", [2, 3, 7])
def test_scale_equivariance(fleet, k):
    rng = np.random.default_rng(k)
    cop = rng.uniform(2.5, 4.0, 24)
    mu = rng.uniform(0, 200, 24)
    lam = rng.uniform(10, 80, 24)
    base = self_schedule(fleet, cop, mu, lam, FleetState(4.5))
    big = self_schedule(replace(fleet, unit_count=fleet.unit_count * k), cop, mu, lam, FleetState(4.5))
    np.testing.assert_allclose(big.gen, k * base.gen, rtol=1e-6, atol=1e-9)
    np.testing.assert_allclose(big.load, k * base.load, rtol=1e-6, atol=1e-9)
    np.testing.assert_allclose(big.temp, base.temp, atol=1e-6)


def test_block_matches_reduced_form_oracle(fleet):
    rng = np.random.default_rng(11)
    cop = rng.uniform(2.5, 4.0, 24)
    price_kw = rng.uniform(-1, 1, 24)
    _, _, oracle_obj = fleet_oracle(fleet, cop, 4.5, cost_per_kw=price_kw)
    lp = LinearProgram()
    # per-unit kW cost -> aggregate MW cost: multiply by 1000 / unit_count
    build_excess_heat_block(lp, fleet, cop, FleetState(4.5), gen_cost=price_kw * 1000 / fleet.unit_count)
    sol = solve(lp)
    assert sol.status is Status.OPTIMAL
    assert sol.objective == pytest.approx(oracle_obj, rel=1e-7, abs=1e-7)


@settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(
    st.lists(st.floats(0, 300), min_size=24, max_size=24),
    st.lists(st.floats(0, 120), min_size=24, max_size=24),
    st.floats(-10, 25),
    st.floats(4.0, 5.0),
)
def test_bands_hold_for_any_prices(mu, lam, ambient, t0):
    f = ExcessHeatFleet("f", unit_count=500)
    cop = np.clip(3.0 + 0.05 * (ambient + np.arange(24) * 0.2), 1.5, 5.0)
    sched = self_schedule(f, cop, np.array(mu), np.array(lam), FleetState(t0))
    temps = sched.temp[1:]
    assert np.all(temps >= 2.0 - 1e-6) and np.all(temps <= 8.0 + 1e-6)
    for w in averaging_windows(24, 6):
        assert 4.0 - 1e-6 <= temps[list(w)].mean() <= 5.0 + 1e-6
    assert np.all(np.abs(np.diff(sched.gen)) <= f.ramp_mw + 1e-6)
    np.testing.assert_allclose(sched.gen, cop * sched.load, atol=1e-6)
