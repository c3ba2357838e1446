"""LP variable blocks for CHP plants and excess-heat fleets.

Each builder appends variables and rows to an existing
:class:`~heatmarket.lp_core.LinearProgram` and returns index handles, so the
clearing code can wire them into objectives and balance rows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import KW_PER_MW, ChpParams, ExcessHeatFleet, FleetState
from .lp_core import LinearProgram
from .pricing import chp_heat_cap


@dataclass(frozen=True)
class ChpBlock:
    chp: ChpParams
    heat: np.ndarray
    cap: float


@dataclass(frozen=True)
class FleetBlock:
    fleet: ExcessHeatFleet
    gen: np.ndarray
    load: np.ndarray
    temp: np.ndarray  # fridge temperature at the end of each hour
    temp0: float


def build_chp_block(lp: LinearProgram, chp: ChpParams, hours: int, cost=0.0) -> ChpBlock:
    if hours < 1:
        raise ValueError("hours must be at least 1")
    cap = chp_heat_cap(chp)
    heat = lp.add_variables(hours, 0.0, cap, cost, name=f"chp_{chp.id}")
    return ChpBlock(chp, heat, cap)


def averaging_windows(hours: int, window: int) -> list[range]:
    """Block-aligned averaging periods; the last one is truncated."""
    return [range(k, min(k + window, hours)) for k in range(0, hours, window)]


def fridge_step(fleet: ExcessHeatFleet, temp: float, gen_kw: float, cop: float) -> float:
    """One hour of the per-unit fridge recursion (``gen_kw`` is pump heat output)."""
    net = gen_kw - gen_kw / cop
    return temp + fleet.a_coef * (fleet.t_indoor - temp) - fleet.b_coef * fleet.b_scale * net


def steady_state_temp(fleet: ExcessHeatFleet, gen_kw: float, cop: float) -> float:
    net = gen_kw * (1.0 - 1.0 / cop)
    return fleet.t_indoor - fleet.b_coef * fleet.b_scale / fleet.a_coef * net


def build_excess_heat_block(
    lp: LinearProgram,
    fleet: ExcessHeatFleet,
    cop,
    state: FleetState,
    *,
    gen_cost=0.0,
    load_cost=0.0,
    terminal_hold: bool = True,
) -> FleetBlock:
    """Heat-pump output, electricity draw and fridge temperature of one fleet.

    Aggregate variables are in MW; the temperature recursion is written per
    unit, so the extraction term is divided by ``unit_count`` and converted
    to kW. With ``terminal_hold`` the block must end inside the average band
    with a net extraction that can hold it there, which keeps the next block
    feasible.
    """
    cop = np.asarray(cop, dtype=float)
    h = cop.size
    if h < 1:
        raise ValueError("cop series must cover at least one hour")
    if np.any(cop <= 1.0):
        raise ValueError("COP must exceed 1 for a cooling heat pump to deliver net extraction")
    n = fleet.unit_count
    cap = fleet.capacity_mw
    tag = fleet.id

    gen = lp.add_variables(h, 0.0, cap, gen_cost, name=f"eh_gen_{tag}")
    load = lp.add_variables(h, 0.0, np.inf, load_cost, name=f"eh_load_{tag}")
    t_lo = np.full(h, fleet.t_fridge_min)
    t_hi = np.full(h, fleet.t_fridge_max)
    if terminal_hold:
        t_lo[-1] = max(t_lo[-1], fleet.t_avg_min)
        t_hi[-1] = min(t_hi[-1], fleet.t_avg_max)
    temp = lp.add_variables(h, t_lo, t_hi, 0.0, name=f"fridge_{tag}")
    hrs = np.arange(h)

    # heat output = COP * electricity draw
    lp.add_rows("==", np.r_[hrs, hrs], np.r_[gen, load], np.r_[np.ones(h), -cop], np.zeros(h))

    # T[t+1] - (1-A) T[t] + k (G[t] - L[t]) = A T_in
    a = fleet.a_coef
    k = fleet.b_coef * fleet.b_scale * KW_PER_MW / n
    rhs = np.full(h, a * fleet.t_indoor)
    rhs[0] += (1.0 - a) * state.fridge_temp
    rows = [hrs, hrs, hrs, hrs[1:]]
    cols = [temp, gen, load, temp[:-1]]
    vals = [np.ones(h), np.full(h, k), np.full(h, -k), np.full(h - 1, -(1.0 - a))]
    lp.add_rows("==", np.concatenate(rows), np.concatenate(cols), np.concatenate(vals), rhs)

    windows = averaging_windows(h, fleet.avg_window)
    w_rows = np.concatenate([np.full(len(w), j) for j, w in enumerate(windows)])
    w_cols = np.concatenate([temp[list(w)] for w in windows])
    sizes = np.array([len(w) for w in windows], dtype=float)
    lp.add_rows(">=", w_rows, w_cols, np.ones(w_cols.size), fleet.t_avg_min * sizes)
    lp.add_rows("<=", w_rows, w_cols, np.ones(w_cols.size), fleet.t_avg_max * sizes)

    ramp = fleet.ramp_mw
    if h > 1:
        r = np.arange(h - 1)
        rr, cc = np.r_[r, r], np.r_[gen[1:], gen[:-1]]
        vv = np.r_[np.ones(h - 1), -np.ones(h - 1)]
        lp.add_rows("<=", rr, cc, vv, np.full(h - 1, ramp))
        lp.add_rows(">=", rr, cc, vv, np.full(h - 1, -ramp))
    if state.last_output is not None:
        lp.add_row("<=", {gen[0]: 1.0}, state.last_output + ramp)
        lp.add_row(">=", {gen[0]: 1.0}, state.last_output - ramp)

    if terminal_hold:
        scale = n / KW_PER_MW
        lo = fleet.hold_extraction_kw(fleet.t_avg_max) * scale
        hi = fleet.hold_extraction_kw(fleet.t_avg_min) * scale
        lp.add_row(">=", {gen[-1]: 1.0, load[-1]: -1.0}, lo)
        lp.add_row("<=", {gen[-1]: 1.0, load[-1]: -1.0}, hi)

    return FleetBlock(fleet, gen, load, temp, state.fridge_temp)
