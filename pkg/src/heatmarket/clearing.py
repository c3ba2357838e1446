"""Market participation and self-scheduling clearing for one block of hours."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .domain import ClearingResult, ExcessHeatFleet, FleetState, InvariantError, ScenarioInputs
from .lp_core import LinearProgram, solve, write_lp_file
from .models import build_chp_block, build_excess_heat_block
from .pricing import chp_bid, cop_series, eh_bid

# Lexicographic tie-breaks (currency/MWh). Kept well above the solver's dual
# tolerance so they are honoured, and far below any bid so costs are unaffected.
WASTE_TIEBREAK = 1e-6
SELF_SCHEDULE_TIEBREAK = 1e-6
DISPATCH_TOL = 1e-7


def _snap_price(dual: np.ndarray) -> np.ndarray:
    # a wasting hour has dual -WASTE_TIEBREAK; report it as the zero bid it stands for
    return np.where(np.abs(dual) <= 2 * WASTE_TIEBREAK, 0.0, dual)


@dataclass(frozen=True)
class FleetSchedule:
    gen: np.ndarray
    load: np.ndarray
    temp: np.ndarray  # includes the starting temperature

    @property
    def final_state(self) -> FleetState:
        return FleetState(float(self.temp[-1]), float(self.gen[-1]))


def marginal_bid_price(bids, dispatch, caps, tol: float = DISPATCH_TOL) -> float:
    """Bid of the most expensive scheduled participant in one hour.

    Participants strictly between zero and their cap are preferred; when all
    scheduled participants sit on their cap the highest scheduled bid is used.
    Returns 0 if nothing is scheduled.
    """
    bids, dispatch, caps = (np.asarray(v, dtype=float) for v in (bids, dispatch, caps))
    on = dispatch > tol
    if not on.any():
        return 0.0
    interior = on & (dispatch < caps - tol)
    pool = interior if interior.any() else on
    return float(bids[pool].max())


def _hourly_marginal(chp_bids, chp_heat, caps, eh_scheduled, unsupplied, penalty):
    h = unsupplied.size
    out = np.zeros(h)
    for t in range(h):
        bids = np.r_[chp_bids[:, t], eh_bid(), penalty]
        disp = np.r_[chp_heat[:, t], eh_scheduled[t], unsupplied[t]]
        cap = np.r_[caps, np.inf, np.inf]
        out[t] = marginal_bid_price(bids, disp, cap)
    return out


def _block_bids(s: ScenarioInputs, hours: range) -> np.ndarray:
    lam = s.elec_price[hours.start:hours.stop]
    return np.array([chp_bid(c, lam) for c in s.chps]).reshape(len(s.chps), len(hours))


def _clearing_objective(chp_bids, chp_heat, unsupplied, penalty) -> float:
    # excess-heat bids are zero, so only CHP cost and curtailment remain
    return float(np.sum(chp_bids * chp_heat) + penalty * unsupplied.sum())


def clear_market_participation(
    s: ScenarioInputs,
    hours: range,
    states: list[FleetState] | None = None,
    *,
    terminal_hold: bool = True,
    dump_lp: str | Path | None = None,
) -> ClearingResult:
    """Joint clearing of CHPs and excess-heat fleets over ``hours``.

    Fleets bid zero and expose their full intertemporal flexibility. The
    hourly price is the dual of the heat balance.
    """
    states = list(states) if states is not None else s.initial_states()
    h = len(hours)
    sl = slice(hours.start, hours.stop)
    load = s.heat_load[sl]
    bids = _block_bids(s, hours)
    cop = cop_series(s.cop, s.ambient_temp[sl])

    lp = LinearProgram(f"mp_{hours.start}")
    chp_blocks = [build_chp_block(lp, c, h, bids[i]) for i, c in enumerate(s.chps)]
    fleet_blocks, waste = [], []
    for f, st in zip(s.fleets, states):
        fb = build_excess_heat_block(lp, f, cop, st, gen_cost=eh_bid(), terminal_hold=terminal_hold)
        w = lp.add_variables(h, 0.0, np.inf, WASTE_TIEBREAK - eh_bid(), name=f"eh_waste_{f.id}")
        r = np.arange(h)
        lp.add_rows("<=", np.r_[r, r], np.r_[w, fb.gen], np.r_[np.ones(h), -np.ones(h)], np.zeros(h))
        fleet_blocks.append(fb)
        waste.append(w)
    unsup = lp.add_variables(h, 0.0, np.inf, s.penalty_unsupplied, name="unsupplied")

    rows, cols, vals = [np.arange(h)], [unsup], [np.ones(h)]
    for cb in chp_blocks:
        rows.append(np.arange(h)); cols.append(cb.heat); vals.append(np.ones(h))
    for fb, w in zip(fleet_blocks, waste):
        rows += [np.arange(h), np.arange(h)]
        cols += [fb.gen, w]
        vals += [np.ones(h), -np.ones(h)]
    lp.add_rows("==", np.concatenate(rows), np.concatenate(cols), np.concatenate(vals), load, tag="balance")

    if dump_lp is not None:
        write_lp_file(lp, dump_lp)
    sol = solve(lp)
    if not sol.optimal:
        raise InvariantError(f"market clearing for hours {hours.start}-{hours.stop - 1} is {sol.status.value}")

    x = sol.x
    chp_heat = np.array([x[cb.heat] for cb in chp_blocks]).reshape(len(chp_blocks), h)
    gen = np.array([x[fb.gen] for fb in fleet_blocks]).reshape(len(fleet_blocks), h)
    eload = np.array([x[fb.load] for fb in fleet_blocks]).reshape(len(fleet_blocks), h)
    wasted = np.array([x[w] for w in waste]).reshape(len(waste), h)
    wasted = np.clip(np.minimum(wasted, gen), 0.0, None)
    temps = np.array([np.r_[fb.temp0, x[fb.temp]] for fb in fleet_blocks]).reshape(len(fleet_blocks), h + 1)
    u = x[unsup]
    caps = np.array([cb.cap for cb in chp_blocks])
    return ClearingResult(
        chp_heat=chp_heat,
        eh_generated=gen,
        eh_wasted=wasted,
        eh_elec_load=eload,
        fridge_temp=temps,
        unsupplied=u,
        market_price=_snap_price(sol.duals["balance"]),
        marginal_bid_price=_hourly_marginal(bids, chp_heat, caps, (gen - wasted).sum(axis=0), u, s.penalty_unsupplied),
        chp_bids=bids,
        objective=_clearing_objective(bids, chp_heat, u, s.penalty_unsupplied),
    )


def self_schedule(
    fleet: ExcessHeatFleet,
    cop,
    mu,
    elec_price,
    state: FleetState,
    *,
    terminal_hold: bool = True,
    dump_lp: str | Path | None = None,
) -> FleetSchedule:
    """A fleet's private cost-minimizing schedule against the price signal ``mu``.

    Minimizes electricity cost minus heat revenue over the block. A tiny
    per-MWh charge on output selects the least-cooling schedule when both
    prices vanish.
    """
    cop = np.asarray(cop, dtype=float)
    lp = LinearProgram(f"ss_{fleet.id}")
    fb = build_excess_heat_block(
        lp,
        fleet,
        cop,
        state,
        gen_cost=-np.asarray(mu, dtype=float) + SELF_SCHEDULE_TIEBREAK,
        load_cost=np.asarray(elec_price, dtype=float),
        terminal_hold=terminal_hold,
    )
    if dump_lp is not None:
        write_lp_file(lp, dump_lp)
    sol = solve(lp)
    if not sol.optimal:
        raise InvariantError(f"self-scheduling of fleet {fleet.id} is {sol.status.value}")
    return FleetSchedule(sol.x[fb.gen], sol.x[fb.load], np.r_[fb.temp0, sol.x[fb.temp]])


def clear_residual(
    s: ScenarioInputs,
    hours: range,
    fixed_eh,
    *,
    eh_elec_load=None,
    fridge_temp=None,
    dump_lp: str | Path | None = None,
) -> ClearingResult:
    """CHP-only clearing with the excess-heat output fixed as a must-take input.

    Waste remains a decision so surplus excess heat can be vented. Optional
    ``eh_elec_load``/``fridge_temp`` are copied into the result for reporting.
    """
    h = len(hours)
    sl = slice(hours.start, hours.stop)
    load = s.heat_load[sl]
    fixed = np.asarray(fixed_eh, dtype=float).reshape(-1, h)
    n_e = fixed.shape[0]
    bids = _block_bids(s, hours)

    lp = LinearProgram(f"residual_{hours.start}")
    chp_blocks = [build_chp_block(lp, c, h, bids[i]) for i, c in enumerate(s.chps)]
    waste = [lp.add_variables(h, 0.0, fixed[e], WASTE_TIEBREAK, name=f"eh_waste_{e}") for e in range(n_e)]
    unsup = lp.add_variables(h, 0.0, np.inf, s.penalty_unsupplied, name="unsupplied")
    rows, cols, vals = [np.arange(h)], [unsup], [np.ones(h)]
    for cb in chp_blocks:
        rows.append(np.arange(h)); cols.append(cb.heat); vals.append(np.ones(h))
    for w in waste:
        rows.append(np.arange(h)); cols.append(w); vals.append(-np.ones(h))
    lp.add_rows("==", np.concatenate(rows), np.concatenate(cols), np.concatenate(vals), load - fixed.sum(axis=0), tag="balance")

    if dump_lp is not None:
        write_lp_file(lp, dump_lp)
    sol = solve(lp)
    if not sol.optimal:
        raise InvariantError(f"residual clearing for hours {hours.start}-{hours.stop - 1} is {sol.status.value}")

    x = sol.x
    chp_heat = np.array([x[cb.heat] for cb in chp_blocks]).reshape(len(chp_blocks), h)
    wasted = np.array([x[w] for w in waste]).reshape(n_e, h)
    wasted = np.clip(np.minimum(wasted, fixed), 0.0, None)
    u = x[unsup]
    caps = np.array([cb.cap for cb in chp_blocks])
    eload = np.zeros_like(fixed) if eh_elec_load is None else np.asarray(eh_elec_load, dtype=float).reshape(n_e, h)
    temps = np.full((n_e, h + 1), np.nan) if fridge_temp is None else np.asarray(fridge_temp, dtype=float).reshape(n_e, h + 1)
    return ClearingResult(
        chp_heat=chp_heat,
        eh_generated=fixed.copy(),
        eh_wasted=wasted,
        eh_elec_load=eload,
        fridge_temp=temps,
        unsupplied=u,
        market_price=_snap_price(sol.duals["balance"]),
        marginal_bid_price=_hourly_marginal(bids, chp_heat, caps, (fixed - wasted).sum(axis=0), u, s.penalty_unsupplied),
        chp_bids=bids,
        objective=_clearing_objective(bids, chp_heat, u, s.penalty_unsupplied),
    )


def merit_order_oracle(bids, load: float, penalty: float):
    """Greedy single-hour dispatch in ascending bid order.

    ``bids`` is a sequence of ``(price, cap)``. Returns the dispatch in input
    order, the price set by the last scheduled unit (``penalty`` if load is
    curtailed, 0 for zero load) and the total cost including curtailment.
    """
    bids = list(bids)
    dispatch = [0.0] * len(bids)
    remaining = float(load)
    price = 0.0
    cost = 0.0
    for k in sorted(range(len(bids)), key=lambda j: bids[j][0]):
        if remaining <= 0:
            break
        p, cap = bids[k]
        take = min(cap, remaining)
        if take <= 0:
            continue
        dispatch[k] = take
        remaining -= take
        cost += p * take
        price = p
    if remaining > 0:
        cost += penalty * remaining
        price = penalty
    return tuple(dispatch), price, cost
