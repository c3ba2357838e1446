"""Full-horizon runs of both paradigms, comparison metrics and capacity sweeps."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path

import numpy as np

from .clearing import clear_market_participation, clear_residual, self_schedule
from .domain import (
    AxisMismatchError,
    KW_PER_MW,
    ClearingResult,
    FleetState,
    HeatMarketError,
    InvariantError,
    ScenarioInputs,
)
from .pricing import cop_series, price_signal

log = logging.getLogger(__name__)

MP = "mp"
SS = "ss"
PARADIGMS = (MP, SS)


def _blocks(s: ScenarioInputs) -> list[range]:
    if s.whole_horizon:
        return [range(0, s.axis.length)]
    return s.axis.blocks()


def initial_states(s: ScenarioInputs, first_cop: float) -> list[FleetState]:
    """Cold-start states; with ``ramp_at_start`` the pump is assumed to be
    running at the output that holds the initial fridge temperature."""
    if not s.ramp_at_start:
        return s.initial_states()
    out = []
    for f in s.fleets:
        net_kw = f.hold_extraction_kw(f.t_fridge_init)
        gen_mw = net_kw / (1.0 - 1.0 / first_cop) * f.unit_count / KW_PER_MW
        out.append(FleetState(f.t_fridge_init, min(gen_mw, f.capacity_mw)))
    return out


def run_paradigm(s: ScenarioInputs, paradigm: str, *, dump_lp_dir: str | Path | None = None) -> ClearingResult:
    """Chain the clearing blocks of one paradigm over the whole horizon.

    Fleet states (fridge temperature, last pump output) carry over between
    blocks; each paradigm evolves its own trajectory.
    """
    if paradigm not in PARADIGMS:
        raise ValueError(f"unknown paradigm {paradigm!r}")
    mu = price_signal(s.ambient_temp, s.price_scale)
    cop = cop_series(s.cop, s.ambient_temp)
    states = initial_states(s, cop[0])
    parts = []
    for b, hours in enumerate(_blocks(s)):
        dump = None
        if dump_lp_dir is not None:
            dump = Path(dump_lp_dir) / f"{paradigm}_block{b:04d}.lp"
        try:
            if paradigm == MP:
                res = clear_market_participation(s, hours, states, dump_lp=dump)
            else:
                sl = slice(hours.start, hours.stop)
                scheds = [
                    self_schedule(f, cop[sl], mu[sl], s.elec_price[sl], st)
                    for f, st in zip(s.fleets, states)
                ]
                h = len(hours)
                res = clear_residual(
                    s,
                    hours,
                    np.array([x.gen for x in scheds]).reshape(len(scheds), h),
                    eh_elec_load=np.array([x.load for x in scheds]).reshape(len(scheds), h),
                    fridge_temp=np.array([x.temp for x in scheds]).reshape(len(scheds), h + 1),
                    dump_lp=dump,
                )
        except InvariantError as exc:
            raise InvariantError(f"block {b} (hours {hours.start}-{hours.stop - 1}): {exc}") from exc
        states = res.final_states()
        parts.append(res)
    return ClearingResult.concat(parts)


@dataclass(frozen=True)
class ParadigmSummary:
    total_chp_cost: float
    objective: float
    monthly_chp_cost: dict[str, float]
    monthly_scheduled_eh: dict[str, float]
    monthly_wasted_eh: dict[str, float]
    monthly_avg_price: dict[str, float]
    eh_revenue: float
    total_scheduled_eh: float
    total_wasted_eh: float
    total_unsupplied: float
    mean_price: float


@dataclass(frozen=True)
class ComparisonReport:
    months: list[str]
    mp: ParadigmSummary
    ss: ParadigmSummary
    capacity_mw: float = 0.0
    unit_mismatch_mw: float = 0.0

    @property
    def suboptimality_total(self) -> float:
        return self.ss.total_chp_cost - self.mp.total_chp_cost

    @property
    def suboptimality_objective(self) -> float:
        return self.ss.objective - self.mp.objective

    @property
    def suboptimality_monthly(self) -> dict[str, float]:
        return {m: self.ss.monthly_chp_cost[m] - self.mp.monthly_chp_cost[m] for m in self.months}

    def summary(self, paradigm: str) -> ParadigmSummary:
        return self.mp if paradigm == MP else self.ss


def _monthly(values: np.ndarray, keys: list[str], months: list[str], how: str = "sum") -> dict[str, float]:
    keys_arr = np.asarray(keys)
    out = {}
    for m in months:
        sel = values[keys_arr == m]
        out[m] = float(sel.mean()) if how == "mean" else float(sel.sum())
    return out


def _summarize(res: ClearingResult, keys, months, payments: np.ndarray) -> ParadigmSummary:
    hourly_cost = (res.chp_bids * res.chp_heat).sum(axis=0)
    scheduled = (res.eh_generated - res.eh_wasted).sum(axis=0)
    wasted = res.eh_wasted.sum(axis=0)
    return ParadigmSummary(
        total_chp_cost=float(hourly_cost.sum()),
        objective=res.objective,
        monthly_chp_cost=_monthly(hourly_cost, keys, months),
        monthly_scheduled_eh=_monthly(scheduled, keys, months),
        monthly_wasted_eh=_monthly(wasted, keys, months),
        monthly_avg_price=_monthly(res.market_price, keys, months, "mean"),
        eh_revenue=float(payments.sum()),
        total_scheduled_eh=float(scheduled.sum()),
        total_wasted_eh=float(wasted.sum()),
        total_unsupplied=float(res.unsupplied.sum()),
        mean_price=float(res.market_price.mean()),
    )


def compute_report(mp: ClearingResult, ss: ClearingResult, s: ScenarioInputs, capacity_mw: float = 0.0,
                   unit_mismatch_mw: float = 0.0) -> ComparisonReport:
    """Compare the two paradigms on CHP cost, excess-heat volumes and prices.

    Excess heat is paid the uniform clearing price on scheduled volume under
    market participation, and the published signal on all generated heat
    (wasted or not) under self-scheduling.
    """
    n = s.axis.length
    if mp.hours != n or ss.hours != n:
        raise AxisMismatchError(f"results cover {mp.hours}/{ss.hours} hours, axis has {n}")
    keys = s.axis.month_keys()
    months = sorted(set(keys))
    mu = price_signal(s.ambient_temp, s.price_scale)
    mp_pay = mp.market_price * (mp.eh_generated - mp.eh_wasted).sum(axis=0)
    ss_pay = mu * ss.eh_generated.sum(axis=0)
    return ComparisonReport(
        months=months,
        mp=_summarize(mp, keys, months, mp_pay),
        ss=_summarize(ss, keys, months, ss_pay),
        capacity_mw=capacity_mw,
        unit_mismatch_mw=unit_mismatch_mw,
    )


def units_for_capacity(capacity_mw: float, g_max_unit_kw: float) -> int:
    q = Decimal(repr(capacity_mw)) * 1000 / Decimal(repr(g_max_unit_kw))
    return int(q.quantize(Decimal(1), rounding=ROUND_HALF_UP))


def with_capacity(s: ScenarioInputs, capacity_mw: float) -> tuple[ScenarioInputs, float]:
    """Rescale the scenario's fleets to ``capacity_mw`` of total excess heat.

    The capacity is split across fleets in proportion to their current unit
    counts. Returns the scenario and the installed-minus-requested mismatch.
    """
    if capacity_mw < 0:
        raise ValueError("capacity must be non-negative")
    if capacity_mw == 0 or not s.fleets:
        return s.with_fleets(()), (0.0 if capacity_mw == 0 else -capacity_mw)
    total_units = sum(f.unit_count for f in s.fleets)
    fleets = []
    for f in s.fleets:
        share = capacity_mw * f.unit_count / total_units
        units = units_for_capacity(share, f.g_max_unit)
        if units >= 1:
            fleets.append(replace(f, unit_count=units))
    installed = sum(f.capacity_mw for f in fleets)
    return s.with_fleets(fleets), installed - capacity_mw


@dataclass(frozen=True)
class SweepSpec:
    capacities: list[float]
    base: ScenarioInputs
    jobs: int = 1

    def __post_init__(self):
        if any(c < 0 or not math.isfinite(c) for c in self.capacities):
            raise ValueError("capacities must be finite and non-negative")


@dataclass
class SweepPoint:
    capacity_mw: float
    report: ComparisonReport | None = None
    mp: ClearingResult | None = None
    ss: ClearingResult | None = None
    scenario: ScenarioInputs | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class SweepResult:
    points: list[SweepPoint] = field(default_factory=list)
    diagnostics: dict[str, bool] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(p.ok for p in self.points)

    def reports(self) -> dict[float, ComparisonReport]:
        return {p.capacity_mw: p.report for p in self.points if p.ok}


def run_point(base: ScenarioInputs, capacity_mw: float) -> SweepPoint:
    try:
        s, mismatch = with_capacity(base, capacity_mw)
        mp = run_paradigm(s, MP)
        ss = run_paradigm(s, SS)
        rep = compute_report(mp, ss, s, capacity_mw, mismatch)
        return SweepPoint(capacity_mw, rep, mp, ss, s)
    except HeatMarketError as exc:
        log.warning("capacity %s MW failed: %s", capacity_mw, exc)
        return SweepPoint(capacity_mw, error=str(exc))


def run_sweep(spec: SweepSpec) -> SweepResult:
    """Run both paradigms at every capacity; failures are recorded, not raised."""
    caps = list(spec.capacities)
    if spec.jobs > 1 and len(caps) > 1:
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            points = list(pool.map(run_point, [spec.base] * len(caps), caps))
    else:
        points = [run_point(spec.base, c) for c in caps]
    return SweepResult(points, sweep_diagnostics(points))


def sweep_diagnostics(points: list[SweepPoint], rel_tol: float = 1e-6) -> dict[str, bool]:
    good = sorted((p for p in points if p.ok), key=lambda p: p.capacity_mw)
    reps = [p.report for p in good]
    out = {}
    objs = [r.mp.objective for r in reps]
    out["mp_objective_non_increasing"] = all(
        b <= a + rel_tol * max(1.0, abs(a)) for a, b in zip(objs, objs[1:])
    )
    out["suboptimality_non_negative"] = all(
        r.suboptimality_objective >= -rel_tol * max(1.0, abs(r.mp.objective)) for r in reps
    )
    out["ss_waste_at_least_mp"] = all(r.ss.total_wasted_eh >= r.mp.total_wasted_eh - 1e-6 for r in reps)
    return out
