"""Core data types shared by every module: time axis, plant and fleet
parameters, scenario inputs and clearing results.

Units: fleet capacities are stored per unit in kW, everything exchanged
between modules is in MW (heat, electricity) or currency/MWh (prices).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from datetime import datetime, timedelta

import numpy as np

KW_PER_MW = 1000.0
DEFAULT_PENALTY = 5000.0


class HeatMarketError(Exception):
    """Base class for engine errors."""


class InvariantError(HeatMarketError):
    """A clearing problem that should always be feasible was not."""


class AxisMismatchError(HeatMarketError):
    pass


@dataclass(frozen=True)
class TimeAxis:
    start: datetime
    length: int
    block_length: int = 24

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError("TimeAxis length must be positive")
        if self.block_length <= 0:
            raise ValueError("block_length must be positive")

    def timestamps(self) -> list[datetime]:
        return [self.start + timedelta(hours=k) for k in range(self.length)]

    def blocks(self, block_length: int | None = None) -> list[range]:
        """Consecutive clearing windows; the last one is short if needed."""
        size = block_length or self.block_length
        return [range(b, min(b + size, self.length)) for b in range(0, self.length, size)]

    def month_keys(self) -> list[str]:
        return [ts.strftime("%Y-%m") for ts in self.timestamps()]


@dataclass(frozen=True)
class ChpParams:
    id: str
    rho_e: float
    rho_h: float
    r: float
    f_max: float
    g_h_max: float
    alpha: float


@dataclass(frozen=True)
class ExcessHeatFleet:
    """A group of identical cooling-based excess-heat producers.

    ``a_coef``/``b_coef`` drive the hourly fridge recursion; ``b_scale``
    multiplies the net-extraction term (per-unit kWh) so that a 30 kW pump
    can actually hold the fridge inside the average band.
    """

    id: str
    unit_count: int
    a_coef: float = 0.1
    b_coef: float = 1.0 / 21.0
    t_fridge_min: float = 2.0
    t_fridge_max: float = 8.0
    t_avg_min: float = 4.0
    t_avg_max: float = 5.0
    avg_window: int = 6
    t_indoor: float = 25.0
    g_max_unit: float = 30.0
    ramp_frac: float = 0.25
    t_fridge_init: float = 4.5
    b_scale: float = 4.0

    @property
    def capacity_mw(self) -> float:
        return self.unit_count * self.g_max_unit / KW_PER_MW

    @property
    def ramp_mw(self) -> float:
        return self.ramp_frac * self.capacity_mw

    def hold_extraction_kw(self, temp: float) -> float:
        """Per-unit net extraction (kW) that keeps the fridge at ``temp``."""
        return self.a_coef * (self.t_indoor - temp) / (self.b_coef * self.b_scale)


@dataclass(frozen=True)
class CopModel:
    cop0: float = 3.0
    cop1: float = 0.05
    cop_min: float = 1.5
    cop_max: float = 5.0


@dataclass(frozen=True)
class FleetState:
    """State carried across block seams: fridge temperature and last output (MW).

    ``last_output`` is None at a cold start, which disables the first ramp row.
    """

    fridge_temp: float
    last_output: float | None = None


@dataclass(frozen=True)
class ScenarioInputs:
    axis: TimeAxis
    heat_load: np.ndarray
    elec_price: np.ndarray
    ambient_temp: np.ndarray
    chps: tuple[ChpParams, ...]
    fleets: tuple[ExcessHeatFleet, ...] = ()
    cop: CopModel = field(default_factory=CopModel)
    penalty_unsupplied: float = DEFAULT_PENALTY
    price_scale: float = 1.0
    whole_horizon: bool = False
    ramp_at_start: bool = False
    name: str = "scenario"

    def __post_init__(self):
        for attr in ("heat_load", "elec_price", "ambient_temp"):
            arr = np.asarray(getattr(self, attr), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, attr, arr)
        object.__setattr__(self, "chps", tuple(self.chps))
        object.__setattr__(self, "fleets", tuple(self.fleets))

    def initial_states(self) -> list[FleetState]:
        return [FleetState(f.t_fridge_init, None) for f in self.fleets]

    def with_fleets(self, fleets) -> ScenarioInputs:
        return replace(self, fleets=tuple(fleets))

    def window(self, hours: range) -> dict[str, np.ndarray]:
        sl = slice(hours.start, hours.stop)
        return {
            "heat_load": self.heat_load[sl],
            "elec_price": self.elec_price[sl],
            "ambient_temp": self.ambient_temp[sl],
        }


@dataclass(frozen=True)
class ClearingResult:
    """Hourly schedules of one paradigm over a block or the full horizon.

    Matrices are indexed [participant, hour]; ``fridge_temp`` has one extra
    column holding the temperature at the start of the first hour.
    """

    chp_heat: np.ndarray
    eh_generated: np.ndarray
    eh_wasted: np.ndarray
    eh_elec_load: np.ndarray
    fridge_temp: np.ndarray
    unsupplied: np.ndarray
    market_price: np.ndarray
    marginal_bid_price: np.ndarray
    chp_bids: np.ndarray
    objective: float

    @property
    def hours(self) -> int:
        return self.unsupplied.shape[0]

    def final_states(self) -> list[FleetState]:
        return [
            FleetState(float(self.fridge_temp[e, -1]), float(self.eh_generated[e, -1]))
            for e in range(self.eh_generated.shape[0])
        ]

    @staticmethod
    def concat(parts: list[ClearingResult]) -> ClearingResult:
        temps = [parts[0].fridge_temp] + [p.fridge_temp[:, 1:] for p in parts[1:]]
        return ClearingResult(
            chp_heat=np.hstack([p.chp_heat for p in parts]),
            eh_generated=np.hstack([p.eh_generated for p in parts]),
            eh_wasted=np.hstack([p.eh_wasted for p in parts]),
            eh_elec_load=np.hstack([p.eh_elec_load for p in parts]),
            fridge_temp=np.hstack(temps),
            unsupplied=np.concatenate([p.unsupplied for p in parts]),
            market_price=np.concatenate([p.market_price for p in parts]),
            marginal_bid_price=np.concatenate([p.marginal_bid_price for p in parts]),
            chp_bids=np.hstack([p.chp_bids for p in parts]),
            objective=float(sum(p.objective for p in parts)),
        )

    def balance_residual(self, heat_load: np.ndarray) -> np.ndarray:
        supplied = (self.eh_generated - self.eh_wasted).sum(axis=0) + self.chp_heat.sum(axis=0)
        return supplied - np.asarray(heat_load) + self.unsupplied


def validate_scenario(s: ScenarioInputs) -> list[str]:
    """Return every broken invariant as ``"<field> <rule>"``; empty means valid."""
    from .pricing import chp_bid, cop_series

    out: list[str] = []
    n = s.axis.length
    for attr in ("heat_load", "elec_price", "ambient_temp"):
        arr = getattr(s, attr)
        if arr.shape != (n,):
            out.append(f"{attr} length mismatch")
        elif not np.all(np.isfinite(arr)):
            out.append(f"{attr} contains non-finite values")
    if s.heat_load.shape == (n,) and np.any(s.heat_load < 0):
        out.append("heat_load negative values")
    if s.axis.block_length <= 0:
        out.append("block_length must be positive")

    ids = [c.id for c in s.chps]
    if len(set(ids)) != len(ids):
        out.append("chps duplicate id")
    for c in s.chps:
        if not (c.rho_e > 0 and c.rho_h > 0):
            out.append(f"chp {c.id} efficiencies must be positive")
        if c.r < 0:
            out.append(f"chp {c.id} power-to-heat ratio negative")
        if not c.f_max > 0:
            out.append(f"chp {c.id} f_max must be positive")
        if c.g_h_max < 0:
            out.append(f"chp {c.id} g_h_max negative")
        if c.alpha < 0:
            out.append(f"chp {c.id} fuel price negative")

    if s.chps and s.elec_price.shape == (n,):
        worst = max(float(np.max(chp_bid(c, s.elec_price))) for c in s.chps)
        if not s.penalty_unsupplied > worst:
            out.append("penalty_unsupplied must exceed every CHP bid")

    cm = s.cop
    if cm.cop_min < 1.0:
        out.append("cop cop_min below 1")
    if cm.cop_max < cm.cop_min:
        out.append("cop clamp bounds inverted")
    cop = None
    if s.ambient_temp.shape == (n,) and cm.cop_max >= cm.cop_min:
        cop = cop_series(cm, s.ambient_temp)
        if s.fleets and np.any(cop <= 1.0):
            out.append("cop series must stay above 1")

    for f in s.fleets:
        tag = f"fleet {f.id}"
        if f.unit_count < 1:
            out.append(f"{tag} unit_count must be at least 1")
        if not (f.t_fridge_min <= f.t_avg_min <= f.t_avg_max <= f.t_fridge_max):
            out.append("average band outside hard band")
        if not (f.t_fridge_min <= f.t_fridge_init <= f.t_fridge_max):
            out.append(f"{tag} initial temperature outside hard band")
        if not (0 < f.ramp_frac <= 1):
            out.append(f"{tag} ramp_frac must be in (0, 1]")
        if not f.g_max_unit > 0:
            out.append(f"{tag} g_max_unit must be positive")
        if f.avg_window < 1:
            out.append(f"{tag} avg_window must be at least 1")
        if not (f.a_coef > 0 and f.b_coef > 0 and f.b_scale > 0):
            out.append(f"{tag} thermal coefficients must be positive")
            continue
        if cop is not None and np.all(cop > 1.0) and f.t_avg_min <= f.t_avg_max:
            worst_cop = float(np.min(cop))
            reach = f.g_max_unit * (1.0 - 1.0 / worst_cop)
            if reach < f.hold_extraction_kw(f.t_avg_max) - 1e-9:
                out.append(f"{tag} pump too small to hold the average band")
    if not math.isfinite(s.price_scale) or s.price_scale < 0:
        out.append("price_scale must be a non-negative number")
    return out
