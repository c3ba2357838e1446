"""Scheduling and pricing of excess-heat producers in a district-heating
heat market: joint market clearing versus price-signal self-scheduling."""

from .clearing import clear_market_participation, clear_residual, merit_order_oracle, self_schedule
from .domain import (
    ChpParams,
    ClearingResult,
    CopModel,
    ExcessHeatFleet,
    FleetState,
    ScenarioInputs,
    TimeAxis,
    validate_scenario,
)
from .ingest import load_scenario, save_scenario
from .sim import ComparisonReport, SweepSpec, compute_report, run_paradigm, run_sweep

__version__ = "0.1.0"

__all__ = [
    "ChpParams",
    "ClearingResult",
    "ComparisonReport",
    "CopModel",
    "ExcessHeatFleet",
    "FleetState",
    "ScenarioInputs",
    "SweepSpec",
    "TimeAxis",
    "clear_market_participation",
    "clear_residual",
    "compute_report",
    "load_scenario",
    "merit_order_oracle",
    "run_paradigm",
    "run_sweep",
    "save_scenario",
    "self_schedule",
    "validate_scenario",
]
