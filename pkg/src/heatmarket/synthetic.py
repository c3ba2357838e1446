"""Synthetic scenarios for the demo, the test-suite and the trend checks.

None of these series are measured data. They are smooth seasonal/diurnal
shapes with seeded noise, sized roughly like a large city network
(300-2500 MW heat load).
"""

from __future__ import annotations

from datetime import datetime

import numpy as np

from .domain import ChpParams, CopModel, ExcessHeatFleet, ScenarioInputs, TimeAxis

# fuel-price / efficiency mix giving a spread of heat bids at typical power prices
DEFAULT_CHPS = (
    ChpParams("waste_incineration", rho_e=4.0, rho_h=1.05, r=0.45, f_max=600.0, g_h_max=350.0, alpha=2.0),
    ChpParams("biomass_a", rho_e=2.4, rho_h=1.10, r=0.45, f_max=1300.0, g_h_max=600.0, alpha=18.0),
    ChpParams("biomass_b", rho_e=2.5, rho_h=1.15, r=0.45, f_max=900.0, g_h_max=400.0, alpha=22.0),
    ChpParams("coal", rho_e=2.3, rho_h=1.10, r=0.45, f_max=1200.0, g_h_max=550.0, alpha=12.0),
    ChpParams("gas_cc", rho_e=2.0, rho_h=1.05, r=0.45, f_max=1000.0, g_h_max=500.0, alpha=30.0),
    ChpParams("gas_peak", rho_e=2.6, rho_h=1.10, r=0.45, f_max=700.0, g_h_max=300.0, alpha=40.0),
    ChpParams("oil_boiler_chp", rho_e=2.8, rho_h=1.20, r=0.45, f_max=500.0, g_h_max=200.0, alpha=55.0),
)


def default_fleet(capacity_mw: float = 300.0, fleet_id: str = "supermarkets") -> ExcessHeatFleet:
    units = max(1, round(capacity_mw * 1000.0 / 30.0))
    return ExcessHeatFleet(fleet_id, unit_count=units)


def _year_fraction(hours: np.ndarray, start: datetime) -> np.ndarray:
    doy0 = start.timetuple().tm_yday - 1 + start.hour / 24.0
    return (doy0 + hours / 24.0) / 365.0


def seasonal_series(start: datetime, length: int, seed: int = 0) -> dict[str, np.ndarray]:
    """Heat load (MW), power price (currency/MWh) and ambient temperature (°C)."""
    rng = np.random.default_rng(seed)
    h = np.arange(length, dtype=float)
    season = np.cos(2 * np.pi * (_year_fraction(h, start) - 15 / 365))  # +1 mid-January
    hod = (start.hour + h) % 24
    daily = np.sin(2 * np.pi * (hod - 9) / 24)

    temp = 8.5 - 9.5 * season + 3.0 * daily + rng.normal(0.0, 1.2, length)
    load = 1350.0 + 1000.0 * season + 90.0 * np.cos(2 * np.pi * (hod - 8) / 24) - 12.0 * (temp - (8.5 - 9.5 * season))
    load = np.clip(load, 300.0, 2500.0)
    peak = np.exp(-((hod - 8) ** 2) / 6) + np.exp(-((hod - 18) ** 2) / 6)
    price = 38.0 + 6.0 * season + 18.0 * peak + rng.normal(0.0, 6.0, length)
    price = np.clip(price, 0.0, 150.0)
    return {"heat_load": load, "elec_price": price, "ambient_temp": temp}


def copenhagen_like_year(fleet_capacity_mw: float = 300.0, seed: int = 2019) -> ScenarioInputs:
    start = datetime(2019, 1, 1)
    ser = seasonal_series(start, 8760, seed)
    return ScenarioInputs(
        axis=TimeAxis(start, 8760, 24),
        chps=DEFAULT_CHPS,
        fleets=(default_fleet(fleet_capacity_mw),) if fleet_capacity_mw > 0 else (),
        cop=CopModel(),
        name="synthetic_copenhagen_like_year",
        **ser,
    )


def demo_week(fleet_capacity_mw: float = 600.0) -> ScenarioInputs:
    """One synthetic winter-to-spring week with sinusoidal inputs (no noise)."""
    start = datetime(2019, 3, 4)
    h = np.arange(168, dtype=float)
    hod = h % 24
    temp = 6.0 + 5.0 * np.sin(2 * np.pi * (hod - 9) / 24) + 4.0 * np.sin(2 * np.pi * h / 168)
    load = 1500.0 - 35.0 * (temp - 6.0) + 150.0 * np.cos(2 * np.pi * (hod - 8) / 24)
    price = 42.0 + 20.0 * np.sin(2 * np.pi * (hod - 12) / 24) + 8.0 * np.sin(2 * np.pi * h / 168)
    return ScenarioInputs(
        axis=TimeAxis(start, 168, 24),
        heat_load=load,
        elec_price=price,
        ambient_temp=temp,
        chps=DEFAULT_CHPS,
        fleets=(default_fleet(fleet_capacity_mw),),
        cop=CopModel(),
        name="demo_week_synthetic",
    )


def random_scenario(rng: np.random.Generator, hours: int = 168, n_chps=None, n_fleets=None) -> ScenarioInputs:
    """Random but well-posed week: 2-5 CHPs, 1-2 fleets, seasonal-ish series."""
    n_chps = n_chps or int(rng.integers(2, 6))
    n_fleets = n_fleets or int(rng.integers(1, 3))
    start = datetime(2019, 1, 1) + np.timedelta64(int(rng.integers(0, 330)), "D").astype(object)
    ser = seasonal_series(start, hours, int(rng.integers(0, 2**31)))
    chps = []
    for k in range(n_chps):
        chps.append(ChpParams(
            f"chp{k}",
            rho_e=float(rng.uniform(1.8, 3.0)),
            rho_h=float(rng.uniform(0.9, 1.3)),
            r=float(rng.uniform(0.3, 0.6)),
            f_max=float(rng.uniform(300.0, 1500.0)),
            g_h_max=float(rng.uniform(150.0, 700.0)),
            alpha=float(rng.uniform(2.0, 60.0)),
        ))
    fleets = []
    for k in range(n_fleets):
        fleets.append(ExcessHeatFleet(
            f"fleet{k}",
            unit_count=int(rng.integers(1000, 40000)),
            ramp_frac=float(rng.uniform(0.2, 0.5)),
            t_fridge_init=float(rng.uniform(4.0, 5.0)),
        ))
    return ScenarioInputs(
        axis=TimeAxis(start, hours, 24),
        chps=tuple(chps),
        fleets=tuple(fleets),
        cop=CopModel(),
        name="random",
        **ser,
    )
