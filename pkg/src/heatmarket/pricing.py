"""Heat bids for CHPs and excess-heat producers, the ambient-temperature
price signal, and the heat-pump COP series."""

from __future__ import annotations

import numpy as np

from .domain import ChpParams, CopModel

SIGNAL_BASE_PRICE = 380.0
SIGNAL_DECAY = 0.92
SIGNAL_CUTOFF_C = 17.5


def chp_bid(chp: ChpParams, elec_price):
    """Opportunity-cost heat bid of a CHP given the forecast electricity price.

    Below the threshold ``alpha * rho_e`` the plant bids fuel cost net of
    electricity sales at the minimum power-to-heat ratio; above it, it bids
    the electricity it forgoes. The threshold itself uses the first branch.
    Works elementwise on arrays.
    """
    lam = np.asarray(elec_price, dtype=float)
    low = chp.alpha * (chp.rho_e * chp.r + chp.rho_h) - lam * chp.r
    high = lam * chp.rho_h / chp.rho_e
    out = np.where(lam <= chp.alpha * chp.rho_e, low, high)
    return float(out) if out.ndim == 0 else out


def chp_heat_cap(chp: ChpParams) -> float:
    """Heat output at the tip of the fuel/power-to-heat triangle, capped by g_h_max."""
    return min(chp.g_h_max, chp.f_max / (chp.rho_h + chp.r * chp.rho_e))


def price_signal(ambient, scale: float = 1.0):
    """Published excess-heat price (currency/MWh) as a function of ambient °C."""
    t = np.asarray(ambient, dtype=float)
    mu = np.where(t < SIGNAL_CUTOFF_C, SIGNAL_BASE_PRICE * np.power(SIGNAL_DECAY, t), 0.0)
    mu = scale * mu
    return float(mu) if mu.ndim == 0 else mu


def cop_series(model: CopModel, ambient) -> np.ndarray:
    t = np.asarray(ambient, dtype=float)
    return np.clip(model.cop0 + model.cop1 * t, model.cop_min, model.cop_max)


def eh_bid() -> float:
    return 0.0
