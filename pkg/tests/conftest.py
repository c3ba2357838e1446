from datetime import datetime

import numpy as np
import pytest

from heatmarket.domain import ChpParams, CopModel, ExcessHeatFleet, ScenarioInputs, TimeAxis
from heatmarket.synthetic import demo_week


def flat_chp(cid: str, bid: float, cap: float) -> ChpParams:
    """A CHP whose bid is ``bid`` whenever the power price is 0 and whose cap is ``cap``.

    With r = 0 the first bid branch is alpha * rho_h; rho_h = 1 makes it alpha.
    """
    return ChpParams(cid, rho_e=2.0, rho_h=1.0, r=0.0, f_max=cap if cap > 0 else 1.0, g_h_max=cap, alpha=bid)


def make_scenario(load, *, chps=(), fleets=(), elec_price=None, ambient=None, start=datetime(2019, 1, 1),
                  block_length=24, cop=None, penalty=5000.0, **kw) -> ScenarioInputs:
    load = np.asarray(load, dtype=float)
    n = load.size
    return ScenarioInputs(
        axis=TimeAxis(start, n, block_length),
        heat_load=load,
        elec_price=np.zeros(n) if elec_price is None else np.asarray(elec_price, dtype=float),
        ambient_temp=np.zeros(n) if ambient is None else np.asarray(ambient, dtype=float),
        chps=tuple(chps),
        fleets=tuple(fleets),
        cop=cop or CopModel(),
        penalty_unsupplied=penalty,
        **kw,
    )


@pytest.fixture
def fleet():
    return ExcessHeatFleet("f", unit_count=1000)


@pytest.fixture(scope="session")
def demo():
    return demo_week()


def pytest_terminal_summary(terminalreporter):
    """One line per acceptance criterion, whatever the capture settings."""
    lines = []
    for key in ("passed", "failed", "skipped"):
        for rep in terminalreporter.stats.get(key, []):
            props = dict(getattr(rep, "user_properties", []))
            if "criterion" not in props or getattr(rep, "when", "call") not in ("call", "setup"):
                continue
            if rep.when == "setup" and rep.outcome == "passed":
                continue
            verdict = {"passed": "PASS", "failed": "FAIL", "skipped": "WAIVED"}[rep.outcome]
            lines.append((props["criterion"], verdict))
    if lines:
        terminalreporter.section("acceptance criteria")
        for label, verdict in sorted(lines, key=lambda x: int(x[0].split()[0])):
            terminalreporter.write_line(f"criterion {label}: {verdict}")
