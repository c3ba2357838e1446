import csv
from dataclasses import replace

import numpy as np
import pytest

from heatmarket.cli import UsageError, main, parse_capacities
from heatmarket.ingest import save_scenario
from heatmarket.pricing import cop_series
from heatmarket.sim import SS, run_paradigm
from oracles import fleet_oracle


@pytest.fixture
def scenario_file(tmp_path, demo):
    return str(save_scenario(demo, tmp_path / "scn" / "demo.toml"))


def test_validate_ok(scenario_file, capsys):
    assert main(["validate", scenario_file]) == 0
    assert capsys.readouterr().out.strip() == "OK"


def test_validate_missing_csv(tmp_path, demo, capsys):
    path = save_scenario(demo, tmp_path / "demo.toml")
    (tmp_path / "demo_ambient_temp.csv").unlink()
    assert main(["validate", str(path)]) == 2
    assert "demo_ambient_temp.csv" in capsys.readouterr().err


def test_validate_band_violation(tmp_path, demo, capsys):
    bad = demo.with_fleets([replace(demo.fleets[0], t_avg_min=9.0, t_avg_max=9.5)])
    path = save_scenario(bad, tmp_path / "bad.toml")
    assert main(["validate", str(path)]) == 1
    assert "average band outside hard band" in capsys.readouterr().out


def test_missing_scenario_file(tmp_path):
    assert main(["validate", str(tmp_path / "nope.toml")]) == 2


def test_bad_arguments():
    assert main(["sweep"]) == 2
    assert main(["frobnicate"]) == 2


def test_run_both(scenario_file, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", scenario_file, "--paradigm", "both", "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert "mp: objective=" in text and "ss: objective=" in text and "suboptimality:" in text
    assert (out / "hourly_mp_600.csv").exists() and (out / "hourly_ss_600.csv").exists()
    assert (out / "cost_vs_capacity.svg").exists()


def test_run_out_from_environment(scenario_file, tmp_path, monkeypatch):
    monkeypatch.setenv("HEATMARKET_OUT", str(tmp_path / "env_out"))
    assert main(["run", scenario_file, "--paradigm", "mp"]) == 0
    assert (tmp_path / "env_out" / "sweep_summary.csv").exists()


def test_run_dump_lp(scenario_file, tmp_path):
    out = tmp_path / "o"
    assert main(["run", scenario_file, "--paradigm", "mp", "--dump-lp", "--out", str(out)]) == 0
    dumps = sorted((out / "lp").glob("*.lp"))
    assert len(dumps) == 7 and dumps[0].read_text().rstrip().endswith("End")


def test_whole_horizon_flag(scenario_file, tmp_path, capsys):
    def objective(extra):
        main(["run", scenario_file, "--paradigm", "mp", "--out", str(tmp_path / "w")] + extra)
        line = [ln for ln in capsys.readouterr().out.splitlines() if ln.startswith("mp:")][0]
        return float(line.split("objective=")[1].split()[0])

    assert objective(["--whole-horizon"]) <= objective([]) + 0.01


def test_price_scale_zero_gives_minimum_cost_cooling(scenario_file, tmp_path, demo):
    assert main(["run", scenario_file, "--paradigm", "ss", "--price-scale", "0", "--out", str(tmp_path / "z")]) == 0
    res = run_paradigm(replace(demo, price_scale=0.0), SS)
    f = demo.fleets[0]
    cop = cop_series(demo.cop, demo.ambient_temp[:24])
    lam = demo.elec_price[:24]
    _, _, fun = fleet_oracle(f, cop, f.t_fridge_init, cost_per_kw=lam / cop)
    assert float(lam @ res.eh_elec_load[0, :24]) == pytest.approx(fun * f.unit_count / 1000, rel=1e-6)
    rows = list(csv.DictReader((tmp_path / "z" / "hourly_ss_600.csv").open()))
    np.testing.assert_allclose([float(r["eh_generated"]) for r in rows], res.eh_generated.sum(axis=0), atol=1e-6)


def test_parse_capacities():
    assert parse_capacities("0:2100:300") == [0, 300, 600, 900, 1200, 1500, 1800, 2100]
    assert parse_capacities("0") == [0.0]
    assert parse_capacities("0, 150,300") == [0, 150, 300]
    for bad in ("1:2", "5:0:1", "0:10:0", "a,b"):
        with pytest.raises(UsageError):
            parse_capacities(bad)


def test_sweep_single_zero(scenario_file, tmp_path):
    out = tmp_path / "s0"
    assert main(["sweep", scenario_file, "--capacities", "0", "--out", str(out)]) == 0
    rows = list(csv.DictReader((out / "sweep_summary.csv").open()))
    assert len(rows) == 1 and float(rows[0]["suboptimality"]) == 0.0


def test_sweep_range_rows(scenario_file, tmp_path):
    out = tmp_path / "s8"
    assert main(["sweep", scenario_file, "--capacities", "0:2100:300", "--no-hourly", "--out", str(out)]) == 0
    rows = list(csv.DictReader((out / "sweep_summary.csv").open()))
    assert [float(r["capacity"]) for r in rows] == [0, 300, 600, 900, 1200, 1500, 1800, 2100]


def test_sweep_jobs_identical_bytes(scenario_file, tmp_path):
    outs = []
    for jobs in ("1", "4"):
        out = tmp_path / f"j{jobs}"
        assert main(["sweep", scenario_file, "--capacities", "0:900:300", "--jobs", jobs, "--out", str(out)]) == 0
        outs.append(out)
    files = sorted(p.name for p in outs[0].iterdir())
    assert files == sorted(p.name for p in outs[1].iterdir())
    for name in files:
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes(), name
