"""Command-line entry point: ``validate``, ``run`` and ``sweep``.

Exit codes: 0 success, 1 domain failure (invalid scenario, clearing error,
failed sweep point), 2 usage or I/O failure.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

from .domain import HeatMarketError, validate_scenario
from .ingest import ConfigError, IngestError, load_scenario
from .report import render_charts, write_results
from .sim import MP, PARADIGMS, SS, SweepPoint, SweepResult, SweepSpec, compute_report, run_paradigm, run_sweep

OUT_ENV = "HEATMARKET_OUT"
EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def parse_capacities(text: str) -> list[float]:
    """``"0,300,1200"`` or ``"start:stop:step"`` (stop included when on the grid)."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"bad capacity range {text!r}, expected start:stop:step")
        start, stop, step = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise UsageError(f"bad capacity range {text!r}")
        n = int((stop - start) / step + 1e-9)
        return [start + k * step for k in range(n + 1)]
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise UsageError(f"bad capacity list {text!r}") from exc


def _load(path: str):
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"scenario file not found: {p}")
    return load_scenario(p)


def _out_dir(arg: str | None) -> Path:
    return Path(arg or os.environ.get(OUT_ENV, "heatmarket_out"))


def cmd_validate(args) -> int:
    s = _load(args.scenario)
    problems = validate_scenario(s)
    if problems:
        for msg in problems:
            print(f"violation: {msg}")
        return EXIT_DOMAIN
    print("OK")
    return EXIT_OK


def _apply_overrides(s, args):
    changes = {}
    if getattr(args, "price_scale", None) is not None:
        changes["price_scale"] = args.price_scale
    if getattr(args, "whole_horizon", False):
        changes["whole_horizon"] = True
    return replace(s, **changes) if changes else s


def _check(s) -> bool:
    problems = validate_scenario(s)
    for msg in problems:
        print(f"violation: {msg}", file=sys.stderr)
    return not problems


def cmd_run(args) -> int:
    s = _apply_overrides(_load(args.scenario), args)
    if not _check(s):
        return EXIT_DOMAIN
    out = _out_dir(args.out)
    out.mkdir(parents=True, exist_ok=True)
    dump = None
    if args.dump_lp:
        dump = out / "lp"
        dump.mkdir(exist_ok=True)
    wanted = PARADIGMS if args.paradigm == "both" else (args.paradigm,)
    results = {}
    try:
        for par in PARADIGMS:
            if par in wanted:
                results[par] = run_paradigm(s, par, dump_lp_dir=dump)
    except HeatMarketError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN

    for par, res in results.items():
        cost = float((res.chp_bids * res.chp_heat).sum())
        waste = float(res.eh_wasted.sum())
        print(f"{par}: objective={res.objective:.2f} chp_cost={cost:.2f} wasted_MWh={waste:.2f} "
              f"mean_price={res.market_price.mean():.4f}")
    capacity = sum(f.capacity_mw for f in s.fleets)
    # a single run is written as a one-point sweep; a missing paradigm mirrors the other
    mp = results.get(MP, results.get(SS))
    ss = results.get(SS, results.get(MP))
    rep = compute_report(mp, ss, s, capacity)
    if len(results) == 2:
        print(f"suboptimality: {rep.suboptimality_total:.2f}")
    point = SweepPoint(capacity, rep, mp, ss, s)
    write_results(SweepResult([point]), out)
    render_charts(SweepResult([point]), out)
    print(f"results written to {out}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    s = _apply_overrides(_load(args.scenario), args)
    if not _check(s):
        return EXIT_DOMAIN
    caps = parse_capacities(args.capacities)
    if not caps:
        raise UsageError("no capacities given")
    result = run_sweep(SweepSpec(caps, s, jobs=args.jobs))
    out = _out_dir(args.out)
    write_results(result, out, hourly=not args.no_hourly)
    if any(p.ok for p in result.points):
        render_charts(result, out)
    print(f"{'capacity':>10}  {'status':<8} {'suboptimality':>16}")
    for p in result.points:
        status = "ok" if p.ok else "failed"
        sub = f"{p.report.suboptimality_total:16.2f}" if p.ok else f"{'-':>16}  {p.error}"
        print(f"{p.capacity_mw:10g}  {status:<8} {sub}")
    for name, ok in result.diagnostics.items():
        print(f"diagnostic {name}: {'yes' if ok else 'no'}")
    print(f"results written to {out}")
    return EXIT_OK if result.ok else EXIT_DOMAIN


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="heatmarket", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check a scenario file")
    v.add_argument("scenario")
    v.set_defaults(func=cmd_validate)

    r = sub.add_parser("run", help="simulate one scenario")
    r.add_argument("scenario")
    r.add_argument("--paradigm", choices=["mp", "ss", "both"], default="both")
    r.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./heatmarket_out)")
    r.add_argument("--whole-horizon", action="store_true", help="clear the horizon as one LP")
    r.add_argument("--dump-lp", action="store_true", help="write every LP in CPLEX LP format")
    r.add_argument("--price-scale", type=float, help="multiplier on the self-scheduling price signal")
    r.add_argument("--seed", type=int, help="accepted for interface stability; the engine is deterministic")
    r.set_defaults(func=cmd_run)

    w = sub.add_parser("sweep", help="run both paradigms over a range of excess-heat capacities")
    w.add_argument("scenario")
    w.add_argument("--capacities", required=True, help="list '0,300' or range 'start:stop:step' (MW)")
    w.add_argument("--out")
    w.add_argument("--jobs", type=int, default=1)
    w.add_argument("--whole-horizon", action="store_true")
    w.add_argument("--price-scale", type=float)
    w.add_argument("--no-hourly", action="store_true", help="skip the per-hour CSV files")
    w.add_argument("--seed", type=int, help="accepted for interface stability; the engine is deterministic")
    w.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (FileNotFoundError, IngestError, ConfigError, OSError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HeatMarketError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
