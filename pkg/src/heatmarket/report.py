"""CSV tables and static SVG charts for sweep results.

All numbers are written with six fixed decimals. Chart output depends only
on the data, so identical inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .domain import HeatMarketError
from .sim import MP, PARADIGMS, SS, SweepPoint, SweepResult

HOURLY_COLUMNS = [
    "timestamp", "heat_load", "chp_heat", "eh_generated", "eh_scheduled", "eh_wasted",
    "eh_elec_load", "unsupplied", "market_price", "marginal_bid_price", "chp_cost",
]
MONTHLY_COLUMNS = [
    "capacity", "paradigm", "month", "chp_cost", "scheduled_eh", "wasted_eh", "avg_price",
]
SWEEP_COLUMNS = ["capacity", "mp_cost", "ss_cost", "suboptimality", "mp_waste", "ss_waste"]

SCHEMA = {
    "hourly_<paradigm>_<capacity>.csv": {
        "timestamp": "hour start, ISO local time",
        "heat_load": "forecast heat load (MW)",
        "chp_heat": "total CHP heat (MW)",
        "eh_generated": "total excess heat generated (MW)",
        "eh_scheduled": "excess heat delivered to the network (MW)",
        "eh_wasted": "excess heat vented (MW)",
        "eh_elec_load": "heat-pump electricity draw (MW)",
        "unsupplied": "curtailed load (MW)",
        "market_price": "dual of the heat balance (currency/MWh)",
        "marginal_bid_price": "bid of the most expensive scheduled participant (currency/MWh)",
        "chp_cost": "sum of CHP bid times CHP heat (currency)",
    },
    "monthly_summary.csv": {
        "capacity": "installed excess-heat capacity (MW)",
        "paradigm": "mp (market participation) or ss (self-scheduling)",
        "month": "calendar month YYYY-MM",
        "chp_cost": "CHP generation cost (currency)",
        "scheduled_eh": "delivered excess heat (MWh)",
        "wasted_eh": "vented excess heat (MWh)",
        "avg_price": "unweighted mean hourly clearing price (currency/MWh)",
    },
    "sweep_summary.csv": {
        "capacity": "installed excess-heat capacity (MW)",
        "mp_cost": "CHP cost, market participation (currency)",
        "ss_cost": "CHP cost, self-scheduling (currency)",
        "suboptimality": "ss_cost - mp_cost (currency)",
        "mp_waste": "vented excess heat, market participation (MWh)",
        "ss_waste": "vented excess heat, self-scheduling (MWh)",
    },
}
CHART_FILES = (
    "cost_vs_capacity.svg",
    "monthly_suboptimality.svg",
    "monthly_volumes.svg",
    "monthly_wasted.svg",
    "monthly_prices.svg",
)


class ReportIoError(HeatMarketError):
    pass


def fmt(x: float) -> str:
    v = float(x)
    if v == 0:
        v = 0.0  # drop the sign of -0.0
    out = f"{v:.6f}"
    return "0.000000" if out == "-0.000000" else out


def cap_label(capacity: float) -> str:
    return f"{capacity:g}".replace(".", "p")


def _write_csv(path: Path, header, rows) -> Path:
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
    except OSError as exc:
        raise ReportIoError(f"cannot write {path}: {exc}") from exc
    return path


def _hourly_rows(p: SweepPoint, paradigm: str):
    res = p.mp if paradigm == MP else p.ss
    s = p.scenario
    stamps = s.axis.timestamps()
    gen = res.eh_generated.sum(axis=0)
    wasted = res.eh_wasted.sum(axis=0)
    cost = (res.chp_bids * res.chp_heat).sum(axis=0)
    cols = [
        s.heat_load, res.chp_heat.sum(axis=0), gen, gen - wasted, wasted,
        res.eh_elec_load.sum(axis=0), res.unsupplied, res.market_price, res.marginal_bid_price, cost,
    ]
    for t, ts in enumerate(stamps):
        yield [ts.strftime("%Y-%m-%dT%H:%M")] + [fmt(c[t]) for c in cols]


def write_results(results: SweepResult, out_dir: str | Path, hourly: bool = True) -> list[Path]:
    """Write schema, hourly, monthly and sweep CSVs; returns the file manifest."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        schema = out / "schema.json"
        schema.write_text(json.dumps(SCHEMA, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise ReportIoError(f"cannot write to {out}: {exc}") from exc
    manifest = [schema]
    points = [p for p in results.points if p.ok]
    if not points:
        return manifest
    if hourly:
        for p in points:
            for par in PARADIGMS:
                name = out / f"hourly_{par}_{cap_label(p.capacity_mw)}.csv"
                manifest.append(_write_csv(name, HOURLY_COLUMNS, _hourly_rows(p, par)))

    monthly = []
    for p in points:
        r = p.report
        for par in PARADIGMS:
            sm = r.summary(par)
            for m in r.months:
                monthly.append([
                    fmt(p.capacity_mw), par, m, fmt(sm.monthly_chp_cost[m]),
                    fmt(sm.monthly_scheduled_eh[m]), fmt(sm.monthly_wasted_eh[m]), fmt(sm.monthly_avg_price[m]),
                ])
    manifest.append(_write_csv(out / "monthly_summary.csv", MONTHLY_COLUMNS, monthly))

    sweep = []
    for p in points:
        r = p.report
        sweep.append([
            fmt(p.capacity_mw), fmt(r.mp.total_chp_cost), fmt(r.ss.total_chp_cost),
            fmt(r.suboptimality_total), fmt(r.mp.total_wasted_eh), fmt(r.ss.total_wasted_eh),
        ])
    manifest.append(_write_csv(out / "sweep_summary.csv", SWEEP_COLUMNS, sweep))
    return manifest


# --- SVG ---------------------------------------------------------------------

PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")
WIDTH, HEIGHT = 720, 420
MARGIN = dict(left=80, right=170, top=40, bottom=60)


def _nice_range(lo: float, hi: float) -> tuple[float, float, list[float]]:
    if not np.isfinite(lo) or not np.isfinite(hi):
        lo, hi = 0.0, 1.0
    lo, hi = min(lo, 0.0), max(hi, 0.0)
    if hi - lo < 1e-12:
        hi = lo + 1.0
    raw = (hi - lo) / 5
    mag = 10 ** np.floor(np.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    lo_t = np.floor(lo / step) * step
    hi_t = np.ceil(hi / step) * step
    ticks = [float(lo_t + k * step) for k in range(int(round((hi_t - lo_t) / step)) + 1)]
    return float(lo_t), float(hi_t), ticks


def _tick_label(v: float) -> str:
    a = abs(v)
    if a >= 1e9:
        return f"{v / 1e9:g}G"
    if a >= 1e6:
        return f"{v / 1e6:g}M"
    if a >= 1e4:
        return f"{v / 1e3:g}k"
    return f"{v:g}"


class _Chart:
    def __init__(self, title: str, xlabel: str, ylabel: str, ymin: float, ymax: float):
        self.parts: list[str] = []
        self.x0, self.x1 = MARGIN["left"], WIDTH - MARGIN["right"]
        self.y0, self.y1 = HEIGHT - MARGIN["bottom"], MARGIN["top"]
        self.lo, self.hi, ticks = _nice_range(ymin, ymax)
        self.parts.append(
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">'
        )
        self.parts.append(f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>')
        self.parts.append(f'<text x="{WIDTH / 2:.1f}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>')
        for t in ticks:
            y = self.y(t)
            self.parts.append(f'<line x1="{self.x0}" y1="{y:.2f}" x2="{self.x1}" y2="{y:.2f}" stroke="#dddddd"/>')
            self.parts.append(f'<text x="{self.x0 - 6}" y="{y + 4:.2f}" text-anchor="end">{_tick_label(t)}</text>')
        self.parts.append(f'<line x1="{self.x0}" y1="{self.y(0):.2f}" x2="{self.x1}" y2="{self.y(0):.2f}" stroke="#444444"/>')
        self.parts.append(f'<line x1="{self.x0}" y1="{self.y0}" x2="{self.x0}" y2="{self.y1}" stroke="#444444"/>')
        self.parts.append(
            f'<text x="{(self.x0 + self.x1) / 2:.1f}" y="{HEIGHT - 18}" text-anchor="middle">{escape(xlabel)}</text>'
        )
        cy = (self.y0 + self.y1) / 2
        self.parts.append(
            f'<text x="18" y="{cy:.1f}" text-anchor="middle" transform="rotate(-90 18 {cy:.1f})">{escape(ylabel)}</text>'
        )
        self.legend: list[tuple[str, str, str]] = []

    def y(self, v: float) -> float:
        return self.y0 - (v - self.lo) / (self.hi - self.lo) * (self.y0 - self.y1)

    def xtick(self, x: float, label: str) -> None:
        self.parts.append(f'<text x="{x:.2f}" y="{self.y0 + 16}" text-anchor="middle">{escape(label)}</text>')

    def polyline(self, xs, ys, color: str, label: str, dash: str = "") -> None:
        pts = " ".join(f"{x:.2f},{self.y(v):.2f}" for x, v in zip(xs, ys))
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="2"{extra}/>')
        for x, v in zip(xs, ys):
            self.parts.append(f'<circle cx="{x:.2f}" cy="{self.y(v):.2f}" r="3" fill="{color}"/>')
        self.legend.append((label, color, dash))

    def bar(self, x: float, w: float, v: float, color: str) -> None:
        top, bottom = sorted((self.y(v), self.y(0)))
        self.parts.append(
            f'<rect x="{x:.2f}" y="{top:.2f}" width="{w:.2f}" height="{bottom - top:.2f}" fill="{color}"/>'
        )

    def render(self) -> str:
        lx = self.x1 + 14
        for k, (label, color, dash) in enumerate(self.legend):
            y = self.y1 + 14 + 18 * k
            extra = f' stroke-dasharray="{dash}"' if dash else ""
            self.parts.append(f'<line x1="{lx}" y1="{y}" x2="{lx + 22}" y2="{y}" stroke="{color}" stroke-width="3"{extra}/>')
            self.parts.append(f'<text x="{lx + 28}" y="{y + 4}">{escape(label)}</text>')
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def _month_label(m: str) -> str:
    return m[5:] if len(m) == 7 else m


def _cost_vs_capacity(points) -> str:
    caps = [p.capacity_mw for p in points]
    mp = [p.report.mp.total_chp_cost for p in points]
    ss = [p.report.ss.total_chp_cost for p in points]
    sub = [p.report.suboptimality_total for p in points]
    ch = _Chart("CHP generation cost vs. excess-heat capacity", "excess-heat capacity (MW)", "cost",
                min(mp + ss + sub), max(mp + ss + sub))
    span = (max(caps) - min(caps)) or 1.0
    xs = [ch.x0 + 20 + (c - min(caps)) / span * (ch.x1 - ch.x0 - 40) for c in caps]
    for x, c in zip(xs, caps):
        ch.xtick(x, f"{c:g}")
    ch.polyline(xs, mp, PALETTE[0], "market participation")
    ch.polyline(xs, ss, PALETTE[1], "self-scheduling")
    ch.polyline(xs, sub, PALETTE[3], "difference (ss - mp)", dash="5,3")
    return ch.render()


def _grouped_bars(points, title, ylabel, value_of) -> str:
    months = points[0].report.months
    series = [(f"{p.capacity_mw:g} MW", [value_of(p.report, m) for m in months]) for p in points]
    vals = [v for _, vs in series for v in vs]
    ch = _Chart(title, "month", ylabel, min(vals), max(vals))
    slot = (ch.x1 - ch.x0) / max(len(months), 1)
    bw = slot * 0.8 / max(len(series), 1)
    for j, m in enumerate(months):
        ch.xtick(ch.x0 + slot * (j + 0.5), _month_label(m))
    for k, (label, vs) in enumerate(series):
        color = PALETTE[k % len(PALETTE)]
        for j, v in enumerate(vs):
            ch.bar(ch.x0 + slot * j + slot * 0.1 + bw * k, bw, v, color)
        ch.legend.append((label, color, ""))
    return ch.render()


def _monthly_lines(points, title, ylabel, value_of) -> str:
    months = points[0].report.months
    vals = [value_of(p.report, par, m) for p in points for par in PARADIGMS for m in months]
    ch = _Chart(title, "month", ylabel, min(vals), max(vals))
    slot = (ch.x1 - ch.x0) / max(len(months), 1)
    xs = [ch.x0 + slot * (j + 0.5) for j in range(len(months))]
    for x, m in zip(xs, months):
        ch.xtick(x, _month_label(m))
    for k, p in enumerate(points):
        color = PALETTE[k % len(PALETTE)]
        for par, dash in ((MP, ""), (SS, "5,3")):
            ch.polyline(xs, [value_of(p.report, par, m) for m in months], color, f"{p.capacity_mw:g} MW {par}", dash)
    return ch.render()


def render_charts(results: SweepResult, out_dir: str | Path) -> list[Path]:
    """Render the four comparison chart families as standalone SVG files."""
    points = sorted((p for p in results.points if p.ok), key=lambda p: p.capacity_mw)
    if not points:
        raise ValueError("render_charts needs at least one successful sweep point")
    out = Path(out_dir)
    docs = {
        "cost_vs_capacity.svg": _cost_vs_capacity(points),
        "monthly_suboptimality.svg": _grouped_bars(
            points, "Monthly CHP cost difference (self-scheduling - market)", "cost difference",
            lambda r, m: r.suboptimality_monthly[m]),
        "monthly_volumes.svg": _monthly_lines(
            points, "Monthly scheduled excess heat", "MWh",
            lambda r, par, m: r.summary(par).monthly_scheduled_eh[m]),
        "monthly_wasted.svg": _monthly_lines(
            points, "Monthly wasted excess heat", "MWh",
            lambda r, par, m: r.summary(par).monthly_wasted_eh[m]),
        "monthly_prices.svg": _monthly_lines(
            points, "Average market price per month", "currency/MWh",
            lambda r, par, m: r.summary(par).monthly_avg_price[m]),
    }
    written = []
    try:
        out.mkdir(parents=True, exist_ok=True)
        for name in sorted(docs):
            path = out / name
            path.write_text(docs[name])
            written.append(path)
    except OSError as exc:
        raise ReportIoError(f"cannot write charts to {out}: {exc}") from exc
    return written
