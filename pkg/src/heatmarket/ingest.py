"""Hourly CSV series and TOML scenario files.

CSV files have a ``timestamp,value`` header and one row per hour. Timestamps
are naive local hours in ISO format; daylight-saving duplicates or skips
must be resolved before loading. Gaps are rejected rather than filled.
"""

from __future__ import annotations

import csv
import sys
from dataclasses import asdict, dataclass, fields
from datetime import datetime, timedelta
from pathlib import Path

import numpy as np
import tomli_w

from .domain import (
    DEFAULT_PENALTY,
    ChpParams,
    CopModel,
    ExcessHeatFleet,
    HeatMarketError,
    ScenarioInputs,
    TimeAxis,
)

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

HOUR = timedelta(hours=1)
TIMESTAMP_FORMAT = "%Y-%m-%dT%H:%M"
SERIES_KEYS = ("heat_load", "elec_price", "ambient_temp")


class IngestError(HeatMarketError):
    pass


class ParseError(IngestError):
    pass


class GapError(IngestError):
    pass


class NonMonotonicError(IngestError):
    pass


class NoOverlapError(IngestError):
    pass


class ConfigError(IngestError):
    pass


@dataclass(frozen=True)
class RawSeries:
    timestamps: tuple[datetime, ...]
    values: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.values)

    @property
    def start(self) -> datetime:
        return self.timestamps[0]

    @property
    def end(self) -> datetime:
        return self.timestamps[-1]


def _parse_time(text: str, where: str) -> datetime:
    try:
        ts = datetime.fromisoformat(text.strip())
    except ValueError as exc:
        raise ParseError(f"{where}: bad timestamp {text!r}") from exc
    if ts.tzinfo is not None:
        raise ParseError(f"{where}: timestamps must be naive local hours")
    if ts.minute or ts.second or ts.microsecond:
        raise ParseError(f"{where}: timestamp {text!r} is not on the hour")
    return ts


def check_hourly(timestamps, where: str = "series") -> None:
    for k in range(1, len(timestamps)):
        step = timestamps[k] - timestamps[k - 1]
        if step <= timedelta(0):
            raise NonMonotonicError(f"{where}: {timestamps[k]:%Y-%m-%d %H:%M} does not follow {timestamps[k - 1]:%Y-%m-%d %H:%M}")
        if step != HOUR:
            missing = timestamps[k - 1] + HOUR
            raise GapError(f"{where}: missing hour {missing:%Y-%m-%d %H:%M}")


def load_series(path: str | Path) -> RawSeries:
    path = Path(path)
    stamps, values = [], []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header] != ["timestamp", "value"]:
            raise ParseError(f"{path}: expected header 'timestamp,value'")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            where = f"{path}:{lineno}"
            if len(row) != 2:
                raise ParseError(f"{where}: expected 2 columns, got {len(row)}")
            stamps.append(_parse_time(row[0], where))
            try:
                v = float(row[1])
            except ValueError as exc:
                raise ParseError(f"{where}: bad value {row[1]!r}") from exc
            if not np.isfinite(v):
                raise ParseError(f"{where}: non-finite value")
            values.append(v)
    if not values:
        raise ParseError(f"{path}: no data rows")
    check_hourly(stamps, str(path))
    return RawSeries(tuple(stamps), tuple(values))


def write_series(series: RawSeries, path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["timestamp", "value"])
        for ts, v in zip(series.timestamps, series.values):
            w.writerow([ts.strftime(TIMESTAMP_FORMAT), repr(float(v))])
    return path


def series_from_array(start: datetime, values) -> RawSeries:
    vals = tuple(float(v) for v in values)
    return RawSeries(tuple(start + k * HOUR for k in range(len(vals))), vals)


def align(series: list[RawSeries], block_length: int = 24) -> tuple[TimeAxis, list[np.ndarray]]:
    """Cut every series to the common hourly window."""
    if not series:
        raise ValueError("align needs at least one series")
    start = max(s.start for s in series)
    end = min(s.end for s in series)
    if end < start:
        raise NoOverlapError(f"series do not overlap (latest start {start}, earliest end {end})")
    length = int((end - start) / HOUR) + 1
    out = []
    for s in series:
        k0 = int((start - s.start) / HOUR)
        out.append(np.array(s.values[k0:k0 + length], dtype=float))
    return TimeAxis(start, length, block_length), out


def _dataclass_from(cls, table: dict, where: str):
    names = {f.name for f in fields(cls)}
    unknown = set(table) - names
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    try:
        return cls(**table)
    except TypeError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def load_scenario(path: str | Path) -> ScenarioInputs:
    """Read a TOML scenario and the three CSV series it references.

    Relative CSV paths resolve against the scenario file's directory.
    """
    path = Path(path)
    try:
        with path.open("rb") as fh:
            doc = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    base = path.parent
    sc = dict(doc.get("scenario", {}))
    paths = doc.get("series", {})
    missing = [k for k in SERIES_KEYS if k not in paths]
    if missing:
        raise ConfigError(f"{path}: [series] lacks {missing}")
    raws = [load_series(base / paths[k]) for k in SERIES_KEYS]
    block_length = int(sc.pop("block_length", 24))
    axis, arrays = align(raws, block_length)

    chps = tuple(_dataclass_from(ChpParams, dict(t), f"{path} [[chp]]") for t in doc.get("chp", []))
    fleets = tuple(_dataclass_from(ExcessHeatFleet, dict(t), f"{path} [[fleet]]") for t in doc.get("fleet", []))
    cop = _dataclass_from(CopModel, dict(doc.get("cop", {})), f"{path} [cop]")
    allowed = {"name", "penalty_unsupplied", "price_scale", "whole_horizon", "ramp_at_start"}
    unknown = set(sc) - allowed
    if unknown:
        raise ConfigError(f"{path}: unknown [scenario] keys {sorted(unknown)}")
    return ScenarioInputs(
        axis=axis,
        heat_load=arrays[0],
        elec_price=arrays[1],
        ambient_temp=arrays[2],
        chps=chps,
        fleets=fleets,
        cop=cop,
        penalty_unsupplied=float(sc.get("penalty_unsupplied", DEFAULT_PENALTY)),
        price_scale=float(sc.get("price_scale", 1.0)),
        whole_horizon=bool(sc.get("whole_horizon", False)),
        ramp_at_start=bool(sc.get("ramp_at_start", False)),
        name=str(sc.get("name", path.stem)),
    )


def save_scenario(s: ScenarioInputs, path: str | Path) -> Path:
    """Write ``s`` as a TOML document plus three CSV files next to it."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    files = {}
    for key in SERIES_KEYS:
        name = f"{path.stem}_{key}.csv"
        write_series(series_from_array(s.axis.start, getattr(s, key)), path.parent / name)
        files[key] = name
    doc = {
        "scenario": {
            "name": s.name,
            "block_length": s.axis.block_length,
            "penalty_unsupplied": float(s.penalty_unsupplied),
            "price_scale": float(s.price_scale),
            "whole_horizon": s.whole_horizon,
            "ramp_at_start": s.ramp_at_start,
        },
        "series": files,
        "cop": asdict(s.cop),
        "chp": [asdict(c) for c in s.chps],
        "fleet": [asdict(f) for f in s.fleets],
    }
    with path.open("wb") as fh:
        tomli_w.dump(doc, fh)
    return path
