"""Minute-bar file parsing and alignment onto month grids.

Input files are delimited text, one asset-month per file.  The default
format descriptor matches the histdata.com M1 layout
(``YYYYMMDD HHMMSS;open;high;low;close;volume``, bid quotes, EST without
DST), but every field of the descriptor is overridable so other vendors'
dumps can be read without code changes.

Gaps are represented by absence: a minute with no bar simply does not
appear in the series, and nothing downstream ever fabricates one.
"""

from __future__ import annotations

import datetime as dt
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterator

import numpy as np

from .assets import AssetId
from .errors import ConfigError, DataError
from .timegrid import Grid, Month

FILENAME_RE = re.compile(
    r"^(?P<asset>[A-Z0-9]{6}|[A-Z0-9]{3}/[A-Z0-9]{3})_(?P<ym>\d{6})\.csv$",
    re.IGNORECASE,
)


@dataclass(frozen=True)
class BarFormat:
    """Describes how to decode one vendor's bar files."""

    delimiter: str = ";"
    datetime_layout: str = "%Y%m%d %H%M%S"
    columns: tuple[str, ...] = ("datetime", "open", "high", "low", "close", "volume")
    tz_offset_minutes: int = -300          # file wall clock minus UTC
    stamping: str = "open"                 # minute the timestamp labels
    max_malformed_fraction: float = 0.01

    def __post_init__(self):
        required = {"datetime", "open", "high", "low", "close", "volume"}
        if set(self.columns) != required:
            raise ConfigError(f"format columns must be a permutation of {sorted(required)}")
        if self.stamping not in ("open", "close"):
            raise ConfigError(f"stamping must be 'open' or 'close', got {self.stamping!r}")
        if not 0.0 <= self.max_malformed_fraction <= 1.0:
            raise ConfigError("max_malformed_fraction must be in [0, 1]")

    @classmethod
    def from_dict(cls, d: dict) -> "BarFormat":
        kwargs = dict(d)
        if "columns" in kwargs:
            kwargs["columns"] = tuple(kwargs["columns"])
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigError(f"bad format descriptor: {exc}") from exc


HISTDATA_M1 = BarFormat()


@dataclass(frozen=True)
class MinuteBar:
    timestamp: np.datetime64
    open: float
    high: float
    low: float
    close: float
    volume: float


@dataclass(frozen=True)
class MalformedRow:
    line_no: int
    raw: str
    reason: str


@dataclass(frozen=True)
class ParseReport:
    path: str
    n_rows: int
    n_bars: int
    malformed: tuple[MalformedRow, ...] = ()
    dropped_outside_grid: int = 0


@dataclass(frozen=True)
class BarSeries:
    """Timestamp-ordered bid bars for one asset.

    Before ``snap_to_grid`` timestamps are source wall clock at second
    resolution; afterwards they are UTC minutes on ``grid``.
    """

    asset: AssetId
    ts: np.ndarray                  # datetime64[s] raw, datetime64[m] snapped
    open: np.ndarray
    high: np.ndarray
    low: np.ndarray
    close: np.ndarray
    volume: np.ndarray
    tz_offset_minutes: int = 0
    stamping: str = "open"
    grid: Grid | None = None
    report: ParseReport | None = field(default=None, compare=False)

    def __post_init__(self):
        n = len(self.ts)
        for name in ("open", "high", "low", "close", "volume"):
            if len(getattr(self, name)) != n:
                raise DataError(f"column {name} length mismatch")
        if n > 1 and not (self.ts[1:] > self.ts[:-1]).all():
            raise DataError(f"{self.asset}: timestamps not strictly increasing")

    def __len__(self) -> int:
        return len(self.ts)

    def bars(self) -> Iterator[MinuteBar]:
        for i in range(len(self.ts)):
            yield MinuteBar(self.ts[i], float(self.open[i]), float(self.high[i]),
                            float(self.low[i]), float(self.close[i]), float(self.volume[i]))

    def minute_offsets(self) -> np.ndarray:
        if self.grid is None:
            raise DataError("series not snapped to a grid")
        return self.grid.minute_offsets(self.ts)


def _parse_row(parts: list[str], fmt: BarFormat) -> tuple[dt.datetime, float, float, float, float, float]:
    idx = {name: i for i, name in enumerate(fmt.columns)}
    stamp = dt.datetime.strptime(parts[idx["datetime"]].strip(), fmt.datetime_layout)
    o = float(parts[idx["open"]])
    h = float(parts[idx["high"]])
    lo = float(parts[idx["low"]])
    c = float(parts[idx["close"]])
    v = float(parts[idx["volume"]])
    if min(o, h, lo, c) <= 0.0:
        raise ValueError("non-positive price")
    if lo > min(o, c) or h < max(o, c):
        raise ValueError("OHLC ordering violated")
    if v < 0.0:
        raise ValueError("negative volume")
    return stamp, o, h, lo, c, v


def parse_bar_file(path: str | Path, fmt: BarFormat = HISTDATA_M1,
                   asset: AssetId | None = None) -> BarSeries:
    """Parse one delimited bar file into a BarSeries.

    Malformed rows are collected with line numbers in the attached report;
    more than ``fmt.max_malformed_fraction`` of them, a duplicate
    timestamp, or an unreadable file is a hard DataError.
    """
    path = Path(path)
    if asset is None:
        asset = asset_from_filename(path.name)
        if asset is None:
            raise DataError(f"cannot infer asset from filename {path.name!r}; pass asset=")
    try:
        text = path.read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc

    stamps: list[dt.datetime] = []
    cols: list[list[float]] = [[], [], [], [], []]
    bad: list[MalformedRow] = []
    n_rows = 0
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        n_rows += 1
        parts = line.split(fmt.delimiter)
        if len(parts) != len(fmt.columns):
            bad.append(MalformedRow(line_no, line, "wrong column count"))
            continue
        try:
            stamp, o, h, lo, c, v = _parse_row(parts, fmt)
        except ValueError as exc:
            bad.append(MalformedRow(line_no, line, str(exc)))
            continue
        stamps.append(stamp)
        for col, val in zip(cols, (o, h, lo, c, v)):
            col.append(val)

    if n_rows > 0 and len(bad) / n_rows > fmt.max_malformed_fraction:
        raise DataError(
            f"{path}: {len(bad)}/{n_rows} malformed rows exceeds "
            f"tolerated fraction {fmt.max_malformed_fraction}"
        )

    ts = np.array([np.datetime64(s, "s") for s in stamps], dtype="datetime64[s]")
    order = np.argsort(ts, kind="stable")
    ts = ts[order]
    if len(ts) > 1 and (ts[1:] == ts[:-1]).any():
        dup = ts[:-1][ts[1:] == ts[:-1]][0]
        raise DataError(f"{path}: duplicate timestamp {dup}")
    arrays = [np.asarray(col, dtype=np.float64)[order] for col in cols]

    report = ParseReport(path=str(path), n_rows=n_rows, n_bars=len(ts),
                         malformed=tuple(bad))
    return BarSeries(asset=asset, ts=ts, open=arrays[0], high=arrays[1],
                     low=arrays[2], close=arrays[3], volume=arrays[4],
                     tz_offset_minutes=fmt.tz_offset_minutes,
                     stamping=fmt.stamping, report=report)


def asset_from_filename(name: str) -> AssetId | None:
    """Recover the asset from the ``<ASSET>_<YYYYMM>.csv`` convention.

    The asset part may be written with or without the slash (EURUSD or
    EUR/USD after substituting '-').
    """
    m = FILENAME_RE.match(name.upper().replace("-", "/"))
    if m is None:
        return None
    raw = m.group("asset")
    code = raw if "/" in raw else f"{raw[:3]}/{raw[3:]}"
    try:
        return AssetId(code)
    except DataError:
        return None


def month_from_filename(name: str) -> Month | None:
    m = FILENAME_RE.match(name.upper().replace("-", "/"))
    if m is None:
        return None
    ym = m.group("ym")
    try:
        return Month(int(ym[:4]), int(ym[4:]))
    except ConfigError:
        return None


def snap_to_grid(series: BarSeries, month: Month) -> BarSeries:
    """Normalize timestamps to UTC minutes on the month's grid.

    Seconds are floored to the containing minute; two rows snapping to the
    same minute is an error.  Bars landing outside the month after the
    timezone shift are dropped and counted in the report.
    """
    grid = Grid.from_month(month)
    minutes = series.ts.astype("datetime64[m]")  # floor: integer minute cast
    if series.stamping == "close":
        minutes = minutes - np.timedelta64(1, "m")
    utc = minutes - np.timedelta64(series.tz_offset_minutes, "m")

    if len(utc) > 1 and (utc[1:] == utc[:-1]).any():
        dup = utc[:-1][utc[1:] == utc[:-1]][0]
        raise DataError(f"{series.asset}: two rows snap to the same minute {dup}")

    offsets = grid.minute_offsets(utc)
    inside = (offsets >= 0) & (offsets < grid.n_minutes)
    n_dropped = int((~inside).sum())

    report = series.report
    if report is not None:
        report = replace(report, dropped_outside_grid=n_dropped)
    return BarSeries(asset=series.asset, ts=utc[inside],
                     open=series.open[inside], high=series.high[inside],
                     low=series.low[inside], close=series.close[inside],
                     volume=series.volume[inside],
                     tz_offset_minutes=0, stamping="open", grid=grid, report=report)


def write_normalized_csv(series: BarSeries, path: str | Path) -> None:
    """Emit the documented columnar form: ISO-8601 UTC timestamps, full
    float precision so a re-parse is bit-identical."""
    if series.grid is None:
        raise DataError("series must be snapped before writing normalized output")
    lines = ["timestamp,open,high,low,close,volume"]
    ts_strings = np.datetime_as_string(series.ts, unit="m")
    for i in range(len(series)):
        fields = ",".join(repr(float(col[i])) for col in
                          (series.open, series.high, series.low,
                           series.close, series.volume))
        lines.append(f"{ts_strings[i]}:00Z,{fields}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_normalized_csv(path: str | Path, asset: AssetId, month: Month) -> BarSeries:
    """Read back the normalized form written by write_normalized_csv."""
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if not lines or lines[0] != "timestamp,open,high,low,close,volume":
        raise DataError(f"{path}: missing normalized header")
    stamps = []
    cols: list[list[float]] = [[], [], [], [], []]
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 6:
            raise DataError(f"{path}:{line_no}: expected 6 columns")
        stamp = parts[0]
        if not stamp.endswith("Z"):
            raise DataError(f"{path}:{line_no}: timestamp must be UTC ('Z')")
        stamps.append(np.datetime64(stamp[:-1], "m"))
        for col, val in zip(cols, parts[1:]):
            col.append(float(val))
    ts = np.array(stamps, dtype="datetime64[m]")
    series = BarSeries(asset=asset, ts=ts,
                       open=np.asarray(cols[0]), high=np.asarray(cols[1]),
                       low=np.asarray(cols[2]), close=np.asarray(cols[3]),
                       volume=np.asarray(cols[4]),
                       tz_offset_minutes=0, grid=Grid.from_month(month))
    offsets = series.minute_offsets()
    if len(offsets) and (offsets.min() < 0 or offsets.max() >= month.n_minutes):
        raise DataError(f"{path}: timestamps outside {month.label}")
    return series
