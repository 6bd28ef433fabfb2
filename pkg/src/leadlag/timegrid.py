"""Calendar months and one-minute grids.

All per-month computation is indexed against a fixed minute grid.  A real
calendar month has ``days * 1440`` minutes; synthetic universes may use a
free-standing grid of arbitrary length.  Two series are comparable only when
their grids are equal.
"""

from __future__ import annotations

import calendar
import re
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

_MONTH_RE = re.compile(r"^(\d{4})-(\d{2})$")


@dataclass(frozen=True, order=True)
class Month:
    year: int
    month: int

    def __post_init__(self):
        if not 1 <= self.month <= 12:
            raise ConfigError(f"month out of range: {self.month}")

    @classmethod
    def parse(cls, text: str) -> "Month":
        m = _MONTH_RE.match(text.strip())
        if m is None:
            raise ConfigError(f"expected YYYY-MM, got {text!r}")
        return cls(int(m.group(1)), int(m.group(2)))

    @property
    def label(self) -> str:
        return f"{self.year:04d}-{self.month:02d}"

    @property
    def n_days(self) -> int:
        return calendar.monthrange(self.year, self.month)[1]

    @property
    def n_minutes(self) -> int:
        return self.n_days * 24 * 60

    @property
    def start(self) -> np.datetime64:
        return np.datetime64(f"{self.label}-01T00:00", "m")

    def next(self) -> "Month":
        if self.month == 12:
            return Month(self.year + 1, 1)
        return Month(self.year, self.month + 1)

    def __str__(self) -> str:
        return self.label


def month_range(spec: str) -> list[Month]:
    """Expand "2016-01..2016-04" (inclusive) or a single "2016-03"."""
    if ".." in spec:
        lo_s, hi_s = spec.split("..", 1)
        lo, hi = Month.parse(lo_s), Month.parse(hi_s)
        if hi < lo:
            raise ConfigError(f"empty month range {spec!r}")
        out = [lo]
        while out[-1] != hi:
            out.append(out[-1].next())
        return out
    return [Month.parse(spec)]


@dataclass(frozen=True)
class Grid:
    """A contiguous run of one-minute slots.

    ``label`` identifies the grid (a month label for calendar grids, a free
    name for synthetic ones); equality of grids is what makes two series
    pairable.
    """

    label: str
    start: np.datetime64
    n_minutes: int

    def __post_init__(self):
        if self.n_minutes < 2:
            raise ConfigError(f"grid needs >= 2 minutes, got {self.n_minutes}")

    @classmethod
    def from_month(cls, month: Month) -> "Grid":
        return cls(label=month.label, start=month.start, n_minutes=month.n_minutes)

    @classmethod
    def synthetic(cls, label: str, n_minutes: int,
                  start: np.datetime64 | None = None) -> "Grid":
        if start is None:
            start = np.datetime64("2000-01-01T00:00", "m")
        return cls(label=label, start=start, n_minutes=n_minutes)

    @property
    def n_cells(self) -> int:
        """Number of one-minute return cells the grid supports."""
        return self.n_minutes - 1

    def minute_offsets(self, ts: np.ndarray) -> np.ndarray:
        """Positions of datetime64[m] timestamps on this grid."""
        return (ts.astype("datetime64[m]") - self.start).astype(np.int64)

    def timestamps(self) -> np.ndarray:
        return self.start + np.arange(self.n_minutes, dtype=np.int64)
