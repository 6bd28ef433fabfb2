"""Paired-observation extraction under the four conditioning scenarios.

Each ordered pair (leader, lagger) contributes triples
``(x_t, y_t, y_next)`` taken from grid cells ``(n, n, n+tau)``.  A triple
exists only where the leader's cell n is a nonzero return and the lagger's
cells n and n+tau are both observed; on top of that base requirement the
scenarios tighten which lagger cells must be nonzero:

    S1  lagger unrestricted (may be dormant at both minutes)
    S2  lagger nonzero at t+tau
    S3  lagger nonzero at t and t+tau
    S4  lagger nonzero at t, unrestricted at t+tau

S1 and S2 feed plain lagged correlation, S3 partial correlation and the
stricter causality test, S4 the signal-based causality test.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .assets import AssetId
from .errors import DataError
from .returns import MISSING, VALUE, ReturnSeries

DEFAULT_MIN_SAMPLE = 100


class Scenario(enum.Enum):
    S1 = "s1"
    S2 = "s2"
    S3 = "s3"
    S4 = "s4"

    @classmethod
    def parse(cls, text: str) -> "Scenario":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise DataError(f"unknown scenario {text!r}") from None


@dataclass(frozen=True)
class PairedSample:
    """Triples for one ordered pair under one scenario."""

    leader: AssetId
    lagger: AssetId
    scenario: Scenario
    grid_label: str
    tau: int
    x: np.ndarray        # leader return at t
    y0: np.ndarray       # lagger return at t
    y1: np.ndarray       # lagger return at t+tau
    idx: np.ndarray      # grid cell index of t for each triple

    @property
    def n(self) -> int:
        return len(self.x)


def leader_mask(series: ReturnSeries, tau: int) -> np.ndarray:
    """Cells usable on the leader side: nonzero return at t."""
    span = series.n_cells - tau
    return series.state[:span] == VALUE


def lagger_mask(series: ReturnSeries, scenario: Scenario, tau: int) -> np.ndarray:
    """Cells usable on the lagger side under the scenario."""
    st = series.state
    span = series.n_cells - tau
    obs0 = st[:span] != MISSING
    obs1 = st[tau:] != MISSING
    if scenario is Scenario.S1:
        return obs0 & obs1
    val0 = st[:span] == VALUE
    val1 = st[tau:] == VALUE
    if scenario is Scenario.S2:
        return obs0 & val1
    if scenario is Scenario.S3:
        return val0 & val1
    return val0 & obs1  # S4


def extract(leader: ReturnSeries, lagger: ReturnSeries, scenario: Scenario,
            tau: int = 1) -> PairedSample:
    """All triples for (leader, lagger) under the scenario predicate."""
    if leader.grid != lagger.grid:
        raise DataError(
            f"grid mismatch: {leader.asset}@{leader.grid.label} vs "
            f"{lagger.asset}@{lagger.grid.label}"
        )
    if not 0 <= tau < leader.n_cells:
        raise DataError(f"lag {tau} out of range for {leader.n_cells} cells")
    mask = leader_mask(leader, tau) & lagger_mask(lagger, scenario, tau)
    idx = np.nonzero(mask)[0]
    return PairedSample(
        leader=leader.asset, lagger=lagger.asset, scenario=scenario,
        grid_label=leader.grid.label, tau=tau,
        x=leader.values[idx],
        y0=lagger.values[idx],
        y1=lagger.values[idx + tau],
        idx=idx,
    )


def sample_census(series: list[ReturnSeries], scenario: Scenario,
                  tau: int = 1) -> np.ndarray:
    """Triple counts for every ordered pair, leaders on rows.

    The pair predicate factorizes into a leader term and a lagger term, so
    the whole table is one boolean matrix product.  Diagonal entries are
    the self-pair counts used for lagged autocorrelation.
    """
    if len(series) < 2:
        raise DataError("census needs at least two series")
    grid = series[0].grid
    for s in series[1:]:
        if s.grid != grid:
            raise DataError(f"grid mismatch: {s.asset} not on {grid.label}")
    lead = np.stack([leader_mask(s, tau) for s in series]).astype(np.float64)
    lagg = np.stack([lagger_mask(s, scenario, tau) for s in series]).astype(np.float64)
    counts = lead @ lagg.T
    return counts.astype(np.int64)
