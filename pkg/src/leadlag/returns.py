"""One-minute log returns and the unit-root stationarity check.

A return cell is one of three things: a nonzero value, an exact zero (two
consecutive equal prices), or missing (a gap touches either endpoint).
Zeros are genuine numeric observations; missing cells break every chain.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .assets import AssetId
from .errors import DataError
from .ingest import BarSeries
from .ols import fit_ols
from .timegrid import Grid

VALUE = np.uint8(0)
ZERO = np.uint8(1)
MISSING = np.uint8(2)

ADF_CRITICAL_1PCT = -3.96
ADF_MIN_OBS = 30


@dataclass(frozen=True)
class ReturnSeries:
    """Grid-aligned log returns for one asset.

    ``values`` has one entry per grid cell (grid minutes minus one): the
    log return where state is VALUE, exactly 0.0 where ZERO, NaN where
    MISSING.
    """

    asset: AssetId
    grid: Grid
    values: np.ndarray
    state: np.ndarray

    def __post_init__(self):
        if len(self.values) != self.grid.n_cells or len(self.state) != self.grid.n_cells:
            raise DataError(
                f"{self.asset}: expected {self.grid.n_cells} cells, "
                f"got {len(self.values)}"
            )
        vals = self.values
        st = self.state
        if not np.isfinite(vals[st == VALUE]).all():
            raise DataError(f"{self.asset}: non-finite value cell")
        if (vals[st == ZERO] != 0.0).any():
            raise DataError(f"{self.asset}: ZERO cell with nonzero value")
        if not np.isnan(vals[st == MISSING]).all():
            raise DataError(f"{self.asset}: MISSING cell with a value")

    @classmethod
    def from_values(cls, asset: AssetId, grid: Grid, values: np.ndarray,
                    zero_mask: np.ndarray | None = None) -> "ReturnSeries":
        """Build from a NaN-for-missing array; zeros are ZERO cells unless
        a mask says otherwise."""
        values = np.asarray(values, dtype=np.float64)
        state = np.full(len(values), VALUE, dtype=np.uint8)
        state[np.isnan(values)] = MISSING
        if zero_mask is None:
            state[(values == 0.0) & (state == VALUE)] = ZERO
        else:
            state[np.asarray(zero_mask, dtype=bool)] = ZERO
            values = values.copy()
            values[np.asarray(zero_mask, dtype=bool)] = 0.0
        return cls(asset=asset, grid=grid, values=values, state=state)

    @property
    def n_cells(self) -> int:
        return len(self.values)

    def observed(self) -> np.ndarray:
        return self.state != MISSING

    def n_observed(self) -> int:
        return int((self.state != MISSING).sum())


def log_returns(series: BarSeries) -> ReturnSeries:
    """Log close-to-close returns on the series' grid.

    Computed as log(p1/p0) rather than log(p1)-log(p0): the ratio form
    keeps the rounding error independent of the price level, which is what
    makes the synthetic round-trip exact to a few ulp.
    """
    if series.grid is None:
        raise DataError(f"{series.asset}: snap series to a grid before returns")
    grid = series.grid
    price = np.full(grid.n_minutes, np.nan)
    offsets = series.minute_offsets()
    closes = series.close
    if (closes <= 0.0).any():
        raise DataError(f"{series.asset}: non-positive close price")
    price[offsets] = closes

    p0 = price[:-1]
    p1 = price[1:]
    both = ~np.isnan(p0) & ~np.isnan(p1)
    equal = both & (p0 == p1)

    values = np.full(grid.n_cells, np.nan)
    state = np.full(grid.n_cells, MISSING, dtype=np.uint8)
    with np.errstate(invalid="ignore", divide="ignore"):
        values[both] = np.log(p1[both] / p0[both])
    values[equal] = 0.0
    state[both] = VALUE
    state[equal] = ZERO
    return ReturnSeries(asset=series.asset, grid=grid, values=values, state=state)


@dataclass(frozen=True)
class AdfResult:
    """Augmented Dickey-Fuller regression with trend and one lagged
    difference; the statistic is the t-ratio of the level coefficient."""

    asset: AssetId
    window: str
    statistic: float
    alpha: float            # intercept
    delta: float            # trend slope
    theta: float            # level coefficient
    gamma1: float           # lagged-difference coefficient
    stderr_theta: float
    n_obs: int
    critical_value: float

    @property
    def reject_unit_root(self) -> bool:
        return self.statistic < self.critical_value


@dataclass(frozen=True)
class AdfInsufficient:
    """Too few consecutive-observation chains to run the regression."""

    asset: AssetId
    window: str
    n_obs: int
    required: int

    # mirror of AdfResult's flag so tables can be built uniformly
    reject_unit_root: None = None


def _adf_rows(series: ReturnSeries) -> tuple[np.ndarray, np.ndarray]:
    """Valid regression rows: indices n with cells n, n-1, n-2 all observed."""
    obs = series.observed()
    n = series.n_cells
    if n < 3:
        return np.empty(0, dtype=np.int64), np.empty(0)
    ok = obs[2:] & obs[1:-1] & obs[:-2]
    rows = np.nonzero(ok)[0] + 2
    return rows, series.values


def adf_test(series: ReturnSeries,
             critical_value: float = ADF_CRITICAL_1PCT,
             min_obs: int = ADF_MIN_OBS,
             window: str | None = None) -> AdfResult | AdfInsufficient:
    """Unit-root regression of the return differences.

    For each usable cell n the row is
        d r(n) = alpha + delta * n + theta * r(n-1) + gamma1 * d r(n-1) + e
    where rows require three consecutive observed cells (zeros count as
    observations, missing cells break chains).  The trend regressor is the
    raw 0-based cell index within the window.
    """
    label = window or series.grid.label
    rows, vals = _adf_rows(series)
    if len(rows) < min_obs:
        return AdfInsufficient(asset=series.asset, window=label,
                               n_obs=len(rows), required=min_obs)
    r_n = vals[rows]
    r_1 = vals[rows - 1]
    r_2 = vals[rows - 2]
    y = r_n - r_1
    dlag = r_1 - r_2
    X = np.column_stack([np.ones(len(rows)), rows.astype(np.float64), r_1, dlag])
    fit = fit_ols(X, y)
    theta = float(fit.coef[2])
    se = float(fit.stderr[2])
    return AdfResult(asset=series.asset, window=label,
                     statistic=theta / se,
                     alpha=float(fit.coef[0]), delta=float(fit.coef[1]),
                     theta=theta, gamma1=float(fit.coef[3]),
                     stderr_theta=se, n_obs=fit.n,
                     critical_value=critical_value)


def concat_months(asset: AssetId, parts: list[ReturnSeries], label: str) -> ReturnSeries:
    """Join consecutive monthly series into one window for yearly tests.

    The cell between two months (last minute of one to first of the next)
    is not representable on either month grid; it is inserted as MISSING,
    which only breaks chains at the seam.
    """
    if not parts:
        raise DataError("nothing to concatenate")
    values: list[np.ndarray] = []
    states: list[np.ndarray] = []
    total_minutes = 0
    for i, part in enumerate(parts):
        if part.asset != asset:
            raise DataError(f"asset mismatch in concat: {part.asset} != {asset}")
        values.append(part.values)
        states.append(part.state)
        total_minutes += part.grid.n_minutes
        if i < len(parts) - 1:
            values.append(np.array([np.nan]))
            states.append(np.array([MISSING], dtype=np.uint8))
    grid = Grid(label=label, start=parts[0].grid.start, n_minutes=total_minutes)
    return ReturnSeries(asset=asset, grid=grid,
                        values=np.concatenate(values),
                        state=np.concatenate(states))
