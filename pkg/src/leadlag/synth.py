"""Synthetic universes with planted lead-lag structure.

Returns follow a lag-1 vector autoregression r(t+1) = A r(t) + eps with
Gaussian innovations, so every population moment is available in closed
form: the detectors are tested against an analytic oracle, not against
themselves.  Dormant minutes (exact zero returns) and data gaps are
injected after simulation, which keeps the base-process moments intact.
Prices integrate the returns multiplicatively so the ingest path recovers
the masked return matrix to float rounding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .assets import AssetId
from .errors import ConfigError, NonConvergenceError, UnstableSystemError
from .ingest import BarSeries
from .returns import MISSING, VALUE, ZERO, ReturnSeries
from .timegrid import Grid, Month

BURN_IN = 1000


@dataclass(frozen=True)
class PlantedEdge:
    leader: int
    lagger: int
    beta: float


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for one synthetic universe."""

    n_assets: int
    minutes: int
    edges: tuple[PlantedEdge, ...] = ()
    alphas: tuple[float, ...] | float = 0.0
    sigmas: tuple[float, ...] | float = 1.0
    zero_prob: float = 0.0
    gap_prob: float = 0.0
    seed: int = 0
    base_price: float = 1.0
    label: str = "sim"

    def __post_init__(self):
        if self.n_assets < 1:
            raise ConfigError("n_assets must be positive")
        if self.n_assets > 100:
            raise ConfigError("synthetic universes support at most 100 assets")
        if self.minutes < 3:
            raise ConfigError("minutes must be at least 3")
        for prob, name in ((self.zero_prob, "zero_prob"), (self.gap_prob, "gap_prob")):
            if not 0.0 <= prob < 1.0:
                raise ConfigError(f"{name} must be in [0, 1), got {prob}")
        for e in self.edges:
            if not (0 <= e.leader < self.n_assets and 0 <= e.lagger < self.n_assets):
                raise ConfigError(f"edge {e} references a missing asset")
            if e.leader == e.lagger:
                raise ConfigError("planted edges must connect distinct assets")

    def asset_ids(self) -> tuple[AssetId, ...]:
        return tuple(AssetId(f"S{i:02d}/SIM") for i in range(self.n_assets))

    def coefficient_matrix(self) -> np.ndarray:
        """Lag-1 matrix A with self terms on the diagonal and one entry
        A[lagger, leader] = beta per planted edge."""
        a = np.zeros((self.n_assets, self.n_assets))
        alphas = self._per_asset(self.alphas)
        np.fill_diagonal(a, alphas)
        for e in self.edges:
            a[e.lagger, e.leader] = e.beta
        return a

    def sigma_vector(self) -> np.ndarray:
        return self._per_asset(self.sigmas)

    def _per_asset(self, v) -> np.ndarray:
        if np.isscalar(v):
            return np.full(self.n_assets, float(v))
        arr = np.asarray(v, dtype=np.float64)
        if arr.shape != (self.n_assets,):
            raise ConfigError(f"expected {self.n_assets} per-asset values")
        return arr

    @classmethod
    def from_dict(cls, d: dict) -> "SynthSpec":
        kwargs = dict(d)
        if "edges" in kwargs:
            kwargs["edges"] = tuple(
                PlantedEdge(int(e["leader"]), int(e["lagger"]), float(e["beta"]))
                for e in kwargs["edges"]
            )
        for key in ("alphas", "sigmas"):
            if key in kwargs and isinstance(kwargs[key], list):
                kwargs[key] = tuple(float(x) for x in kwargs[key])
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigError(f"bad synth spec: {exc}") from exc


def _check_stable(a: np.ndarray) -> None:
    radius = float(np.abs(np.linalg.eigvals(a)).max())
    if radius >= 1.0:
        raise UnstableSystemError(
            f"lag-1 coefficient matrix has spectral radius {radius:.4f} >= 1"
        )


@dataclass(frozen=True)
class SynthUniverse:
    spec: SynthSpec
    grid: Grid
    returns: list[ReturnSeries]
    bars: list[BarSeries] = field(compare=False, default_factory=list)


def generate(spec: SynthSpec, month: Month | None = None,
             seed: int | None = None, include_bars: bool = True) -> SynthUniverse:
    """Simulate one universe; deterministic in (spec, month, seed).

    With ``month`` the series live on that calendar grid (bars fill the
    first ``spec.minutes`` minutes); otherwise a free-standing grid of
    exactly ``spec.minutes`` minutes is used.  ``include_bars=False`` skips
    the price integration for return-only studies.
    """
    a = spec.coefficient_matrix()
    _check_stable(a)
    sigma = spec.sigma_vector()
    rng = np.random.default_rng(spec.seed if seed is None else seed)
    n = spec.n_assets
    t_cells = spec.minutes - 1

    eps = rng.normal(0.0, 1.0, size=(BURN_IN + t_cells, n)) * sigma
    if not a.any():
        path = eps[BURN_IN:]
    else:
        r = np.zeros(n)
        path = np.empty((t_cells, n))
        for step in range(BURN_IN + t_cells):
            r = a @ r + eps[step]
            if step >= BURN_IN:
                path[step - BURN_IN] = r

    zero_mask = (rng.random(size=(t_cells, n)) < spec.zero_prob
                 if spec.zero_prob > 0.0
                 else np.zeros((t_cells, n), dtype=bool))
    gap_mask = (rng.random(size=(spec.minutes, n)) < spec.gap_prob
                if spec.gap_prob > 0.0
                else np.zeros((spec.minutes, n), dtype=bool))

    if month is not None:
        grid = Grid.from_month(month)
        if spec.minutes > grid.n_minutes:
            raise ConfigError(
                f"{spec.minutes} minutes exceed {month.label}'s {grid.n_minutes}"
            )
    else:
        grid = Grid.synthetic(spec.label, spec.minutes)

    assets = spec.asset_ids()
    returns: list[ReturnSeries] = []
    bars: list[BarSeries] = []
    for j in range(n):
        values = path[:, j].copy()
        values[zero_mask[:, j]] = 0.0

        present = ~gap_mask[:, j]
        # a gap at minute m kills the cells on both sides
        live = present[:-1] & present[1:]

        state = np.full(grid.n_cells, MISSING, dtype=np.uint8)
        cell_values = np.full(grid.n_cells, np.nan)
        state[:t_cells][live] = np.where(values[live] == 0.0, ZERO, VALUE)
        cell_values[:t_cells][live] = values[live]
        returns.append(ReturnSeries(asset=assets[j], grid=grid,
                                    values=cell_values, state=state))

        if include_bars:
            # cumprod multiplies sequentially, so an exact-zero return
            # reproduces the previous price bit for bit
            prices = np.empty(spec.minutes)
            prices[0] = 1.0
            np.cumprod(np.exp(values), out=prices[1:])
            prices *= spec.base_price

            offsets = np.nonzero(present)[0]
            ts = grid.start + offsets.astype("timedelta64[m]")
            close = prices[offsets]
            bars.append(BarSeries(
                asset=assets[j], ts=ts,
                open=close.copy(), high=close.copy(), low=close.copy(),
                close=close, volume=np.zeros(len(offsets)),
                tz_offset_minutes=0, grid=grid,
            ))
    return SynthUniverse(spec=spec, grid=grid, returns=returns, bars=bars)


def stationary_covariance(a: np.ndarray, sigma: np.ndarray,
                          tol: float = 1e-12, max_iter: int = 100000) -> np.ndarray:
    """Fixed point of G = A G A' + diag(sigma^2)."""
    _check_stable(a)
    q = np.diag(np.asarray(sigma, dtype=np.float64) ** 2)
    g = q.copy()
    for _ in range(max_iter):
        nxt = a @ g @ a.T + q
        delta = float(np.abs(nxt - g).max())
        g = nxt
        if delta < tol:
            return g
    raise NonConvergenceError("stationary covariance iteration", max_iter, delta)


def oracle_lagged_corr(spec: SynthSpec, tau: int = 1) -> np.ndarray:
    """Population lagged correlation matrix, leaders on rows.

    corr[i, j] relates asset i's return at t to asset j's at t+tau, from
    the exact second moments of the autoregression.
    """
    a = spec.coefficient_matrix()
    g0 = stationary_covariance(a, spec.sigma_vector())
    g_tau = g0.copy()
    for _ in range(tau):
        g_tau = g_tau @ a.T        # cov(r_t, r_{t+tau}) = G0 (A')^tau
    sd = np.sqrt(np.diag(g0))
    return g_tau / np.outer(sd, sd)


def write_bar_files(universe: SynthUniverse, out_dir: str | Path,
                    month: Month) -> list[Path]:
    """Emit histdata-layout files the ingest defaults can read back.

    Timestamps are written as EST wall clock (the default descriptor's
    offset) and prices at full precision so the round trip is exact.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for series in universe.bars:
        est = series.ts + np.timedelta64(-300, "m")
        stamps = np.datetime_as_string(est.astype("datetime64[s]"), unit="s")
        name = f"{series.asset.base}{series.asset.quote}_{month.year:04d}{month.month:02d}.csv"
        path = out_dir / name
        lines = []
        for i in range(len(series)):
            stamp = stamps[i].replace("-", "").replace("T", " ").replace(":", "")
            price = repr(float(series.close[i]))
            lines.append(f"{stamp};{price};{price};{price};{price};{series.volume[i]:g}")
        path.write_text("\n".join(lines) + "\n")
        written.append(path)
    return written
