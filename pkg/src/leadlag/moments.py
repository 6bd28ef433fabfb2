"""All-pairs sufficient statistics under a scenario.

Every pairwise estimator in the package needs only the first and second
moments of the triples (x, y0, y1) over the pair's scenario mask.  Because
the mask factorizes into a leader term and a lagger term, each moment
table for all N*N ordered pairs is a single (N, T) x (T, N) matrix
product; this is what makes month-scale universes cheap.

Values are pre-shifted by each series' observed mean before the products.
Correlations, regression slopes, F statistics and R^2 are shift invariant,
so results match the per-pair two-pass estimators to float noise while
avoiding cancellation in the raw sums; intercepts are recovered at the end
by shifting back.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .returns import MISSING, ReturnSeries
from .scenario import Scenario, lagger_mask, leader_mask


@dataclass(frozen=True)
class PairMoments:
    """Masked moment sums for all ordered pairs; leaders index rows."""

    scenario: Scenario
    tau: int
    grid_label: str
    assets: tuple
    shifts: np.ndarray       # per-series centering constants
    n: np.ndarray            # (N, N) triple counts
    sx: np.ndarray
    sy0: np.ndarray
    sy1: np.ndarray
    sxx: np.ndarray
    sy00: np.ndarray
    sy11: np.ndarray
    sxy0: np.ndarray
    sxy1: np.ndarray
    sy01: np.ndarray


def compute_moments(series: list[ReturnSeries], scenario: Scenario,
                    tau: int = 1) -> PairMoments:
    if len(series) < 2:
        raise DataError("need at least two series")
    grid = series[0].grid
    for s in series[1:]:
        if s.grid != grid:
            raise DataError(f"grid mismatch: {s.asset} not on {grid.label}")
    if not 0 <= tau < grid.n_cells:
        raise DataError(f"lag {tau} out of range")
    span = grid.n_cells - tau

    shifts = np.empty(len(series))
    for i, s in enumerate(series):
        obs = s.state != MISSING
        shifts[i] = s.values[obs].mean() if obs.any() else 0.0

    A = np.stack([leader_mask(s, tau) for s in series])
    B = np.stack([lagger_mask(s, scenario, tau) for s in series])

    XA = np.zeros((len(series), span))
    Y0 = np.zeros_like(XA)
    Y1 = np.zeros_like(XA)
    for i, s in enumerate(series):
        np.subtract(s.values[:span], shifts[i], out=XA[i], where=A[i])
        np.subtract(s.values[:span], shifts[i], out=Y0[i], where=B[i])
        np.subtract(s.values[tau:], shifts[i], out=Y1[i], where=B[i])

    Af = A.astype(np.float64)
    Bf = B.astype(np.float64)
    return PairMoments(
        scenario=scenario, tau=tau, grid_label=grid.label,
        assets=tuple(s.asset for s in series), shifts=shifts,
        n=(Af @ Bf.T),
        sx=XA @ Bf.T,
        sy0=Af @ Y0.T,
        sy1=Af @ Y1.T,
        sxx=(XA * XA) @ Bf.T,
        sy00=Af @ (Y0 * Y0).T,
        sy11=Af @ (Y1 * Y1).T,
        sxy0=XA @ Y0.T,
        sxy1=XA @ Y1.T,
        sy01=Af @ (Y0 * Y1).T,
    )


@dataclass(frozen=True)
class CenteredMoments:
    """Per-pair centered second moments (sums of squared deviations)."""

    n: np.ndarray
    sxx: np.ndarray
    sy00: np.ndarray
    sy11: np.ndarray
    sxy0: np.ndarray
    sxy1: np.ndarray
    sy01: np.ndarray
    mean_x: np.ndarray       # filtered means of the unshifted values
    mean_y0: np.ndarray
    mean_y1: np.ndarray


def center(m: PairMoments) -> CenteredMoments:
    with np.errstate(invalid="ignore", divide="ignore"):
        n = m.n
        mx = m.sx / n
        my0 = m.sy0 / n
        my1 = m.sy1 / n
        return CenteredMoments(
            n=n,
            sxx=m.sxx - n * mx * mx,
            sy00=m.sy00 - n * my0 * my0,
            sy11=m.sy11 - n * my1 * my1,
            sxy0=m.sxy0 - n * mx * my0,
            sxy1=m.sxy1 - n * mx * my1,
            sy01=m.sy01 - n * my0 * my1,
            mean_x=mx + m.shifts[:, None],
            mean_y0=my0 + m.shifts[None, :],
            mean_y1=my1 + m.shifts[None, :],
        )
