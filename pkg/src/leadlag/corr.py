"""Lagged and lagged-partial correlation with significance control.

The lagged correlation for a pair (i leader, j lagger) at lag tau is the
Pearson coefficient between i's return at t and j's return at t+tau over
the scenario-filtered triples, with means taken inside the filtered sample.
The partial variant additionally removes the contemporaneous correlation
and the lagger's serial autocorrelation, either in closed form from the
three pairwise correlations or as the correlation of regression residuals;
on the same sample moments the two routes are algebraically identical.

Significance defaults to the two-sided Student-t transform of r, with a
Fisher-z alternative, and the family-wise threshold divides alpha by the
full test count N*N.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .assets import AssetId
from .dist import normal_sf, student_t_two_sided, student_t_two_sided_arr
from .errors import (DataError, DegenerateSampleError, InsufficientSampleError,
                     SingularityError)
from .moments import center, compute_moments
from .ols import design_with_intercept, fit_ols
from .returns import ReturnSeries
from .scenario import DEFAULT_MIN_SAMPLE, PairedSample, Scenario, extract

SIG_TESTS = ("t", "fisher")


class PairStatus(enum.IntEnum):
    OK = 0
    SELF = 1
    INSUFFICIENT = 2
    DEGENERATE = 3


@dataclass(frozen=True)
class LaggedCorr:
    leader: AssetId
    lagger: AssetId
    tau: int
    rho: float
    n: int
    p_value: float


@dataclass(frozen=True)
class PartialCorr:
    leader: AssetId
    lagger: AssetId
    tau: int
    rho_p: float
    n: int
    p_value: float


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    xd = x - x.mean()
    yd = y - y.mean()
    vx = float(xd @ xd)
    vy = float(yd @ yd)
    if vx <= 0.0 or vy <= 0.0:
        raise DegenerateSampleError("zero variance in correlation input")
    return float(xd @ yd) / math.sqrt(vx * vy)


def _corr_p_value(rho: float, n: int, n_conditioned: int, sig_test: str) -> float:
    """Two-sided p for a (partial) correlation with n_conditioned controls."""
    if sig_test not in SIG_TESTS:
        raise DataError(f"unknown significance test {sig_test!r}")
    if sig_test == "fisher":
        df = n - 3 - n_conditioned
        if df <= 0:
            raise InsufficientSampleError(n, 4 + n_conditioned, "fisher z")
        if abs(rho) >= 1.0:
            return 0.0
        z = math.atanh(rho) * math.sqrt(df)
        return 2.0 * normal_sf(abs(z))
    df = n - 2 - n_conditioned
    if df <= 0:
        raise InsufficientSampleError(n, 3 + n_conditioned, "t test")
    denom = 1.0 - rho * rho
    if denom <= 0.0:
        return 0.0
    t = rho * math.sqrt(df / denom)
    return student_t_two_sided(t, df)


def lagged_correlation(sample: PairedSample, min_n: int = DEFAULT_MIN_SAMPLE,
                       sig_test: str = "t") -> LaggedCorr:
    """Pearson correlation of (x_t, y_{t+tau}) over the sample's triples."""
    if sample.n < min_n:
        raise InsufficientSampleError(sample.n, min_n,
                                      f"{sample.leader}->{sample.lagger}")
    rho = _pearson(sample.x, sample.y1)
    p = _corr_p_value(rho, sample.n, 0, sig_test)
    return LaggedCorr(leader=sample.leader, lagger=sample.lagger, tau=sample.tau,
                      rho=rho, n=sample.n, p_value=p)


def lagged_autocorrelation(series: ReturnSeries, tau: int,
                           scenario: Scenario = Scenario.S1,
                           min_n: int = DEFAULT_MIN_SAMPLE,
                           sig_test: str = "t") -> LaggedCorr:
    """Self-pair lagged correlation of a single series."""
    return lagged_correlation(extract(series, series, scenario, tau),
                              min_n=min_n, sig_test=sig_test)


def partial_correlation_closed(rho_xy_lag: float, rho_xy_0: float,
                               rho_yy_lag: float) -> float:
    """Partial correlation of (x_t, y_{t+tau}) given y_t, from the three
    pairwise correlations."""
    for name, r in (("rho_xy_lag", rho_xy_lag), ("rho_xy_0", rho_xy_0),
                    ("rho_yy_lag", rho_yy_lag)):
        if not math.isfinite(r) or abs(r) > 1.0:
            raise DataError(f"{name}={r} is not a correlation")
    denom_sq = (1.0 - rho_xy_0 * rho_xy_0) * (1.0 - rho_yy_lag * rho_yy_lag)
    if denom_sq <= 0.0:
        raise SingularityError(
            f"conditioning correlation at +-1 (rho_xy_0={rho_xy_0}, "
            f"rho_yy_lag={rho_yy_lag})"
        )
    return (rho_xy_lag - rho_xy_0 * rho_yy_lag) / math.sqrt(denom_sq)


def partial_correlation_residual(sample: PairedSample,
                                 min_n: int = DEFAULT_MIN_SAMPLE,
                                 sig_test: str = "t") -> PartialCorr:
    """Partial correlation as the Pearson correlation of the residuals of
    x_t and y_{t+tau}, each regressed on y_t with an intercept."""
    if sample.scenario is not Scenario.S3:
        raise DataError(
            f"partial correlation requires an S3 sample, got {sample.scenario}"
        )
    if sample.n < min_n:
        raise InsufficientSampleError(sample.n, min_n,
                                      f"{sample.leader}->{sample.lagger}")
    X = design_with_intercept(sample.y0)
    fit_x = fit_ols(X, sample.x)
    fit_y = fit_ols(X, sample.y1)
    for fit, name in ((fit_x, "leader"), (fit_y, "lagger next")):
        # an exact affine function of y_t leaves only float noise behind
        if fit.rss <= 1e-20 * max(fit.tss, 1e-300):
            raise DegenerateSampleError(
                f"zero residual variance on the {name} side"
            )
    rho_p = _pearson(fit_x.residuals, fit_y.residuals)
    p = _corr_p_value(rho_p, sample.n, 1, sig_test)
    return PartialCorr(leader=sample.leader, lagger=sample.lagger, tau=sample.tau,
                       rho_p=rho_p, n=sample.n, p_value=p)


@dataclass(frozen=True)
class SigMatrix:
    """Statistic / p-value / pass-flag container for one estimator-month.

    Row index is the leader, column the lagger.  Pass flags exclude the
    diagonal and anything not in OK status, and the family-wise flag can
    only be a subset of the nominal one because the threshold divides
    alpha by ``bonferroni_divisor`` >= 1.
    """

    estimator: str
    scenario: Scenario
    grid_label: str
    tau: int
    assets: tuple[AssetId, ...]
    statistic: np.ndarray
    p_value: np.ndarray
    n: np.ndarray
    sign: np.ndarray
    status: np.ndarray
    alpha: float
    bonferroni_divisor: int
    extra: dict = field(default_factory=dict)

    @property
    def n_assets(self) -> int:
        return len(self.assets)

    @property
    def bonferroni_threshold(self) -> float:
        return self.alpha / self.bonferroni_divisor

    def _testable(self) -> np.ndarray:
        ok = np.asarray(self.status) == PairStatus.OK
        off_diag = ~np.eye(self.n_assets, dtype=bool)
        return ok & off_diag

    @property
    def pass_bonferroni(self) -> np.ndarray:
        with np.errstate(invalid="ignore"):
            return self._testable() & (self.p_value < self.bonferroni_threshold)

    @property
    def pass_nominal(self) -> np.ndarray:
        with np.errstate(invalid="ignore"):
            return self._testable() & (self.p_value < self.alpha)

    def asset_index(self) -> dict[AssetId, int]:
        return {a: i for i, a in enumerate(self.assets)}


def _corr_stats_from_moments(cm, min_n: int, sig_test: str, estimator: str):
    """Vectorized rho/p for plain or partial correlation from centered
    moments; returns (rho, p, status, extra)."""
    n = cm.n
    status = np.full(n.shape, PairStatus.OK, dtype=np.uint8)
    status[n < min_n] = PairStatus.INSUFFICIENT

    with np.errstate(invalid="ignore", divide="ignore"):
        var_ok = (cm.sxx > 0.0) & (cm.sy11 > 0.0)
        rho = np.where(var_ok, cm.sxy1 / np.sqrt(cm.sxx * cm.sy11), np.nan)
        extra = {}
        if estimator == "pcorr":
            var_ok &= cm.sy00 > 0.0
            rho0 = np.where(var_ok, cm.sxy0 / np.sqrt(cm.sxx * cm.sy00), np.nan)
            ryy = np.where(var_ok, cm.sy01 / np.sqrt(cm.sy00 * cm.sy11), np.nan)
            denom_sq = (1.0 - rho0 * rho0) * (1.0 - ryy * ryy)
            var_ok &= denom_sq > 0.0
            rho = np.where(var_ok, (rho - rho0 * ryy) / np.sqrt(denom_sq), np.nan)
            n_conditioned = 1
        else:
            n_conditioned = 0
        status[(status == PairStatus.OK) & ~var_ok] = PairStatus.DEGENERATE

        df = n - 2 - n_conditioned
        low_df = df <= 0 if sig_test == "t" else df <= 1
        status[(status == PairStatus.OK) & low_df] = PairStatus.INSUFFICIENT
        usable = status == PairStatus.OK
        rho = np.where(usable, rho, np.nan)
        one_minus = 1.0 - rho * rho
        if sig_test == "fisher":
            dff = np.maximum((n - 3 - n_conditioned).astype(np.float64), 0.0)
            z = np.abs(np.arctanh(np.clip(rho, -1.0, 1.0))) * np.sqrt(dff)
            p = np.vectorize(math.erfc)(z / math.sqrt(2.0))
            p = np.where(np.isfinite(rho), p, np.nan)
        else:
            t = rho * np.sqrt(df / np.where(one_minus > 0.0, one_minus, np.nan))
            p = student_t_two_sided_arr(t, df.astype(np.float64))
            p = np.where(usable & (one_minus <= 0.0), 0.0, p)
    return rho, p, status, extra


def significance_sweep(series: list[ReturnSeries], estimator: str,
                       scenario: Scenario, tau: int = 1, alpha: float = 0.01,
                       bonferroni: int | None = None,
                       min_n: int = DEFAULT_MIN_SAMPLE,
                       sig_test: str = "t") -> SigMatrix:
    """Correlation estimates and significance for every ordered pair.

    ``estimator`` is "corr" or "pcorr"; partial correlation demands an S3
    sample.  The Bonferroni divisor defaults to N*N.
    """
    if estimator not in ("corr", "pcorr"):
        raise DataError(f"unknown estimator {estimator!r}")
    if sig_test not in SIG_TESTS:
        raise DataError(f"unknown significance test {sig_test!r}")
    if estimator == "pcorr" and scenario is not Scenario.S3:
        raise DataError("partial correlation requires scenario S3")
    m = compute_moments(series, scenario, tau)
    cm = center(m)
    rho, p, status, extra = _corr_stats_from_moments(cm, min_n, sig_test, estimator)
    np.fill_diagonal(status, PairStatus.SELF)
    n_assets = len(series)
    return SigMatrix(
        estimator=estimator, scenario=scenario, grid_label=m.grid_label,
        tau=tau, assets=m.assets,
        statistic=rho, p_value=p, n=cm.n.astype(np.int64),
        sign=np.sign(np.where(np.isfinite(rho), rho, 0.0)),
        status=status, alpha=alpha,
        bonferroni_divisor=bonferroni if bonferroni is not None else n_assets * n_assets,
        extra=extra,
    )
