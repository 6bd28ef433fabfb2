"""Pairwise Granger-causality via nested regressions and the F-test.

For an ordered pair (i leader, j lagger) the full model predicts the
lagger's next return from its own current return and the leader's,

    y_{t+1} = gamma + alpha * y_t + beta * x_t + eta,

and is compared against the restricted model without the leader term.  One
lag and an intercept in both models, so the nesting differs only by beta:
2 vs 3 parameters.  A single restriction makes the F statistic exactly the
square of beta's t statistic, which ties this module's p-values to the
partial-correlation ones on the same sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .assets import AssetId
from .corr import PairStatus, SigMatrix
from .dist import f_sf, f_sf_arr
from .errors import DataError, InsufficientSampleError, NumericError
from .moments import center, compute_moments
from .ols import OlsFit, design_with_intercept, fit_ols
from .returns import ReturnSeries
from .scenario import DEFAULT_MIN_SAMPLE, PairedSample, Scenario

P_RESTRICTED = 2
P_FULL = 3


@dataclass(frozen=True)
class FTest:
    f_stat: float
    p_value: float
    df1: int
    df2: int
    perfect_fit: bool = False


@dataclass(frozen=True)
class GrangerResult:
    """Nested-regression comparison for one ordered pair."""

    leader: AssetId
    lagger: AssetId
    scenario: Scenario
    alpha_hat: float         # lagger self coefficient
    beta_hat: float          # leader coefficient
    gamma_hat: float         # intercept
    s0: float                # variance of the dependent variable
    s1: float                # restricted residual sum of squares
    s2: float                # full residual sum of squares
    r_squared: float
    f_stat: float
    p_value: float
    n: int
    causal: bool
    t_beta: float = math.nan

    def __post_init__(self):
        if self.s2 > self.s1 * (1.0 + 1e-12) + 1e-300:
            raise NumericError(
                f"nested models inverted: S2={self.s2} > S1={self.s1}"
            )


def _check_sample(sample: PairedSample, min_n: int) -> None:
    if sample.scenario not in (Scenario.S3, Scenario.S4):
        raise DataError(
            f"causality runs under S3 or S4, got {sample.scenario}"
        )
    if sample.n < min_n:
        raise InsufficientSampleError(sample.n, min_n,
                                      f"{sample.leader}->{sample.lagger}")


def fit_restricted(sample: PairedSample, min_n: int = DEFAULT_MIN_SAMPLE) -> OlsFit:
    """OLS of y_{t+1} on (1, y_t); rss is the restricted sum S1."""
    _check_sample(sample, min_n)
    return fit_ols(design_with_intercept(sample.y0), sample.y1)


def fit_full(sample: PairedSample, min_n: int = DEFAULT_MIN_SAMPLE) -> OlsFit:
    """OLS of y_{t+1} on (1, y_t, x_t); rss is the full sum S2 and the
    coefficient order is (gamma, alpha, beta)."""
    _check_sample(sample, min_n)
    return fit_ols(design_with_intercept(sample.y0, sample.x), sample.y1)


def f_test(s1: float, s2: float, p1: int = P_RESTRICTED, p2: int = P_FULL,
           n: int = 0) -> FTest:
    """Nested-model F statistic and its upper-tail probability.

    F = ((S1 - S2) / (p2 - p1)) / (S2 / (n - p2)) with (p2 - p1, n - p2)
    degrees of freedom.
    """
    if p2 <= p1:
        raise DataError(f"models not nested: p1={p1}, p2={p2}")
    if n <= p2:
        raise InsufficientSampleError(n, p2 + 1, "F test")
    if s1 < 0.0 or s2 < 0.0:
        raise NumericError(f"negative residual sums: S1={s1}, S2={s2}")
    if s2 > s1:
        if s2 > s1 * (1.0 + 1e-9):
            raise NumericError(f"S2={s2} exceeds S1={s1}")
        s2 = s1  # float noise from an exactly-equal fit
    df1 = p2 - p1
    df2 = n - p2
    if s2 == 0.0:
        if s1 == 0.0:  # restricted model already perfect: no improvement
            return FTest(f_stat=0.0, p_value=1.0, df1=df1, df2=df2,
                         perfect_fit=True)
        return FTest(f_stat=math.inf, p_value=0.0, df1=df1, df2=df2,
                     perfect_fit=True)
    f_stat = ((s1 - s2) / df1) / (s2 / df2)
    return FTest(f_stat=f_stat, p_value=f_sf(f_stat, df1, df2),
                 df1=df1, df2=df2)


def granger_test(sample: PairedSample, alpha: float = 0.01,
                 bonferroni: int = 1,
                 min_n: int = DEFAULT_MIN_SAMPLE) -> GrangerResult:
    """Full nested comparison for one pair; ``causal`` is judged at
    alpha / bonferroni."""
    restricted = fit_restricted(sample, min_n)
    full = fit_full(sample, min_n)
    ft = f_test(restricted.rss, full.rss, P_RESTRICTED, P_FULL, sample.n)
    t_beta = float(full.t_stats()[2])
    return GrangerResult(
        leader=sample.leader, lagger=sample.lagger, scenario=sample.scenario,
        alpha_hat=float(full.coef[1]), beta_hat=float(full.coef[2]),
        gamma_hat=float(full.coef[0]),
        s0=full.tss / sample.n, s1=restricted.rss, s2=full.rss,
        r_squared=full.r_squared, f_stat=ft.f_stat, p_value=ft.p_value,
        n=sample.n, causal=bool(ft.p_value < alpha / bonferroni),
        t_beta=t_beta,
    )


def causality_sweep(series: list[ReturnSeries], scenario: Scenario,
                    tau: int = 1, alpha: float = 0.01,
                    bonferroni: int | None = None,
                    min_n: int = DEFAULT_MIN_SAMPLE) -> SigMatrix:
    """F-test causality for every ordered pair under S3 or S4.

    The statistic layer is the F value and the sign layer the sign of the
    leader coefficient; coefficient and R^2 layers ride along in ``extra``.
    """
    if scenario not in (Scenario.S3, Scenario.S4):
        raise DataError(f"causality runs under S3 or S4, got {scenario}")
    m = compute_moments(series, scenario, tau)
    cm = center(m)
    n = cm.n
    status = np.full(n.shape, PairStatus.OK, dtype=np.uint8)
    status[n < max(min_n, P_FULL + 1)] = PairStatus.INSUFFICIENT

    with np.errstate(invalid="ignore", divide="ignore"):
        # restricted: y1 ~ 1 + y0
        ok = cm.sy00 > 0.0
        a_r = cm.sy01 / np.where(ok, cm.sy00, np.nan)
        s1 = cm.sy11 - a_r * cm.sy01

        # full: y1 ~ 1 + y0 + x, solved from the 2x2 normal equations
        det = cm.sy00 * cm.sxx - cm.sxy0 * cm.sxy0
        scale = np.maximum(cm.sy00 * cm.sxx, cm.sxy0 * cm.sxy0)
        ok &= (cm.sxx > 0.0) & (det > 1e-12 * scale)
        detn = np.where(ok, det, np.nan)
        a_f = (cm.sxx * cm.sy01 - cm.sxy0 * cm.sxy1) / detn
        b_f = (cm.sy00 * cm.sxy1 - cm.sxy0 * cm.sy01) / detn
        s2 = cm.sy11 - a_f * cm.sy01 - b_f * cm.sxy1

        status[(status == PairStatus.OK) & ~ok] = PairStatus.DEGENERATE
        usable = status == PairStatus.OK

        s1 = np.where(usable, np.maximum(s1, 0.0), np.nan)
        s2c = np.where(usable, np.clip(s2, 0.0, s1), np.nan)
        df2 = (n - P_FULL).astype(np.float64)
        f_stat = np.where(s2c > 0.0, (s1 - s2c) / (s2c / df2), np.inf)
        f_stat = np.where((s1 == 0.0) & (s2c == 0.0), 0.0, f_stat)
        f_stat = np.where(usable, f_stat, np.nan)
        p = f_sf_arr(f_stat, 1.0, df2)
        p = np.where(usable & np.isinf(f_stat), 0.0, p)

        r_squared = np.where(usable & (cm.sy11 > 0.0), 1.0 - s2c / cm.sy11, np.nan)
        gamma = cm.mean_y1 - a_f * cm.mean_y0 - b_f * cm.mean_x

    np.fill_diagonal(status, PairStatus.SELF)
    n_assets = len(series)
    return SigMatrix(
        estimator="granger", scenario=scenario, grid_label=m.grid_label,
        tau=tau, assets=m.assets,
        statistic=f_stat, p_value=p, n=n.astype(np.int64),
        sign=np.sign(np.where(np.isfinite(b_f), b_f, 0.0)),
        status=status, alpha=alpha,
        bonferroni_divisor=bonferroni if bonferroni is not None else n_assets * n_assets,
        extra={"alpha_hat": a_f, "beta_hat": b_f, "gamma_hat": gamma,
               "r_squared": r_squared, "s1": s1, "s2": s2c},
    )
