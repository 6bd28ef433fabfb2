"""Nested regressions, the F-test, and the causality sweep."""

import math

import numpy as np
import pytest
from scipy import stats

from conftest import random_series
from leadlag import (Scenario, causality_sweep, extract, f_test, fit_full,
                     fit_restricted, granger_test)
from leadlag.corr import PairStatus
from leadlag.errors import (DataError, InsufficientSampleError, NumericError,
                            RankDeficiencyError)
from test_corr import make_sample


class TestFitRestricted:
    def test_perfect_self_fit(self, rng):
        y0 = rng.normal(size=400)
        sample = make_sample(rng.normal(size=400), y0, 0.7 * y0)
        assert fit_restricted(sample).rss == pytest.approx(0.0, abs=1e-22)

    def test_iid_slope_near_zero(self, rng):
        n = 20_000
        y = rng.normal(size=n + 1)
        sample = make_sample(rng.normal(size=n), y[:-1], y[1:])
        fit = fit_restricted(sample)
        assert abs(fit.coef[1]) < 3.0 / math.sqrt(n)

    def test_constant_y0_rank_deficient(self, rng):
        sample = make_sample(rng.normal(size=300), np.full(300, 2.0),
                             rng.normal(size=300))
        with pytest.raises(RankDeficiencyError):
            fit_restricted(sample)

    def test_scenario_guard(self, rng):
        sample = make_sample(rng.normal(size=300), rng.normal(size=300),
                             rng.normal(size=300), scenario=Scenario.S1)
        with pytest.raises(DataError, match="S3 or S4"):
            fit_restricted(sample)


class TestFitFull:
    def test_recovers_planted_slope(self, rng):
        n = 10_000
        x = rng.normal(size=n)
        y0 = rng.normal(size=n)
        y1 = 0.5 * x + rng.normal(scale=0.01, size=n)
        fit = fit_full(make_sample(x, y0, y1))
        assert fit.coef[2] == pytest.approx(0.5, abs=0.01)

    def test_collinear_regressors_rank_deficient(self, rng):
        x = rng.normal(size=300)
        with pytest.raises(RankDeficiencyError):
            fit_full(make_sample(x, x, rng.normal(size=300)))

    def test_pure_noise_r2_near_zero(self, rng):
        n = 10_000
        fit = fit_full(make_sample(rng.normal(size=n), rng.normal(size=n),
                                   rng.normal(size=n)))
        assert abs(fit.r_squared) < 10.0 / n * 10


class TestFTest:
    def test_equal_sums_give_zero(self):
        ft = f_test(5.0, 5.0, n=100)
        assert ft.f_stat == 0.0
        assert ft.p_value == 1.0

    def test_frozen_anchor(self):
        # F(1,120) upper tail at 6.85 is the 1% point
        s2 = 1.0
        s1 = s2 * (1.0 + 6.85 / 120.0)
        ft = f_test(s1, s2, n=123)
        assert ft.f_stat == pytest.approx(6.85, rel=1e-12)
        assert ft.p_value == pytest.approx(0.0100, abs=5e-5)

    def test_scale_invariance(self):
        a = f_test(3.0, 2.0, n=500)
        b = f_test(6.0, 4.0, n=500)
        assert a.f_stat == pytest.approx(b.f_stat, rel=1e-14)

    def test_perfect_fit_flag(self):
        ft = f_test(1.0, 0.0, n=50)
        assert ft.perfect_fit and ft.p_value == 0.0 and math.isinf(ft.f_stat)
        both = f_test(0.0, 0.0, n=50)
        assert both.perfect_fit and both.p_value == 1.0 and both.f_stat == 0.0

    def test_preconditions(self):
        with pytest.raises(InsufficientSampleError):
            f_test(2.0, 1.0, n=3)
        with pytest.raises(NumericError):
            f_test(1.0, 2.0, n=100)
        with pytest.raises(NumericError):
            f_test(-1.0, 0.5, n=100)
        with pytest.raises(DataError):
            f_test(1.0, 0.5, p1=3, p2=3, n=100)

    def test_matches_scipy_tail(self):
        ft = f_test(4.0, 3.0, n=200)
        assert ft.p_value == pytest.approx(stats.f.sf(ft.f_stat, 1, 197), abs=1e-12)


class TestGrangerTest:
    def test_t_squared_equals_f(self, rng):
        for seed in range(30):
            r = np.random.default_rng(seed)
            n = int(r.integers(50, 3_000))
            x = r.normal(size=n)
            y0 = r.normal(size=n)
            y1 = 0.2 * y0 + 0.1 * x + r.normal(size=n)
            res = granger_test(make_sample(x, y0, y1), min_n=50)
            assert abs(res.t_beta ** 2 - res.f_stat) <= 1e-8 * max(1.0, res.f_stat)

    def test_r2_reproduced_from_fields(self, rng):
        n = 2_000
        res = granger_test(make_sample(rng.normal(size=n), rng.normal(size=n),
                                       rng.normal(size=n)))
        assert res.r_squared == pytest.approx(1.0 - (res.s2 / n) / res.s0, abs=1e-12)

    def test_nesting_invariant(self, rng):
        for seed in range(20):
            r = np.random.default_rng(seed)
            n = 500
            res = granger_test(make_sample(r.normal(size=n), r.normal(size=n),
                                           r.normal(size=n)))
            assert res.s2 <= res.s1

    def test_p_uniform_under_null(self):
        ps = []
        for seed in range(1_000):
            r = np.random.default_rng(seed)
            n = 500
            ps.append(granger_test(make_sample(r.normal(size=n), r.normal(size=n),
                                               r.normal(size=n))).p_value)
        d, p = stats.kstest(ps, "uniform")
        assert p > 0.01

    def test_statsmodels_cross_check(self, rng):
        sm = pytest.importorskip("statsmodels.tsa.stattools")
        n = 4_000
        x = rng.normal(size=n + 1)
        y = np.empty(n + 1)
        y[0] = rng.normal()
        eps = rng.normal(size=n + 1)
        for i in range(1, n + 1):
            y[i] = 0.1 * y[i - 1] + 0.2 * x[i - 1] + eps[i]
        sample = make_sample(x[:-1], y[:-1], y[1:])
        res = granger_test(sample)
        out = sm.grangercausalitytests(np.column_stack([y, x]), maxlag=1)
        f_sm, p_sm, *_ = out[1][0]["ssr_ftest"]
        assert res.f_stat == pytest.approx(f_sm, rel=5e-3)
        assert res.p_value == pytest.approx(p_sm, rel=0.05, abs=1e-12)


class TestCausalitySweep:
    def test_one_directional_planted_pair(self):
        hits = reverse_hits = 0
        n_seeds = 60
        for seed in range(n_seeds):
            r = np.random.default_rng(seed)
            n = 20_000
            x = r.normal(size=n + 1)
            y = np.empty(n + 1)
            y[0] = 0.0
            eps = r.normal(size=n + 1)
            for i in range(1, n + 1):
                y[i] = 0.1 * x[i - 1] + eps[i]
            from conftest import series_from
            sa = series_from(x, asset="S00/SIM")
            sb = series_from(y, asset="S01/SIM")
            sig = causality_sweep([sa, sb], Scenario.S3,
                                  bonferroni=4356, min_n=100)
            hits += sig.pass_bonferroni[0, 1]
            reverse_hits += sig.pass_bonferroni[1, 0]
        assert hits >= 0.95 * n_seeds
        assert reverse_hits == 0

    def test_feedback_pair_flagged_both_ways(self, rng):
        n = 30_000
        x = np.zeros(n + 1)
        y = np.zeros(n + 1)
        ex = rng.normal(size=n + 1)
        ey = rng.normal(size=n + 1)
        for i in range(1, n + 1):
            x[i] = 0.1 * y[i - 1] + ex[i]
            y[i] = 0.1 * x[i - 1] + ey[i]
        from conftest import series_from
        sig = causality_sweep([series_from(x, asset="S00/SIM"),
                               series_from(y, asset="S01/SIM")],
                              Scenario.S3, bonferroni=4356)
        assert sig.pass_bonferroni[0, 1] and sig.pass_bonferroni[1, 0]

    def test_s4_runs_with_zero_next_returns(self, rng):
        series = [random_series(rng, 5_000, zero_prob=0.3, asset=f"S{k:02d}/SIM")
                  for k in range(3)]
        sig = causality_sweep(series, Scenario.S4)
        ok = np.asarray(sig.status) == PairStatus.OK
        assert ok[~np.eye(3, dtype=bool)].all()
        assert np.isfinite(sig.p_value[ok]).all()

    def test_scenario_guard(self, rng):
        series = [random_series(rng, 300, asset=f"S{k:02d}/SIM") for k in range(2)]
        with pytest.raises(DataError, match="S3 or S4"):
            causality_sweep(series, Scenario.S1)
