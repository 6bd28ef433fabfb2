"""Scenario predicates, triple extraction, and the census table."""

import numpy as np
import pytest

from conftest import random_series, series_with_states
from leadlag import Scenario, extract, sample_census
from leadlag.errors import DataError
from leadlag.returns import MISSING, VALUE, ZERO

V, Z, M = VALUE, ZERO, MISSING


def test_worked_example_s1_s2_s3():
    # leader cells (1.0, Zero); lagger cells (Zero, 2.0)
    leader = series_with_states([1.0, 0.0], [V, Z])
    lagger = series_with_states([0.0, 2.0], [Z, V], asset="S01/SIM")

    s1 = extract(leader, lagger, Scenario.S1)
    assert s1.n == 1
    assert (s1.x[0], s1.y0[0], s1.y1[0]) == (1.0, 0.0, 2.0)
    assert s1.idx[0] == 0

    s2 = extract(leader, lagger, Scenario.S2)
    assert s2.n == 1
    assert (s2.x[0], s2.y0[0], s2.y1[0]) == (1.0, 0.0, 2.0)

    s3 = extract(leader, lagger, Scenario.S3)
    assert s3.n == 0

    s4 = extract(leader, lagger, Scenario.S4)
    assert s4.n == 0


def test_missing_never_inside_triples(rng):
    a = random_series(rng, 800, zero_prob=0.15, gap_prob=0.15)
    b = random_series(rng, 800, zero_prob=0.15, gap_prob=0.15, asset="S01/SIM")
    for scenario in Scenario:
        s = extract(a, b, scenario)
        assert np.isfinite(s.x).all()
        assert np.isfinite(s.y0).all()
        assert np.isfinite(s.y1).all()
        # leader always nonzero
        assert (s.x != 0.0).all()


def test_scenario_predicates_by_brute_force(rng):
    a = random_series(rng, 600, zero_prob=0.2, gap_prob=0.2)
    b = random_series(rng, 600, zero_prob=0.2, gap_prob=0.2, asset="S01/SIM")
    want = {sc: [] for sc in Scenario}
    for n in range(599):
        lead_v = a.state[n] == V
        y0_obs, y1_obs = b.state[n] != M, b.state[n + 1] != M
        y0_v, y1_v = b.state[n] == V, b.state[n + 1] == V
        if lead_v and y0_obs and y1_obs:
            want[Scenario.S1].append(n)
        if lead_v and y0_obs and y1_v:
            want[Scenario.S2].append(n)
        if lead_v and y0_v and y1_v:
            want[Scenario.S3].append(n)
        if lead_v and y0_v and y1_obs:
            want[Scenario.S4].append(n)
    for scenario in Scenario:
        got = extract(a, b, scenario)
        assert list(got.idx) == want[scenario], scenario


def test_inclusion_chain(rng):
    for seed in range(5):
        r = np.random.default_rng(seed)
        a = random_series(r, 500, zero_prob=0.25, gap_prob=0.1)
        b = random_series(r, 500, zero_prob=0.25, gap_prob=0.1, asset="S01/SIM")
        idx = {sc: set(extract(a, b, sc).idx) for sc in Scenario}
        assert idx[Scenario.S3] <= idx[Scenario.S2] <= idx[Scenario.S1]
        assert idx[Scenario.S3] <= idx[Scenario.S4] <= idx[Scenario.S1]


def test_direction_matters(rng):
    a = random_series(rng, 400, zero_prob=0.3)
    b = random_series(rng, 400, zero_prob=0.3, asset="S01/SIM")
    ab = extract(a, b, Scenario.S2)
    ba = extract(b, a, Scenario.S2)
    assert list(ab.idx) != list(ba.idx)
    aa = extract(a, a, Scenario.S2)
    aa2 = extract(a, a, Scenario.S2)
    assert list(aa.idx) == list(aa2.idx)


def test_removing_minutes_is_monotone(rng):
    a = random_series(rng, 500, zero_prob=0.2)
    b = random_series(rng, 500, zero_prob=0.2, asset="S01/SIM")
    base = {sc: extract(a, b, sc).n for sc in Scenario}
    # knock out some lagger cells
    state = b.state.copy()
    values = b.values.copy()
    kill = rng.choice(500, 50, replace=False)
    state[kill] = M
    values[kill] = np.nan
    from leadlag import ReturnSeries
    b2 = ReturnSeries(b.asset, b.grid, values, state)
    for sc in Scenario:
        assert extract(a, b2, sc).n <= base[sc]


def test_mismatched_grids_rejected(rng):
    a = random_series(rng, 100, label="g1")
    b = random_series(rng, 100, label="g2", asset="S01/SIM")
    with pytest.raises(DataError, match="grid"):
        extract(a, b, Scenario.S1)


def test_tau_two_shifts_pairing(rng):
    a = random_series(rng, 50)
    b = random_series(rng, 50, asset="S01/SIM")
    s = extract(a, b, Scenario.S3, tau=2)
    assert s.n == 48
    assert np.array_equal(s.y1, b.values[2:])


class TestCensus:
    def test_counts_match_extract(self, rng):
        series = [random_series(rng, 300, zero_prob=0.2, gap_prob=0.1,
                                asset=f"S{k:02d}/SIM") for k in range(4)]
        for scenario in Scenario:
            table = sample_census(series, scenario)
            for i in range(4):
                for j in range(4):
                    assert table[i, j] == extract(series[i], series[j], scenario).n

    def test_dense_universe_full_counts(self, rng):
        series = [random_series(rng, 999, asset=f"S{k:02d}/SIM") for k in range(3)]
        table = sample_census(series, Scenario.S3)
        # 1000-minute grid -> 999 cells -> 998 triples at lag 1
        assert (table == 998).all()

    def test_disjoint_series_zero_counts(self):
        half = 100
        a_vals = np.concatenate([np.full(half, 0.5), np.full(half, np.nan)])
        b_vals = np.concatenate([np.full(half, np.nan), np.full(half, 0.5)])
        a = series_with_states(a_vals, [V] * half + [M] * half)
        b = series_with_states(b_vals, [M] * half + [V] * half, asset="S01/SIM")
        table = sample_census([a, b], Scenario.S1)
        assert table[0, 1] == 0 and table[1, 0] == 0

    def test_identical_series_diagonal(self, rng):
        a = random_series(rng, 400, zero_prob=0.3)
        table = sample_census([a, a], Scenario.S3)
        # brute force: consecutive nonzero positions
        v = a.state == V
        expected = int((v[:-1] & v[1:]).sum())
        assert table[0, 0] == expected
        assert (table == expected).all()

    def test_needs_two_series(self, rng):
        with pytest.raises(DataError):
            sample_census([random_series(rng, 100)], Scenario.S1)
