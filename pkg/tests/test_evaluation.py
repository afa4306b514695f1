import math
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seasonal_mortality import (
    MonthKey,
    PenaltyConfig,
    SimulationConfig,
    backtest,
    bic,
    forecast,
    grid_search,
    mape,
    penalty_order_tournament,
    rmse,
    simulate,
    window,
)
from seasonal_mortality.errors import ShortSeries, ValidationError, ZeroObserved
from seasonal_mortality.evaluation import (
    DEFAULT_LAMBDAS,
    ORDER_COMBINATIONS,
    choose_pair,
    lambda_pairs,
    score_scale,
    window_starts,
)


class TestMetrics:
    def test_symmetric_errors(self):
        assert rmse([100, 100], [90, 110]) == 10.0
        assert mape([100, 100], [90, 110]) == 10.0

    def test_identity(self):
        y = [3.0, 8.0, 1.0]
        assert rmse(y, y) == 0.0
        assert mape(y, y) == 0.0

    def test_asymmetric_case(self):
        assert rmse([50, 200], [55, 180]) == math.sqrt(212.5)
        assert rmse([50, 200], [55, 180]) == pytest.approx(14.577, abs=5e-4)
        assert mape([50, 200], [55, 180]) == 10.0

    def test_mape_zero_observed(self):
        with pytest.raises(ZeroObserved):
            mape([0, 1], [1, 1])

    @pytest.mark.parametrize("a,b", [([], []), ([1.0], [1.0, 2.0]), ([[1.0]], [[1.0]])])
    def test_shape_errors(self, a, b):
        with pytest.raises(ValidationError):
            rmse(a, b)

    @settings(max_examples=60)
    @given(
        st.lists(st.tuples(st.floats(1, 1e4), st.floats(0, 1e4)), min_size=1, max_size=20),
        st.floats(1e-3, 1e3),
    )
    def test_scale_behaviour(self, pairs, c):
        y, yh = map(np.array, zip(*pairs))
        assert rmse(y, yh) >= 0 and mape(y, yh) >= 0
        assert rmse(c * y, c * yh) == pytest.approx(c * rmse(y, yh), rel=1e-9, abs=1e-9)
        assert mape(c * y, c * yh) == pytest.approx(mape(y, yh), rel=1e-9, abs=1e-9)

    @given(st.lists(st.floats(1, 1e4), min_size=1, max_size=20), st.integers(0, 19), st.floats(0.1, 10))
    def test_zero_iff_equal(self, y, i, bump):
        y = np.array(y)
        i %= len(y)
        yh = y.copy()
        yh[i] += bump
        assert rmse(y, yh) > 0 and mape(y, yh) > 0


class TestBic:
    def test_perfect_fit(self):
        assert bic(SimpleNamespace(deviance=0.0, ed=7.0), 60) == 7.0 * math.log(60)

    def test_arithmetic(self):
        value = bic(SimpleNamespace(deviance=100.0, ed=10.0), 60)
        assert value == 200.0 + 10.0 * math.log(60)
        assert value == pytest.approx(240.94, abs=5e-3)


class TestWindows:
    def test_decade_five_year_windows(self, decade):
        starts = window_starts(decade, 5)
        assert starts == [MonthKey(2010 + i, 1) for i in range(5)]

    def test_boundary_single_window(self, decade):
        s = window(decade, decade.start, 72)
        assert len(window_starts(s, 5)) == 1
        with pytest.raises(ShortSeries):
            window_starts(window(decade, decade.start, 71), 5)

    @pytest.mark.parametrize("years,W", [(12, 5), (12, 10), (15, 10), (11, 10)])
    def test_count_is_years_minus_window(self, years, W):
        s = simulate(SimulationConfig(n_months=12 * years, level=4.0), seed=years)
        assert len(window_starts(s, W)) == years - W

    def test_backtest_records(self, decade):
        rep = backtest(decade, "stfs", 5)
        assert len(rep.records) == 5
        assert rep.window_length == 60
        for r in rep.records:
            assert r.test_start == r.fit_start.shift(60)
            assert r.test_start > r.fit_start.shift(59)
            assert r.rmse >= 0 and r.mape >= 0
            assert r.bic == pytest.approx(2 * r.deviance + math.log(60) * r.ed)
        assert rep.mean_mape == pytest.approx(np.mean([r.mape for r in rep.records]))
        assert rep.records[-1].test_start == MonthKey(2019, 1)

    def test_backtest_window_matches_direct_forecast(self, decade):
        rep = backtest(decade, "sp", 5)
        r = rep.records[2]
        train = window(decade, r.fit_start, 60)
        test = window(decade, r.test_start, 12)
        fc = forecast("sp", train, 12)
        assert r.mape == mape(test.deaths, fc.expected[60:])
        assert r.rmse == rmse(test.deaths, fc.expected[60:])

    def test_rates_are_scored_per_thousand(self, decade_rates):
        rep = backtest(decade_rates, "sp", 5)
        r = rep.records[0]
        fc = forecast("sp", window(decade_rates, r.fit_start, 60), 12)
        test = window(decade_rates, r.test_start, 12)
        y = 1000 * test.deaths / test.exposure
        assert r.rmse == pytest.approx(rmse(y, 1000 * fc.expected_rate[60:]), rel=1e-12)
        assert np.allclose(score_scale(decade_rates, [2.0], [4.0]), [500.0])

    def test_parallel_is_identical(self, decade):
        a = backtest(decade, "stss", 5, jobs=1)
        b = backtest(decade, "stss", 5, jobs=4)
        assert a.records == b.records


class TestGridSearch:
    def test_default_grid(self):
        assert len(DEFAULT_LAMBDAS) == 7
        assert DEFAULT_LAMBDAS[0] == 1e4 and DEFAULT_LAMBDAS[-1] == pytest.approx(1e7)
        assert len(lambda_pairs()) == 49

    def test_single_pair(self, decade):
        res = grid_search(decade, "stfs", grid=[(3e4, 2e5)])
        assert res.chosen == (3e4, 2e5)
        assert res.best_mape == res.mean_mape[0]

    def test_ties_prefer_larger_weights(self):
        grid = [(1e4, 1e7), (1e5, 1e4), (1e5, 1e5), (1e4, 1e4)]
        assert choose_pair(grid, [1.0, 1.0, 1.0, 2.0]) == (1e5, 1e5)
        assert choose_pair(grid, [1.0, 0.5, 1.0, 2.0]) == (1e5, 1e4)

    def test_full_grid_attains_minimum(self, decade):
        res = grid_search(decade, "stss", jobs=4)
        assert len(res.grid) == 49
        i = res.grid.index(res.chosen)
        assert all(res.mean_mape[i] <= m for m in res.mean_mape)
        # each surface point is the backtest mean it claims to be
        for k in (0, 24, 48):
            l1, l2 = res.grid[k]
            assert res.mean_mape[k] == backtest(decade, "stss", 5, PenaltyConfig(l1, l2)).mean_mape

    def test_empty_grid(self, decade):
        with pytest.raises(ValidationError):
            grid_search(decade, "sp", grid=[])


class TestTournament:
    def test_four_rows_sorted_and_deterministic(self, decade):
        a = penalty_order_tournament(decade, window_years=5)
        b = penalty_order_tournament(decade, window_years=5, jobs=4)
        assert len(a) == 4
        assert {(r.order_trend, r.order_season) for r in a} == set(ORDER_COMBINATIONS)
        assert [r.mean_mape for r in a] == sorted(r.mean_mape for r in a)
        assert a == b
