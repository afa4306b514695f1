import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seasonal_mortality import MonthKey, Period, SimulationConfig, excess_report, forecast, pandemic_periods, simulate, window
from seasonal_mortality.errors import MonthNotInHorizon, OverlappingPeriods, ValidationError
from seasonal_mortality.excess import DEFAULT_PERIODS, classify

from conftest import make_series

START = MonthKey(2015, 1)
FIT_END = MonthKey(2020, 2)


@pytest.fixture(scope="module")
def history():
    """Counts 2015-01..2022-06 with a population, no shock."""
    cfg = SimulationConfig(n_months=90, start=START, level=-8.0, population=2e6)
    return simulate(cfg, seed=5)


@pytest.fixture(scope="module")
def baseline(history):
    train = window(history, START, FIT_END - START + 1)
    return forecast("stfs", train, 28)


def observed_part(history):
    return window(history, FIT_END.shift(1), 28)


def with_bounds(fc, expected, lower, upper):
    n = fc.horizon_start
    pad = lambda a: np.r_[fc.expected[:n], a]  # noqa: E731
    return dataclasses.replace(fc, expected=pad(expected), lower95=pad(lower), upper95=pad(upper))


def test_presets():
    first, y1, y2 = pandemic_periods(2020)
    assert (first.label, first.start, first.end) == ("first_wave", MonthKey(2020, 3), MonthKey(2020, 6))
    assert (y1.label, y1.start, y1.end) == ("2020-21", MonthKey(2020, 7), MonthKey(2021, 6))
    assert (y2.label, y2.start, y2.end) == ("2021-22", MonthKey(2021, 7), MonthKey(2022, 6))
    assert tuple(pandemic_periods()) == DEFAULT_PERIODS


def test_identity_gives_zero_excess(history, baseline):
    obs = observed_part(history)
    y = obs.deaths.astype(float)
    fc = with_bounds(baseline, y, 0.9 * y, 1.1 * y)
    rep = excess_report(obs, fc)
    assert all(m.excess == 0.0 and m.flag == "within" for m in rep.months)
    assert [p.label for p in rep.periods] == ["first_wave", "2020-21", "2021-22"]
    assert all(p.excess == 0.0 and p.flag == "within" for p in rep.periods)


def test_single_month_threshold():
    assert classify([10.0], [6.0], [8.0]).tolist() == ["excess"]
    assert classify([5.0], [6.0], [8.0]).tolist() == ["deficit"]
    assert classify([8.0], [6.0], [8.0]).tolist() == ["within"]


def test_threshold_row(baseline):
    n = 28
    obs = make_series(np.r_[10, np.full(n - 1, 7)], start=FIT_END.shift(1))
    fc = with_bounds(baseline, np.full(n, 7.0), np.full(n, 6.0), np.full(n, 8.0))
    rep = excess_report(obs, fc, periods=[])
    first = rep.months[0]
    assert (first.observed, first.expected, first.excess, first.flag) == (10.0, 7.0, 3.0, "excess")
    assert rep.periods == ()


def test_period_sums(history, baseline):
    obs = observed_part(history)
    rep = excess_report(obs, baseline)
    for p in rep.periods:
        rows = [m for m in rep.months if p.start <= m.month <= p.end]
        assert p.excess == math.fsum(m.excess for m in rows)
        assert p.observed == sum(m.observed for m in rows)
        assert p.lower95 == pytest.approx(p.observed - sum(m.upper95 for m in rows), rel=1e-12)
        assert p.upper95 == pytest.approx(p.observed - sum(m.lower95 for m in rows), rel=1e-12)
        assert p.lower95 <= p.excess <= p.upper95
    assert len(rep.months) == 28
    assert rep.period("first_wave").start == MonthKey(2020, 3)
    with pytest.raises(KeyError):
        rep.period("nope")


def test_rates_consistent_with_counts(history, baseline):
    obs = observed_part(history)
    rep = excess_report(obs, baseline)
    i0 = baseline.horizon_start
    for k, m in enumerate(rep.months):
        rate_excess = m.observed / m.exposure - baseline.expected_rate[i0 + k]
        assert m.rate("excess") == pytest.approx(rate_excess, rel=1e-10, abs=1e-16)
        assert m.exposure == baseline.exposure[i0 + k]
    for p in rep.periods:
        assert p.excess_rate is not None and p.lower95_rate <= p.excess_rate <= p.upper95_rate


def test_counts_only_has_no_rates():
    s = simulate(SimulationConfig(n_months=90, start=START), seed=2)
    fc = forecast("sp", window(s, START, 62), 28)
    rep = excess_report(window(s, FIT_END.shift(1), 28), fc)
    assert rep.months[0].rate("excess") is None
    assert rep.periods[0].excess_rate is None


def test_observed_outside_horizon(history, baseline):
    with pytest.raises(MonthNotInHorizon):
        excess_report(window(history, FIT_END, 10), baseline, periods=[])


def test_period_outside_observed(history, baseline):
    obs = window(history, MonthKey(2020, 4), 12)
    with pytest.raises(MonthNotInHorizon):
        excess_report(obs, baseline)


def test_overlapping_periods(history, baseline):
    periods = [Period("a", MonthKey(2020, 3), MonthKey(2020, 8)), Period("b", MonthKey(2020, 8), MonthKey(2020, 9))]
    with pytest.raises(OverlappingPeriods):
        excess_report(observed_part(history), baseline, periods)


def test_period_validation():
    with pytest.raises(ValidationError):
        Period("x", MonthKey(2020, 5), MonthKey(2020, 4))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.floats(1, 1e4), st.floats(0, 1), st.floats(0, 1), st.floats(1e-6, 1e3)), min_size=4, max_size=4))
def test_all_excess_months_give_positive_lower_bound(months):
    """If every month of a period is above its upper bound, the period is in excess."""
    base = MonthKey(2020, 3)
    expected = np.array([m[0] for m in months])
    lower = expected * np.array([m[1] for m in months])
    upper = expected * (1 + np.array([m[2] for m in months]))
    observed = np.ceil(upper + np.array([m[3] for m in months]))
    obs = make_series(observed.astype(int), start=base)
    long = make_series(np.full(24, 5), start=base.shift(-24))
    fc = forecast("sp", long, 4)
    fc = with_bounds(fc, expected, lower, upper)
    rep = excess_report(obs, fc, [Period("p", base, base.shift(3))])
    assert all(m.flag == "excess" for m in rep.months)
    (p,) = rep.periods
    assert p.lower95 > 0 and p.flag == "excess"
