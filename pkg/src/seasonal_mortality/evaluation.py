"""Model selection: BIC, forecast accuracy and rolling-window backtests.

A backtest slides a window of ``window_years`` years over the series in
steps of 12 months. Each window is fitted, the following 12 months are
forecast, and the forecast is scored against the held-out months. When the
series has exposures, scoring is on death rates per 1000 person-months.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .basis import BasisSpec
from .design import ModelKind, PenaltyConfig, build_design
from .errors import ShortSeries, ValidationError, ZeroObserved
from .forecast import forecast
from .solver import fit
from .timeseries_io import MonthKey, MonthlySeries, window

TEST_MONTHS = 12
RATE_SCALE = 1000.0
DEFAULT_LAMBDAS = tuple(10.0 ** e for e in np.arange(4.0, 7.01, 0.5))
ORDER_COMBINATIONS = ((1, 1), (2, 2), (1, 2), (2, 1))


def bic(result, n: int) -> float:
    """``2 * deviance + log(n) * ed`` for a fit on ``n`` observed months.

    The factor 2 on the (already doubled) deviance is deliberate, so values are only
    comparable with each other, not with textbook BIC.
    """
    return 2.0 * result.deviance + math.log(n) * result.ed


def _paired(y, y_hat) -> tuple[np.ndarray, np.ndarray]:
    y = np.asarray(y, dtype=float)
    y_hat = np.asarray(y_hat, dtype=float)
    if y.shape != y_hat.shape or y.ndim != 1 or y.size < 1:
        raise ValidationError(f"need equal non-empty 1-d arrays, got {y.shape} and {y_hat.shape}")
    return y, y_hat


def rmse(y_test, y_hat) -> float:
    y, y_hat = _paired(y_test, y_hat)
    return float(np.sqrt(np.mean((y - y_hat) ** 2)))


def mape(y_test, y_hat) -> float:
    """Mean absolute percentage error, in percent."""
    y, y_hat = _paired(y_test, y_hat)
    if np.any(y == 0):
        raise ZeroObserved("MAPE is undefined when an observed value is 0")
    return float(np.mean(np.abs(100.0 * (y - y_hat) / y)))


@dataclass(frozen=True)
class WindowRecord:
    fit_start: MonthKey
    test_start: MonthKey
    bic: float
    deviance: float
    ed: float
    rmse: float
    mape: float


@dataclass(frozen=True)
class BacktestReport:
    kind: ModelKind
    window_years: int
    penalty: PenaltyConfig
    records: tuple[WindowRecord, ...]

    @property
    def window_length(self) -> int:
        return 12 * self.window_years

    @property
    def mean_bic(self) -> float:
        return float(np.mean([r.bic for r in self.records]))

    @property
    def mean_rmse(self) -> float:
        return float(np.mean([r.rmse for r in self.records]))

    @property
    def mean_mape(self) -> float:
        return float(np.mean([r.mape for r in self.records]))


def window_starts(series: MonthlySeries, window_years: int) -> list[MonthKey]:
    """Fit-window starts, stepping 12 months, each followed by a full test year."""
    W = 12 * window_years
    n = (len(series) - W - TEST_MONTHS) // 12 + 1
    if n < 1:
        raise ShortSeries(
            f"stratum {series.stratum!r}: {len(series)} months cannot hold a "
            f"{window_years}-year window plus {TEST_MONTHS} test months"
        )
    return [series.start.shift(12 * i) for i in range(n)]


def score_scale(series: MonthlySeries, counts, exposure) -> np.ndarray:
    """Counts, or rates per 1000 when exposures are present."""
    counts = np.asarray(counts, dtype=float)
    if exposure is None:
        return counts
    return RATE_SCALE * counts / np.asarray(exposure, dtype=float)


def _run_window(series, start, kind, window_years, penalty, basis_spec) -> WindowRecord:
    W = 12 * window_years
    train = window(series, start, W)
    test = window(series, start.shift(W), TEST_MONTHS)

    bundle = build_design(kind, W, 0, basis_spec, penalty, train.exposure)
    fitted = fit(bundle, train.deaths)

    fc = forecast(kind, train, TEST_MONTHS, basis_spec, penalty)
    horizon = slice(fc.horizon_start, None)
    y_test = score_scale(series, test.deaths, test.exposure)
    y_hat = score_scale(
        series, fc.expected[horizon], None if fc.exposure is None else fc.exposure[horizon]
    )
    return WindowRecord(
        fit_start=start,
        test_start=test.start,
        bic=bic(fitted, W),
        deviance=fitted.deviance,
        ed=fitted.ed,
        rmse=rmse(y_test, y_hat),
        mape=mape(y_test, y_hat),
    )


def _map(func, items: Sequence, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [func(it) for it in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, items))


def backtest(
    series: MonthlySeries,
    kind: ModelKind | str,
    window_years: int,
    penalty: PenaltyConfig | None = None,
    basis_spec: BasisSpec | None = None,
    jobs: int = 1,
) -> BacktestReport:
    """Rolling one-year-ahead backtest of ``kind`` on ``series``.

    A series of ``Y`` whole years yields ``Y - window_years`` windows.
    """
    kind = ModelKind(kind)
    penalty = penalty or PenaltyConfig()
    starts = window_starts(series, window_years)
    records = _map(
        lambda s: _run_window(series, s, kind, window_years, penalty, basis_spec), starts, jobs
    )
    return BacktestReport(kind, window_years, penalty, tuple(records))


@dataclass(frozen=True)
class GridSearchResult:
    grid: tuple[tuple[float, float], ...]
    mean_mape: tuple[float, ...]
    chosen: tuple[float, float]

    @property
    def best_mape(self) -> float:
        return min(self.mean_mape)


def lambda_pairs(lambdas: Iterable[float] = DEFAULT_LAMBDAS) -> list[tuple[float, float]]:
    lambdas = [float(v) for v in lambdas]
    return list(itertools.product(lambdas, lambdas))


def choose_pair(grid: Sequence[tuple[float, float]], scores: Sequence[float]) -> tuple[float, float]:
    """Lowest score; ties go to the larger trend weight, then the larger seasonal weight."""
    best = min(range(len(grid)), key=lambda i: (scores[i], -grid[i][0], -grid[i][1]))
    return grid[best]


def grid_search(
    series: MonthlySeries,
    kind: ModelKind | str,
    grid: Sequence[tuple[float, float]] | None = None,
    penalty_orders: tuple[int, int] = (2, 1),
    window_years: int = 5,
    basis_spec: BasisSpec | None = None,
    jobs: int = 1,
) -> GridSearchResult:
    """Pick ``(lambda_trend, lambda_season)`` by minimum backtest mean MAPE."""
    grid = [tuple(map(float, p)) for p in (lambda_pairs() if grid is None else grid)]
    if not grid:
        raise ValidationError("lambda grid is empty")
    window_starts(series, window_years)  # fail fast on short series
    order_trend, order_season = penalty_orders

    def score(pair):
        pen = PenaltyConfig(pair[0], pair[1], order_trend, order_season)
        return backtest(series, kind, window_years, pen, basis_spec).mean_mape

    scores = _map(score, grid, jobs)
    return GridSearchResult(tuple(grid), tuple(scores), choose_pair(grid, scores))


@dataclass(frozen=True)
class TournamentRow:
    order_trend: int
    order_season: int
    mean_rmse: float
    mean_mape: float


def penalty_order_tournament(
    series: MonthlySeries,
    kind: ModelKind | str = ModelKind.SP_STSS,
    window_years: int = 5,
    penalty: PenaltyConfig | None = None,
    basis_spec: BasisSpec | None = None,
    jobs: int = 1,
) -> list[TournamentRow]:
    """Backtest the four (trend, season) difference-order combinations.

    Rows come back ranked by mean MAPE (stable, so ties keep the
    combination order (1,1), (2,2), (1,2), (2,1)).
    """
    base = penalty or PenaltyConfig()

    def run(orders):
        pen = replace(base, order_trend=orders[0], order_season=orders[1])
        rep = backtest(series, kind, window_years, pen, basis_spec)
        return TournamentRow(orders[0], orders[1], rep.mean_rmse, rep.mean_mape)

    rows = _map(run, ORDER_COMBINATIONS, jobs)
    return sorted(rows, key=lambda r: r.mean_mape)
