"""Excess mortality against a forecast baseline.

Monthly excess is ``observed - expected``. A month is flagged ``excess``
when the observation lies above the upper 95% bound, ``deficit`` below the
lower bound, and ``within`` otherwise. Period totals sum the monthly values;
period bounds sum the monthly bounds, so the lower bound on period excess is
``sum(observed) - sum(upper95)`` and vice versa. This is conservative next to
intervals built from the full covariance of the linear predictor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import MonthNotInHorizon, OverlappingPeriods, ValidationError
from .forecast import ForecastResult
from .timeseries_io import MonthKey, MonthlySeries

EXCESS, DEFICIT, WITHIN = "excess", "deficit", "within"


@dataclass(frozen=True)
class Period:
    label: str
    start: MonthKey
    end: MonthKey  # inclusive

    def __post_init__(self):
        if self.end < self.start:
            raise ValidationError(f"period {self.label!r} ends before it starts")

    def contains(self, month: MonthKey) -> bool:
        return self.start <= month <= self.end


def pandemic_periods(year: int = 2020) -> list[Period]:
    """First wave (March-June) and the two following July-June years."""
    return [
        Period("first_wave", MonthKey(year, 3), MonthKey(year, 6)),
        Period(f"{year}-{(year + 1) % 100:02d}", MonthKey(year, 7), MonthKey(year + 1, 6)),
        Period(f"{year + 1}-{(year + 2) % 100:02d}", MonthKey(year + 1, 7), MonthKey(year + 2, 6)),
    ]


DEFAULT_PERIODS = tuple(pandemic_periods(2020))


def classify(observed, lower, upper) -> np.ndarray:
    observed, lower, upper = (np.asarray(a, dtype=float) for a in (observed, lower, upper))
    return np.where(observed > upper, EXCESS, np.where(observed < lower, DEFICIT, WITHIN))


@dataclass(frozen=True)
class MonthRow:
    month: MonthKey
    observed: float
    expected: float
    lower95: float
    upper95: float
    excess: float
    flag: str
    exposure: float | None = None

    def rate(self, name: str) -> float | None:
        """``observed_rate`` etc.: the count-scale field divided by exposure."""
        return None if self.exposure is None else getattr(self, name) / self.exposure


@dataclass(frozen=True)
class PeriodRow:
    label: str
    start: MonthKey
    end: MonthKey
    observed: float
    expected: float
    excess: float
    lower95: float
    upper95: float
    flag: str
    excess_rate: float | None = None
    lower95_rate: float | None = None
    upper95_rate: float | None = None


@dataclass(frozen=True)
class ExcessReport:
    stratum: str
    months: tuple[MonthRow, ...]
    periods: tuple[PeriodRow, ...]

    def period(self, label: str) -> PeriodRow:
        for p in self.periods:
            if p.label == label:
                return p
        raise KeyError(label)


def _check_periods(periods: Sequence[Period]) -> None:
    ordered = sorted(periods, key=lambda p: p.start)
    for a, b in zip(ordered, ordered[1:]):
        if b.start <= a.end:
            raise OverlappingPeriods(f"periods {a.label!r} and {b.label!r} overlap")


def excess_report(
    observed: MonthlySeries,
    fc: ForecastResult,
    periods: Sequence[Period] = DEFAULT_PERIODS,
) -> ExcessReport:
    """Monthly and per-period excess of ``observed`` over the forecast baseline.

    ``observed`` must lie inside the forecast horizon, and every period inside
    ``observed``. Rates use the forecast's exposures, so that
    ``count excess / exposure == rate excess`` month by month.
    """
    horizon = fc.horizon_months
    h0 = horizon[0]
    for m in (observed.start, observed.end):
        if not (h0 <= m <= horizon[-1]):
            raise MonthNotInHorizon(
                f"stratum {observed.stratum!r}: {m} outside forecast horizon {h0}..{horizon[-1]}"
            )
    _check_periods(periods)
    for p in periods:
        if not (observed.start <= p.start and p.end <= observed.end):
            raise MonthNotInHorizon(
                f"period {p.label!r} ({p.start}..{p.end}) not covered by observed "
                f"{observed.start}..{observed.end}"
            )

    idx = slice(fc.horizon_start + (observed.start - h0), fc.horizon_start + (observed.end - h0) + 1)
    obs = np.asarray(observed.deaths, dtype=float)
    exp_, lo, hi = fc.expected[idx], fc.lower95[idx], fc.upper95[idx]
    exposure = None if fc.exposure is None else fc.exposure[idx]
    excess = obs - exp_
    flags = classify(obs, lo, hi)

    months = tuple(
        MonthRow(
            m, float(obs[i]), float(exp_[i]), float(lo[i]), float(hi[i]), float(excess[i]), str(flags[i]),
            None if exposure is None else float(exposure[i]),
        )
        for i, m in enumerate(observed.months)
    )

    rows = []
    for p in periods:
        sel = np.array([p.contains(m) for m in observed.months])
        o, e = obs[sel].sum(), exp_[sel].sum()
        ex = math.fsum(excess[sel])
        lower, upper = o - hi[sel].sum(), o - lo[sel].sum()
        flag = EXCESS if lower > 0 else DEFICIT if upper < 0 else WITHIN
        rate_fields = {}
        if exposure is not None:
            ev = exposure[sel]
            rate_fields = dict(
                excess_rate=math.fsum(excess[sel] / ev),
                lower95_rate=float(np.sum((obs[sel] - hi[sel]) / ev)),
                upper95_rate=float(np.sum((obs[sel] - lo[sel]) / ev)),
            )
        rows.append(PeriodRow(p.label, p.start, p.end, float(o), float(e), ex, float(lower), float(upper), flag, **rate_fields))
    return ExcessReport(observed.stratum, months, tuple(rows))
