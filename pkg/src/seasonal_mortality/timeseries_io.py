"""Monthly death series: data model, CSV ingestion, exposures and windows.

Two CSV files form the ingestion contract (UTF-8, comma separated, LF):

``deaths.csv``
    header ``stratum,year,month,deaths``; rows may come in any order.
``population.csv``
    header ``stratum,year,jan1_population``.

Stratum labels are opaque strings of the form ``COUNTRY[:SEX][:AGEGROUP]``.
"""

from __future__ import annotations

import csv
import io
from collections import defaultdict
from dataclasses import dataclass, field
from functools import total_ordering
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    DuplicateMonth,
    ExposureLengthMismatch,
    MalformedRow,
    MissingMonth,
    MissingPopulationYear,
    NegativeDeaths,
    NonPositivePopulation,
    OutOfRange,
    ValidationError,
)

DEATHS_HEADER = ("stratum", "year", "month", "deaths")
POPULATION_HEADER = ("stratum", "year", "jan1_population")


@total_ordering
@dataclass(frozen=True)
class MonthKey:
    """A calendar month, ordered lexicographically by ``(year, month)``."""

    year: int
    month: int

    def __post_init__(self):
        if not 1 <= self.month <= 12:
            raise ValidationError(f"month must be in 1..12, got {self.month}")

    def __lt__(self, other: MonthKey) -> bool:
        return (self.year, self.month) < (other.year, other.month)

    @property
    def ordinal(self) -> int:
        """Months since January of year 0."""
        return self.year * 12 + self.month - 1

    @classmethod
    def from_ordinal(cls, ordinal: int) -> MonthKey:
        year, m0 = divmod(int(ordinal), 12)
        return cls(year, m0 + 1)

    @classmethod
    def parse(cls, text: str) -> MonthKey:
        """Parse ``YYYY-MM``."""
        try:
            year, month = text.strip().split("-")
            return cls(int(year), int(month))
        except (ValueError, AttributeError) as exc:
            raise ValidationError(f"expected YYYY-MM, got {text!r}") from exc

    def shift(self, n: int) -> MonthKey:
        return MonthKey.from_ordinal(self.ordinal + n)

    def __sub__(self, other: MonthKey) -> int:
        return self.ordinal - other.ordinal

    def __str__(self) -> str:
        return f"{self.year:04d}-{self.month:02d}"


def month_range(start: MonthKey, n: int) -> tuple[MonthKey, ...]:
    return tuple(start.shift(i) for i in range(n))


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class MonthlySeries:
    """Observed deaths (and optionally exposures) for one stratum.

    Parameters
    ----------
    stratum : str
        Label such as ``"SE"`` or ``"SE:F:85+"``.
    months : sequence of MonthKey
        Contiguous and strictly increasing.
    deaths : array_like of int
        Non-negative counts, one per month.
    exposure : array_like of float, optional
        Person-months at risk, strictly positive. ``None`` means the series
        is modelled as counts.
    """

    stratum: str
    months: tuple[MonthKey, ...]
    deaths: np.ndarray
    exposure: np.ndarray | None = field(default=None)

    def __post_init__(self):
        months = tuple(self.months)
        object.__setattr__(self, "months", months)
        for prev, cur in zip(months, months[1:]):
            if cur - prev < 1:
                raise DuplicateMonth(f"stratum {self.stratum!r}: month {cur} not strictly increasing")
            if cur - prev > 1:
                raise MissingMonth(f"stratum {self.stratum!r}: missing month {prev.shift(1)}")

        deaths = np.asarray(self.deaths)
        if deaths.shape != (len(months),):
            raise ValidationError(
                f"stratum {self.stratum!r}: {deaths.size} deaths for {len(months)} months"
            )
        if deaths.size and not np.all(np.equal(np.mod(deaths, 1), 0)):
            raise ValidationError(f"stratum {self.stratum!r}: deaths must be integers")
        if np.any(deaths < 0):
            bad = months[int(np.argmax(deaths < 0))]
            raise NegativeDeaths(f"stratum {self.stratum!r}: negative deaths in {bad}")
        object.__setattr__(self, "deaths", _readonly(deaths.astype(np.int64)))

        if self.exposure is not None:
            exposure = np.asarray(self.exposure, dtype=float)
            if exposure.shape != (len(months),):
                raise ExposureLengthMismatch(
                    f"stratum {self.stratum!r}: {exposure.size} exposures for {len(months)} months"
                )
            if not np.all(np.isfinite(exposure)) or np.any(exposure <= 0):
                raise ValidationError(f"stratum {self.stratum!r}: exposures must be finite and > 0")
            object.__setattr__(self, "exposure", _readonly(exposure))

    def __len__(self) -> int:
        return len(self.months)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MonthlySeries):
            return NotImplemented
        if (self.exposure is None) != (other.exposure is None):
            return False
        return (
            self.stratum == other.stratum
            and self.months == other.months
            and np.array_equal(self.deaths, other.deaths)
            and (self.exposure is None or np.array_equal(self.exposure, other.exposure))
        )

    @property
    def start(self) -> MonthKey:
        return self.months[0]

    @property
    def end(self) -> MonthKey:
        return self.months[-1]

    def index_of(self, month: MonthKey) -> int:
        i = month - self.start
        if not 0 <= i < len(self):
            raise OutOfRange(f"stratum {self.stratum!r}: {month} outside {self.start}..{self.end}")
        return i


@dataclass(frozen=True, eq=False)
class RateSeries:
    """Death rates (CDR or ASDR) per person-month."""

    months: tuple[MonthKey, ...]
    rate: np.ndarray


def rates(series: MonthlySeries) -> RateSeries:
    """Crude (or age-specific) death rates ``deaths / exposure``."""
    if series.exposure is None:
        raise ValidationError(f"stratum {series.stratum!r} has no exposure")
    return RateSeries(series.months, _readonly(series.deaths / series.exposure))


def _read_rows(csv_text: str, header: Sequence[str]) -> list[list[str]]:
    reader = csv.reader(io.StringIO(csv_text))
    try:
        first = next(reader)
    except StopIteration:
        raise MalformedRow("empty CSV") from None
    if tuple(c.strip() for c in first) != tuple(header):
        raise MalformedRow(f"expected header {','.join(header)}, got {','.join(first)}")
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise MalformedRow(f"line {lineno}: expected {len(header)} fields, got {len(row)}")
        rows.append([c.strip() for c in row])
    return rows


def parse_monthly_deaths(csv_text: str) -> list[MonthlySeries]:
    """Parse a ``deaths.csv`` document into one series per stratum.

    Strata are returned sorted by label; each series is sorted by month and
    must be gap-free.
    """
    grouped: dict[str, dict[MonthKey, int]] = defaultdict(dict)
    for row in _read_rows(csv_text, DEATHS_HEADER):
        stratum, year, month, deaths = row
        try:
            key = MonthKey(int(year), int(month))
        except ValueError as exc:
            raise MalformedRow(f"stratum {stratum!r}: bad month {year}-{month}") from exc
        try:
            d = float(deaths)
        except ValueError:
            raise MalformedRow(f"stratum {stratum!r}, {key}: bad deaths value {deaths!r}") from None
        if d < 0:
            raise NegativeDeaths(f"stratum {stratum!r}, {key}: negative deaths {deaths}")
        if d != int(d):
            raise MalformedRow(f"stratum {stratum!r}, {key}: non-integer deaths {deaths}")
        if key in grouped[stratum]:
            raise DuplicateMonth(f"stratum {stratum!r}: duplicate month {key}")
        grouped[stratum][key] = int(d)

    out = []
    for stratum in sorted(grouped):
        by_month = grouped[stratum]
        months = sorted(by_month)
        out.append(MonthlySeries(stratum, tuple(months), np.array([by_month[m] for m in months])))
    return out


def serialize_monthly_deaths(series: Iterable[MonthlySeries]) -> str:
    """Canonical ``deaths.csv`` text, sorted by (stratum, year, month)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(DEATHS_HEADER)
    for s in sorted(series, key=lambda s: s.stratum):
        for m, d in zip(s.months, s.deaths):
            writer.writerow([s.stratum, m.year, m.month, int(d)])
    return buf.getvalue()


def parse_population(csv_text: str) -> dict[str, dict[int, float]]:
    """Parse ``population.csv`` into ``{stratum: {year: jan1_population}}``."""
    out: dict[str, dict[int, float]] = defaultdict(dict)
    for stratum, year, pop in _read_rows(csv_text, POPULATION_HEADER):
        try:
            y, p = int(year), float(pop)
        except ValueError:
            raise MalformedRow(f"stratum {stratum!r}: bad population row {year},{pop}") from None
        if y in out[stratum]:
            raise MalformedRow(f"stratum {stratum!r}: duplicate population year {y}")
        out[stratum][y] = p
    return dict(out)


def derive_exposure(series: MonthlySeries, jan1_population: Mapping[int, float]) -> MonthlySeries:
    """Attach exposures: the mid-year population of each year spread over 12 months.

    Every month of year ``Y`` receives ``(pop[Y] + pop[Y + 1]) / 2 / 12``.
    """
    years = sorted({m.year for m in series.months})
    per_year = {}
    for y in years:
        for yy in (y, y + 1):
            if yy not in jan1_population:
                raise MissingPopulationYear(
                    f"stratum {series.stratum!r}: no 1 January population for {yy}"
                )
            if not jan1_population[yy] > 0:
                raise NonPositivePopulation(
                    f"stratum {series.stratum!r}: population {jan1_population[yy]} in {yy}"
                )
        per_year[y] = (jan1_population[y] + jan1_population[y + 1]) / 2.0 / 12.0
    exposure = np.array([per_year[m.year] for m in series.months])
    return MonthlySeries(series.stratum, series.months, series.deaths, exposure)


def window(series: MonthlySeries, start: MonthKey, n_months: int) -> MonthlySeries:
    """Contiguous sub-series of ``n_months`` months beginning at ``start``."""
    i0 = start - series.start
    if n_months < 1 or i0 < 0 or i0 + n_months > len(series):
        raise OutOfRange(
            f"stratum {series.stratum!r}: window {start} + {n_months} months "
            f"outside {series.start}..{series.end}"
        )
    sl = slice(i0, i0 + n_months)
    exposure = None if series.exposure is None else series.exposure[sl]
    return MonthlySeries(series.stratum, series.months[sl], series.deaths[sl], exposure)


def load_series(deaths_path, population_path=None) -> list[MonthlySeries]:
    """Read ``deaths.csv`` (and optionally ``population.csv``) from disk."""
    with open(deaths_path, encoding="utf-8") as f:
        series = parse_monthly_deaths(f.read())
    if population_path is None:
        return series
    with open(population_path, encoding="utf-8") as f:
        pop = parse_population(f.read())
    out = []
    for s in series:
        if s.stratum not in pop:
            raise MissingPopulationYear(f"stratum {s.stratum!r}: no population rows")
        out.append(derive_exposure(s, pop[s.stratum]))
    return out
