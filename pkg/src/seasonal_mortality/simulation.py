"""Synthetic monthly death series for tests and demos.

The log mean is ``level + slope*t + curvature*t**2 + a*cos(wt) + b*sin(wt)``
for ``t = 1..n_months`` (plus log-exposure when a population is given),
optionally multiplied by a shock factor over a window of months.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import harmonics
from .timeseries_io import MonthKey, MonthlySeries, month_range


@dataclass(frozen=True)
class SimulationConfig:
    n_months: int = 120
    start: MonthKey = MonthKey(2010, 1)
    level: float = 7.0
    slope: float = -0.001
    curvature: float = 0.0
    cos_amp: float = 0.1
    sin_amp: float = 0.03
    shock_start: MonthKey | None = None
    shock_months: int = 0
    shock_factor: float = 1.0
    population: float | None = None  # constant 1 January population
    stratum: str = "SIM"

    def exposure(self) -> np.ndarray | None:
        if self.population is None:
            return None
        return np.full(self.n_months, self.population / 12.0)

    def log_mean(self, n_months: int | None = None, with_shock: bool = True) -> np.ndarray:
        """True log expected deaths; may run past ``n_months`` for forecast checks."""
        T = self.n_months if n_months is None else n_months
        t = np.arange(1, T + 1, dtype=float)
        c, s = harmonics(T)
        eta = self.level + self.slope * t + self.curvature * t**2 + self.cos_amp * c + self.sin_amp * s
        if self.population is not None:
            eta = eta + np.log(self.population / 12.0)
        if with_shock and self.shock_start is not None and self.shock_months > 0:
            i0 = self.shock_start - self.start
            lo, hi = max(i0, 0), min(i0 + self.shock_months, T)
            if lo < hi:
                eta[lo:hi] += np.log(self.shock_factor)
        return eta


def simulate(config: SimulationConfig, seed: int | np.random.Generator | None = None) -> MonthlySeries:
    """Draw one Poisson series from ``config``."""
    rng = np.random.default_rng(seed)
    deaths = rng.poisson(np.exp(config.log_mean()))
    return MonthlySeries(
        config.stratum,
        month_range(config.start, config.n_months),
        deaths,
        config.exposure(),
    )


def population_table(config: SimulationConfig) -> dict[int, float]:
    """Constant 1 January populations covering the simulated years plus one."""
    if config.population is None:
        return {}
    first = config.start.year
    last = config.start.shift(config.n_months - 1).year + 1
    return {y: float(config.population) for y in range(first, last + 1)}
