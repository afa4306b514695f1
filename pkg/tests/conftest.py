import sys

import numpy as np
import pytest

from seasonal_mortality import MonthKey, MonthlySeries, SimulationConfig, simulate
from seasonal_mortality.timeseries_io import month_range


def make_series(deaths, start=MonthKey(2010, 1), exposure=None, stratum="SIM") -> MonthlySeries:
    deaths = np.asarray(deaths)
    return MonthlySeries(stratum, month_range(start, len(deaths)), deaths, exposure)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def decade():
    """Ten years of simulated counts starting 2010-01."""
    return simulate(SimulationConfig(n_months=120), seed=11)


@pytest.fixture(scope="session")
def decade_rates():
    """Ten years with a constant population of three million."""
    return simulate(SimulationConfig(n_months=120, level=-8.0, population=3e6), seed=12)


def pytest_terminal_summary(terminalreporter):
    """Repeat the acceptance criterion lines after the test run."""
    mod = sys.modules.get("test_acceptance")
    ran = any(
        "test_acceptance" in getattr(rep, "nodeid", "")
        for reports in terminalreporter.stats.values()
        for rep in reports
    )
    if mod is None or not ran:
        return
    terminalreporter.section("acceptance criteria")
    for n in range(1, 12):
        terminalreporter.write_line(mod.RESULTS.get(n, f"criterion {n:2d}: FAIL - no result recorded"))
