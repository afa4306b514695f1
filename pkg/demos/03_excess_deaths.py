"""Excess deaths after a shock, measured against a pre-shock baseline.

Run with ``python demos/03_excess_deaths.py``.
"""

from seasonal_mortality import MonthKey, SimulationConfig, excess_report, forecast, simulate, window

# 2010-01 .. 2022-06 with deaths 30% above baseline from March to June 2020.
config = SimulationConfig(
    n_months=150, level=-8.0, population=3e6,
    shock_start=MonthKey(2020, 3), shock_months=4, shock_factor=1.3,
)
series = simulate(config, seed=11)

fit_end = MonthKey(2020, 2)
train = window(series, series.start, fit_end - series.start + 1)
observed = window(series, fit_end.shift(1), series.end - fit_end)

# Baseline: SP-STFS fitted up to February 2020 and projected 28 months on.
fc = forecast("stfs", train, len(observed), future_exposure=observed.exposure)
rep = excess_report(observed, fc)

print("month     observed  expected    95% interval     excess  flag")
for m in rep.months[:8]:
    print(f"{m.month}  {m.observed:8.0f}  {m.expected:8.0f}  [{m.lower95:6.0f}, {m.upper95:6.0f}]  {m.excess:8.0f}  {m.flag}")
print("...\n")

print("period       excess   95% interval          per 100,000   flag")
for p in rep.periods:
    print(
        f"{p.label:11s} {p.excess:7.0f}   [{p.lower95:7.0f}, {p.upper95:7.0f}]"
        f"   {1e5 * p.excess_rate:9.1f}     {p.flag}"
    )
