"""Fit the three models to ten years of simulated deaths and forecast a year.

Run with ``python demos/01_fit_and_forecast.py``.
"""

import numpy as np

from seasonal_mortality import ModelKind, SimulationConfig, bic, build_design, fit, forecast, simulate, window

# Ten years of monthly deaths for a population of 5 million with a slowly
# falling death rate, a winter peak and Poisson noise.
config = SimulationConfig(n_months=132, level=-8.2, slope=-0.0015, cos_amp=0.12, sin_amp=0.03, population=5e6)
full = simulate(config, seed=2024)
history = window(full, full.start, 120)
truth = np.exp(config.log_mean(132))[120:]

print(f"{len(history)} months, {history.start} .. {history.end}; testing on {full.months[120]} .. {full.end}\n")
print(f"{'model':8s} {'BIC':>10s} {'ed':>6s} {'MAPE vs truth':>14s} {'mean 95% width':>15s}")
for kind in ModelKind:
    plain = fit(build_design(kind, 120, exposure=history.exposure), history.deaths)
    fc = forecast(kind, history, 12)
    h = slice(fc.horizon_start, None)
    err = 100 * np.mean(np.abs(fc.expected[h] - truth) / truth)
    width = np.mean(fc.upper95[h] - fc.lower95[h])
    print(f"{kind.label:8s} {bic(plain, 120):10.1f} {plain.ed:6.2f} {err:13.2f}% {width:15.1f}")

# The forecast object carries everything needed for a plot: fitted values on
# the observed months, the baseline over the horizon and its interval.
fc = forecast("stfs", history, 12)
print("\nSP-STFS baseline for the forecast year (deaths, then rate per 100,000):")
for i in range(fc.horizon_start, len(fc.months)):
    print(
        f"  {fc.months[i]}  {fc.expected[i]:7.0f}  [{fc.lower95[i]:7.0f}, {fc.upper95[i]:7.0f}]"
        f"  {1e5 * fc.expected_rate[i]:6.2f}  observed {full.deaths[i]}"
    )
