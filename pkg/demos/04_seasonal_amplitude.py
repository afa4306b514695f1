"""Track a weakening seasonal pattern with the modulated-harmonic model.

Run with ``python demos/04_seasonal_amplitude.py``.
"""

import numpy as np

from seasonal_mortality import PenaltyConfig, build_design, fit, harmonics, seasonal_decomposition

# Winter excess shrinks from 20% to 10% of the trend over ten years.
T = 120
t = np.arange(1, T + 1)
cos_wt, _ = harmonics(T)
true_amplitude = np.linspace(0.2, 0.1, T)
y = np.random.default_rng(3).poisson(np.exp(6.5 - 0.001 * t + true_amplitude * cos_wt))

# A lighter seasonal penalty lets the modulation follow the decline.
bundle = build_design("stss", T, penalty=PenaltyConfig(lambda_trend=1e5, lambda_season=1e3))
result = fit(bundle, y)
dec = seasonal_decomposition(result, bundle, y)

print("year  fitted amplitude  true amplitude  peak detrended ratio")
for year in range(10):
    sl = slice(12 * year, 12 * year + 12)
    print(
        f"{2010 + year}  {dec.amplitude[sl].mean():16.3f}  {true_amplitude[sl].mean():14.3f}"
        f"  {dec.detrended[sl].max():20.3f}"
    )
