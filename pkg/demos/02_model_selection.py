"""Choose smoothing weights and penalty orders by rolling one-year-ahead backtests.

Run with ``python demos/02_model_selection.py`` (takes a few seconds).
"""

import numpy as np

from seasonal_mortality import PenaltyConfig, SimulationConfig, backtest, grid_search, penalty_order_tournament, simulate
from seasonal_mortality.evaluation import lambda_pairs

series = simulate(SimulationConfig(n_months=180, level=7.5, slope=-0.001, curvature=4e-6), seed=7)
print(f"15 years of counts, {series.start} .. {series.end}\n")

# Which difference orders for (trend, modulation)? Four combinations, scored
# by mean MAPE over the available 5-year windows.
print("penalty orders, ranked by mean MAPE (SP-STSS, 5-year windows):")
for row in penalty_order_tournament(series, "stss", window_years=5, jobs=4):
    print(f"  ({row.order_trend},{row.order_season})  MAPE {row.mean_mape:.3f}%  RMSE {row.mean_rmse:.1f}")

# Smoothing weights: a coarse grid here, the full 7 x 7 grid by default.
lambdas = [1e4, 1e5, 1e6, 1e7]
res = grid_search(series, "stfs", grid=lambda_pairs(lambdas), window_years=5, jobs=4)
surface = np.array(res.mean_mape).reshape(len(lambdas), len(lambdas))
print("\nSP-STFS mean MAPE by (lambda_trend rows, lambda_season columns):")
print("          " + "".join(f"{v:>9.0e}" for v in lambdas))
for v, row in zip(lambdas, surface):
    print(f"  {v:7.0e} " + "".join(f"{m:9.3f}" for m in row))
print(f"chosen: lambda_trend={res.chosen[0]:.0e}, lambda_season={res.chosen[1]:.0e}")
print("(SP-STFS leaves the harmonics unpenalized, so each row is constant.)")

# BIC and out-of-sample accuracy for each model at the chosen weights.
pen = PenaltyConfig(*res.chosen)
print("\nmodel     mean BIC   mean MAPE   (10-year windows)")
for kind in ("sp", "stss", "stfs"):
    rep = backtest(series, kind, 10, pen)
    print(f"  {rep.kind.label:8s} {rep.mean_bic:9.1f} {rep.mean_mape:10.3f}%")
