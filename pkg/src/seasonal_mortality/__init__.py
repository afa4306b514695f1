"""Seasonal mortality modelling and short-term baseline forecasting.

Three Poisson models for monthly deaths are provided: the Serfling model
with a linear trend and one harmonic (``SP``), a smooth trend with smoothly
modulated harmonics (``SP_STSS``) and a smooth trend with fixed harmonics
(``SP_STFS``). Smooth terms are P-splines fitted by penalized IWLS;
forecasts treat future months as zero-weight observations.
"""

from .basis import BasisSpec, make_basis, make_difference, harmonics
from .design import DesignBundle, ModelKind, PenaltyConfig, build_design, extend_exposure
from .errors import SolverError, ValidationError
from .evaluation import (
    BacktestReport,
    GridSearchResult,
    backtest,
    bic,
    grid_search,
    mape,
    penalty_order_tournament,
    rmse,
)
from .excess import ExcessReport, Period, excess_report, pandemic_periods
from .forecast import ForecastResult, SeasonalDecomposition, forecast, seasonal_decomposition
from .simulation import SimulationConfig, simulate
from .solver import FitResult, deviance, effective_dimension, fit
from .timeseries_io import (
    MonthKey,
    MonthlySeries,
    derive_exposure,
    parse_monthly_deaths,
    parse_population,
    rates,
    serialize_monthly_deaths,
    window,
)

__version__ = "0.1.0"
