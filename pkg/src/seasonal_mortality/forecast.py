"""Baseline forecasts with 95% intervals, and seasonal decomposition.

Future months are treated as missing observations: the design is built over
``n1 + n2`` months, the last ``n2`` rows get zero weight, and fitted and
forecast values come out of a single penalized fit. Intervals are delta-method
intervals for the mean on the log scale; Poisson sampling noise is not added.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import BasisSpec, harmonics
from .design import PERIOD, DesignBundle, ModelKind, PenaltyConfig, build_design, extend_exposure
from .errors import ExposureLengthMismatch, ShortSeries, ValidationError, WrongModelKind
from .solver import FitResult, fit
from .timeseries_io import MonthKey, MonthlySeries, month_range

Z95 = 1.959964


@dataclass(frozen=True, eq=False)
class ForecastResult:
    """Fitted and forecast means over ``n1 + n2`` months.

    Count-scale arrays are always present; the ``*_rate`` arrays are
    ``None`` unless the series carried exposures. ``horizon_start`` is the
    0-based position of the first forecast month (``n1``).
    """

    kind: ModelKind
    stratum: str
    months: tuple[MonthKey, ...]
    observed: np.ndarray
    expected: np.ndarray
    lower95: np.ndarray
    upper95: np.ndarray
    se_eta: np.ndarray
    eta: np.ndarray
    trend_eta: np.ndarray
    exposure: np.ndarray | None
    horizon_start: int
    fit: FitResult
    bundle: DesignBundle

    @property
    def expected_rate(self) -> np.ndarray | None:
        return None if self.exposure is None else self.expected / self.exposure

    @property
    def lower95_rate(self) -> np.ndarray | None:
        return None if self.exposure is None else self.lower95 / self.exposure

    @property
    def upper95_rate(self) -> np.ndarray | None:
        return None if self.exposure is None else self.upper95 / self.exposure

    @property
    def horizon_months(self) -> tuple[MonthKey, ...]:
        return self.months[self.horizon_start:]

    def intervals_widen(self) -> bool:
        """Whether ``se_eta`` is non-decreasing over the forecast horizon."""
        se = self.se_eta[self.horizon_start:]
        return bool(np.all(np.diff(se) >= -1e-12))


def linear_predictor_se(X: np.ndarray, cov: np.ndarray) -> np.ndarray:
    """Square root of ``diag(X cov X')``, the pointwise s.e. of ``X theta``."""
    var = np.einsum("ij,jk,ik->i", X, cov, X)
    return np.sqrt(np.clip(var, 0.0, None))


def trend_linear_predictor(bundle: DesignBundle, theta: np.ndarray) -> np.ndarray:
    """Offset plus the trend block's contribution to ``eta``."""
    sl = bundle.layout["trend"]
    return bundle.offset + bundle.X[:, sl] @ theta[sl]


def forecast(
    kind: ModelKind | str,
    series: MonthlySeries,
    horizon: int,
    basis_spec: BasisSpec | None = None,
    penalty: PenaltyConfig | None = None,
    future_exposure: np.ndarray | None = None,
) -> ForecastResult:
    """Fit ``series`` and forecast ``horizon`` months ahead in one pass.

    If the series has exposures and ``future_exposure`` is not given, the
    horizon uses the mean exposure of the last 12 observed months.
    """
    kind = ModelKind(kind)
    n1 = len(series)
    if n1 < 24:
        raise ShortSeries(f"stratum {series.stratum!r}: need at least 24 months, got {n1}")
    if horizon < 1:
        raise ValidationError(f"horizon must be >= 1, got {horizon}")

    exposure = None
    if series.exposure is not None:
        if future_exposure is None:
            exposure = extend_exposure(series.exposure, horizon)
        else:
            future_exposure = np.asarray(future_exposure, dtype=float)
            if future_exposure.shape != (horizon,):
                raise ExposureLengthMismatch(
                    f"future exposure has {future_exposure.size} values for a {horizon}-month horizon"
                )
            exposure = np.concatenate([series.exposure, future_exposure])

    bundle = build_design(kind, n1, horizon, basis_spec, penalty, exposure)
    result = fit(bundle, series.deaths)
    se = linear_predictor_se(bundle.X, result.cov_factor)
    eta = result.eta
    return ForecastResult(
        kind=kind,
        stratum=series.stratum,
        months=month_range(series.start, n1 + horizon),
        observed=np.asarray(series.deaths, dtype=float),
        expected=np.exp(eta),
        lower95=np.exp(eta - Z95 * se),
        upper95=np.exp(eta + Z95 * se),
        se_eta=se,
        eta=eta,
        trend_eta=trend_linear_predictor(bundle, result.theta),
        exposure=exposure,
        horizon_start=n1,
        fit=result,
        bundle=bundle,
    )


@dataclass(frozen=True, eq=False)
class SeasonalDecomposition:
    """Detrended ratio, modulated seasonal wave and its amplitude per month."""

    detrended: np.ndarray
    modulation: np.ndarray
    amplitude: np.ndarray
    cos_amplitude: np.ndarray
    sin_amplitude: np.ndarray


def seasonal_decomposition(result: FitResult, bundle: DesignBundle, y) -> SeasonalDecomposition:
    """Split an SP-STSS fit into trend-relative data and the modulated season.

    With ``f = B beta`` and ``g = B gamma`` the seasonal wave is
    ``f cos(wt) + g sin(wt)`` and its amplitude is ``sqrt(f**2 + g**2)``.
    ``detrended`` is ``y`` divided by the fitted trend ``exp(offset + B alpha)``.
    All three series cover the observed months only.
    """
    if bundle.kind is not ModelKind.SP_STSS:
        raise WrongModelKind(f"seasonal decomposition needs an SP-STSS fit, got {bundle.kind}")
    n = bundle.n_fit
    y = np.asarray(y, dtype=float)
    if y.shape != (n,):
        raise ValidationError(f"expected {n} observations, got {y.shape}")
    B = bundle.basis[:n]
    theta = result.theta
    f = B @ theta[bundle.layout["cos"]]
    g = B @ theta[bundle.layout["sin"]]
    c, s = harmonics(n, PERIOD)
    trend = np.exp(trend_linear_predictor(bundle, theta)[:n])
    return SeasonalDecomposition(
        detrended=y / trend,
        modulation=f * c + g * s,
        amplitude=np.hypot(f, g),
        cos_amplitude=f,
        sin_amplitude=g,
    )
