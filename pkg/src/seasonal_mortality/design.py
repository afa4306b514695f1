"""Regression and penalty matrices for the three Serfling-Poisson variants.

SP
    ``eta = b0 + b1*t + b2*cos(wt) + b3*sin(wt)``, unpenalized.
SP_STSS
    smooth trend and smoothly modulated harmonics, ``X = [B | CB | SB]``.
SP_STFS
    smooth trend and fixed harmonics, ``X = [B | c | s]``.

All designs are built over ``t = 1..n1+n2`` so that forecasting is just a
fit in which the last ``n2`` rows carry zero weight.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.linalg import block_diag

from .basis import BasisSpec, make_basis, make_difference, harmonics
from .errors import ExposureLengthMismatch, ShortSeries, ValidationError

PERIOD = 12


class ModelKind(str, enum.Enum):
    SP = "sp"
    SP_STSS = "stss"
    SP_STFS = "stfs"

    @property
    def label(self) -> str:
        return {"sp": "SP", "stss": "SP-STSS", "stfs": "SP-STFS"}[self.value]


@dataclass(frozen=True)
class PenaltyConfig:
    """Smoothing weights and difference orders.

    Defaults follow the combination that forecast best: a second-order
    penalty on the trend and a first-order penalty on the modulation series.
    """

    lambda_trend: float = 1e5
    lambda_season: float = 1e5
    order_trend: int = 2
    order_season: int = 1

    def __post_init__(self):
        for name in ("lambda_trend", "lambda_season"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v >= 0):
                raise ValidationError(f"{name} must be finite and >= 0, got {v}")
        for name in ("order_trend", "order_season"):
            if getattr(self, name) not in (1, 2, 3):
                raise ValidationError(f"{name} must be 1, 2 or 3, got {getattr(self, name)}")


@dataclass(frozen=True, eq=False)
class DesignBundle:
    """Everything the solver needs for one model over ``n1 + n2`` months.

    ``layout`` maps block names (``"trend"``, ``"cos"``, ``"sin"``) to column
    slices of ``X``. ``kind`` is ``None`` for ad hoc designs assembled by hand.
    """

    kind: ModelKind | None
    X: np.ndarray
    P: np.ndarray
    layout: dict[str, slice]
    offset: np.ndarray
    n_fit: int
    horizon: int = 0
    basis: np.ndarray | None = None
    penalty_root: np.ndarray | None = None  # R with P = R'R

    def penalty_value(self, theta: np.ndarray) -> float:
        """``theta' P theta``, computed as ``||R theta||^2`` to avoid cancellation."""
        if self.penalty_root is None:
            return float(theta @ self.P @ theta)
        r = self.penalty_root @ theta
        return float(r @ r)

    @property
    def n_total(self) -> int:
        return self.X.shape[0]

    @property
    def n_coef(self) -> int:
        return self.X.shape[1]

    def weights(self) -> np.ndarray:
        """The 0/1 observation weights: ones on fitted months, zeros on the horizon."""
        w = np.zeros(self.n_total)
        w[: self.n_fit] = 1.0
        return w


def penalty_root(J: int, order: int, lam: float) -> np.ndarray:
    """``sqrt(lam) * D``, so that the penalty block is its cross-product."""
    return np.sqrt(lam) * make_difference(order, J).astype(float)


def build_design(
    kind: ModelKind | str,
    n_fit: int,
    horizon: int = 0,
    basis_spec: BasisSpec | None = None,
    penalty: PenaltyConfig | None = None,
    exposure: np.ndarray | None = None,
) -> DesignBundle:
    """Assemble ``X``, ``P`` and the log-exposure offset over ``n_fit + horizon`` months.

    Parameters
    ----------
    kind : ModelKind or str
    n_fit : int
        Observed months, at least 24.
    horizon : int
        Months to forecast; 0 gives the plain fitting design.
    basis_spec : BasisSpec, optional
        Only degree and segments_per_year are used; the domain length is
        always ``n_fit + horizon``.
    penalty : PenaltyConfig, optional
    exposure : array, optional
        Length ``n_fit + horizon``; see :func:`extend_exposure`.
    """
    kind = ModelKind(kind)
    penalty = penalty or PenaltyConfig()
    if n_fit < 24:
        raise ShortSeries(f"need at least 24 observed months, got {n_fit}")
    if horizon < 0:
        raise ValidationError(f"horizon must be >= 0, got {horizon}")
    T = n_fit + horizon
    if exposure is None:
        offset = np.zeros(T)
    else:
        exposure = np.asarray(exposure, dtype=float)
        if exposure.shape != (T,):
            raise ExposureLengthMismatch(f"exposure has {exposure.size} values, design needs {T}")
        offset = np.log(exposure)

    c, s = harmonics(T, PERIOD)
    B = None
    if kind is ModelKind.SP:
        t = np.arange(1, T + 1, dtype=float)
        X = np.column_stack([np.ones(T), t, c, s])
        R = np.zeros((0, 4))
        layout = {"trend": slice(0, 2), "cos": slice(2, 3), "sin": slice(3, 4)}
    else:
        spec = (basis_spec or BasisSpec(T)).with_length(T)
        B = make_basis(spec).values
        J = B.shape[1]
        trend_root = penalty_root(J, penalty.order_trend, penalty.lambda_trend)
        if kind is ModelKind.SP_STSS:
            X = np.hstack([B, c[:, None] * B, s[:, None] * B])
            season_root = penalty_root(J, penalty.order_season, penalty.lambda_season)
            R = block_diag(trend_root, season_root, season_root)
            layout = {"trend": slice(0, J), "cos": slice(J, 2 * J), "sin": slice(2 * J, 3 * J)}
        else:
            X = np.column_stack([B, c, s])
            R = np.hstack([trend_root, np.zeros((trend_root.shape[0], 2))])
            layout = {"trend": slice(0, J), "cos": slice(J, J + 1), "sin": slice(J + 1, J + 2)}
    P = R.T @ R
    return DesignBundle(kind, X, P, layout, offset, n_fit, horizon, B, R)


def extend_exposure(exposure: np.ndarray, horizon: int) -> np.ndarray:
    """Append ``horizon`` months at the mean exposure of the last 12 observed months."""
    exposure = np.asarray(exposure, dtype=float)
    if exposure.size < 12:
        raise ShortSeries(f"need at least 12 exposures to extend, got {exposure.size}")
    if horizon < 0:
        raise ValidationError(f"horizon must be >= 0, got {horizon}")
    return np.concatenate([exposure, np.full(horizon, exposure[-12:].mean())])
