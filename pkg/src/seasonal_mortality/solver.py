"""Penalized IWLS for Poisson models with a log link and a log-exposure offset."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .design import DesignBundle
from .errors import (
    DevianceIncreaseWarning,
    InvalidWeights,
    NonConvergenceWarning,
    NonPositiveMu,
    SingularSystem,
    ValidationError,
)

logger = logging.getLogger(__name__)

TOL = 1e-7
MAX_ITER = 100


@dataclass(frozen=True, eq=False)
class FitResult:
    """Outcome of :func:`fit`.

    ``eta`` and ``mu`` cover all ``n1 + n2`` months and include the offset.
    ``cov_factor`` is ``(X' V M X + P)^-1`` at the fitted means; it is the
    covariance of ``theta`` used for interval construction.
    """

    theta: np.ndarray
    eta: np.ndarray
    mu: np.ndarray
    deviance: float
    penalized_deviance: float
    ed: float
    iterations: int
    converged: bool
    cov_factor: np.ndarray
    weights: np.ndarray


def deviance(y, mu, weights=None) -> float:
    """Poisson deviance ``2 * sum w * (y log(y/mu) - (y - mu))`` with ``0 log 0 = 0``.

    >>> deviance([0.0], [2.0])
    4.0
    """
    y = np.asarray(y, dtype=float)
    mu = np.asarray(mu, dtype=float)
    w = np.ones_like(y) if weights is None else np.asarray(weights, dtype=float)
    if not (y.shape == mu.shape == w.shape):
        raise ValidationError(f"length mismatch: y {y.shape}, mu {mu.shape}, weights {w.shape}")
    if np.any(mu[w != 0] <= 0):
        raise NonPositiveMu("fitted means must be > 0")
    active = w != 0
    y, mu, w = y[active], mu[active], w[active]
    ylogy = np.zeros_like(y)
    pos = y > 0
    ylogy[pos] = y[pos] * np.log(y[pos] / mu[pos])
    return float(2.0 * np.sum(w * (ylogy - (y - mu))))


def _penalty_root(bundle: DesignBundle) -> np.ndarray:
    if bundle.penalty_root is not None:
        return np.asarray(bundle.penalty_root, dtype=float)
    if not np.any(bundle.P):
        return np.zeros((0, bundle.n_coef))
    vals, vecs = linalg.eigh(bundle.P)
    return np.sqrt(np.clip(vals, 0.0, None))[:, None] * vecs.T


class _PenalizedLeastSquares:
    """Pivoted QR of the stacked matrix ``[sqrt(W) X; R]``.

    Its triangular factor ``U`` satisfies ``U'U = X'WX + R'R`` (up to the
    column permutation), so solving through ``U`` gives the same answer as
    the normal equations with roughly the square root of their condition
    number. A numerically rank-deficient ``U`` raises :class:`SingularSystem`.
    """

    def __init__(self, X: np.ndarray, sqrt_w: np.ndarray, R: np.ndarray):
        K = X.shape[1]
        M = np.vstack([sqrt_w[:, None] * X, R])
        if M.shape[0] < K:
            M = np.vstack([M, np.zeros((K - M.shape[0], K))])
        if not np.all(np.isfinite(M)):
            raise SingularSystem("non-finite entries in the weighted design")
        self.Q, self.U, self.perm = linalg.qr(M, mode="economic", pivoting=True)
        d = np.abs(np.diag(self.U))
        if d[0] == 0 or d[-1] <= d[0] * K * np.finfo(float).eps * 10:
            raise SingularSystem(
                f"penalized normal matrix is singular (pivot ratio {d[-1] / d[0] if d[0] else 0:.3g})"
            )
        self.n_rows = X.shape[0]

    def solve(self, rhs_rows: np.ndarray) -> np.ndarray:
        """Least-squares coefficients for right-hand side ``[rhs_rows; 0]``."""
        qtb = self.Q[: self.n_rows].T @ rhs_rows
        x = np.empty_like(qtb)
        x[self.perm] = linalg.solve_triangular(self.U, qtb)
        return x

    def inverse(self) -> np.ndarray:
        """``(X'WX + R'R)^-1``."""
        Uinv = linalg.solve_triangular(self.U, np.eye(self.U.shape[0]))
        inv_p = Uinv @ Uinv.T
        out = np.empty_like(inv_p)
        out[np.ix_(self.perm, self.perm)] = inv_p
        return (out + out.T) / 2.0


def _check_weights(w: np.ndarray, n_total: int, n_obs: int) -> None:
    if w.shape != (n_total,):
        raise InvalidWeights(f"weights must have length {n_total}, got {w.shape}")
    if not np.all((w == 0) | (w == 1)):
        raise InvalidWeights("weights must be 0 or 1")
    if not (np.all(w[:n_obs] == 1) and np.all(w[n_obs:] == 0)):
        raise InvalidWeights("weights must be a prefix of ones followed by zeros")


def fit(bundle: DesignBundle, y, weights=None, *, tol: float = TOL, max_iter: int = MAX_ITER) -> FitResult:
    """Fit ``bundle`` to the observed deaths ``y`` by penalized IWLS.

    Each iteration solves ``(X' V M X + P) theta = X' V M z`` with working
    response ``z = eta - offset + (y - mu) / mu``, which is the same update
    as ``(X'VMX + P) theta_new = X'VMX theta_old + X'V(y - mu)``. The system
    is solved as the stacked least-squares problem ``[sqrt(VM) X; R]``, with
    ``P = R'R``, which stays accurate for very large smoothing weights.

    Parameters
    ----------
    bundle : DesignBundle
    y : array_like
        Deaths for the first ``n_fit`` months (the weighted rows).
    weights : array_like, optional
        0/1 vector over all rows; defaults to ``bundle.weights()``.

    Iteration stops once ``max |eta_new - eta_old| < tol`` on the weighted
    rows. Hitting ``max_iter`` emits :class:`NonConvergenceWarning` and
    returns the last iterate with ``converged=False``.
    """
    X, offset = bundle.X, bundle.offset
    T = X.shape[0]
    y = np.asarray(y, dtype=float)
    n_obs = y.size
    w = bundle.weights() if weights is None else np.asarray(weights, dtype=float)
    _check_weights(w, T, n_obs)
    if np.any(y < 0) or not np.all(np.isfinite(y)):
        raise ValidationError("deaths must be finite and >= 0")
    obs = w == 1
    y_full = np.zeros(T)
    y_full[:n_obs] = y

    mu = np.full(T, np.mean(y + 0.5))
    mu[:n_obs] = y + 0.5
    eta = np.log(mu)
    R = _penalty_root(bundle)
    theta = np.zeros(X.shape[1])
    pen_dev = np.inf
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        sqrt_w = np.sqrt(w * mu)
        z = eta - offset + np.where(obs, (y_full - mu) / mu, 0.0)
        theta = _PenalizedLeastSquares(X, sqrt_w, R).solve(sqrt_w * z)
        eta_new = offset + X @ theta
        with np.errstate(over="raise"):
            try:
                mu_new = np.exp(eta_new)
            except FloatingPointError:
                raise SingularSystem("linear predictor overflowed during IWLS") from None
        new_pen_dev = deviance(y_full, mu_new, w) + bundle.penalty_value(theta)
        if it > 1 and new_pen_dev > pen_dev + 1e-9 * (1.0 + abs(pen_dev)):
            warnings.warn(
                f"penalized deviance rose from {pen_dev:.10g} to {new_pen_dev:.10g} at iteration {it}",
                DevianceIncreaseWarning,
                stacklevel=2,
            )
        delta = np.max(np.abs(eta_new[obs] - eta[obs]))
        eta, mu, pen_dev = eta_new, mu_new, new_pen_dev
        if delta < tol:
            converged = True
            break
    if not converged:
        warnings.warn(f"IWLS did not converge in {max_iter} iterations", NonConvergenceWarning, stacklevel=2)
    logger.debug("IWLS stopped after %d iterations (converged=%s)", it, converged)

    XtWX = (X.T * (w * mu)) @ X
    cov = _PenalizedLeastSquares(X, np.sqrt(w * mu), R).inverse()
    ed = float(np.sum(XtWX * cov))  # trace(XtWX @ cov), both symmetric
    return FitResult(
        theta=theta,
        eta=eta,
        mu=mu,
        deviance=deviance(y_full, mu, w),
        penalized_deviance=pen_dev,
        ed=ed,
        iterations=it,
        converged=converged,
        cov_factor=cov,
        weights=w,
    )


def effective_dimension(result: FitResult, bundle: DesignBundle) -> float:
    """Trace of the hat matrix, ``tr[X'MX (X'MX + P)^-1]`` at the fitted means."""
    X = bundle.X
    XtWX = (X.T * (result.weights * result.mu)) @ X
    S = linalg.solve(XtWX + bundle.P, XtWX, assume_a="sym")
    return float(np.trace(S))
