"""B-spline bases over the month index, harmonics and difference matrices."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDomain, OrderTooLarge, ValidationError


@dataclass(frozen=True)
class BasisSpec:
    """Equidistant B-spline basis over months ``t = 1..domain_length``.

    Segments have a fixed width of ``12 / segments_per_year`` months and
    enough of them are used to cover ``[1, domain_length]``, so the knots run
    from 1 to ``1 + n_segments * width``. Keeping the width fixed means a
    basis over a longer domain shares every knot with a shorter one.
    """

    domain_length: int
    degree: int = 3
    segments_per_year: int = 2

    def __post_init__(self):
        if self.degree < 1:
            raise ValidationError(f"degree must be >= 1, got {self.degree}")
        if self.segments_per_year < 1:
            raise ValidationError(f"segments_per_year must be >= 1, got {self.segments_per_year}")
        if self.domain_length < 12:
            raise ValidationError(f"domain_length must be >= 12 months, got {self.domain_length}")

    @property
    def segment_width(self) -> float:
        return 12.0 / self.segments_per_year

    @property
    def n_segments(self) -> int:
        # the domain [1, T] spans T - 1 months; partial segments round up
        return math.ceil((self.domain_length - 1) * self.segments_per_year / 12 - 1e-9)

    @property
    def n_knots(self) -> int:
        """Knots on the domain itself, boundaries included."""
        return self.n_segments + 1

    @property
    def n_basis(self) -> int:
        return self.n_segments + self.degree

    def with_length(self, domain_length: int) -> BasisSpec:
        return BasisSpec(domain_length, self.degree, self.segments_per_year)


@dataclass(frozen=True, eq=False)
class BasisMatrix:
    values: np.ndarray  # (T, J)
    knots: np.ndarray  # full extended knot vector, month units
    spec: BasisSpec

    @property
    def domain_knots(self) -> np.ndarray:
        d = self.spec.degree
        return self.knots[d: len(self.knots) - d]


def bspline_basis(x: np.ndarray, knots: np.ndarray, degree: int) -> np.ndarray:
    """Evaluate all B-splines on ``knots`` at ``x`` via the Cox-de Boor recursion.

    ``knots`` must be non-decreasing; the result has ``len(knots) - degree - 1``
    columns. Points equal to the last usable knot are assigned to the final
    interval so the right boundary is closed.
    """
    x = np.asarray(x, dtype=float)
    knots = np.asarray(knots, dtype=float)
    n_intervals = len(knots) - 1
    # degree-0 indicators on half-open spans [k_i, k_{i+1})
    B = ((x[:, None] >= knots[None, :-1]) & (x[:, None] < knots[None, 1:])).astype(float)
    last = len(knots) - degree - 2
    at_end = x == knots[last + 1]
    if np.any(at_end):
        B[at_end] = 0.0
        B[at_end, last] = 1.0
    for k in range(1, degree + 1):
        n = n_intervals - k
        left_den = knots[k: k + n] - knots[:n]
        right_den = knots[k + 1: k + 1 + n] - knots[1: 1 + n]
        with np.errstate(divide="ignore", invalid="ignore"):
            left = np.where(left_den > 0, (x[:, None] - knots[None, :n]) / left_den, 0.0)
            right = np.where(
                right_den > 0, (knots[None, k + 1: k + 1 + n] - x[:, None]) / right_den, 0.0
            )
        B = left * B[:, :n] + right * B[:, 1: n + 1]
    return B


def make_basis(spec: BasisSpec) -> BasisMatrix:
    """Cubic (by default) B-spline basis evaluated at ``t = 1..domain_length``.

    The domain knots are extended by ``degree`` equidistant knots on each side,
    giving ``n_segments + degree`` basis functions.

    >>> make_basis(BasisSpec(120)).values.shape
    (120, 23)
    """
    if spec.n_segments < 1:
        raise DegenerateDomain(f"fewer than one segment for {spec}")
    h = spec.segment_width
    k = np.arange(-spec.degree, spec.n_segments + spec.degree + 1)
    knots = 1.0 + h * k
    t = np.arange(1, spec.domain_length + 1, dtype=float)
    values = bspline_basis(t, knots, spec.degree)
    return BasisMatrix(values, knots, spec)


def make_difference(order: int, J: int) -> np.ndarray:
    """``(J - order) x J`` matrix of ``order``-th differences.

    >>> make_difference(1, 3)
    array([[-1,  1,  0],
           [ 0, -1,  1]])
    """
    if order < 0:
        raise ValidationError(f"difference order must be >= 0, got {order}")
    if order >= J:
        raise OrderTooLarge(f"difference order {order} needs more than {J} coefficients")
    D = np.eye(J, dtype=np.int64)
    for _ in range(order):
        D = D[1:] - D[:-1]
    return D


def harmonics(T: int, period: float = 12.0) -> tuple[np.ndarray, np.ndarray]:
    """``cos(wt)`` and ``sin(wt)`` for ``t = 1..T`` with ``w = 2*pi/period``."""
    if not period > 0:
        raise ValidationError(f"period must be > 0, got {period}")
    wt = 2.0 * np.pi / period * np.arange(1, T + 1)
    return np.cos(wt), np.sin(wt)


def harmonic_matrices(T: int, period: float = 12.0) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal matrices ``C = diag(cos wt)`` and ``S = diag(sin wt)``."""
    c, s = harmonics(T, period)
    return np.diag(c), np.diag(s)
