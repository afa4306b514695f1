import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seasonal_mortality import (
    BasisSpec,
    DesignBundle,
    PenaltyConfig,
    SimulationConfig,
    build_design,
    deviance,
    effective_dimension,
    fit,
    harmonics,
    simulate,
)
from seasonal_mortality.errors import (
    DevianceIncreaseWarning,
    InvalidWeights,
    NonConvergenceWarning,
    NonPositiveMu,
    SingularSystem,
    ValidationError,
)

from oracles import hat_trace, minimize_penalized_deviance, poisson_ml


def adhoc(X, P=None, n_fit=None):
    X = np.asarray(X, dtype=float)
    K = X.shape[1]
    P = np.zeros((K, K)) if P is None else P
    return DesignBundle(None, X, P, {"trend": slice(0, K)}, np.zeros(len(X)), len(X) if n_fit is None else n_fit)


def trend_only(bundle):
    """The B-spline trend block of a smooth-trend design, on its own."""
    sl = bundle.layout["trend"]
    return DesignBundle(
        None, bundle.X[:, sl], bundle.P[sl, sl], {"trend": sl}, bundle.offset,
        bundle.n_fit, 0, None, bundle.penalty_root[:, sl],
    )


@pytest.fixture(scope="module")
def counts():
    return simulate(SimulationConfig(n_months=120, level=5.0, slope=-0.003), seed=4).deaths.astype(float)


class TestDeviance:
    def test_perfect_fit(self):
        y = np.array([0.0, 3.0, 17.0])
        assert deviance(y, np.where(y > 0, y, 1e-300)) == pytest.approx(0.0, abs=1e-12)
        assert deviance([5.0, 9.0], [5.0, 9.0]) == 0.0

    def test_zero_count(self):
        assert deviance([0.0], [2.0]) == 4.0

    def test_zero_weights_empty_sum(self):
        assert deviance([1.0, 8.0], [3.0, 2.0], weights=[0, 0]) == 0.0

    def test_standard_form(self):
        y, mu = np.array([4.0, 1.0]), np.array([2.0, 3.0])
        expected = 2 * (4 * np.log(2) - 2 + (np.log(1 / 3) + 2))
        assert deviance(y, mu) == pytest.approx(expected, rel=1e-15)

    def test_rejects_non_positive_mu(self):
        with pytest.raises(NonPositiveMu):
            deviance([1.0], [0.0])

    def test_shape_mismatch(self):
        with pytest.raises(ValidationError):
            deviance([1.0, 2.0], [1.0])

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.tuples(st.integers(0, 500), st.floats(1e-3, 1e3)), min_size=1, max_size=30))
    def test_non_negative(self, pairs):
        y, mu = map(np.array, zip(*pairs))
        assert deviance(y.astype(float), mu) >= -1e-9


def test_intercept_only_constant_counts():
    res = fit(adhoc(np.ones((4, 1))), [7, 7, 7, 7])
    assert res.converged
    assert np.allclose(res.mu, 7.0, rtol=0, atol=1e-12)
    assert res.deviance == pytest.approx(0.0, abs=1e-12)


def test_sp_slope_recovered_and_matches_ml():
    t = np.arange(1, 121)
    c, _ = harmonics(120)
    y = np.round(np.exp(0.01 * t) * (2 + c))
    b = build_design("sp", 120)
    res = fit(b, y)
    theta_ml, cov_ml = poisson_ml(b.X, y)
    assert np.max(np.abs(res.theta - theta_ml)) < 1e-7
    se = np.sqrt(res.cov_factor[1, 1])
    assert se == pytest.approx(np.sqrt(cov_ml[1, 1]), rel=1e-6)
    assert abs(res.theta[1] - 0.01) < 3 * se


def test_huge_penalty_gives_linear_trend(counts):
    stss = build_design("stss", 120, penalty=PenaltyConfig(1e12, 1e12))
    res = fit(stss, counts)
    assert res.converged
    trend = stss.basis @ res.theta[stss.layout["trend"]]
    sp = build_design("sp", 120)
    ref = fit(sp, counts)
    line = sp.X[:, :2] @ ref.theta[:2]
    assert np.max(np.abs(trend - line)) < 1e-4
    assert np.max(np.abs(np.diff(trend, 2))) < 1e-8


def test_effective_dimension_limits(counts):
    free = trend_only(build_design("stfs", 120, penalty=PenaltyConfig(0.0)))
    res = fit(free, counts)
    assert res.ed == pytest.approx(free.n_coef, abs=1e-8)
    stiff = trend_only(build_design("stfs", 120, penalty=PenaltyConfig(1e12)))
    assert fit(stiff, counts).ed == pytest.approx(2.0, abs=0.05)


def test_effective_dimension_decreases_with_lambda(counts):
    eds = []
    for lam in 10.0 ** np.arange(4.0, 7.01, 0.5):
        b = build_design("stss", 120, penalty=PenaltyConfig(lam, lam))
        res = fit(b, counts)
        eds.append(res.ed)
        assert res.ed == pytest.approx(hat_trace(b.X, res.mu, b.P), rel=1e-8)
        assert res.ed == pytest.approx(effective_dimension(res, b), rel=1e-8)
    assert all(a > b for a, b in zip(eds, eds[1:]))
    assert 0 < eds[-1] < eds[0] < 75


def test_exposure_scaling_moves_log_rate_only(counts):
    e = np.linspace(9e4, 1.1e5, 120)
    b0 = build_design("stfs", 120, exposure=e)
    base = fit(b0, counts)
    for c in (1e-3, 7.0, 1e4):
        b = build_design("stfs", 120, exposure=c * e)
        scaled = fit(b, counts)
        # same fitted counts, log-rate predictor shifted by -log(c)
        assert np.max(np.abs(scaled.mu - base.mu) / base.mu) < 1e-10
        assert np.max(np.abs((scaled.eta - b.offset) - (base.eta - b0.offset) + np.log(c))) < 1e-10


def test_zero_weight_rows_have_no_influence(counts):
    e = np.full(132, 1e5)
    e2 = e.copy()
    e2[120:] = np.linspace(1.0, 1e9, 12)
    a = fit(build_design("stss", 120, 12, exposure=e), counts)
    b = fit(build_design("stss", 120, 12, exposure=e2), counts)
    # future exposures only move the forecast through the offset
    assert np.max(np.abs(a.theta - b.theta)) < 1e-9
    assert np.max(np.abs(a.eta[:120] - b.eta[:120])) < 1e-9


def test_singular_system():
    X = np.column_stack([np.ones(30), np.ones(30)])
    with pytest.raises(SingularSystem):
        fit(adhoc(X), np.full(30, 4.0))


def test_singular_with_all_zero_counts_column():
    # a column that is zero on every weighted row is not identified without a penalty
    X = np.column_stack([np.ones(30), np.r_[np.zeros(24), np.ones(6)]])
    with pytest.raises(SingularSystem):
        fit(adhoc(X, n_fit=24), np.full(24, 4.0))


class TestWeights:
    def test_wrong_length(self):
        b = build_design("sp", 24)
        with pytest.raises(InvalidWeights):
            fit(b, np.ones(24), weights=np.ones(23))

    def test_not_binary(self):
        b = build_design("sp", 24)
        with pytest.raises(InvalidWeights):
            fit(b, np.ones(24), weights=np.full(24, 0.5))

    def test_not_prefix(self):
        b = build_design("sp", 24, 2)
        w = np.r_[np.zeros(2), np.ones(24)]
        with pytest.raises(InvalidWeights):
            fit(b, np.ones(24), weights=w)

    def test_negative_counts(self):
        with pytest.raises(ValidationError):
            fit(build_design("sp", 24), np.r_[-1.0, np.ones(23)])


def test_iteration_cap_warns(counts):
    b = build_design("stss", 120)
    with pytest.warns(NonConvergenceWarning):
        res = fit(b, counts, max_iter=2)
    assert not res.converged and res.iterations == 2


def test_no_deviance_increase_warnings_on_typical_fits(counts):
    with warnings.catch_warnings():
        warnings.simplefilter("error", DevianceIncreaseWarning)
        warnings.simplefilter("error", NonConvergenceWarning)
        for kind in ("sp", "stss", "stfs"):
            for lam, horizon in ((0.0, 0), (1.0, 12), (1e4, 12), (1e7, 12)):
                res = fit(build_design(kind, 120, horizon, penalty=PenaltyConfig(lam, lam)), counts)
                assert res.converged


@pytest.mark.parametrize("kind", ["stss", "stfs"])
def test_unpenalized_smooth_forecast_is_singular(kind, counts):
    # basis functions living only on forecast months are unidentified without a penalty
    with pytest.raises(SingularSystem):
        fit(build_design(kind, 120, 12, penalty=PenaltyConfig(0.0, 0.0)), counts)


@settings(max_examples=25, deadline=None)
@given(
    st.sampled_from(["sp", "stss", "stfs"]),
    st.integers(24, 60),
    st.sampled_from([0.0, 10.0, 1e5]),
    st.integers(0, 2**32 - 1),
)
def test_matches_generic_minimizer(kind, T, lam, seed):
    rng = np.random.default_rng(seed)
    spec = None
    if kind == "stss":
        # whole years only: a partial last segment leaves modulated columns unidentified at lambda = 0
        T = 12 * (T // 12)
        spec = BasisSpec(T, degree=2, segments_per_year=1)
    b = build_design(kind, T, basis_spec=spec, penalty=PenaltyConfig(lam, lam))
    t = np.arange(1, T + 1)
    y = rng.poisson(np.exp(4.0 - 0.004 * t + 0.15 * np.cos(np.pi * t / 6))).astype(float)
    res = fit(b, y)
    ref = minimize_penalized_deviance(b.X, y, b.penalty_root)
    assert np.max(np.abs(res.theta - ref)) < 1e-6


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["sp", "stss", "stfs"]), st.integers(24, 96), st.integers(0, 2**32 - 1))
def test_ed_between_zero_and_coefficient_count(kind, T, seed):
    y = np.random.default_rng(seed).poisson(30.0, size=T).astype(float)
    b = build_design(kind, T, penalty=PenaltyConfig(1e3, 1e3))
    res = fit(b, y)
    assert 0 < res.ed <= b.n_coef + 1e-8
    assert res.penalized_deviance == pytest.approx(res.deviance + b.penalty_value(res.theta), rel=1e-12, abs=1e-9)
