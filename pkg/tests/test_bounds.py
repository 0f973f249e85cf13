"""Estimator identities, aggregate bounds, tail bounds, Chebyshev tools."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from agreelab.bounds import (
    conditional_expectation_interval,
    default_eps_grid,
    estimator_moments_by_counts,
    estimator_moments_enumerated,
    estimator_y,
    k_statistic,
    learning_bounds,
    qn_bound,
)
from agreelab.errors import BoundedBeliefsError
from agreelab.signals import SignalModel, belief_from_llr, noise_to_signal_ratio

BINARY_23 = SignalModel.binary(Fraction(2, 3))
LOG2 = math.log(2)


class TestEstimatorY:
    def test_cancelling_signals(self):
        # per-agent terms: (log2 + log2/3) / (2 log2/3) = 2 and the mirror -1
        assert estimator_y(BINARY_23, (LOG2, -LOG2)) == pytest.approx(0.5, abs=1e-12)

    def test_two_high_signals(self):
        assert estimator_y(BINARY_23, (LOG2, LOG2)) == pytest.approx(2.0, abs=1e-12)

    def test_unbiased_for_each_state(self):
        """E[Y | S=s] = s by construction, checked by direct enumeration."""
        from agreelab.signals import log_likelihood_ratio

        for model in (BINARY_23, SignalModel.binary(Fraction(3, 4))):
            for state in (0, 1):
                mean = sum(
                    float(model.weight(state, s))
                    * estimator_y(model, (log_likelihood_ratio(model, s),))
                    for s in model.support
                )
                assert mean == pytest.approx(state, abs=1e-12)


class TestAggregateBounds:
    def test_hundred_agents(self):
        report = learning_bounds(100, 8.0)
        assert report.var_bound == pytest.approx(8 / 108, abs=1e-15)
        assert report.action_bound == pytest.approx(76 / 108, abs=1e-15)

    def test_vacuous_row_reported_raw(self):
        report = learning_bounds(8, 8.0)
        assert report.var_bound == pytest.approx(0.5, abs=1e-15)
        assert report.action_bound == pytest.approx(-1.0, abs=1e-15)

    def test_limits(self):
        report = learning_bounds(10**9, 8.0)
        assert report.var_bound == pytest.approx(0.0, abs=1e-6)
        assert report.action_bound == pytest.approx(1.0, abs=1e-6)

    @given(st.integers(min_value=1, max_value=10**6))
    @settings(max_examples=50)
    def test_monotone_in_n(self, n):
        d = 8.0
        a = learning_bounds(n, d)
        b = learning_bounds(n + 1, d)
        assert b.var_bound < a.var_bound
        assert b.action_bound > a.action_bound

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            learning_bounds(0, 8.0)
        with pytest.raises(ValueError):
            learning_bounds(10, 0.0)


class TestKStatistic:
    def test_counts_strictly_below(self):
        assert k_statistic((0.01, 0.3, 0.6), 0.05) == pytest.approx(1 / 3)

    def test_no_agent_below(self):
        assert k_statistic((0.5, 0.9), 0.05) == 0.0

    def test_all_agents_below(self):
        assert k_statistic((0.01, 0.02), 0.05) == 1.0

    def test_threshold_is_strict(self):
        assert k_statistic((0.05,), 0.05) == 0.0


class TestQnBound:
    def test_single_grid_point(self):
        value = qn_bound(100, lambda eps: 0.2, eps_grid=(0.1,))
        assert value == pytest.approx(max(2 * 0.1 / 0.9, 4 / (100 * 0.2)), abs=1e-12)
        assert value == pytest.approx(0.2222222222, abs=1e-9)

    def test_linear_tail_model_matches_grid_search_oracle(self):
        """Oracle: brute-force search balancing 2e/(1-e) against 4/(2ne).

        For P(B < e | S=0) = 2e and n = 100 the two branches cross near
        e = (sqrt(401) - 1) / 200 = 0.095156, value 0.21026.
        """
        eps_opt = (math.sqrt(401) - 1) / 200
        oracle = 2 * eps_opt / (1 - eps_opt)
        dense = default_eps_grid(1e-6, 0.5, 4096)
        value = qn_bound(100, lambda eps: min(2 * eps, 1.0), eps_grid=dense)
        assert value == pytest.approx(oracle, rel=1e-3)
        assert value == pytest.approx(0.2102, abs=5e-4)

    def test_bound_vanishes_for_large_n(self):
        value = qn_bound(10**9, lambda eps: min(2 * eps, 1.0))
        assert value < 1e-3

    def test_no_lower_tail_raises(self):
        with pytest.raises(BoundedBeliefsError):
            qn_bound(100, lambda eps: 0.0)

    def test_bounded_beliefs_below_grid_raise(self):
        # tail only above 1/3, grid capped below it
        cdf = lambda eps: 0.5 if eps > 1 / 3 else 0.0
        with pytest.raises(BoundedBeliefsError):
            qn_bound(100, cdf, eps_grid=default_eps_grid(1e-6, 0.3, 64))

    def test_marginal_cdf_is_accepted_and_validated(self):
        value = qn_bound(
            100, lambda eps: 0.2, cdf_marginal=lambda eps: 0.4, eps_grid=(0.1,)
        )
        assert value == pytest.approx(0.2222222222, abs=1e-9)
        with pytest.raises(ValueError):
            qn_bound(100, lambda eps: 0.2, cdf_marginal=lambda eps: 1.4, eps_grid=(0.1,))


class TestConditionalExpectationInterval:
    def test_standardized_case(self):
        assert conditional_expectation_interval(0.0, 1.0, 0.25) == (-2.0, 2.0)

    def test_deterministic_variable(self):
        lo, hi = conditional_expectation_interval(3.5, 0.0, 0.9)
        assert lo == hi == 3.5

    def test_translation(self):
        assert conditional_expectation_interval(5.0, 1.0, 0.25) == (3.0, 7.0)

    def test_null_event_rejected(self):
        from agreelab.errors import NullConditioningError

        with pytest.raises(NullConditioningError):
            conditional_expectation_interval(0.0, 1.0, 0.0)
        with pytest.raises(ValueError):
            conditional_expectation_interval(0.0, 1.0, 1.5)

    def test_containment_on_randomized_finite_variables(self):
        """1000 random finite-support variables and events: the directly
        computed conditional mean must land inside the interval."""
        rng = np.random.default_rng(20240601)
        for _ in range(1000):
            size = int(rng.integers(2, 9))
            values = rng.normal(0, 3, size=size)
            probs = rng.dirichlet(np.ones(size))
            membership = rng.integers(0, 2, size=size).astype(bool)
            if not membership.any():
                membership[int(rng.integers(0, size))] = True
            p_event = min(float(probs[membership].sum()), 1.0)
            if p_event <= 0:
                continue
            mean = float(np.dot(probs, values))
            var = float(np.dot(probs, (values - mean) ** 2))
            conditional = float(np.dot(probs[membership], values[membership]) / p_event)
            lo, hi = conditional_expectation_interval(mean, var, p_event)
            assert lo - 1e-12 <= conditional <= hi + 1e-12


class TestEstimatorMoments:
    @pytest.mark.parametrize("p", [Fraction(3, 5), Fraction(2, 3), Fraction(3, 4)])
    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
    def test_deviation_variance_identity(self, p, n):
        model = SignalModel.binary(p)
        d = noise_to_signal_ratio(model)
        moments = estimator_moments_enumerated(model, n)
        assert moments.var_y_minus_s == pytest.approx(d / (4 * n), abs=1e-10)

    def test_covariance_and_variance_identities(self):
        model = BINARY_23
        d = noise_to_signal_ratio(model)
        for n in (1, 3, 7):
            moments = estimator_moments_enumerated(model, n)
            assert moments.cov_s_y == pytest.approx(0.25, abs=1e-12)
            assert moments.var_y == pytest.approx(0.25 * (1 + d / n), abs=1e-10)
            assert moments.mean == pytest.approx(0.5, abs=1e-12)

    def test_count_form_matches_enumeration(self):
        """The polynomial-in-n route must agree with brute force."""
        for model in (BINARY_23, SignalModel.binary(Fraction(3, 4))):
            for n in (2, 4, 6):
                a = estimator_moments_enumerated(model, n)
                b = estimator_moments_by_counts(model, n)
                assert b.var_y_minus_s == pytest.approx(a.var_y_minus_s, abs=1e-12)
                assert b.cov_s_y == pytest.approx(a.cov_s_y, abs=1e-12)
                assert b.var_y == pytest.approx(a.var_y, abs=1e-12)

    def test_count_form_reaches_large_n(self):
        model = BINARY_23
        d = noise_to_signal_ratio(model)
        moments = estimator_moments_by_counts(model, 400)
        assert moments.var_y_minus_s == pytest.approx(d / 1600, abs=1e-10)

    def test_ternary_model_identity(self):
        model = SignalModel(
            ("a", "b", "c"),
            (Fraction(1, 2), Fraction(1, 3), Fraction(1, 6)),
            (Fraction(1, 6), Fraction(1, 3), Fraction(1, 2)),
        )
        d = noise_to_signal_ratio(model)
        moments = estimator_moments_enumerated(model, 5)
        assert moments.var_y_minus_s == pytest.approx(d / 20, abs=1e-10)


class TestMonotoneCorrelationStep:
    """E[Z g(Z) | X] >= E[g(Z) | X] E[Z | X] for increasing g, with equality
    exactly when Z is conditionally constant."""

    def test_randomized_small_joints(self):
        rng = np.random.default_rng(42)
        for _ in range(200):
            n_x = int(rng.integers(1, 4))
            n_z = int(rng.integers(1, 5))
            z_values = rng.normal(0, 2, size=n_z)
            joint = rng.dirichlet(np.ones(n_x * n_z)).reshape(n_x, n_z)
            for ix in range(n_x):
                row = joint[ix]
                mass = row.sum()
                if mass <= 0:
                    continue
                cond = row / mass
                gz = np.array([belief_from_llr(z) for z in z_values])
                lhs = float(np.dot(cond, z_values * gz))
                rhs = float(np.dot(cond, gz)) * float(np.dot(cond, z_values))
                assert lhs >= rhs - 1e-12
                support = z_values[cond > 1e-12]
                if support.size > 1 and np.ptp(support) > 1e-9:
                    assert lhs > rhs
                else:
                    assert lhs == pytest.approx(rhs, abs=1e-10)

    def test_equality_for_conditionally_constant_variable(self):
        z = 0.7
        g = belief_from_llr(z)
        assert z * g == pytest.approx(g * z, abs=1e-15)


class TestGridConstruction:
    def test_default_grid_shape(self):
        grid = default_eps_grid()
        assert len(grid) == 512
        assert grid[0] == pytest.approx(1e-6)
        assert grid[-1] == pytest.approx(0.5)
        assert all(a < b for a, b in zip(grid, grid[1:]))

    def test_validation(self):
        with pytest.raises(ValueError):
            default_eps_grid(0.5, 0.1, 10)
        with pytest.raises(ValueError):
            default_eps_grid(1e-6, 0.5, 0)
