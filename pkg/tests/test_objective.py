import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from motivated_belief.beliefs import bayes_update
from motivated_belief.errors import DimensionMismatch, SupportViolation
from motivated_belief.objective import (
    AgentParams,
    LinearAffectiveUtility,
    ObjectiveBreakdown,
    affective_utility_value,
    objective_value,
    vfe_energy_entropy,
    vfe_value,
)

from conftest import categoricals, linear_instances


class TestAffectiveUtility:
    def test_picks_out_state_zero(self):
        assert affective_utility_value([1, 0], [0.3, 0.7]) == pytest.approx(0.3)

    @given(categoricals(n=3), st.floats(-10, 10))
    def test_constant(self, q, k):
        assert affective_utility_value([k, k, k], q) == pytest.approx(k, abs=1e-12)

    def test_hand_dot(self):
        assert affective_utility_value([2, -1], [0.25, 0.75]) == pytest.approx(-0.25)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            affective_utility_value([1, 0, 0], [0.5, 0.5])

    @given(categoricals(n=3), categoricals(n=3), st.floats(0, 1))
    def test_linear_in_q(self, q1, q2, t):
        u = LinearAffectiveUtility([0.4, -1.2, 2.0])
        mix = t * q1 + (1 - t) * q2
        lhs = affective_utility_value(u, mix / mix.sum())
        rhs = t * affective_utility_value(u, q1) + (1 - t) * affective_utility_value(u, q2)
        assert lhs == pytest.approx(rhs, abs=1e-12)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            LinearAffectiveUtility([1.0, np.inf])


class TestAgentParams:
    @pytest.mark.parametrize("lam, alpha", [(-1, 1), (1, -0.1), (np.inf, 1), (1, np.nan)])
    def test_rejects(self, lam, alpha):
        with pytest.raises(ValueError):
            AgentParams(lam=lam, alpha=alpha, utility=[0, 0])


class TestObjectiveValue:
    def test_prior_as_posterior(self):
        params = AgentParams(lam=5, alpha=1, utility=[1, 0])
        b = objective_value([0.3, 0.7], [0.3, 0.7], [0.5, 0.5], params)
        assert b.complexity == pytest.approx(0.0, abs=1e-15)
        assert b.total == pytest.approx(0.3 + math.log(0.5), abs=1e-14)
        assert b.total == pytest.approx(-0.39315, abs=1e-5)

    def test_all_terms_vanish(self):
        b = objective_value([0.3, 0.7], [0.3, 0.7], [0.2, 0.9], AgentParams(lam=3, alpha=0, utility=[0, 0]))
        assert b.total == 0.0

    @given(linear_instances())
    def test_negative_vfe_special_case(self, inst):
        prior, lik, _ = inst
        q = bayes_update(prior, lik)
        b = objective_value(q, prior, lik, AgentParams(lam=1, alpha=1, utility=np.zeros(prior.size)))
        assert b.total == pytest.approx(-vfe_value(q, prior, lik), abs=1e-12)

    @given(linear_instances(), st.floats(-5, 5), st.floats(0, 5), st.floats(0, 5))
    def test_shift_covariance(self, inst, k, lam, alpha):
        prior, lik, c = inst
        q = bayes_update(prior, lik)
        b0 = objective_value(q, prior, lik, AgentParams(lam=lam, alpha=alpha, utility=c))
        b1 = objective_value(q, prior, lik, AgentParams(lam=lam, alpha=alpha, utility=c + k))
        assert b1.total - b0.total == pytest.approx(k, abs=1e-12)

    @given(linear_instances(), st.floats(0, 5), st.floats(0, 5))
    def test_breakdown_recombines(self, inst, lam, alpha):
        prior, lik, c = inst
        b = objective_value(prior, prior, lik, AgentParams(lam=lam, alpha=alpha, utility=c))
        assert b.total == pytest.approx(b.affective_utility + alpha * b.accuracy - lam * b.complexity, abs=1e-12)

    def test_constant_utility_is_constant_minus_vfe(self, rng):
        for _ in range(100):
            prior, q = rng.dirichlet([1, 1, 1]), rng.dirichlet([1, 1, 1])
            lik = rng.uniform(0.01, 1, 3)
            k = rng.normal()
            b = objective_value(q, prior, lik, AgentParams(lam=1, alpha=1, utility=[k, k, k]))
            assert abs(b.total - (k - vfe_value(q, prior, lik))) <= 1e-12

    def test_support_violation(self):
        with pytest.raises(SupportViolation):
            objective_value([0.5, 0.5], [1.0, 0.0], [0.5, 0.5], AgentParams(lam=1, alpha=1, utility=[0, 0]))

    def test_neg_inf_accuracy_propagates(self):
        b = objective_value([0.5, 0.5], [0.5, 0.5], [0.5, 0.0], AgentParams(lam=1, alpha=1, utility=[0, 0]))
        assert b.accuracy == float("-inf") and b.total == float("-inf")

    def test_alpha_zero_ignores_neg_inf_accuracy(self):
        b = objective_value([0.5, 0.5], [0.5, 0.5], [0.5, 0.0], AgentParams(lam=1, alpha=0, utility=[1, 0]))
        assert b.total == pytest.approx(0.5)

    def test_nonlinear_utility(self):
        params = AgentParams(lam=0.0, alpha=0.0, utility=lambda q, o=None: -(q[0] - 0.8) ** 2)
        assert objective_value([0.8, 0.2], [0.5, 0.5], [0.5, 0.5], params).total == pytest.approx(0.0)

    def test_neg_inf_totals_order_below_finite(self):
        bad = ObjectiveBreakdown.combine(0.0, float("-inf"), 0.0, 1.0, 1.0)
        assert bad.total < -1e300


class TestVFE:
    def test_decomposition_consistency(self, rng):
        for _ in range(1000):
            n = rng.integers(2, 6)
            q, prior = rng.dirichlet(np.ones(n)), rng.dirichlet(np.ones(n))
            lik = rng.uniform(0.001, 1, n)
            assert abs(vfe_value(q, prior, lik) - vfe_energy_entropy(q, prior, lik)) <= 1e-10

    def test_bayes_minimizes_on_grid(self):
        prior, lik = np.array([0.3, 0.7]), np.array([0.9, 0.2])
        grid = np.arange(1, 10000) * 1e-4
        values = [vfe_value([x, 1 - x], prior, lik) for x in grid]
        best = grid[int(np.argmin(values))]
        assert abs(best - bayes_update(prior, lik).probs[0]) <= 1e-4

    def test_uniform_likelihood(self):
        prior, u = np.array([0.3, 0.7]), 0.4
        grid = np.arange(1, 1000) * 1e-3
        values = [vfe_value([x, 1 - x], prior, [u, u]) for x in grid]
        assert grid[int(np.argmin(values))] == pytest.approx(0.3, abs=1e-3)
        assert vfe_value(prior, prior, [u, u]) == pytest.approx(-math.log(u), abs=1e-14)

    def test_zero_accuracy_cost(self):
        assert vfe_value([1, 0], [0.5, 0.5], [1, 1]) == pytest.approx(math.log(2), abs=1e-15)
