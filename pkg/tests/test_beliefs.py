import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from motivated_belief.beliefs import (
    Categorical,
    Likelihood,
    bayes_update,
    entropy,
    expected_log_likelihood,
    kl_divergence,
)
from motivated_belief.errors import DimensionMismatch, InvalidDistribution, SupportViolation, ZeroEvidence

from conftest import categoricals, likelihoods


class TestCategorical:
    def test_renormalizes_small_deviation(self):
        q = Categorical([0.3, 0.7 + 5e-7])
        assert abs(q.probs.sum() - 1) < 1e-12

    def test_rejects_large_deviation(self):
        with pytest.raises(InvalidDistribution):
            Categorical([0.3, 0.6])

    @pytest.mark.parametrize("bad", [[1.0], [-0.1, 1.1], [np.nan, 1.0], [0.5, np.inf]])
    def test_rejects_invalid(self, bad):
        with pytest.raises(InvalidDistribution):
            Categorical(bad)

    def test_immutable(self):
        q = Categorical([0.5, 0.5])
        with pytest.raises(ValueError):
            q.probs[0] = 1.0


class TestLikelihood:
    def test_valid(self):
        assert Likelihood([0.0, 0.3]).n_states == 2

    @pytest.mark.parametrize("bad", [[0.0, 0.0], [1.2, 0.1], [-0.1, 0.5]])
    def test_rejects_invalid(self, bad):
        with pytest.raises(InvalidDistribution):
            Likelihood(bad)


class TestKL:
    def test_identity(self):
        assert kl_divergence([0.5, 0.5], [0.5, 0.5]) == 0.0

    def test_degenerate_vs_uniform(self):
        assert kl_divergence([1, 0], [0.5, 0.5]) == pytest.approx(math.log(2), abs=1e-15)

    def test_hand_value(self):
        expected = 0.3 * math.log(0.6) + 0.7 * math.log(1.4)
        assert kl_divergence([0.3, 0.7], [0.5, 0.5]) == pytest.approx(expected, abs=1e-15)
        assert expected == pytest.approx(0.08228, abs=1e-5)

    def test_support_violation(self):
        with pytest.raises(SupportViolation):
            kl_divergence([0.5, 0.5], [1.0, 0.0])

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            kl_divergence([0.5, 0.5], [0.2, 0.3, 0.5])

    @given(categoricals())
    def test_self_divergence_is_zero(self, q):
        assert abs(kl_divergence(q, q)) <= 1e-12

    @given(st.integers(2, 5).flatmap(lambda n: st.tuples(categoricals(n=n), categoricals(n=n))))
    def test_gibbs_inequality(self, pair):
        q, p = pair
        assert kl_divergence(q, p) >= -1e-12


class TestEntropy:
    def test_values(self):
        assert entropy([1, 0]) == 0.0
        assert entropy([0.5, 0.5]) == pytest.approx(math.log(2), abs=1e-15)
        expected = -0.3 * math.log(0.3) - 0.7 * math.log(0.7)
        assert entropy([0.3, 0.7]) == pytest.approx(expected, abs=1e-15)
        assert expected == pytest.approx(0.61086, abs=1e-5)


class TestExpectedLogLikelihood:
    def test_values(self):
        assert expected_log_likelihood([1, 0], [0.7, 0.3]) == pytest.approx(math.log(0.7), abs=1e-15)
        assert expected_log_likelihood([0.5, 0.5], [math.exp(-1), math.exp(-1)]) == pytest.approx(-1.0, abs=1e-15)
        expected = 0.3 * math.log(0.7) + 0.7 * math.log(0.3)
        assert expected_log_likelihood([0.3, 0.7], [0.7, 0.3]) == pytest.approx(expected, abs=1e-15)
        assert expected == pytest.approx(-0.94978, abs=1e-5)

    def test_zero_mass_on_zero_likelihood_contributes_nothing(self):
        assert expected_log_likelihood([1, 0], [0.5, 0.0]) == pytest.approx(math.log(0.5))

    def test_neg_inf_sentinel(self):
        assert expected_log_likelihood([0.5, 0.5], [0.5, 0.0]) == float("-inf")


class TestBayes:
    def test_symmetric_products(self):
        np.testing.assert_allclose(bayes_update([0.3, 0.7], [0.7, 0.3]).probs, [0.5, 0.5], atol=1e-15)

    def test_uninformative(self):
        np.testing.assert_allclose(bayes_update([0.3, 0.7], [0.5, 0.5]).probs, [0.3, 0.7], atol=1e-15)

    def test_hand_value(self):
        post = bayes_update([0.3, 0.7], [0.9, 0.1]).probs
        np.testing.assert_allclose(post, [0.27 / 0.34, 0.07 / 0.34], atol=1e-15)
        assert post[0] == pytest.approx(0.7941, abs=1e-4)

    def test_zero_evidence(self):
        with pytest.raises(ZeroEvidence):
            bayes_update([1.0, 0.0], [0.0, 0.5])

    @given(categoricals(), st.floats(0.01, 1.0))
    def test_uniform_likelihood_returns_prior(self, prior, u):
        post = bayes_update(prior, np.full(prior.size, u))
        np.testing.assert_allclose(post.probs, prior, rtol=0, atol=1e-15)

    @given(categoricals().flatmap(lambda p: st.tuples(st.just(p), likelihoods(p.size), st.randoms())))
    def test_permutation_equivariance(self, args):
        prior, lik, rnd = args
        perm = list(range(prior.size))
        rnd.shuffle(perm)
        lhs = bayes_update(prior[perm], lik[perm]).probs
        rhs = bayes_update(prior, lik).probs[perm]
        np.testing.assert_allclose(lhs, rhs, atol=1e-15)

    @given(categoricals().flatmap(lambda p: st.tuples(st.just(p), likelihoods(p.size), st.floats(1e-3, 1.0))))
    def test_likelihood_scale_invariance(self, args):
        prior, lik, frac = args
        gamma = frac / lik.max()
        np.testing.assert_allclose(bayes_update(prior, gamma * lik).probs, bayes_update(prior, lik).probs,
                                   atol=1e-14)
