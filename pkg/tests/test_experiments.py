import math

import numpy as np
import pytest

from motivated_belief.beliefs import bayes_update
from motivated_belief.errors import EmptyMenu
from motivated_belief.experiments import (
    SCENARIO_1,
    SCENARIO_2,
    SELECTION_ALPHA,
    BernoulliEvidence,
    EvidenceOption,
    SelectionScenario,
    SweepResult,
    evidence_grid,
    evidence_strength_sweep,
    objective_landscape_heatmap,
    polarization_sweep,
    select_evidence,
    selection_boundary_heatmap,
    selection_sweep,
    selection_threshold,
    selection_thresholds,
)
from motivated_belief.objective import AgentParams
from motivated_belief.solver import closed_form_update, optimal_update

# Scenario-1 switching point from an independent pure-math root finder
LAMBDA_STAR_SCENARIO_1 = 1.5838929937765178


def scenario_args(s):
    return s.prior, s.coeffs, SELECTION_ALPHA, list(s.menu)


class TestEvidence:
    def test_clamp(self):
        assert BernoulliEvidence(0.0).strength == 0.01
        assert BernoulliEvidence(1.0).strength == 0.99
        np.testing.assert_allclose(BernoulliEvidence(0.7).likelihood.values, [0.7, 0.3])

    def test_grid(self):
        grid = evidence_grid()
        assert len(grid) == 101 and grid[0].strength == 0.01 and grid[-1].strength == 0.99
        assert any(abs(e.strength - 0.5) < 1e-12 for e in grid)


class TestEvidenceStrengthSweep:
    def test_bayes_row(self):
        r = evidence_strength_sweep([0.3, 0.7], [0, 0], [1], [1], [0.7])
        row = r.records[0]
        assert row["q0"] == pytest.approx(0.5, abs=1e-15)
        assert row["bayes_q0"] == pytest.approx(0.5, abs=1e-15)

    def test_lambda_pulls_toward_prior(self):
        r = evidence_strength_sweep([0.3, 0.7], [1, 0], [1, 10], [1], [0.7])
        q_small, q_big = r.column("q0")
        assert abs(q_big - 0.3) < abs(q_small - 0.3)

    def test_alpha_pulls_toward_bayes(self):
        r = evidence_strength_sweep([0.3, 0.7], [1, 0], [1], [1, 10], [0.3])
        bayes = 0.09 / 0.58
        assert r.records[0]["bayes_q0"] == pytest.approx(bayes, abs=1e-15)
        assert bayes == pytest.approx(0.1552, abs=1e-4)
        q1, q10 = r.column("q0")
        assert abs(q10 - bayes) < abs(q1 - bayes)

    def test_record_count_and_order(self):
        lams, alphas, ev = [1, 2, 3], [0.5, 1], evidence_grid(7)
        r = evidence_strength_sweep([0.3, 0.7], [1, 0], lams, alphas, ev)
        assert len(r.records) == 3 * 2 * 7 and r.shape == (3, 2, 7)
        assert [row["lambda"] for row in r.records[:14]] == [1.0] * 14
        assert r.records[1]["evidence"] > r.records[0]["evidence"]

    def test_rows_match_single_updates(self, backend):
        r = evidence_strength_sweep([0.3, 0.7], [1, 0], [0.5, 3], [0, 2], evidence_grid(5))
        for row in r.records:
            ref = closed_form_update([0.3, 0.7], BernoulliEvidence(row["evidence"]).likelihood, [1, 0],
                                     row["alpha"], row["lambda"])
            assert row["q0"] == pytest.approx(ref.posterior.probs[0], abs=1e-12)
            assert row["total"] == pytest.approx(ref.breakdown.total, abs=1e-12)

    def test_deterministic(self):
        args = ([0.3, 0.7], [1, 0], np.linspace(1, 10, 4), [1, 5], evidence_grid(11))
        assert evidence_strength_sweep(*args).records == evidence_strength_sweep(*args).records

    def test_motivated_bias_direction(self):
        lams, alphas, ev = np.linspace(0.1, 10, 12), np.linspace(0, 10, 6), evidence_grid()
        biased = evidence_strength_sweep([0.3, 0.7], [1, 0], lams, alphas, ev).column("q0")
        neutral = evidence_strength_sweep([0.3, 0.7], [0, 0], lams, alphas, ev).column("q0")
        assert np.all(biased >= neutral)
        # strictness is only representable where the motivated q(0) has not rounded to 1.0
        open_ = biased < 1.0
        assert open_.mean() > 0.9
        assert np.all(biased[open_] > neutral[open_])

    def test_lambda_zero_uses_limit(self):
        r = evidence_strength_sweep([0.3, 0.7], [1, 0], [0], [1], [0.5])
        assert r.records[0]["method"] == "limit_lambda_zero" and r.records[0]["q0"] == 1.0

    @pytest.mark.parametrize("bad", [[], [-1.0]])
    def test_bad_grid(self, bad):
        with pytest.raises(ValueError):
            evidence_strength_sweep([0.3, 0.7], [1, 0], bad, [1], [0.5])

    def test_record_count_checked(self):
        with pytest.raises(ValueError):
            SweepResult("x", {"a": [1, 2]}, ("a",), [{"a": 1}])


class TestSelect:
    def test_single_option(self):
        out = select_evidence([0.3, 0.7], AgentParams(1, 1, [1, 0]), [EvidenceOption("A", [0.9, 0.1])])
        assert out.chosen_index == 0 and out.chosen.label == "A"

    def test_identical_options_tie_to_first(self):
        menu = [EvidenceOption("A", [0.6, 0.4]), EvidenceOption("B", [0.6, 0.4])]
        assert select_evidence([0.3, 0.7], AgentParams(1, 1, [1, 0]), menu).chosen_index == 0

    def test_empty(self):
        with pytest.raises(EmptyMenu):
            select_evidence([0.3, 0.7], AgentParams(1, 1, [1, 0]), [])

    def test_scenario1_corners(self):
        prior, c, alpha, menu = scenario_args(SCENARIO_1)
        assert select_evidence(prior, AgentParams(0.1, alpha, c), menu).chosen.label == "A"
        assert select_evidence(prior, AgentParams(100, alpha, c), menu).chosen.label == "B"

    def test_neg_inf_ranks_last(self):
        menu = [EvidenceOption("bad", [0.0, 1.0]), EvidenceOption("ok", [0.5, 0.5])]
        # the prior puts all its mass on state 0, which "bad" rules out
        out = select_evidence([1.0, 0.0], AgentParams(1, 0, [0, 0]), menu[1:])
        assert out.chosen_index == 0

    def test_totals_match_updates(self):
        prior, c, alpha, menu = scenario_args(SCENARIO_1)
        out = select_evidence(prior, AgentParams(2.0, alpha, c), menu)
        for opt, res in zip(menu, out.per_option):
            assert res.total == optimal_update(prior, opt.lik, c, alpha, 2.0).breakdown.total


class TestThreshold:
    def test_scenario1_golden(self):
        roots = selection_thresholds(*scenario_args(SCENARIO_1), tol=1e-6)
        assert len(roots) == 1
        assert abs(roots[0] - LAMBDA_STAR_SCENARIO_1) <= 1e-6

    def test_choice_flips_across_threshold(self):
        prior, c, alpha, menu = scenario_args(SCENARIO_1)
        lam = selection_threshold(prior, c, alpha, menu)
        below = select_evidence(prior, AgentParams(lam - 1e-5, alpha, c), menu).chosen_index
        above = select_evidence(prior, AgentParams(lam + 1e-5, alpha, c), menu).chosen_index
        assert below != above

    def test_scenario2_none(self):
        assert selection_threshold(*scenario_args(SCENARIO_2)) is None

    def test_identical_options_none(self):
        menu = [EvidenceOption("A", [0.6, 0.4]), EvidenceOption("B", [0.6, 0.4])]
        assert selection_threshold([0.3, 0.7], [1, 0], 2.0, menu) is None

    def test_needs_two_options(self):
        with pytest.raises(EmptyMenu):
            selection_threshold([0.3, 0.7], [1, 0], 2.0, [])
        with pytest.raises(ValueError):
            selection_threshold([0.3, 0.7], [1, 0], 2.0, [EvidenceOption("A", [0.6, 0.4])])

    def test_scenario_constraints(self):
        bad = SelectionScenario("bad", (0.3, 0.7), (1, 0),
                                (EvidenceOption("A", [0.4, 0.6]), EvidenceOption("B", [0.95, 0.05])), True)
        with pytest.raises(ValueError):
            bad.check()

    def test_selection_sweep_agrees_with_threshold(self):
        prior, c, alpha, menu = scenario_args(SCENARIO_1)
        r = selection_sweep(prior, c, alpha, menu, np.geomspace(0.1, 100, 101))
        lams, chosen = r.column("lambda"), r.column("chosen_index")
        assert np.all(chosen[lams < LAMBDA_STAR_SCENARIO_1] == 0)
        assert np.all(chosen[lams > LAMBDA_STAR_SCENARIO_1] == 1)


class TestHeatmaps:
    lams = np.linspace(0.1, 10, 25)
    alphas = np.linspace(0, 10, 21)

    @pytest.mark.parametrize("e", [0.3, 0.7])
    def test_optimality(self, e):
        r = objective_landscape_heatmap([0.3, 0.7], [1, 0], e, self.lams, self.alphas)
        assert np.all(r.column("total") >= r.column("prior_total") - 1e-12)

    def test_bayes_cell(self):
        r = objective_landscape_heatmap([0.3, 0.7], [0, 0], 0.7, [1], [1])
        assert r.records[0]["q0"] == pytest.approx(r.records[0]["bayes_q0"], abs=1e-12)

    @pytest.mark.parametrize("e", [0.3, 0.7])
    def test_monotone_rows(self, e):
        r = objective_landscape_heatmap([0.3, 0.7], [1, 0], e, self.lams, self.alphas)
        dist = np.abs(r.grid("q0") - 0.3)  # shape (lambda, alpha)
        assert np.all(np.diff(dist, axis=0) <= 1e-12)

    def test_identical_options(self):
        menu = [EvidenceOption("A", [0.6, 0.4]), EvidenceOption("B", [0.6, 0.4])]
        r = selection_boundary_heatmap([0.3, 0.7], [1, 0], menu, self.lams, self.alphas)
        assert np.all(r.column("chosen_index") == 0)
        assert np.all(r.column("difference") == 0)

    def test_scenario1_corners(self):
        prior, c, _, menu = scenario_args(SCENARIO_1)
        alphas = np.linspace(1, 10, 10)
        r = selection_boundary_heatmap(prior, c, menu, [0.1, 100], alphas)
        chosen = r.grid("chosen_index")
        assert np.all(chosen[0] == 0) and np.all(chosen[1] == 1)

    def test_difference_sign_matches_choice(self):
        prior, c, _, menu = scenario_args(SCENARIO_1)
        r = selection_boundary_heatmap(prior, c, menu, np.geomspace(0.1, 100, 41), np.linspace(1, 10, 10))
        diff, chosen = r.column("difference"), r.column("chosen_index")
        assert np.all((diff >= 0) == (chosen == 0))


class TestPolarization:
    def test_examples(self):
        r = polarization_sweep([0.5, 0.5], [0.5, 0.5], [0.1, 10], [1])
        gap_small, gap_big = r.column("gap")
        assert gap_small == pytest.approx(math.tanh(5), abs=1e-12)
        assert gap_big == pytest.approx(math.tanh(0.05), abs=1e-12)
        assert gap_small == pytest.approx(0.99991, abs=1e-5)
        assert gap_big == pytest.approx(0.0500, abs=1e-4)

    def test_identical_utilities(self):
        r = polarization_sweep([0.5, 0.5], [0.6, 0.4], np.linspace(0, 10, 11), [1], utilities=((1, 0), (1, 0)))
        assert np.all(r.column("gap") == 0)

    def test_symmetry(self):
        r = polarization_sweep([0.5, 0.5], [0.5, 0.5], np.linspace(0, 10, 21), np.linspace(0, 10, 11))
        q1, q2 = r.column("q0_agent1"), r.column("q0_agent2")
        np.testing.assert_allclose(q1 + q2, 1.0, atol=1e-12)
        np.testing.assert_allclose(r.column("gap"), 2 * q1 - 1, atol=1e-12)

    def test_endpoints_lambda(self):
        r = polarization_sweep([0.5, 0.5], [0.6, 0.4], np.linspace(0, 10, 101), [1])
        gap, lams = r.column("gap"), r.column("lambda")
        assert gap[-1] < gap[lams > 0][0]

    def test_endpoints_alpha(self):
        r = polarization_sweep([0.5, 0.5], [0.6, 0.4], [1], np.linspace(0, 10, 101))
        gap = r.column("gap")
        assert gap[-1] < gap[0]

    def test_lambda_zero_is_full_polarization(self):
        r = polarization_sweep([0.5, 0.5], [0.6, 0.4], [0], [1])
        assert r.records[0]["gap"] == 1.0

    def test_bayes_reference(self):
        r = polarization_sweep([0.5, 0.5], [0.6, 0.4], [1], [1])
        assert r.records[0]["bayes_q0"] == pytest.approx(bayes_update([0.5, 0.5], [0.6, 0.4]).probs[0])
