"""Parameter sweeps and scenario runners for two-state (Bernoulli) agents.

Every sweep returns a :class:`SweepResult` whose records are laid out in
row-major order over its axes, so output does not depend on evaluation
order. Linear-utility sweeps are evaluated in one batched kernel call per
evidence level.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import bisect

from . import kernels
from .beliefs import Likelihood, as_categorical, as_likelihood, bayes_update, check_same_space, kl_divergence
from .errors import DegenerateProblem, EmptyMenu
from .objective import AgentParams, LinearAffectiveUtility
from .solver import UpdateResult, optimal_update

E_MIN, E_MAX = 0.01, 0.99
DEFAULT_GRID_POINTS = 101


@dataclass(frozen=True)
class BernoulliEvidence:
    """Evidence of strength ``e``: ``p(o|s=0) = e`` and ``p(o|s=1) = 1 - e``, clamped to ``[e_min, e_max]``."""

    strength: float
    e_min: float = E_MIN
    e_max: float = E_MAX

    def __post_init__(self):
        if not 0 <= self.e_min <= self.e_max <= 1:
            raise ValueError(f"bad clamp range [{self.e_min}, {self.e_max}]")
        object.__setattr__(self, "strength", float(np.clip(self.strength, self.e_min, self.e_max)))

    @property
    def likelihood(self) -> Likelihood:
        return Likelihood([self.strength, 1.0 - self.strength])


def evidence_grid(num=DEFAULT_GRID_POINTS, lo=E_MIN, hi=E_MAX):
    return [BernoulliEvidence(e, min(lo, E_MIN), max(hi, E_MAX)) for e in np.linspace(lo, hi, num)]


def _as_evidence_lik(evidence) -> Likelihood:
    if isinstance(evidence, BernoulliEvidence):
        return evidence.likelihood
    if np.ndim(evidence) == 0:
        return BernoulliEvidence(float(evidence)).likelihood
    return as_likelihood(evidence)


def _strength(evidence) -> float:
    if isinstance(evidence, BernoulliEvidence):
        return evidence.strength
    if np.ndim(evidence) == 0:
        return BernoulliEvidence(float(evidence)).strength
    return float(as_likelihood(evidence).values[0])


@dataclass(frozen=True)
class EvidenceOption:
    label: str
    lik: Likelihood

    def __post_init__(self):
        object.__setattr__(self, "lik", as_likelihood(self.lik))


@dataclass(frozen=True)
class OptionOutcome:
    label: str
    result: UpdateResult
    total: float


@dataclass(frozen=True)
class SelectionOutcome:
    chosen_index: int
    per_option: tuple

    @property
    def chosen(self) -> OptionOutcome:
        return self.per_option[self.chosen_index]


@dataclass
class SweepResult:
    """Records over a named parameter grid.

    ``axes`` maps axis name to its values, in row-major order (last axis
    varies fastest). ``meta`` holds the fixed experiment parameters and
    plotting hints.
    """

    name: str
    axes: dict
    columns: tuple
    records: list
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.axes = {k: tuple(float(x) for x in v) for k, v in self.axes.items()}
        expected = int(np.prod([len(v) for v in self.axes.values()])) if self.axes else 0
        if len(self.records) != expected:
            raise ValueError(f"{len(self.records)} records for axes of total size {expected}")

    @property
    def shape(self):
        return tuple(len(v) for v in self.axes.values())

    def column(self, name) -> np.ndarray:
        return np.array([r[name] for r in self.records])

    def grid(self, name) -> np.ndarray:
        return self.column(name).reshape(self.shape)


# --- batched linear-utility evaluation ----------------------------------


def _batch(prior, coeffs, lik, lambdas, alphas):
    """Optimal posteriors and objective parts for many (lam, alpha) pairs at once."""
    with np.errstate(divide="ignore"):
        log_prior = np.log(prior.probs)
    loglik = lik.log()
    q, value = kernels.tempered_posterior_batch(log_prior, coeffs, loglik, alphas, lambdas)
    if np.isnan(q).any():
        raise DegenerateProblem("every state has zero prior or zero likelihood weight")
    pos = q > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        kl_terms = np.where(pos, q * (np.log(q) - log_prior), 0.0)
        acc_terms = np.where(pos, q * loglik, 0.0)
    utility = q @ coeffs
    complexity = kl_terms.sum(axis=1)
    accuracy = acc_terms.sum(axis=1)
    with np.errstate(invalid="ignore"):
        weighted = np.where(alphas == 0, 0.0, alphas * accuracy)
    total = utility + weighted - lambdas * complexity
    method = np.where(lambdas > 0, "closed_form", "limit_lambda_zero")
    return q, dict(affective_utility=utility, accuracy=accuracy, complexity=complexity, total=total,
                   optimum=value, method=method)


def _pairs(lambda_values, alpha_values):
    lam, alpha = np.meshgrid(np.asarray(lambda_values, float), np.asarray(alpha_values, float), indexing="ij")
    return lam.ravel(), alpha.ravel()


def _check_grid(name, values):
    values = np.atleast_1d(np.asarray(values, dtype=float))
    if values.size == 0:
        raise ValueError(f"{name} grid is empty")
    if np.any(values < 0) or not np.all(np.isfinite(values)):
        raise ValueError(f"{name} grid must be finite and >= 0")
    return values


def _coeffs(c):
    return c.coeffs if isinstance(c, LinearAffectiveUtility) else LinearAffectiveUtility(c).coeffs


# --- evidence-strength response ------------------------------------------


def evidence_strength_sweep(prior, c, lambda_values, alpha_values, evidence_values) -> SweepResult:
    """Final belief ``q(s=0)`` against evidence strength, with the Bayes posterior alongside."""
    prior = as_categorical(prior)
    coeffs = _coeffs(c)
    lambda_values = _check_grid("lambda", lambda_values)
    alpha_values = _check_grid("alpha", alpha_values)
    if len(evidence_values) == 0:
        raise ValueError("evidence grid is empty")
    strengths = [_strength(e) for e in evidence_values]
    liks = [_as_evidence_lik(e) for e in evidence_values]
    check_same_space(prior, coeffs, liks[0])

    lam, alpha = _pairs(lambda_values, alpha_values)
    per_evidence = [(_batch(prior, coeffs, lik, lam, alpha), bayes_update(prior, lik).probs[0]) for lik in liks]
    records = []
    for i in range(lam.size):
        for e, ((q, parts), bayes0) in zip(strengths, per_evidence):
            records.append({
                "lambda": float(lam[i]), "alpha": float(alpha[i]), "evidence": e,
                "q0": float(q[i, 0]), "bayes_q0": float(bayes0),
                "affective_utility": float(parts["affective_utility"][i]),
                "accuracy": float(parts["accuracy"][i]),
                "complexity": float(parts["complexity"][i]),
                "total": float(parts["total"][i]),
                "method": str(parts["method"][i]),
            })
    return SweepResult(
        "evidence_strength",
        {"lambda": lambda_values, "alpha": alpha_values, "evidence": strengths},
        ("lambda", "alpha", "evidence", "q0", "bayes_q0", "affective_utility", "accuracy",
         "complexity", "total", "method"),
        records,
        {"prior": prior.probs.tolist(), "c": coeffs.tolist(), "x_axis": "evidence",
         "line_columns": ["q0"], "reference_column": "bayes_q0",
         "y_label": "final belief q(s=0)", "column_labels": {"bayes_q0": "Bayes"}},
    )


# --- evidence selection --------------------------------------------------


def select_evidence(prior, params: AgentParams, menu: Sequence[EvidenceOption], method="auto") -> SelectionOutcome:
    """Update on each option and pick the one whose optimal objective is largest.

    ``-inf`` totals rank last; ties go to the lowest index.
    """
    if len(menu) == 0:
        raise EmptyMenu("no evidence to choose from")
    outcomes = []
    chosen = 0
    for i, opt in enumerate(menu):
        result = optimal_update(prior, opt.lik, params.utility, params.alpha, params.lam, method)
        outcomes.append(OptionOutcome(opt.label, result, result.breakdown.total))
        if outcomes[i].total > outcomes[chosen].total:
            chosen = i
    return SelectionOutcome(chosen, tuple(outcomes))


def selection_difference(prior, c, alpha, lam, menu) -> float:
    """Optimal objective of option 0 minus that of option 1."""
    out = select_evidence(prior, AgentParams(lam=lam, alpha=alpha, utility=c), menu)
    return out.per_option[0].total - out.per_option[1].total


def _two_options(menu):
    if len(menu) == 0:
        raise EmptyMenu("no evidence to choose from")
    if len(menu) != 2:
        raise ValueError(f"threshold search needs exactly 2 options, got {len(menu)}")


def selection_thresholds(prior, c, alpha, menu, lambda_range=(0.1, 100.0), tol=1e-6, scan_points=2001):
    """Every ``lam`` in ``lambda_range`` where the preferred option flips.

    Sign changes of the objective difference are bracketed on a log-spaced
    scan and refined by bisection to absolute tolerance ``tol``. An
    identically-zero difference has no sign change and yields ``[]``.
    """
    _two_options(menu)
    lo, hi = map(float, lambda_range)
    if not 0 < lo < hi:
        raise ValueError(f"bad lambda range {lambda_range}")

    def diff(lam):
        return selection_difference(prior, c, alpha, lam, menu)

    grid = np.geomspace(lo, hi, scan_points)
    values = np.array([diff(x) for x in grid])
    signs = np.sign(values)
    roots = []
    last = None
    for i, s in enumerate(signs):
        if s == 0:
            continue
        if last is not None and s != signs[last]:
            a, b = grid[last], grid[i]
            roots.append(float(bisect(diff, a, b, xtol=tol)) if i == last + 1 else float(grid[last + 1]))
        last = i
    return roots


def selection_threshold(prior, c, alpha, menu, lambda_range=(0.1, 100.0), tol=1e-6):
    """First switching point of :func:`selection_thresholds`, or ``None``."""
    roots = selection_thresholds(prior, c, alpha, menu, lambda_range, tol)
    return roots[0] if roots else None


@dataclass(frozen=True)
class SelectionScenario:
    """A two-option menu with the structure the selection experiment needs.

    Both scenarios pair a confirmatory option A (its Bayes update raises
    ``q(s=0)``) with a contradictory option B. ``a_costlier`` says whether
    A's Bayes update is further from the prior in KL than B's.
    """

    name: str
    prior: tuple
    coeffs: tuple
    menu: tuple
    a_costlier: bool

    def check(self):
        prior = as_categorical(self.prior)
        a, b = (bayes_update(prior, opt.lik) for opt in self.menu)
        if not a.probs[0] > prior.probs[0]:
            raise ValueError(f"{self.name}: option A must be confirmatory")
        if not b.probs[0] < prior.probs[0]:
            raise ValueError(f"{self.name}: option B must be contradictory")
        if (kl_divergence(a, prior) > kl_divergence(b, prior)) != self.a_costlier:
            raise ValueError(f"{self.name}: KL ordering of the two options is wrong")
        return self


SCENARIO_1 = SelectionScenario(
    "scenario1", (0.3, 0.7), (1.0, 0.0),
    (EvidenceOption("A", [0.95, 0.05]), EvidenceOption("B", [0.4, 0.6])),
    a_costlier=True,
).check()

SCENARIO_2 = SelectionScenario(
    "scenario2", (0.7, 0.3), (1.0, 0.0),
    (EvidenceOption("A", [0.8, 0.2]), EvidenceOption("B", [0.2, 0.8])),
    a_costlier=False,
).check()

SCENARIOS = {s.name: s for s in (SCENARIO_1, SCENARIO_2)}
SELECTION_ALPHA = 2.0


def selection_sweep(prior, c, alpha, menu, lambda_values) -> SweepResult:
    """Optimal objective of each option along a ``lam`` grid (the objective-vs-conservatism curves)."""
    _two_options(menu)
    prior = as_categorical(prior)
    coeffs = _coeffs(c)
    lambda_values = _check_grid("lambda", lambda_values)
    alphas = np.full(lambda_values.size, float(alpha))
    batches = [_batch(prior, coeffs, opt.lik, lambda_values, alphas) for opt in menu]
    records = []
    for i, lam in enumerate(lambda_values):
        t0, t1 = (float(parts["total"][i]) for _, parts in batches)
        chosen = 0 if t0 >= t1 else 1
        records.append({
            "lambda": float(lam), "total_0": t0, "total_1": t1, "difference": t0 - t1,
            "chosen_index": chosen, "chosen_label": menu[chosen].label,
            "q0_chosen": float(batches[chosen][0][i, 0]),
        })
    labels = [opt.label for opt in menu]
    return SweepResult(
        "selection", {"lambda": lambda_values},
        ("lambda", "total_0", "total_1", "difference", "chosen_index", "chosen_label", "q0_chosen"),
        records,
        {"prior": prior.probs.tolist(), "c": coeffs.tolist(), "alpha": float(alpha),
         "menu": {o.label: o.lik.values.tolist() for o in menu}, "labels": labels,
         "x_axis": "lambda", "line_columns": ["total_0", "total_1"], "y_label": "optimal objective",
         "column_labels": {
             "total_0": f"Evidence {labels[0]}", "total_1": f"Evidence {labels[1]}"}},
    )


# --- heatmaps ------------------------------------------------------------


def objective_landscape_heatmap(prior, c, evidence, lambda_grid, alpha_grid) -> SweepResult:
    """Optimal objective and final belief over a (lam, alpha) grid for one piece of evidence."""
    prior = as_categorical(prior)
    coeffs = _coeffs(c)
    lik = _as_evidence_lik(evidence)
    check_same_space(prior, coeffs, lik)
    lambda_grid = _check_grid("lambda", lambda_grid)
    alpha_grid = _check_grid("alpha", alpha_grid)
    lam, alpha = _pairs(lambda_grid, alpha_grid)
    q, parts = _batch(prior, coeffs, lik, lam, alpha)
    bayes0 = float(bayes_update(prior, lik).probs[0])
    prior_utility = float(prior.probs @ coeffs)
    with np.errstate(invalid="ignore"):
        prior_acc = float(np.sum(np.where(prior.probs > 0, prior.probs * lik.log(), 0.0)))
    records = []
    for i in range(lam.size):
        prior_total = prior_utility + (0.0 if alpha[i] == 0 else alpha[i] * prior_acc)
        records.append({
            "lambda": float(lam[i]), "alpha": float(alpha[i]),
            "q0": float(q[i, 0]), "bayes_q0": bayes0,
            "affective_utility": float(parts["affective_utility"][i]),
            "accuracy": float(parts["accuracy"][i]),
            "complexity": float(parts["complexity"][i]),
            "total": float(parts["total"][i]),
            "prior_total": float(prior_total),
        })
    return SweepResult(
        "objective_landscape", {"lambda": lambda_grid, "alpha": alpha_grid},
        ("lambda", "alpha", "q0", "bayes_q0", "affective_utility", "accuracy", "complexity",
         "total", "prior_total"),
        records,
        {"prior": prior.probs.tolist(), "c": coeffs.tolist(), "likelihood": lik.values.tolist(),
         "heatmap_columns": ["total", "q0"],
         "column_labels": {"total": "objective", "q0": "final belief q(s=0)"}},
    )


def selection_boundary_heatmap(prior, c, menu, lambda_grid, alpha_grid) -> SweepResult:
    """Per-cell choice between two options over a (lam, alpha) grid."""
    _two_options(menu)
    prior = as_categorical(prior)
    coeffs = _coeffs(c)
    lambda_grid = _check_grid("lambda", lambda_grid)
    alpha_grid = _check_grid("alpha", alpha_grid)
    lam, alpha = _pairs(lambda_grid, alpha_grid)
    batches = [_batch(prior, coeffs, opt.lik, lam, alpha) for opt in menu]
    records = []
    for i in range(lam.size):
        t0, t1 = (float(parts["total"][i]) for _, parts in batches)
        chosen = 0 if t0 >= t1 else 1
        records.append({
            "lambda": float(lam[i]), "alpha": float(alpha[i]),
            "total_0": t0, "total_1": t1, "difference": t0 - t1,
            "chosen_index": chosen, "chosen_label": menu[chosen].label,
            "q0_0": float(batches[0][0][i, 0]), "q0_1": float(batches[1][0][i, 0]),
            "q0_chosen": float(batches[chosen][0][i, 0]),
        })
    labels = [opt.label for opt in menu]
    return SweepResult(
        "selection_boundary", {"lambda": lambda_grid, "alpha": alpha_grid},
        ("lambda", "alpha", "total_0", "total_1", "difference", "chosen_index", "chosen_label",
         "q0_0", "q0_1", "q0_chosen"),
        records,
        {"prior": prior.probs.tolist(), "c": coeffs.tolist(),
         "menu": {o.label: o.lik.values.tolist() for o in menu}, "labels": labels,
         "heatmap_columns": ["total_0", "total_1", "q0_chosen", "difference"],
         "boundary_columns": ["q0_chosen", "difference"],
         "column_labels": {"total_0": f"objective, Evidence {labels[0]}",
                           "total_1": f"objective, Evidence {labels[1]}",
                           "q0_chosen": "final belief q(s=0)",
                           "difference": f"objective {labels[0]} - {labels[1]}"}},
    )


# --- polarisation --------------------------------------------------------

AGENT_UTILITIES = ((1.0, 0.0), (0.0, 1.0))


def polarization_sweep(prior, evidence, lambda_grid, alpha_grid, utilities=AGENT_UTILITIES) -> SweepResult:
    """Two agents sharing prior and evidence but with opposed linear utilities.

    ``gap = |q1(s=0) - q2(s=0)|``. ``lam = 0`` cells use the limit update.
    """
    prior = as_categorical(prior)
    lik = _as_evidence_lik(evidence)
    coeffs = [_coeffs(u) for u in utilities]
    if len(coeffs) != 2:
        raise ValueError("polarisation needs exactly two agents")
    check_same_space(prior, lik, *coeffs)
    lambda_grid = _check_grid("lambda", lambda_grid)
    alpha_grid = _check_grid("alpha", alpha_grid)
    lam, alpha = _pairs(lambda_grid, alpha_grid)
    q1, _ = _batch(prior, coeffs[0], lik, lam, alpha)
    q2, _ = _batch(prior, coeffs[1], lik, lam, alpha)
    bayes0 = float(bayes_update(prior, lik).probs[0])
    records = [{
        "lambda": float(lam[i]), "alpha": float(alpha[i]),
        "q0_agent1": float(q1[i, 0]), "q0_agent2": float(q2[i, 0]),
        "bayes_q0": bayes0, "gap": float(abs(q1[i, 0] - q2[i, 0])),
    } for i in range(lam.size)]
    swept = [k for k, v in (("lambda", lambda_grid), ("alpha", alpha_grid)) if v.size > 1]
    return SweepResult(
        "polarization", {"lambda": lambda_grid, "alpha": alpha_grid},
        ("lambda", "alpha", "q0_agent1", "q0_agent2", "bayes_q0", "gap"),
        records,
        {"prior": prior.probs.tolist(), "likelihood": lik.values.tolist(),
         "utilities": [c.tolist() for c in coeffs],
         "x_axis": swept[-1] if swept else "lambda",
         "line_columns": ["q0_agent1", "q0_agent2"], "reference_column": "bayes_q0",
         "y_label": "final belief q(s=0)",
         "column_labels": {"q0_agent1": "Agent 1", "q0_agent2": "Agent 2", "bayes_q0": "Bayes"}},
    )
