"""Belief utilities and the motivated variational objective.

The agent *maximises*

    F[q, o] = U[q, o] + alpha * E_q[log p(o|s)] - lam * KL(q || prior)

where ``U`` is the affective utility of holding belief ``q``. With a
constant ``U`` and ``alpha = lam = 1`` this is the negative variational
free energy (up to the constant).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Hashable, Optional, Protocol, runtime_checkable

import numpy as np

from .beliefs import (
    Categorical,
    as_categorical,
    as_likelihood,
    check_same_space,
    entropy,
    expected_log_likelihood,
    kl_divergence,
)
from .errors import DimensionMismatch, InvalidDistribution, SupportViolation


@runtime_checkable
class UtilityFunctional(Protocol):
    """Deterministic map from a belief vector (and an opaque observation tag) to a real.

    ``q`` is passed as a plain float array. Utilities used with the numeric
    solver's finite differences must accept vectors slightly off the simplex.
    An optional ``gradient(q, obs)`` method is used when present.
    """

    def __call__(self, q: np.ndarray, obs: Optional[Hashable] = None) -> float: ...


@dataclass(frozen=True, eq=False)
class LinearAffectiveUtility:
    """``U[q] = sum_s coeffs[s] * q[s]``; ``coeffs[s]`` is the valence of believing ``s``."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float).reshape(-1)
        if not np.all(np.isfinite(c)):
            raise InvalidDistribution(f"utility coefficients must be finite: {c}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def __len__(self):
        return self.coeffs.size

    def __call__(self, q, obs=None) -> float:
        q = np.asarray(q, dtype=float)
        if q.shape != self.coeffs.shape:
            raise DimensionMismatch(f"utility has {self.coeffs.size} coefficients, belief has {q.size} states")
        return float(self.coeffs @ q)

    def gradient(self, q, obs=None) -> np.ndarray:
        return np.array(self.coeffs)

    def shifted(self, k: float) -> "LinearAffectiveUtility":
        return LinearAffectiveUtility(self.coeffs + k)

    def __repr__(self):
        return f"LinearAffectiveUtility({self.coeffs.tolist()})"


def as_utility(u) -> Any:
    """Coefficient vectors become :class:`LinearAffectiveUtility`; callables pass through."""
    if isinstance(u, LinearAffectiveUtility) or callable(u):
        return u
    return LinearAffectiveUtility(u)


@dataclass(frozen=True)
class AgentParams:
    """Conservatism ``lam`` (KL weight), likelihood weight ``alpha`` and the affective utility."""

    lam: float
    alpha: float
    utility: Any

    def __post_init__(self):
        for name in ("lam", "alpha"):
            v = float(getattr(self, name))
            if not np.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {v}")
            object.__setattr__(self, name, v)
        object.__setattr__(self, "utility", as_utility(self.utility))


@dataclass(frozen=True)
class ObjectiveBreakdown:
    affective_utility: float
    accuracy: float
    complexity: float
    total: float

    @staticmethod
    def combine(affective_utility, accuracy, complexity, alpha, lam):
        # alpha = 0 switches accuracy off even when it is -inf
        weighted = 0.0 if alpha == 0 else alpha * accuracy
        total = affective_utility + weighted - lam * complexity
        return ObjectiveBreakdown(float(affective_utility), float(accuracy), float(complexity), float(total))


def affective_utility_value(u, q, obs=None) -> float:
    u = as_utility(u)
    q = as_categorical(q)
    return float(u(q.probs, obs))


def objective_value(q, prior, lik, params: AgentParams, obs=None) -> ObjectiveBreakdown:
    q, prior, lik = as_categorical(q), as_categorical(prior), as_likelihood(lik)
    check_same_space(q, prior, lik)
    return ObjectiveBreakdown.combine(
        affective_utility_value(params.utility, q, obs),
        expected_log_likelihood(q, lik),
        kl_divergence(q, prior),
        params.alpha,
        params.lam,
    )


def vfe_value(q, prior, lik) -> float:
    """Variational free energy as inaccuracy plus complexity."""
    q, prior, lik = as_categorical(q), as_categorical(prior), as_likelihood(lik)
    check_same_space(q, prior, lik)
    return -expected_log_likelihood(q, lik) + kl_divergence(q, prior)


def vfe_energy_entropy(q, prior, lik) -> float:
    """Variational free energy as energy minus entropy, with ``p(s, o) = prior(s) lik(s)``."""
    q, prior, lik = as_categorical(q), as_categorical(prior), as_likelihood(lik)
    check_same_space(q, prior, lik)
    mask = q.probs > 0
    if np.any(prior.probs[mask] == 0):
        raise SupportViolation("q assigns mass to a state with zero prior probability")
    if np.any(lik.values[mask] == 0):
        return float("inf")
    log_joint = np.log(prior.probs[mask]) + np.log(lik.values[mask])
    energy = -np.sum(q.probs[mask] * log_joint)
    return float(energy - entropy(q))
