"""Finite categorical beliefs and the information-theoretic primitives on them.

All logarithms are natural, so every quantity is in nats, and ``0 log 0``
is taken to be 0 throughout.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidDistribution, SupportViolation, ZeroEvidence

#: Sum deviation below which an input vector is silently renormalised.
RENORMALIZE_TOLERANCE = 1e-6


def _as_vector(values, name):
    arr = np.array(values, dtype=float).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise InvalidDistribution(f"{name} has non-finite entries: {arr}")
    return arr


@dataclass(frozen=True, eq=False)
class Categorical:
    """A normalised probability vector over ``n_states >= 2`` states.

    Inputs whose sum is within :data:`RENORMALIZE_TOLERANCE` of 1 are
    renormalised; larger deviations are rejected.
    """

    probs: np.ndarray

    def __post_init__(self):
        p = _as_vector(self.probs, "probs")
        if p.size < 2:
            raise InvalidDistribution(f"need at least 2 states, got {p.size}")
        if np.any(p < 0):
            raise InvalidDistribution(f"negative probability in {p}")
        total = p.sum()
        if abs(total - 1.0) >= RENORMALIZE_TOLERANCE:
            raise InvalidDistribution(f"probabilities sum to {total:.12g}, not 1")
        p = p / total
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @property
    def n_states(self) -> int:
        return self.probs.size

    @property
    def support(self) -> np.ndarray:
        return self.probs > 0

    def __len__(self):
        return self.n_states

    def __getitem__(self, s):
        return self.probs[s]

    def __repr__(self):
        return f"Categorical({np.array2string(self.probs, precision=6, separator=', ')})"


@dataclass(frozen=True, eq=False)
class Likelihood:
    """Per-state probability ``p(o|s)`` of one fixed observation."""

    values: np.ndarray

    def __post_init__(self):
        v = _as_vector(self.values, "likelihood")
        if np.any(v < 0) or np.any(v > 1):
            raise InvalidDistribution(f"likelihood entries must lie in [0, 1]: {v}")
        if not np.any(v > 0):
            raise InvalidDistribution("likelihood must be positive for at least one state")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n_states(self) -> int:
        return self.values.size

    def log(self) -> np.ndarray:
        """Log-likelihood with ``-inf`` at zero entries."""
        with np.errstate(divide="ignore"):
            return np.log(self.values)

    def __len__(self):
        return self.n_states

    def __repr__(self):
        return f"Likelihood({np.array2string(self.values, precision=6, separator=', ')})"


def as_categorical(x) -> Categorical:
    return x if isinstance(x, Categorical) else Categorical(x)


def as_likelihood(x) -> Likelihood:
    return x if isinstance(x, Likelihood) else Likelihood(x)


def check_same_space(*items):
    sizes = {len(item) for item in items}
    if len(sizes) != 1:
        raise DimensionMismatch(f"state spaces differ in size: {sorted(sizes)}")


def kl_divergence(q, p) -> float:
    """KL(q || p) in nats.

    Raises :class:`SupportViolation` rather than returning infinity when q
    has mass outside the support of p.
    """
    q, p = as_categorical(q), as_categorical(p)
    check_same_space(q, p)
    mask = q.probs > 0
    if np.any(p.probs[mask] == 0):
        raise SupportViolation("q assigns mass to a state with zero reference probability")
    qm = q.probs[mask]
    return float(np.sum(qm * (np.log(qm) - np.log(p.probs[mask]))))


def entropy(q) -> float:
    q = as_categorical(q)
    qm = q.probs[q.probs > 0]
    return float(-np.sum(qm * np.log(qm)))


def expected_log_likelihood(q, lik) -> float:
    """E_q[log p(o|s)]; ``-inf`` if q has mass where the likelihood is zero."""
    q, lik = as_categorical(q), as_likelihood(lik)
    check_same_space(q, lik)
    mask = q.probs > 0
    if np.any(lik.values[mask] == 0):
        return float("-inf")
    return float(np.sum(q.probs[mask] * np.log(lik.values[mask])))


def bayes_update(prior, lik) -> Categorical:
    prior, lik = as_categorical(prior), as_likelihood(lik)
    check_same_space(prior, lik)
    joint = prior.probs * lik.values
    evidence = joint.sum()
    if evidence <= 0:
        raise ZeroEvidence("prior and likelihood have disjoint support")
    return Categorical(joint / evidence)
