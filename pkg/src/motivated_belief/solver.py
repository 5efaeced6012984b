"""Optimal posteriors for the motivated objective.

For a linear affective utility with coefficients ``c`` the maximiser is the
tempered posterior

    q*(s) ∝ prior(s) * exp((c_s + alpha * log lik(s)) / lam)

whose normaliser ``Z`` also gives the optimum, ``F(q*) = lam * log Z``.
``lam = 0`` is its limit (prior mass restricted to the argmax of
``c + alpha log lik``). General utilities go through :func:`numeric_update`;
:func:`brute_force_update` is a grid-search oracle for two states.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .beliefs import Categorical, as_categorical, as_likelihood, check_same_space
from .errors import (
    DegenerateProblem,
    LambdaNonPositive,
    NotConverged,
    UnsupportedDimension,
)
from .objective import AgentParams, LinearAffectiveUtility, ObjectiveBreakdown, as_utility, objective_value

METHODS = ("closed_form", "limit_lambda_zero", "numeric", "brute_force")


@dataclass(frozen=True)
class UpdateResult:
    posterior: Categorical
    breakdown: ObjectiveBreakdown
    method: str
    converged: bool = True
    iterations: Optional[int] = None
    gradient_norm: Optional[float] = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")


@dataclass(frozen=True)
class NumericSolverConfig:
    max_iterations: int = 10000
    step_size: float = 0.1
    gradient_tolerance: float = 1e-10
    finite_difference_step: float = 1e-6

    def __post_init__(self):
        if int(self.max_iterations) != self.max_iterations or self.max_iterations <= 0:
            raise ValueError("max_iterations must be a positive integer")
        for name in ("step_size", "gradient_tolerance", "finite_difference_step"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive, got {v}")


def _coeffs(c):
    return c.coeffs if isinstance(c, LinearAffectiveUtility) else LinearAffectiveUtility(c).coeffs


def _log_prior(prior):
    with np.errstate(divide="ignore"):
        return np.log(prior.probs)


def _finish(q, prior, lik, utility, alpha, lam, method, **extra):
    posterior = Categorical(q)
    params = AgentParams(lam=lam, alpha=alpha, utility=utility)
    return UpdateResult(posterior, objective_value(posterior, prior, lik, params), method, **extra)


def _check_alpha(alpha):
    alpha = float(alpha)
    if not np.isfinite(alpha) or alpha < 0:
        raise ValueError(f"alpha must be finite and >= 0, got {alpha}")
    return alpha


def closed_form_update(prior, lik, c, alpha, lam) -> UpdateResult:
    prior, lik = as_categorical(prior), as_likelihood(lik)
    coeffs = _coeffs(c)
    check_same_space(prior, lik, coeffs)
    alpha, lam = _check_alpha(alpha), float(lam)
    if not lam > 0:
        raise LambdaNonPositive(f"closed form needs lam > 0 (got {lam}); use limit_update for lam = 0")
    q, _ = kernels.tempered_posterior_batch(_log_prior(prior), coeffs, lik.log(), [alpha], [lam])
    if np.isnan(q[0, 0]):
        raise DegenerateProblem("every state has zero prior or zero likelihood weight")
    return _finish(q[0], prior, lik, LinearAffectiveUtility(coeffs), alpha, lam, "closed_form")


def limit_update(prior, lik, c, alpha) -> UpdateResult:
    """lam -> 0+ limit: prior mass renormalised over argmax of ``c + alpha log lik``."""
    prior, lik = as_categorical(prior), as_likelihood(lik)
    coeffs = _coeffs(c)
    check_same_space(prior, lik, coeffs)
    alpha = _check_alpha(alpha)
    q, _ = kernels.tempered_posterior_batch(_log_prior(prior), coeffs, lik.log(), [alpha], [0.0])
    if np.isnan(q[0, 0]):
        raise DegenerateProblem("no state in the prior support has finite score")
    return _finish(q[0], prior, lik, LinearAffectiveUtility(coeffs), alpha, 0.0, "limit_lambda_zero")


def optimal_value(prior, lik, c, alpha, lam) -> float:
    """``max_q F`` for a linear utility, from the partition function (no posterior built)."""
    prior, lik = as_categorical(prior), as_likelihood(lik)
    coeffs = _coeffs(c)
    check_same_space(prior, lik, coeffs)
    _, value = kernels.tempered_posterior_batch(_log_prior(prior), coeffs, lik.log(), [_check_alpha(alpha)], [float(lam)])
    return float(value[0])


# --- numeric solver ------------------------------------------------------


def _softmax(theta):
    shifted = theta - theta.max()
    logq = shifted - math.log(np.exp(shifted).sum())
    return np.exp(logq), logq


def linear_objective_at_logits(theta, prior, lik, c, alpha, lam) -> float:
    """Objective of ``q = softmax(theta)`` for a linear utility; all states must be in the prior support."""
    prior, lik = as_categorical(prior), as_likelihood(lik)
    coeffs = _coeffs(c)
    q, logq = _softmax(np.asarray(theta, dtype=float))
    acc = 0.0 if alpha == 0 else alpha * float(q @ lik.log())
    return float(coeffs @ q) + acc - lam * float(q @ (logq - np.log(prior.probs)))


def linear_objective_logit_gradient(theta, prior, lik, c, alpha, lam) -> np.ndarray:
    """Analytic gradient of :func:`linear_objective_at_logits` w.r.t. ``theta``.

    ``dF/dtheta = q * (h - <q, h>)`` with ``h = dF/dq = c + alpha log lik - lam (log q - log prior)``
    (the constant ``-lam`` in ``dF/dq`` cancels).
    """
    prior, lik = as_categorical(prior), as_likelihood(lik)
    coeffs = _coeffs(c)
    q, logq = _softmax(np.asarray(theta, dtype=float))
    h = coeffs - lam * (logq - np.log(prior.probs))
    if alpha != 0:
        h = h + alpha * lik.log()
    return q * (h - q @ h)


def _utility_gradient(utility, q, obs, fd_step):
    if hasattr(utility, "gradient"):
        return np.asarray(utility.gradient(q, obs), dtype=float)
    grad = np.empty_like(q)
    for s in range(q.size):
        e = np.zeros_like(q)
        e[s] = fd_step
        grad[s] = (utility(q + e, obs) - utility(q - e, obs)) / (2 * fd_step)
    return grad


@dataclass
class _LogitProblem:
    """The objective restricted to the admissible states ``idx``, in logit coordinates."""

    n: int
    idx: np.ndarray
    log_prior: np.ndarray
    loglik: np.ndarray
    utility: object
    alpha: float
    lam: float
    obs: object
    fd_step: float
    cache: dict = field(default_factory=dict)

    def full(self, q_sub):
        q = np.zeros(self.n)
        q[self.idx] = q_sub
        return q

    def evaluate(self, theta):
        q, logq = _softmax(theta)
        qfull = self.full(q)
        value = float(self.utility(qfull, self.obs)) - self.lam * float(q @ (logq - self.log_prior))
        if self.alpha != 0:
            value += self.alpha * float(q @ self.loglik)
        h = _utility_gradient(self.utility, qfull, self.obs, self.fd_step)[self.idx]
        h = h - self.lam * (logq - self.log_prior)
        if self.alpha != 0:
            h = h + self.alpha * self.loglik
        # tangent-space projection of dF/dq; zero exactly at the constrained optimum
        residual = h - h.mean()
        return value, q, h, float(np.linalg.norm(residual))


def numeric_update(prior, lik, utility, alpha, lam, config: NumericSolverConfig | None = None,
                   obs=None, raise_on_failure: bool = True) -> UpdateResult:
    """Maximise the objective for an arbitrary utility by ascent in logit space.

    The ascent direction is the natural gradient ``h - <q, h>`` (the logit
    gradient preconditioned by the softmax Fisher metric), with a
    backtracking line search on the objective. Once objective differences
    drop below floating-point resolution, a step is also accepted when it
    reduces the projected-gradient norm. States outside the prior support,
    and zero-likelihood states when ``alpha > 0``, are held at zero mass.
    """
    config = config or NumericSolverConfig()
    prior, lik = as_categorical(prior), as_likelihood(lik)
    utility = as_utility(utility)
    check_same_space(prior, lik)
    alpha, lam = _check_alpha(alpha), float(lam)
    if not lam > 0:
        raise LambdaNonPositive(f"numeric solver needs lam > 0, got {lam}")

    admissible = prior.support & ((lik.values > 0) if alpha > 0 else True)
    idx = np.flatnonzero(admissible)
    if idx.size == 0:
        raise DegenerateProblem("every state has zero prior or zero likelihood weight")
    if idx.size == 1:
        q = np.zeros(prior.n_states)
        q[idx] = 1.0
        return _finish(q, prior, lik, utility, alpha, lam, "numeric", iterations=0, gradient_norm=0.0)

    log_prior = np.log(prior.probs[idx])
    problem = _LogitProblem(prior.n_states, idx, log_prior, lik.log()[idx], utility, alpha, lam, obs,
                            config.finite_difference_step)
    theta = log_prior.copy()
    value, q, h, gnorm = problem.evaluate(theta)
    step = config.step_size
    iterations = 0
    armijo = 1e-4
    while gnorm >= config.gradient_tolerance and iterations < config.max_iterations:
        iterations += 1
        direction = h - q @ h
        slope = float(q @ direction**2)
        noise = 64 * np.finfo(float).eps * (1.0 + abs(value))
        accepted = False
        for _ in range(60):
            cand = theta + step * direction
            c_value, c_q, c_h, c_gnorm = problem.evaluate(cand)
            gain = c_value - value
            if gain > noise:
                accepted = gain >= armijo * step * slope
            elif gain >= -noise:
                accepted = c_gnorm < gnorm
            if accepted:
                break
            step *= 0.5
        if not accepted:
            break
        theta, value, q, h, gnorm = cand, c_value, c_q, c_h, c_gnorm
        step *= 1.5

    converged = gnorm < config.gradient_tolerance
    result = _finish(problem.full(q), prior, lik, utility, alpha, lam, "numeric",
                     converged=converged, iterations=iterations, gradient_norm=gnorm)
    if not converged and raise_on_failure:
        raise NotConverged(
            f"projected gradient norm {gnorm:.3e} after {iterations} iterations "
            f"(tolerance {config.gradient_tolerance:.1e})",
            result,
        )
    return result


# --- brute-force oracle --------------------------------------------------


def _grid(step):
    n = int(math.floor(1.0 / step + 1e-9))
    pts = np.arange(n + 1) * step
    if pts[-1] < 1.0 - 1e-12:
        pts = np.append(pts, 1.0)
    else:
        pts[-1] = 1.0
    return pts


def brute_force_update(prior, lik, utility, alpha, lam, grid_step: float = 1e-4, obs=None) -> UpdateResult:
    """Grid search over ``q(0)`` for two-state problems; ties go to the smaller ``q(0)``."""
    prior, lik = as_categorical(prior), as_likelihood(lik)
    utility = as_utility(utility)
    check_same_space(prior, lik)
    if prior.n_states != 2:
        raise UnsupportedDimension(f"brute force handles 2 states, got {prior.n_states}")
    if not 0 < grid_step <= 0.01:
        raise ValueError(f"grid_step must lie in (0, 0.01], got {grid_step}")
    alpha, lam = _check_alpha(alpha), float(lam)

    grid = _grid(grid_step)
    if prior.probs[0] == 0:
        grid = np.array([0.0])
    elif prior.probs[1] == 0:
        grid = np.array([1.0])

    if isinstance(utility, LinearAffectiveUtility):
        values = kernels.linear_objective_grid2(grid, _log_prior(prior), utility.coeffs, lik.log(), alpha, lam)
    else:
        params = AgentParams(lam=lam, alpha=alpha, utility=utility)
        values = np.array([objective_value([x, 1.0 - x], prior, lik, params, obs).total for x in grid])
    top = float(np.max(values))
    if not np.isfinite(top):
        raise DegenerateProblem("objective is -inf on the whole grid")
    # values within rounding of the maximum count as ties
    best = int(np.flatnonzero(values >= top - kernels.TIE_RTOL * max(1.0, abs(top)))[0])
    x = grid[best]
    return _finish(np.array([x, 1.0 - x]), prior, lik, utility, alpha, lam, "brute_force")


# --- dispatch ------------------------------------------------------------


def optimal_update(prior, lik, utility, alpha, lam, method: str = "auto",
                   config: NumericSolverConfig | None = None, grid_step: float = 1e-4) -> UpdateResult:
    """Route to the right solver: ``lam = 0`` -> limit, linear -> closed form, otherwise numeric."""
    utility = as_utility(utility)
    lam = float(lam)
    linear = isinstance(utility, LinearAffectiveUtility)
    if method == "auto":
        if linear:
            method = "closed_form" if lam > 0 else "limit_lambda_zero"
        else:
            method = "numeric"
    if method == "closed_form" and lam == 0:
        method = "limit_lambda_zero"
    if method in ("closed_form", "limit_lambda_zero") and not linear:
        raise ValueError(f"{method} needs a linear affective utility")
    if method == "closed_form":
        return closed_form_update(prior, lik, utility, alpha, lam)
    if method == "limit_lambda_zero":
        return limit_update(prior, lik, utility, alpha)
    if method == "numeric":
        return numeric_update(prior, lik, utility, alpha, lam, config)
    if method == "brute_force":
        return brute_force_update(prior, lik, utility, alpha, lam, grid_step)
    raise ValueError(f"unknown method {method!r}")
