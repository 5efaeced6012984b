"""Numpy implementation of the hot kernels (fallback for ``_kernels.pyx``).

Both backends share one contract, documented in :mod:`motivated_belief.kernels`.
"""
import numpy as np

TIE_RTOL = 1e-12


def _scores(coeffs, loglik, alphas):
    # c_s + alpha * log lik_s, with alpha = 0 switching the likelihood off even at lik_s = 0
    with np.errstate(invalid="ignore"):
        weighted = alphas[:, None] * loglik[None, :]
    weighted = np.where(alphas[:, None] == 0, 0.0, weighted)
    return coeffs[None, :] + weighted


def tempered_posterior_batch(log_prior, coeffs, loglik, alphas, lambdas):
    log_prior = np.asarray(log_prior, dtype=float)
    coeffs = np.asarray(coeffs, dtype=float)
    loglik = np.asarray(loglik, dtype=float)
    alphas = np.atleast_1d(np.asarray(alphas, dtype=float))
    lambdas = np.atleast_1d(np.asarray(lambdas, dtype=float))
    m, n = alphas.size, log_prior.size

    in_support = np.isfinite(log_prior)
    g = _scores(coeffs, loglik, alphas)
    g = np.where(in_support[None, :], g, -np.inf)

    q = np.full((m, n), np.nan)
    value = np.full(m, -np.inf)

    pos = lambdas > 0
    if np.any(pos):
        lam = lambdas[pos][:, None]
        with np.errstate(invalid="ignore"):
            w = np.where(np.isfinite(g[pos]), log_prior[None, :] + g[pos] / lam, -np.inf)
        top = w.max(axis=1)
        ok = np.isfinite(top)
        shifted = np.exp(w[ok] - top[ok, None])
        total = shifted.sum(axis=1)
        qp = np.full((pos.sum(), n), np.nan)
        qp[ok] = shifted / total[:, None]
        vp = np.full(pos.sum(), -np.inf)
        vp[ok] = lam[ok, 0] * (top[ok] + np.log(total))
        q[pos] = qp
        value[pos] = vp

    zero = ~pos
    if np.any(zero):
        gz = g[zero]
        gmax = gz.max(axis=1)
        ok = np.isfinite(gmax)
        tol = TIE_RTOL * np.maximum(1.0, np.abs(np.where(ok, gmax, 0.0)))
        with np.errstate(invalid="ignore"):
            winners = (gz >= (gmax - tol)[:, None]) & np.isfinite(gz)
        mass = np.where(winners, np.exp(log_prior)[None, :], 0.0)
        qz = np.full(gz.shape, np.nan)
        qz[ok] = mass[ok] / mass[ok].sum(axis=1, keepdims=True)
        vz = np.where(ok, gmax, -np.inf)
        q[zero] = qz
        value[zero] = vz
    return q, value


def linear_objective_grid2(q0, log_prior, coeffs, loglik, alpha, lam):
    q0 = np.asarray(q0, dtype=float)
    log_prior = np.asarray(log_prior, dtype=float)
    coeffs = np.asarray(coeffs, dtype=float)
    loglik = np.asarray(loglik, dtype=float)
    q = np.stack([q0, 1.0 - q0], axis=1)
    pos = q > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        logq = np.log(q)
        terms = coeffs * q - lam * q * (logq - log_prior)
        if alpha != 0:
            terms = terms + alpha * q * loglik
    terms = np.where(pos, terms, 0.0)
    bad = pos & ~np.isfinite(log_prior)
    if alpha != 0:
        bad |= pos & ~np.isfinite(loglik)
    out = terms.sum(axis=1)
    out[bad.any(axis=1)] = -np.inf
    return out
