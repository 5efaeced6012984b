# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; contract in ``motivated_belief.kernels``."""
import numpy as np

from libc.math cimport exp, log, fabs, INFINITY, NAN, isfinite

cdef double TIE_RTOL = 1e-12


cdef inline double _score(double c, double ll, double alpha) noexcept nogil:
    if alpha == 0.0:
        return c
    return c + alpha * ll


def tempered_posterior_batch(log_prior, coeffs, loglik, alphas, lambdas):
    cdef const double[::1] lp = np.ascontiguousarray(log_prior, dtype=np.float64)
    cdef const double[::1] c = np.ascontiguousarray(coeffs, dtype=np.float64)
    cdef const double[::1] ll = np.ascontiguousarray(loglik, dtype=np.float64)
    cdef const double[::1] al = np.ascontiguousarray(np.atleast_1d(alphas), dtype=np.float64)
    cdef const double[::1] la = np.ascontiguousarray(np.atleast_1d(lambdas), dtype=np.float64)
    cdef Py_ssize_t m = al.shape[0], n = lp.shape[0], i, s
    q_arr = np.empty((m, n), dtype=np.float64)
    v_arr = np.empty(m, dtype=np.float64)
    cdef double[:, ::1] q = q_arr
    cdef double[::1] value = v_arr
    cdef double[::1] w = np.empty(n, dtype=np.float64)
    cdef double lam, alpha, top, total, g, tol

    with nogil:
        for i in range(m):
            lam = la[i]
            alpha = al[i]
            top = -INFINITY
            if lam > 0:
                for s in range(n):
                    if isfinite(lp[s]):
                        g = _score(c[s], ll[s], alpha)
                        w[s] = lp[s] + g / lam if isfinite(g) else -INFINITY
                    else:
                        w[s] = -INFINITY
                    if w[s] > top:
                        top = w[s]
                if not isfinite(top):
                    for s in range(n):
                        q[i, s] = NAN
                    value[i] = -INFINITY
                    continue
                total = 0.0
                for s in range(n):
                    w[s] = exp(w[s] - top)
                    total += w[s]
                for s in range(n):
                    q[i, s] = w[s] / total
                value[i] = lam * (top + log(total))
            else:
                for s in range(n):
                    if isfinite(lp[s]):
                        w[s] = _score(c[s], ll[s], alpha)
                    else:
                        w[s] = -INFINITY
                    if w[s] > top:
                        top = w[s]
                if not isfinite(top):
                    for s in range(n):
                        q[i, s] = NAN
                    value[i] = -INFINITY
                    continue
                tol = TIE_RTOL * (fabs(top) if fabs(top) > 1.0 else 1.0)
                total = 0.0
                for s in range(n):
                    if isfinite(w[s]) and w[s] >= top - tol:
                        w[s] = exp(lp[s])
                    else:
                        w[s] = 0.0
                    total += w[s]
                for s in range(n):
                    q[i, s] = w[s] / total
                value[i] = top
    return q_arr, v_arr


def linear_objective_grid2(q0, log_prior, coeffs, loglik, double alpha, double lam):
    cdef const double[::1] x = np.ascontiguousarray(q0, dtype=np.float64)
    cdef const double[::1] lp = np.ascontiguousarray(log_prior, dtype=np.float64)
    cdef const double[::1] c = np.ascontiguousarray(coeffs, dtype=np.float64)
    cdef const double[::1] ll = np.ascontiguousarray(loglik, dtype=np.float64)
    cdef Py_ssize_t k = x.shape[0], i, s
    out_arr = np.empty(k, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double qs[2]
    cdef double val

    with nogil:
        for i in range(k):
            qs[0] = x[i]
            qs[1] = 1.0 - x[i]
            val = 0.0
            for s in range(2):
                if qs[s] <= 0:
                    continue
                if not isfinite(lp[s]) or (alpha != 0.0 and not isfinite(ll[s])):
                    val = -INFINITY
                    break
                val += c[s] * qs[s] - lam * qs[s] * (log(qs[s]) - lp[s])
                if alpha != 0.0:
                    val += alpha * qs[s] * ll[s]
            out[i] = val
    return out_arr
