"""Hot kernels with a compiled backend and a numpy fallback.

The Cython extension ``_kernels`` is used when it was built; otherwise, or
when the environment variable ``MOTIVATED_BELIEF_PURE_PYTHON`` is set to a
non-empty value, the numpy implementation in ``_kernels_py`` is used.
``BACKEND`` names the active one.

tempered_posterior_batch(log_prior, coeffs, loglik, alphas, lambdas) -> (q, value)
    One row per ``(alphas[i], lambdas[i])`` pair. With ``g = coeffs + alpha *
    loglik`` (the likelihood term is dropped when ``alpha == 0``),
    ``q[i] ∝ prior * exp(g / lam)`` computed in log space with max
    subtraction, and ``value[i] = lam * log Z`` is the optimal objective.
    ``lam == 0`` gives the limit: prior mass restricted to argmax g, and
    ``value = max g``. States with ``log_prior == -inf`` get zero mass. A row
    with no admissible state is all-NaN with ``value == -inf``.

linear_objective_grid2(q0, log_prior, coeffs, loglik, alpha, lam) -> values
    Objective of two-state beliefs ``(q0[k], 1 - q0[k])`` under a linear
    utility; ``-inf`` where the belief leaves the prior support or (for
    ``alpha > 0``) puts mass on a zero-likelihood state.
"""
import os

from . import _kernels_py

TIE_RTOL = _kernels_py.TIE_RTOL
_FORCE_PYTHON = bool(os.environ.get("MOTIVATED_BELIEF_PURE_PYTHON"))

try:
    if _FORCE_PYTHON:
        raise ImportError("pure-python backend requested")
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

if _compiled is not None:
    BACKEND = "cython"
    tempered_posterior_batch = _compiled.tempered_posterior_batch
    linear_objective_grid2 = _compiled.linear_objective_grid2
else:
    BACKEND = "python"
    tempered_posterior_batch = _kernels_py.tempered_posterior_batch
    linear_objective_grid2 = _kernels_py.linear_objective_grid2


def backends():
    """Map of available backend name -> module; used by tests and the benchmark."""
    found = {"python": _kernels_py}
    if _compiled is not None:
        found["cython"] = _compiled
    else:
        try:
            from . import _kernels
        except ImportError:
            pass
        else:
            found["cython"] = _kernels
    return found
