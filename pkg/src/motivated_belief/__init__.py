"""Motivated variational belief updating."""
from .beliefs import Categorical, Likelihood, bayes_update, entropy, expected_log_likelihood, kl_divergence
from .config import load_config
from .experiments import (
    BernoulliEvidence,
    EvidenceOption,
    SweepResult,
    evidence_strength_sweep,
    objective_landscape_heatmap,
    polarization_sweep,
    select_evidence,
    selection_boundary_heatmap,
    selection_threshold,
)
from .kernels import BACKEND
from .objective import AgentParams, LinearAffectiveUtility, objective_value, vfe_value
from .output import emit_plot, emit_table
from .solver import (
    NumericSolverConfig,
    UpdateResult,
    brute_force_update,
    closed_form_update,
    limit_update,
    numeric_update,
    optimal_update,
)

__version__ = "0.1.0"
