"""Default configurations for the five published figures, and their runners.

Each runner returns the sweeps behind one figure plus a plot layout;
:func:`reproduce` writes one table per sweep and one SVG per figure.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .experiments import (
    DEFAULT_GRID_POINTS,
    SCENARIOS,
    SELECTION_ALPHA,
    evidence_grid,
    evidence_strength_sweep,
    objective_landscape_heatmap,
    polarization_sweep,
    selection_boundary_heatmap,
    selection_sweep,
    selection_thresholds,
)
from .config import expand as expand_grid
from .output import emit_plot, emit_table

FIGURES = ("fig3", "fig4", "fig5", "fig6", "fig7")


def linear_grid(start, stop, num=DEFAULT_GRID_POINTS):
    return {"start": start, "stop": stop, "num": num, "spacing": "linear"}


def log_grid(start, stop, num=DEFAULT_GRID_POINTS):
    return {"start": start, "stop": stop, "num": num, "spacing": "log"}


DEFAULTS = {
    "fig3": {
        "prior": [0.3, 0.7], "c": [1.0, 0.0],
        "lambdas": linear_grid(1.0, 10.0, 10), "alphas": linear_grid(1.0, 10.0, 10),
        "fixed_lambda": 1.0, "fixed_alpha": 1.0,
        "evidence": linear_grid(0.01, 0.99),
    },
    "fig4": {
        "alpha": SELECTION_ALPHA,
        "lambdas": log_grid(0.1, 100.0),
        "lambda_range": [0.1, 100.0], "tolerance": 1e-6,
        "scenarios": {
            name: {"prior": list(s.prior), "c": list(s.coeffs),
                   "menu": [{"label": o.label, "lik": o.lik.values.tolist()} for o in s.menu]}
            for name, s in SCENARIOS.items()
        },
    },
    "fig5": {
        "prior": [0.5, 0.5], "lik": [0.6, 0.4],
        "utilities": [[1.0, 0.0], [0.0, 1.0]],
        "lambdas": linear_grid(0.0, 10.0), "alphas": linear_grid(0.0, 10.0),
        "fixed_lambda": 1.0, "fixed_alpha": 1.0,
    },
    "fig6": {
        "prior": [0.3, 0.7], "c": [1.0, 0.0], "evidence": [0.3, 0.7],
        "lambdas": linear_grid(0.1, 10.0), "alphas": linear_grid(0.0, 10.0),
    },
    "fig7": {
        "scenario": "scenario1",
        "lambdas": linear_grid(0.1, 100.0), "alphas": linear_grid(1.0, 10.0),
    },
}


@dataclass
class Figure:
    name: str
    config: dict
    tables: list  # (stem, SweepResult, extra metadata)
    kind: str
    titles: list = field(default_factory=list)


def run_fig3(cfg):
    ev = evidence_grid(int(cfg["evidence"]["num"]), cfg["evidence"]["start"], cfg["evidence"]["stop"]) \
        if isinstance(cfg["evidence"], dict) else list(cfg["evidence"])
    by_lambda = evidence_strength_sweep(cfg["prior"], cfg["c"], expand_grid(cfg["lambdas"]),
                                        [cfg["fixed_alpha"]], ev)
    by_alpha = evidence_strength_sweep(cfg["prior"], cfg["c"], [cfg["fixed_lambda"]],
                                       expand_grid(cfg["alphas"]), ev)
    by_alpha.meta["x_axis"] = "evidence"
    return Figure("fig3", cfg, [("fig3_lambda", by_lambda, {}), ("fig3_alpha", by_alpha, {})], "line",
                  [f"varying λ (α = {cfg['fixed_alpha']:g})", f"varying α (λ = {cfg['fixed_lambda']:g})"])


def run_fig4(cfg):
    from .experiments import EvidenceOption

    tables, titles = [], []
    for name, sc in cfg["scenarios"].items():
        menu = [EvidenceOption(o["label"], o["lik"]) for o in sc["menu"]]
        sweep = selection_sweep(sc["prior"], sc["c"], cfg["alpha"], menu, expand_grid(cfg["lambdas"]))
        roots = selection_thresholds(sc["prior"], sc["c"], cfg["alpha"], menu, cfg["lambda_range"],
                                     cfg["tolerance"])
        tables.append((f"fig4_{name}", sweep, {"thresholds": roots}))
        titles.append(f"{name}: " + (f"switch at λ* = {roots[0]:.4f}" if roots else "no switch"))
    return Figure("fig4", cfg, tables, "line", titles)


def run_fig5(cfg):
    by_lambda = polarization_sweep(cfg["prior"], cfg["lik"], expand_grid(cfg["lambdas"]), [cfg["fixed_alpha"]],
                                   cfg["utilities"])
    by_alpha = polarization_sweep(cfg["prior"], cfg["lik"], [cfg["fixed_lambda"]], expand_grid(cfg["alphas"]),
                                  cfg["utilities"])
    return Figure("fig5", cfg, [("fig5_lambda", by_lambda, {}), ("fig5_alpha", by_alpha, {})], "line",
                  [f"varying λ (α = {cfg['fixed_alpha']:g})", f"varying α (λ = {cfg['fixed_lambda']:g})"])


def run_fig6(cfg):
    tables, titles = [], []
    for e in cfg["evidence"]:
        sweep = objective_landscape_heatmap(cfg["prior"], cfg["c"], e, expand_grid(cfg["lambdas"]),
                                            expand_grid(cfg["alphas"]))
        tables.append((f"fig6_e{e:g}", sweep, {}))
        titles.append(f"p(o|s=0) = {e:g}")
    return Figure("fig6", cfg, tables, "heatmap", titles)


def run_fig7(cfg):
    sc = SCENARIOS[cfg["scenario"]]
    sweep = selection_boundary_heatmap(sc.prior, sc.coeffs, sc.menu, expand_grid(cfg["lambdas"]),
                                       expand_grid(cfg["alphas"]))
    return Figure("fig7", cfg, [("fig7", sweep, {})], "heatmap", [None])


RUNNERS = {"fig3": run_fig3, "fig4": run_fig4, "fig5": run_fig5, "fig6": run_fig6, "fig7": run_fig7}


def run_figure(name, overrides=None) -> Figure:
    if name not in RUNNERS:
        raise ValueError(f"unknown figure {name!r}; choose from {', '.join(FIGURES)}")
    cfg = dict(DEFAULTS[name])
    cfg.update(overrides or {})
    return RUNNERS[name](cfg)


def reproduce(name, out_dir, fmt="csv", plot=True) -> list:
    """Run one figure's default configuration and write its tables and plot. Returns written paths."""
    fig = run_figure(name)
    out_dir = Path(out_dir)
    written = []
    for stem, sweep, extra in fig.tables:
        meta = {"figure": name, "config": fig.config, **extra}
        path = out_dir / f"{stem}.{fmt}"
        emit_table(sweep, fmt, path, meta)
        written.append(path)
    if plot:
        written.append(emit_plot([t[1] for t in fig.tables], fig.kind, out_dir / f"{name}.svg", fig.titles))
    return written
