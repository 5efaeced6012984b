"""Command-line front end.

Exit codes: 0 on success, 1 for usage or configuration errors, 2 when a
solver or experiment fails. Diagnostics go to stderr; tables go to stdout
unless ``--out`` names a file.
"""
from __future__ import annotations

import argparse
import sys

from . import kernels
from .config import expand, load_config, resolve
from .errors import ConfigError, MotivatedBeliefError, ValidationError
from .experiments import (
    E_MAX,
    E_MIN,
    BernoulliEvidence,
    EvidenceOption,
    evidence_strength_sweep,
    objective_landscape_heatmap,
    polarization_sweep,
    select_evidence,
    selection_boundary_heatmap,
    selection_thresholds,
)
from .objective import AgentParams
from .output import OutputTable, emit_plot, emit_table
from .reproduce import FIGURES, reproduce
from .solver import NumericSolverConfig, optimal_update

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER = 0, 1, 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


def _floats(field, text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ValidationError(field, f"expected comma-separated numbers, got {text!r}") from None


def _grid(field, text):
    """``1,2,3`` is a list; ``start:stop:num[:log]`` is a grid spec."""
    if ":" not in text:
        return _floats(field, text)
    parts = text.split(":")
    if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] not in ("linear", "log")):
        raise ValidationError(field, f"expected start:stop:num[:log], got {text!r}")
    try:
        spec = {"start": float(parts[0]), "stop": float(parts[1]), "num": int(parts[2])}
    except ValueError:
        raise ValidationError(field, f"expected start:stop:num[:log], got {text!r}") from None
    spec["spacing"] = parts[3] if len(parts) == 4 else "linear"
    return spec


def _menu(field, text):
    """``A=0.95,0.05;B=0.4,0.6``."""
    menu = []
    for i, item in enumerate(x for x in text.split(";") if x.strip()):
        label, sep, values = item.partition("=")
        if not sep:
            label, values = chr(ord("A") + i), item
        menu.append({"label": label.strip(), "lik": _floats(f"{field}[{i}]", values)})
    return menu


def _scalar_or_grid(field, text):
    values = _grid(field, text)
    return values[0] if isinstance(values, list) and len(values) == 1 else values


# flag dest -> (config key, parser)
FLAGS = {
    "prior": ("prior", _floats), "lik": ("lik", _floats), "c": ("c", _floats),
    "alpha": ("alpha", lambda f, t: float(t)), "lam": ("lambda", lambda f, t: float(t)),
    "lambdas": ("lambdas", _grid), "alphas": ("alphas", _grid),
    "evidence": ("evidence", _scalar_or_grid), "menu": ("menu", _menu),
    "kind": ("kind", lambda f, t: t), "lambda_range": ("lambda_range", _floats),
    "tolerance": ("tolerance", lambda f, t: float(t)), "solver": ("solver", lambda f, t: t),
    "grid_step": ("grid_step", lambda f, t: float(t)),
    "out": ("out", lambda f, t: t), "format": ("format", lambda f, t: t), "plot": ("plot", lambda f, t: t),
}

SCENARIO_FLAGS = {
    "update": ("prior", "lik", "c", "alpha", "lam", "solver", "grid_step"),
    "sweep": ("prior", "c", "lambdas", "alphas", "evidence"),
    "select": ("prior", "c", "menu", "alpha", "lam"),
    "threshold": ("prior", "c", "menu", "alpha", "lambda_range", "tolerance"),
    "heatmap": ("kind", "prior", "c", "evidence", "menu", "lambdas", "alphas"),
    "polarize": ("prior", "lik", "lambdas", "alphas"),
}

HELP = {
    "prior": "prior probabilities, e.g. 0.3,0.7",
    "lik": "likelihood p(o|s) per state, e.g. 0.7,0.3",
    "c": "linear utility coefficients per state, e.g. 1,0",
    "alpha": "likelihood weight (>= 0)",
    "lam": "conservatism / KL weight (>= 0)",
    "lambdas": "lambda grid: list a,b,c or start:stop:num[:log]",
    "alphas": "alpha grid: list a,b,c or start:stop:num[:log]",
    "evidence": "evidence strength(s) p(o|s=0): list, grid, or one value for heatmaps",
    "menu": "evidence menu, e.g. 'A=0.95,0.05;B=0.4,0.6'",
    "kind": "heatmap kind: objective or selection",
    "lambda_range": "lambda search range low,high",
    "tolerance": "bisection tolerance on lambda",
    "solver": "auto, closed_form, numeric or brute_force",
    "grid_step": "brute-force grid step",
}


def build_parser():
    parser = _Parser(prog="motivated-belief", description="Motivated variational belief updating.",
                     allow_abbrev=False)
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    for name, flags in SCENARIO_FLAGS.items():
        p = sub.add_parser(name, help=f"run the {name} scenario", allow_abbrev=False)
        p.add_argument("--config", help="YAML/JSON config file (flags override it)")
        for dest in flags:
            opt = "--lambda" if dest == "lam" else "--" + dest.replace("_", "-")
            p.add_argument(opt, dest=dest, help=HELP[dest])
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--out", help="write the table here instead of stdout")
        if name not in ("update", "select", "threshold"):
            p.add_argument("--plot", help="write a plot here (SVG unless the suffix says otherwise)")
    p = sub.add_parser("reproduce", help="run the default configuration of a figure")
    p.add_argument("figure", choices=FIGURES)
    p.add_argument("--out", default="figures", help="output directory (default: figures)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--no-plot", action="store_true")
    sub.add_parser("info", help="show the active kernel backend")
    return parser


def _config_from_args(args):
    overrides = {}
    for dest, (key, parse) in FLAGS.items():
        value = getattr(args, dest, None)
        if value is None:
            continue
        try:
            overrides[key] = parse(key, value)
        except ValueError as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ValidationError(key, f"cannot parse {value!r}") from None
    if args.config:
        cfg = load_config(args.config, {"scenario": args.command, **overrides})
    else:
        cfg = resolve({"scenario": args.command, **overrides})
    return cfg


def _evidence_list(spec):
    values = expand(spec)
    lo, hi = min(E_MIN, values.min()), max(E_MAX, values.max())
    return [BernoulliEvidence(e, lo, hi) for e in values]


def run(cfg):
    """Execute a resolved config. Returns ``(result, plot_kind or None)``."""
    s = cfg.scenario
    if s == "update":
        result = optimal_update(cfg["prior"], cfg["lik"], cfg["c"], cfg["alpha"], cfg["lambda"],
                                method=cfg["solver"], config=NumericSolverConfig(**cfg["numeric"]),
                                grid_step=cfg["grid_step"])
        return result, None
    if s == "sweep":
        return evidence_strength_sweep(cfg["prior"], cfg["c"], expand(cfg["lambdas"]), expand(cfg["alphas"]),
                                       _evidence_list(cfg["evidence"])), "line"
    menu = [EvidenceOption(o["label"], o["lik"]) for o in cfg.get("menu", [])]
    if s == "select":
        params = AgentParams(lam=cfg["lambda"], alpha=cfg["alpha"], utility=cfg["c"])
        return select_evidence(cfg["prior"], params, menu), None
    if s == "threshold":
        roots = selection_thresholds(cfg["prior"], cfg["c"], cfg["alpha"], menu, cfg["lambda_range"],
                                     cfg["tolerance"])
        table = OutputTable(["lambda_star", "n_sign_changes"],
                            [[roots[0] if roots else "none", len(roots)]], {"all_sign_changes": roots})
        return table, None
    if s == "heatmap":
        if cfg["kind"] == "objective":
            result = objective_landscape_heatmap(cfg["prior"], cfg["c"], cfg["evidence"],
                                                 expand(cfg["lambdas"]), expand(cfg["alphas"]))
        else:
            result = selection_boundary_heatmap(cfg["prior"], cfg["c"], menu,
                                                expand(cfg["lambdas"]), expand(cfg["alphas"]))
        return result, "heatmap"
    if s == "polarize":
        return polarization_sweep(cfg["prior"], cfg["lik"], expand(cfg["lambdas"]), expand(cfg["alphas"]),
                                  cfg["utilities"]), "line"
    raise ValidationError("scenario", f"unknown scenario {s!r}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_CONFIG
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_CONFIG
    if args.command == "info":
        print(f"kernel backend: {kernels.BACKEND}")
        return EXIT_OK

    try:
        if args.command == "reproduce":
            for path in reproduce(args.figure, args.out, args.format, plot=not args.no_plot):
                print(f"wrote {path}", file=sys.stderr)
            return EXIT_OK
        cfg = _config_from_args(args)
        result, plot_kind = run(cfg)
        text = emit_table(result, cfg["format"], cfg["out"], {"config": cfg.to_dict()})
        if cfg["out"] is None:
            sys.stdout.write(text)
        else:
            print(f"wrote {cfg['out']}", file=sys.stderr)
        if cfg["plot"]:
            emit_plot(result, plot_kind, cfg["plot"])
            print(f"wrote {cfg['plot']}", file=sys.stderr)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (MotivatedBeliefError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
