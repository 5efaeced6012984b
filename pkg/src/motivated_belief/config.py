"""Run configuration: YAML (or JSON, a YAML subset) resolved against per-scenario defaults.

A config is a mapping. ``scenario`` selects one of :data:`SCENARIOS`; the
remaining keys are listed in :data:`KEYS`. Grids are either a list of
numbers, a single number, or ``{start, stop, num, spacing}`` with
``spacing`` one of ``linear`` (default) or ``log``. A menu is a list of
``{label, lik}`` mappings. See the README for examples.
"""
from __future__ import annotations

import copy
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from .beliefs import Categorical, Likelihood
from .errors import ParseError, ValidationError
from .experiments import SCENARIO_1, SELECTION_ALPHA
from .solver import NumericSolverConfig

SCENARIOS = ("update", "sweep", "select", "threshold", "heatmap", "polarize")
SOLVERS = ("auto", "closed_form", "numeric", "brute_force")
FORMATS = ("csv", "json")

KEYS = {
    "scenario", "prior", "lik", "c", "alpha", "lambda", "lambdas", "alphas", "evidence", "menu",
    "kind", "lambda_range", "tolerance", "utilities", "solver", "numeric", "grid_step",
    "out", "format", "plot",
}


def _grid(start, stop, num=101, spacing="linear"):
    return {"start": start, "stop": stop, "num": num, "spacing": spacing}


def _scenario1_menu():
    return [{"label": o.label, "lik": o.lik.values.tolist()} for o in SCENARIO_1.menu]


COMMON_DEFAULTS = {"out": None, "format": "csv", "plot": None}

DEFAULTS = {
    "update": {"alpha": 1.0, "lambda": 1.0, "solver": "auto", "grid_step": 1e-4, "numeric": {}},
    "sweep": {"prior": [0.3, 0.7], "c": [1.0, 0.0], "lambdas": [1.0], "alphas": [1.0],
              "evidence": _grid(0.01, 0.99)},
    "select": {"prior": list(SCENARIO_1.prior), "c": list(SCENARIO_1.coeffs), "menu": _scenario1_menu(),
               "alpha": SELECTION_ALPHA, "lambda": 1.0},
    "threshold": {"prior": list(SCENARIO_1.prior), "c": list(SCENARIO_1.coeffs), "menu": _scenario1_menu(),
                  "alpha": SELECTION_ALPHA, "lambda_range": [0.1, 100.0], "tolerance": 1e-6},
    "heatmap:objective": {"prior": [0.3, 0.7], "c": [1.0, 0.0], "evidence": 0.7,
                          "lambdas": _grid(0.1, 10.0), "alphas": _grid(0.0, 10.0)},
    "heatmap:selection": {"prior": list(SCENARIO_1.prior), "c": list(SCENARIO_1.coeffs),
                          "menu": _scenario1_menu(),
                          "lambdas": _grid(0.1, 100.0), "alphas": _grid(1.0, 10.0)},
    "polarize": {"prior": [0.5, 0.5], "lik": [0.6, 0.4], "utilities": [[1.0, 0.0], [0.0, 1.0]],
                 "lambdas": _grid(0.0, 10.0), "alphas": [1.0]},
}

REQUIRED = {"update": ("prior", "lik", "c")}
ALLOWED = {
    "update": {"prior", "lik", "c", "alpha", "lambda", "solver", "numeric", "grid_step"},
    "sweep": {"prior", "c", "lambdas", "alphas", "evidence"},
    "select": {"prior", "c", "menu", "alpha", "lambda"},
    "threshold": {"prior", "c", "menu", "alpha", "lambda_range", "tolerance"},
    "heatmap": {"kind", "prior", "c", "evidence", "menu", "lambdas", "alphas"},
    "polarize": {"prior", "lik", "utilities", "lambdas", "alphas"},
}


@dataclass(frozen=True)
class RunConfig:
    """A validated configuration with every default filled in.

    ``params`` is plain JSON-compatible data and is echoed verbatim into
    output metadata, so a result file is enough to re-run its experiment.
    """

    scenario: str
    params: dict

    def __getitem__(self, key):
        return self.params[key]

    def get(self, key, default=None):
        return self.params.get(key, default)

    def to_dict(self) -> dict:
        return {"scenario": self.scenario, **copy.deepcopy(self.params)}


# --- field validators ------------------------------------------------------


def _number(field, value, minimum=None):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(field, f"expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(field, "must be finite")
    if minimum is not None and value < minimum:
        raise ValidationError(field, f"must be >= {minimum:g}, got {value:g}")
    return value


def _vector(field, value):
    if not isinstance(value, (list, tuple)) or not value:
        raise ValidationError(field, f"expected a non-empty list of numbers, got {value!r}")
    return [_number(f"{field}[{i}]", v) for i, v in enumerate(value)]


def _prior(field, value):
    v = _vector(field, value)
    try:
        return Categorical(v).probs.tolist()
    except ValueError as exc:
        raise ValidationError(field, str(exc)) from None


def _lik(field, value):
    v = _vector(field, value)
    try:
        Likelihood(v)
    except ValueError as exc:
        raise ValidationError(field, str(exc)) from None
    return v


def _grid_spec(field, value, minimum=0.0, maximum=None):
    if isinstance(value, dict):
        unknown = set(value) - {"start", "stop", "num", "spacing"}
        if unknown:
            raise ValidationError(f"{field}.{sorted(unknown)[0]}", "unknown grid key")
        for key in ("start", "stop", "num"):
            if key not in value:
                raise ValidationError(f"{field}.{key}", "missing")
        start = _number(f"{field}.start", value["start"], minimum)
        stop = _number(f"{field}.stop", value["stop"], minimum)
        num = value["num"]
        if isinstance(num, bool) or not isinstance(num, int) or num < 1:
            raise ValidationError(f"{field}.num", f"expected a positive integer, got {num!r}")
        spacing = value.get("spacing", "linear")
        if spacing not in ("linear", "log"):
            raise ValidationError(f"{field}.spacing", f"expected 'linear' or 'log', got {spacing!r}")
        if spacing == "log" and start <= 0:
            raise ValidationError(f"{field}.start", "log spacing needs start > 0")
        if maximum is not None:
            for key, v in (("start", start), ("stop", stop)):
                if v > maximum:
                    raise ValidationError(f"{field}.{key}", f"must be <= {maximum:g}")
        return {"start": start, "stop": stop, "num": num, "spacing": spacing}
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        value = [value]
    values = _vector(field, value)
    for i, v in enumerate(values):
        if v < minimum or (maximum is not None and v > maximum):
            raise ValidationError(f"{field}[{i}]", f"out of range: {v:g}")
    return values


def expand(spec) -> np.ndarray:
    """Materialise a validated grid spec."""
    if isinstance(spec, dict):
        fn = np.geomspace if spec.get("spacing", "linear") == "log" else np.linspace
        return fn(spec["start"], spec["stop"], spec["num"])
    return np.atleast_1d(np.asarray(spec, dtype=float))


def _menu(field, value, size=None):
    if not isinstance(value, list) or not value:
        raise ValidationError(field, "expected a non-empty list of {label, lik}")
    out = []
    for i, item in enumerate(value):
        if not isinstance(item, dict) or set(item) - {"label", "lik"} or "lik" not in item:
            raise ValidationError(f"{field}[{i}]", "expected a mapping with keys label, lik")
        out.append({"label": str(item.get("label", chr(ord("A") + i))), "lik": _lik(f"{field}[{i}].lik", item["lik"])})
    if size is not None and len(out) != size:
        raise ValidationError(field, f"expected exactly {size} options, got {len(out)}")
    return out


def _numeric(field, value):
    if not isinstance(value, dict):
        raise ValidationError(field, "expected a mapping")
    allowed = NumericSolverConfig.__dataclass_fields__
    for key in value:
        if key not in allowed:
            raise ValidationError(f"{field}.{key}", "unknown solver setting")
    merged = {k: value.get(k, allowed[k].default) for k in allowed}
    try:
        NumericSolverConfig(**merged)
    except (TypeError, ValueError) as exc:
        raise ValidationError(field, str(exc)) from None
    return merged


def _choice(field, value, choices):
    if value not in choices:
        raise ValidationError(field, f"expected one of {', '.join(choices)}, got {value!r}")
    return value


def _same_length(params, *fields):
    sizes = {f: len(params[f]) for f in fields if f in params}
    if len(set(sizes.values())) > 1:
        raise ValidationError(fields[1], f"length mismatch: {sizes}")


# --- resolution --------------------------------------------------------------


def resolve(mapping) -> RunConfig:
    """Validate a raw mapping and fill in defaults."""
    if not isinstance(mapping, dict):
        raise ValidationError("config", f"expected a mapping at top level, got {type(mapping).__name__}")
    raw = dict(mapping)
    for key in raw:
        if key not in KEYS:
            raise ValidationError(str(key), "unknown key")
    scenario = _choice("scenario", raw.pop("scenario", None), SCENARIOS)
    output = {k: raw.pop(k, COMMON_DEFAULTS[k]) for k in COMMON_DEFAULTS}
    for key in raw:
        if key not in ALLOWED[scenario]:
            raise ValidationError(key, f"not used by scenario {scenario!r}")

    if scenario == "heatmap":
        kind = _choice("kind", raw.get("kind", "objective"), ("objective", "selection"))
        if kind == "objective" and "menu" in raw:
            raise ValidationError("menu", "not used by the objective heatmap")
        if kind == "selection" and "evidence" in raw:
            raise ValidationError("evidence", "not used by the selection heatmap")
        defaults = {"kind": kind, **DEFAULTS[f"heatmap:{kind}"]}
    else:
        defaults = DEFAULTS[scenario]
    for key in REQUIRED.get(scenario, ()):
        if key not in raw:
            raise ValidationError(key, f"required by scenario {scenario!r}")
    merged = {**copy.deepcopy(defaults), **raw}

    p = {}
    for key, value in merged.items():
        if key == "prior":
            p[key] = _prior(key, value)
        elif key == "lik":
            p[key] = _lik(key, value)
        elif key == "c":
            p[key] = _vector(key, value)
        elif key == "utilities":
            if not isinstance(value, list) or len(value) != 2:
                raise ValidationError(key, "expected two coefficient vectors")
            p[key] = [_vector(f"{key}[{i}]", v) for i, v in enumerate(value)]
        elif key in ("alpha", "lambda"):
            p[key] = _number(key, value, 0.0)
        elif key in ("lambdas", "alphas"):
            p[key] = _grid_spec(key, value)
        elif key == "evidence":
            if scenario == "heatmap":
                p[key] = _number(key, value, 0.0)
                if p[key] > 1:
                    raise ValidationError(key, "evidence strength must lie in [0, 1]")
            else:
                p[key] = _grid_spec(key, value, 0.0, 1.0)
        elif key == "menu":
            p[key] = _menu(key, value, None if scenario == "select" else 2)
        elif key == "lambda_range":
            if not isinstance(value, list) or len(value) != 2:
                raise ValidationError(key, f"expected [low, high], got {value!r}")
            lo, hi = _vector(key, value)
            if not 0 < lo < hi:
                raise ValidationError(key, f"expected 0 < low < high, got {value!r}")
            p[key] = [lo, hi]
        elif key == "tolerance":
            p[key] = _number(key, value)
            if p[key] <= 0:
                raise ValidationError(key, "must be > 0")
        elif key == "solver":
            p[key] = _choice(key, value, SOLVERS)
        elif key == "numeric":
            p[key] = _numeric(key, value)
        elif key == "grid_step":
            p[key] = _number(key, value)
            if not 0 < p[key] <= 0.01:
                raise ValidationError(key, "must lie in (0, 0.01]")
        elif key == "kind":
            p[key] = value
        else:  # pragma: no cover - KEYS and this chain must agree
            raise ValidationError(key, "unhandled key")

    _same_length(p, "prior", "lik")
    _same_length(p, "prior", "c")
    for i, opt in enumerate(p.get("menu", [])):
        if "prior" in p and len(opt["lik"]) != len(p["prior"]):
            raise ValidationError(f"menu[{i}].lik", "length differs from prior")
    for i, u in enumerate(p.get("utilities", [])):
        if len(u) != len(p["prior"]):
            raise ValidationError(f"utilities[{i}]", "length differs from prior")
    if scenario != "update" and len(p["prior"]) != 2:
        raise ValidationError("prior", f"scenario {scenario!r} is defined for two states")
    if scenario == "update" and p["solver"] == "brute_force" and len(p["prior"]) != 2:
        raise ValidationError("solver", "brute_force handles two states only")
    if scenario == "update" and p["solver"] == "numeric" and p["lambda"] == 0:
        raise ValidationError("lambda", "the numeric solver needs lambda > 0")

    p["format"] = _choice("format", output["format"], FORMATS)
    p["out"] = None if output["out"] is None else str(output["out"])
    p["plot"] = None if output["plot"] is None else str(output["plot"])
    if p["plot"] is not None and scenario in ("update", "select", "threshold"):
        raise ValidationError("plot", f"scenario {scenario!r} produces no sweep to plot")
    return RunConfig(scenario, p)


def parse_text(text: str):
    try:
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        line, col = (mark.line + 1, mark.column + 1) if mark else (None, None)
        raise ParseError(exc.problem or str(exc), line, col) from None
    except yaml.YAMLError as exc:
        raise ParseError(str(exc)) from None
    return {} if data is None else data


def load_config(source, overrides=None) -> RunConfig:
    """Load from a path or inline YAML text, apply ``overrides`` and resolve.

    A ``str`` naming an existing file is read as a path; any other string is
    parsed as the config text itself.
    """
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source and Path(source).is_file()):
        try:
            text = Path(source).read_text(encoding="utf-8")
        except OSError as exc:
            raise ParseError(f"cannot read {source}: {exc}") from None
    else:
        text = source
    data = parse_text(text)
    if not isinstance(data, dict):
        raise ValidationError("config", f"expected a mapping at top level, got {type(data).__name__}")
    return resolve({**data, **(overrides or {})})
