"""CSV/JSON tables and SVG plots for results.

Tables carry a metadata block (the resolved run configuration), serialise
reals with 12 significant digits and are byte-identical for identical
inputs. Files are written atomically (temporary file, then rename).
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import AxisMismatch, OutputError
from .experiments import SelectionOutcome, SweepResult
from .solver import UpdateResult

SIGNIFICANT_DIGITS = 12


def format_real(x) -> str:
    return f"{float(x):.{SIGNIFICANT_DIGITS}g}"


def _cell(x):
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format_real(x)
    return str(x)


def _json_value(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return float(format_real(x)) if math.isfinite(x) else format_real(x)
    if isinstance(x, dict):
        return {str(k): _json_value(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_json_value(v) for v in x]
    return x


@dataclass
class OutputTable:
    header: list
    rows: list
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        width = len(self.header)
        for row in self.rows:
            if len(row) != width:
                raise ValueError(f"ragged table: row of {len(row)} cells under {width} columns")

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key, value in self.metadata.items():
            buf.write(f"# {key}: {json.dumps(_json_value(value), sort_keys=True)}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.header)
        for row in self.rows:
            writer.writerow([_cell(x) for x in row])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "metadata": _json_value(self.metadata),
            "columns": list(self.header),
            "records": [{h: _json_value(x) for h, x in zip(self.header, row)} for row in self.rows],
        }
        return json.dumps(doc, indent=2) + "\n"

    def serialize(self, fmt: str) -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_json()
        raise ValueError(f"unknown format {fmt!r}")


def parse_csv(text: str):
    """Inverse of :meth:`OutputTable.to_csv`: ``(metadata, header, rows)`` with cells as strings."""
    metadata = {}
    lines = text.splitlines()
    body_start = 0
    for i, line in enumerate(lines):
        if not line.startswith("#"):
            body_start = i
            break
        key, _, value = line[1:].strip().partition(": ")
        metadata[key] = json.loads(value)
    else:
        body_start = len(lines)
    reader = csv.reader(lines[body_start:])
    rows = list(reader)
    return metadata, (rows[0] if rows else []), rows[1:]


def _state_columns(n):
    return [f"q{s}" for s in range(n)]


def to_table(result, metadata=None) -> OutputTable:
    metadata = dict(metadata or {})
    if isinstance(result, UpdateResult):
        b = result.breakdown
        header = _state_columns(result.posterior.n_states) + ["utility", "accuracy", "complexity", "total"]
        rows = [list(result.posterior.probs) + [b.affective_utility, b.accuracy, b.complexity, b.total]]
        metadata.setdefault("method", result.method)
        metadata.setdefault("converged", result.converged)
        return OutputTable(header, rows, metadata)
    if isinstance(result, SelectionOutcome):
        n = result.per_option[0].result.posterior.n_states
        header = ["label"] + _state_columns(n) + ["utility", "accuracy", "complexity", "total", "chosen"]
        rows = []
        for i, opt in enumerate(result.per_option):
            b = opt.result.breakdown
            rows.append([opt.label] + list(opt.result.posterior.probs)
                        + [b.affective_utility, b.accuracy, b.complexity, b.total, int(i == result.chosen_index)])
        metadata.setdefault("chosen_index", result.chosen_index)
        return OutputTable(header, rows, metadata)
    if isinstance(result, SweepResult):
        header = list(result.columns)
        rows = [[r[c] for c in header] for r in result.records]
        metadata.setdefault("experiment", result.name)
        metadata.setdefault("axes", {k: len(v) for k, v in result.axes.items()})
        metadata.setdefault("parameters", {k: v for k, v in result.meta.items() if not _is_plot_hint(k)})
        return OutputTable(header, rows, metadata)
    if isinstance(result, OutputTable):
        return result
    raise TypeError(f"cannot tabulate {type(result).__name__}")


def _is_plot_hint(key):
    return key in ("x_axis", "line_columns", "reference_column", "heatmap_columns", "boundary_columns",
                   "column_labels", "y_label")


def atomic_write(path, data) -> Path:
    path = Path(path)
    mode = "wb" if isinstance(data, bytes) else "w"
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
        try:
            with os.fdopen(fd, mode, **({} if mode == "wb" else {"encoding": "utf-8", "newline": ""})) as fh:
                fh.write(data)
            umask = os.umask(0)
            os.umask(umask)
            os.chmod(tmp, 0o666 & ~umask)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc
    return path


def emit_table(result, fmt="csv", path=None, metadata=None) -> str:
    """Serialise ``result``; also write it to ``path`` when given. Returns the text."""
    text = to_table(result, metadata).serialize(fmt)
    if path is not None:
        atomic_write(path, text)
    return text


# --- plots ---------------------------------------------------------------

AXIS_LABELS = {
    "lambda": "λ (conservatism)",
    "alpha": "α (likelihood weight)",
    "evidence": "evidence strength p(o|s=0)",
}


def _swept(result):
    return [k for k, v in result.axes.items() if len(v) > 1]


def _label(result, column):
    return result.meta.get("column_labels", {}).get(column, column)


def _line_panel(ax, result, suffix=""):
    swept = _swept(result)
    if len(swept) == 0 or len(swept) > 2:
        raise AxisMismatch(f"line plot needs 1 swept axis (+1 series axis), got {swept}")
    x_name = result.meta.get("x_axis", swept[-1])
    if x_name not in swept:
        x_name = swept[-1]
    series = [k for k in swept if k != x_name]
    names = list(result.axes)
    x_pos = names.index(x_name)
    columns = result.meta.get("line_columns", [])
    if not columns:
        raise AxisMismatch(f"{result.name}: no line columns to plot")
    cmap = _colormap()
    grids = {c: np.moveaxis(result.grid(c), x_pos, -1).reshape(-1, len(result.axes[x_name]))
             for c in columns + [result.meta.get("reference_column")] if c}
    x = np.asarray(result.axes[x_name])
    n_series = grids[columns[0]].shape[0]
    series_values = _series_values(result, names, x_pos, series)
    for c_idx, column in enumerate(columns):
        for i in range(n_series):
            tag = f"{column}" if not series else f"{column}-{series[0]}-{format_real(series_values[i])}"
            color = cmap(i / max(n_series - 1, 1)) if series else f"C{c_idx}"
            label = _label(result, column) if not series else f"{series[0]}={series_values[i]:g}"
            if len(columns) > 1 and series:
                label = f"{_label(result, column)}, {label}"
            (line,) = ax.plot(x, grids[column][i], color=color, label=label, lw=1.4)
            line.set_gid(f"curve-{tag}{suffix}")
    ref = result.meta.get("reference_column")
    if ref:
        (line,) = ax.plot(x, grids[ref][0], color="black", ls="--", lw=1.4, label=_label(result, ref))
        line.set_gid(f"reference-{ref}{suffix}")
    if x.min() > 0 and x.max() / x.min() >= 100:
        ax.set_xscale("log")
    ax.set_xlabel(AXIS_LABELS.get(x_name, x_name))
    y_label = result.meta.get("y_label") or (", ".join(_label(result, c) for c in columns) if not series else columns[0])
    ax.set_ylabel(y_label)
    ax.legend(fontsize=6, loc="best")


def _series_values(result, names, x_pos, series):
    if not series:
        return [None]
    return list(result.axes[series[0]])


def _colormap():
    from matplotlib import colormaps
    return colormaps["viridis"]


def _boundary(result):
    """Decision-boundary polyline: for each alpha, the lam where ``difference`` changes sign."""
    lam = np.asarray(result.axes["lambda"])
    alpha = np.asarray(result.axes["alpha"])
    diff = result.grid("difference")
    pts = []
    for j, a in enumerate(alpha):
        d = diff[:, j]
        for i in range(lam.size - 1):
            if (d[i] >= 0) != (d[i + 1] >= 0):
                t = d[i] / (d[i] - d[i + 1]) if d[i] != d[i + 1] else 0.0
                pts.append((lam[i] + t * (lam[i + 1] - lam[i]), a))
                break
    return np.array(pts).reshape(-1, 2)


def _heatmap_panels(fig, axes_row, result, suffix=""):
    from matplotlib.image import NonUniformImage

    swept = _swept(result)
    if list(result.axes) != ["lambda", "alpha"] or len(swept) != 2:
        raise AxisMismatch(f"heatmap needs exactly two swept axes (lambda, alpha), got {swept}")
    lam = np.asarray(result.axes["lambda"])
    alpha = np.asarray(result.axes["alpha"])
    boundary = _boundary(result) if result.meta.get("boundary_columns") else None
    for ax, column in zip(axes_row, result.meta["heatmap_columns"]):
        data = result.grid(column).T
        # a non-uniform image keeps cells in place on log-spaced grids and stays one SVG element
        img = NonUniformImage(ax, cmap="viridis", interpolation="nearest",
                              extent=(lam[0], lam[-1], alpha[0], alpha[-1]))
        img.set_data(lam, alpha, np.where(np.isfinite(data), data, np.nan))
        ax.add_image(img)
        ax.set_xlim(lam[0], lam[-1])
        ax.set_ylim(alpha[0], alpha[-1])
        img.set_gid(f"heatmap-{column}{suffix}")
        fig.colorbar(img, ax=ax)
        if boundary is not None and column in result.meta["boundary_columns"] and len(boundary):
            color = "white" if column.startswith("q0") else "black"
            (line,) = ax.plot(boundary[:, 0], boundary[:, 1], color=color, lw=1.5)
            line.set_gid(f"boundary-{column}{suffix}")
        ax.set_xlabel(AXIS_LABELS["lambda"])
        ax.set_ylabel(AXIS_LABELS["alpha"])
        ax.set_title(_label(result, column), fontsize=8)


def _panel_suffix(k, results):
    # keeps SVG ids unique when several results share a figure
    return f"-{k + 1}" if len(results) > 1 else ""


def emit_plot(results, kind, path, titles=None) -> Path:
    """Render one panel per result (line) or one row of heatmaps per result.

    The format follows the file suffix; SVG when there is none.

    Elements carry SVG ids: ``curve-*`` for each line, ``reference-*`` for
    the reference curve, ``heatmap-<column>`` for each heatmap and
    ``boundary-<column>`` for decision-boundary overlays. With several
    results each id ends in ``-<k>``, the 1-based result index.
    """
    import matplotlib
    from matplotlib.figure import Figure

    if isinstance(results, SweepResult):
        results = [results]
    results = list(results)
    if not results or any(len(r.records) == 0 for r in results):
        raise AxisMismatch("nothing to plot: empty sweep")
    titles = list(titles or [None] * len(results))

    with matplotlib.rc_context({"svg.hashsalt": "motivated-belief", "svg.fonttype": "path"}):
        if kind == "line":
            fig = Figure(figsize=(5 * len(results), 4), layout="constrained")
            axes = fig.subplots(1, len(results), squeeze=False)[0]
            for k, (ax, result, title) in enumerate(zip(axes, results, titles)):
                _line_panel(ax, result, _panel_suffix(k, results))
                if title:
                    ax.set_title(title, fontsize=9)
        elif kind == "heatmap":
            ncols = max(len(r.meta.get("heatmap_columns", [])) for r in results)
            if ncols == 0:
                raise AxisMismatch("no heatmap columns")
            if any(not r.meta.get("heatmap_columns") for r in results):
                raise AxisMismatch("every result needs heatmap columns")
            if any("boundary_columns" in r.meta for r in results) and ncols == 4 and len(results) == 1:
                fig = Figure(figsize=(10, 8), layout="constrained")
                grid = fig.subplots(2, 2).reshape(1, 4)
            else:
                fig = Figure(figsize=(5 * ncols, 4 * len(results)), layout="constrained")
                grid = fig.subplots(len(results), ncols, squeeze=False)
            for k, (row, result, title) in enumerate(zip(grid, results, titles)):
                _heatmap_panels(fig, row, result, _panel_suffix(k, results))
                if title:
                    row[0].set_title(f"{title}\n{row[0].get_title()}", fontsize=8)
        else:
            raise ValueError(f"unknown plot kind {kind!r}")
        buf = io.BytesIO()
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            fmt = Path(path).suffix.lstrip(".").lower() or "svg"
            fig.savefig(buf, format=fmt, metadata={"Date": None} if fmt in ("svg", "pdf") else None)
    return atomic_write(path, buf.getvalue())
