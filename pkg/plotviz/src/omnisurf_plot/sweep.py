"""Line plots over gain/sweep CSV tables, one series per model."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .pattern import PlotInputError


def load_table(path: str | Path) -> tuple[list[str], list[dict]]:
    """Read a delimited table as (column names, list of row dicts)."""
    path = Path(path)
    try:
        fh = open(path, newline="")
    except FileNotFoundError as exc:
        raise PlotInputError(f"CSV not found: {path}") from exc
    with fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise PlotInputError(f"{path}:1: empty file, no header")
        rows = list(reader)
    return list(reader.fieldnames), rows


def _column(rows, name, columns, path):
    if name not in columns:
        raise PlotInputError(
            f"{path}: unknown column {name!r}; available: {', '.join(columns)}"
        )
    out = []
    for row in rows:
        token = row[name]
        if token in ("", None):
            out.append(None)
        elif token == "-inf":
            out.append(float("-inf"))
        else:
            try:
                out.append(float(token))
            except ValueError as exc:
                raise PlotInputError(f"{path}: bad value {token!r} in {name}") from exc
    return out


def render_sweep(
    csv_path: str | Path,
    x_column: str,
    y_column: str,
    output: str | Path,
    log_x: bool = False,
) -> dict:
    """Plot y vs x with one series per distinct model column value.

    Single-point series are drawn as markers. Returns the series actually
    drawn: {series label: number of points}.
    """
    csv_path = Path(csv_path)
    columns, rows = load_table(csv_path)
    x = _column(rows, x_column, columns, csv_path)
    y = _column(rows, y_column, columns, csv_path)
    models = [row.get("model", "") for row in rows] if "model" in columns else [""] * len(rows)

    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    series: dict[str, int] = {}
    for model in dict.fromkeys(models):
        pts = [
            (xv, yv)
            for xv, yv, m in zip(x, y, models)
            if m == model and xv is not None and yv is not None
        ]
        pts.sort()
        label = model or csv_path.stem
        style = "o-" if len(pts) > 1 else "o"
        ax.plot([p[0] for p in pts], [p[1] for p in pts], style, label=label)
        series[label] = len(pts)
    if log_x:
        ax.set_xscale("log")
    ax.set_xlabel(x_column)
    ax.set_ylabel(y_column)
    ax.grid(True, alpha=0.4)
    if len(series) > 0:
        ax.legend(fontsize=8)
    fig.tight_layout()
    output = Path(output)
    output.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(output, dpi=120)
    plt.close(fig)
    return series
