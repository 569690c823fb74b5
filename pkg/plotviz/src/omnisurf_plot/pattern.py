"""Hemispherical pattern heatmaps and principal-plane cuts.

Input is the pattern CSV contract: header ``theta_rad,phi_rad,power_db``
followed by one row per (theta, phi) grid point, theta-major. Values are
dB relative to the global peak; -inf marks an empty hemisphere.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

PATTERN_HEADER = ["theta_rad", "phi_rad", "power_db"]


class PlotInputError(Exception):
    """Missing, malformed, or inconsistent input file."""


@dataclass(frozen=True)
class HemispherePattern:
    """Pattern values on a regular (theta, phi) grid, plus peak metadata."""

    theta: np.ndarray         # radians, ascending
    phi: np.ndarray           # radians, ascending
    db: np.ndarray            # (theta, phi)
    source: Path

    @property
    def empty(self) -> bool:
        return bool(np.all(np.isneginf(self.db)))

    @property
    def resolution_deg(self) -> float:
        if self.theta.size > 1:
            return math.degrees(float(self.theta[1] - self.theta[0]))
        return 0.0

    def peak(self) -> tuple[float, float, float]:
        """(theta_deg, phi_deg, db) of the hemisphere maximum."""
        idx = int(np.argmax(self.db))
        it, ip = divmod(idx, self.phi.size)
        return (
            math.degrees(float(self.theta[it])),
            math.degrees(float(self.phi[ip])),
            float(self.db[it, ip]),
        )

    def cut(self, phi_deg: float) -> tuple[np.ndarray, np.ndarray]:
        """Signed-theta principal cut through phi and phi + 180 degrees."""
        phi = math.radians(phi_deg) % (2 * math.pi)
        ip_pos = int(np.argmin(np.abs(self.phi - phi)))
        ip_neg = int(np.argmin(np.abs(self.phi - (phi + math.pi) % (2 * math.pi))))
        signed = np.concatenate([-self.theta[:0:-1], self.theta])
        values = np.concatenate([self.db[:0:-1, ip_neg], self.db[:, ip_pos]])
        return np.degrees(signed), values


@dataclass(frozen=True)
class PatternFigureSpec:
    """One or two hemisphere CSVs rendered into a single figure."""

    inputs: tuple
    output: Path
    cuts_deg: tuple = (0.0,)
    floor_db: float = -40.0

    def __post_init__(self):
        if not self.inputs:
            raise PlotInputError("at least one pattern CSV is required")
        if len(self.inputs) > 2:
            raise PlotInputError("at most two hemispheres can be rendered")
        if not self.floor_db < 0:
            raise PlotInputError(f"dB floor must be negative, got {self.floor_db}")
        object.__setattr__(self, "inputs", tuple(Path(p) for p in self.inputs))
        object.__setattr__(self, "output", Path(self.output))
        object.__setattr__(self, "cuts_deg", tuple(float(c) for c in self.cuts_deg))


def _parse_db(token: str, path: Path, lineno: int) -> float:
    if token == "-inf":
        return -math.inf
    try:
        return float(token)
    except ValueError as exc:
        raise PlotInputError(f"{path}:{lineno}: bad value {token!r}") from exc


def load_pattern_csv(path: str | Path) -> HemispherePattern:
    """Parse a pattern CSV into a grid; errors carry path and line number."""
    path = Path(path)
    try:
        fh = open(path, newline="")
    except FileNotFoundError as exc:
        raise PlotInputError(f"pattern CSV not found: {path}") from exc
    rows = []
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != PATTERN_HEADER:
            raise PlotInputError(
                f"{path}:1: expected header {','.join(PATTERN_HEADER)}, "
                f"got {header}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise PlotInputError(f"{path}:{lineno}: expected 3 columns")
            rows.append(
                (
                    _parse_db(row[0], path, lineno),
                    _parse_db(row[1], path, lineno),
                    _parse_db(row[2], path, lineno),
                )
            )
    if not rows:
        raise PlotInputError(f"{path}: no data rows")
    data = np.array(rows)
    theta = np.unique(data[:, 0])
    phi = np.unique(data[:, 1])
    if theta.size * phi.size != data.shape[0]:
        raise PlotInputError(f"{path}: rows do not form a regular (theta, phi) grid")
    db = data[:, 2].reshape(theta.size, phi.size)
    return HemispherePattern(theta=theta, phi=phi, db=db, source=path)


def _hemisphere_label(path: Path) -> str:
    stem = path.stem.lower()
    if "transmit" in stem:
        return "transmission"
    if "reflect" in stem:
        return "reflection"
    return path.stem


def _heatmap(ax, pattern: HemispherePattern, floor: float, label: str):
    values = np.clip(pattern.db, floor, None)
    if pattern.empty:
        values = np.full_like(pattern.db, floor)
    # pad phi to close the polar seam
    phi = np.append(pattern.phi, pattern.phi[0] + 2 * np.pi)
    values = np.column_stack([values, values[:, 0]])
    mesh = ax.pcolormesh(
        phi,
        np.degrees(pattern.theta),
        values,
        vmin=floor,
        vmax=0.0,
        shading="auto",
        cmap="inferno",
    )
    ax.set_theta_zero_location("E")
    ax.set_title(label)
    if pattern.empty:
        ax.annotate(
            f"no {label}",
            xy=(0.5, 0.5),
            xycoords="axes fraction",
            ha="center",
            va="center",
            color="white",
            fontsize=12,
        )
    return mesh


def render_pattern(spec: PatternFigureSpec) -> dict:
    """Render heatmaps plus cuts, annotate peaks, and write the image.

    Returns the annotation values actually drawn, keyed by hemisphere
    label: {"peak_theta_deg", "peak_phi_deg", "peak_db", "empty"}.
    """
    patterns = [load_pattern_csv(p) for p in spec.inputs]
    labels = [_hemisphere_label(p.source) for p in patterns]

    n_cols = max(len(patterns), 1)
    fig = plt.figure(figsize=(5.0 * n_cols, 8.0))
    annotations: dict[str, dict] = {}
    for i, (pattern, label) in enumerate(zip(patterns, labels)):
        ax = fig.add_subplot(2, n_cols, i + 1, projection="polar")
        mesh = _heatmap(ax, pattern, spec.floor_db, label)
        fig.colorbar(mesh, ax=ax, label="dB", shrink=0.8)
        entry = {"empty": pattern.empty}
        if not pattern.empty:
            th, ph, db = pattern.peak()
            entry.update(peak_theta_deg=th, peak_phi_deg=ph, peak_db=db)
            ax.annotate(
                f"peak {th:.2f}° @ φ={ph:.0f}°, {db:.2f} dB",
                xy=(0.5, -0.12),
                xycoords="axes fraction",
                ha="center",
            )
        annotations[label] = entry

    ax_cut = fig.add_subplot(2, 1, 2)
    for pattern, label in zip(patterns, labels):
        if pattern.empty:
            continue
        for phi_deg in spec.cuts_deg:
            signed, values = pattern.cut(phi_deg)
            values = np.clip(values, spec.floor_db, None)
            ax_cut.plot(signed, values, label=f"{label}, φ={phi_deg:.0f}°")
            j = int(np.argmax(values))
            ax_cut.annotate(
                f"{signed[j]:.2f}°, {values[j]:.2f} dB",
                xy=(signed[j], values[j]),
                xytext=(signed[j], min(values[j] + 3.0, 2.0)),
                ha="center",
                arrowprops={"arrowstyle": "->"},
            )
            key = f"{label}, cut {phi_deg:g}"
            annotations[key] = {
                "peak_theta_deg": float(signed[j]),
                "peak_db": float(values[j]),
            }
    ax_cut.set_xlabel("theta (deg, signed along the cut plane)")
    ax_cut.set_ylabel("normalized power (dB)")
    ax_cut.set_ylim(spec.floor_db, 2.0)
    ax_cut.grid(True, alpha=0.4)
    if ax_cut.lines:
        ax_cut.legend(loc="lower right", fontsize=8)

    fig.tight_layout()
    spec.output.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(spec.output, dpi=120)
    plt.close(fig)
    return annotations
