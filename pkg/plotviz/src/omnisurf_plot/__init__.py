"""Figure rendering for omnisurf CSV outputs.

Strictly a read-only consumer of the published file formats: pattern
CSVs (theta_rad,phi_rad,power_db) and gain/sweep CSVs. No code is shared
with the simulation package.
"""

__version__ = "0.1.0"

from .pattern import (
    HemispherePattern,
    PatternFigureSpec,
    PlotInputError,
    load_pattern_csv,
    render_pattern,
)
from .sweep import load_table, render_sweep
