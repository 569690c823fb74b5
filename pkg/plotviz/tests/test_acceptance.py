"""Acceptance gate for the rendering package: annotations must equal
values recomputed from the input CSV, including a steered-beam fixture.
"""

import csv
import math
import time
from contextlib import contextmanager

import numpy as np

from omnisurf_plot import PatternFigureSpec, load_pattern_csv, render_pattern


@contextmanager
def criterion(label, budget_s):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"FAIL {label} ({time.perf_counter() - start:.2f} s)")
        raise
    elapsed = time.perf_counter() - start
    print(f"PASS {label} ({elapsed:.2f} s)")
    assert elapsed < budget_s, f"{label}: runtime {elapsed:.2f} s over budget"


def write_steered_pattern(path, theta0_deg, resolution_deg=1.0):
    """Synthetic steered-beam fixture in the published CSV format."""
    theta = np.arange(0.0, 90.0 + 1e-9, resolution_deg)
    phi = np.arange(0.0, 360.0, resolution_deg)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["theta_rad", "phi_rad", "power_db"])
        for t in theta:
            for p in phi:
                dp = min(abs(p), 360.0 - abs(p)) * math.sin(math.radians(t))
                db = -((t - theta0_deg) ** 2 + dp**2) / 10.0
                writer.writerow(
                    [f"{math.radians(t):.12g}", f"{math.radians(p):.12g}", f"{db:.12g}"]
                )
    return path


def test_criterion_10_annotation_fidelity(tmp_path):
    with criterion("criterion 10: annotations match CSV recomputation", 10.0):
        path = write_steered_pattern(tmp_path / "pattern_reflect.csv", 30.0)
        out = tmp_path / "steered.png"
        ann = render_pattern(
            PatternFigureSpec(inputs=(path,), output=out, cuts_deg=(0.0,))
        )
        assert out.exists()

        # recompute the peak independently from the CSV contents
        pattern = load_pattern_csv(path)
        idx = int(np.argmax(pattern.db))
        it, ip = divmod(idx, pattern.phi.size)
        expected_theta = math.degrees(float(pattern.theta[it]))
        expected_db = float(pattern.db[it, ip])
        drawn = ann["reflection"]
        assert drawn["peak_theta_deg"] == expected_theta
        assert drawn["peak_db"] == expected_db

        # steered-30 fixture: annotation within one resolution step of 30
        resolution = math.degrees(float(pattern.theta[1] - pattern.theta[0]))
        assert abs(drawn["peak_theta_deg"] - 30.0) <= resolution + 1e-9
        cut = ann["reflection, cut 0"]
        assert abs(cut["peak_theta_deg"] - 30.0) <= resolution + 1e-9
