import csv

import pytest

from omnisurf_plot import PlotInputError, render_sweep
from omnisurf_plot.cli import main

GAIN_HEADER = ["scenario_digest", "model", "receiver_id", "sweep_value",
               "h_abs_db", "h_arg_rad"]


def write_sweep(path, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(GAIN_HEADER)
        writer.writerows(rows)
    return path


def distance_rows(models, distances):
    rows = []
    for model in models:
        for d in distances:
            # far-field 1/d amplitude trend
            rows.append(["abc", model, "r1", d, -20.0 - 20.0 * (d / 100.0), 0.1])
    return rows


def test_render_sweep_multi_model_series(tmp_path):
    path = write_sweep(
        tmp_path / "sweep.csv",
        distance_rows(["ray_tracing", "fresnel_kirchhoff"], [10, 20, 30]),
    )
    out = tmp_path / "sweep.png"
    series = render_sweep(path, "sweep_value", "h_abs_db", out)
    assert out.exists()
    assert series == {"ray_tracing": 3, "fresnel_kirchhoff": 3}


def test_render_sweep_single_row(tmp_path):
    path = write_sweep(tmp_path / "one.csv", distance_rows(["ray_tracing"], [10]))
    series = render_sweep(path, "sweep_value", "h_abs_db", tmp_path / "one.png")
    assert series == {"ray_tracing": 1}


def test_render_sweep_unknown_column_lists_available(tmp_path):
    path = write_sweep(tmp_path / "sweep.csv", distance_rows(["ray_tracing"], [10]))
    with pytest.raises(PlotInputError, match="h_abs_db"):
        render_sweep(path, "distance_m", "h_abs_db", tmp_path / "x.png")


def test_render_sweep_missing_file(tmp_path):
    with pytest.raises(PlotInputError, match="not found"):
        render_sweep(tmp_path / "nope.csv", "sweep_value", "h_abs_db",
                     tmp_path / "x.png")


def test_cli_sweep_and_pattern(tmp_path, capsys):
    path = write_sweep(
        tmp_path / "sweep.csv", distance_rows(["ray_tracing"], [10, 100, 1000])
    )
    out = tmp_path / "sweep.png"
    assert main(["sweep", "--in", str(path), "--out", str(out), "--log-x"]) == 0
    assert out.exists()
    assert "wrote" in capsys.readouterr().out


def test_cli_reports_input_errors(tmp_path, capsys):
    code = main(["pattern", "--in", str(tmp_path / "missing.csv"),
                 "--out", str(tmp_path / "x.png")])
    assert code == 1
    assert "error:" in capsys.readouterr().err
