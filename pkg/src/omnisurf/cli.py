"""Command-line interface: scenario ingestion, dispatch, sweeps, emission.

Commands: gain, pattern, sweep, compare, regions, validate. Numeric
tables are RFC-4180 CSV with '.' decimals, fixed column order, and 12
significant digits; reports are JSON. Every run appends a JSON line to
<out>/run_manifest.jsonl with the input digest, package versions, and
wall time; the CSV bodies themselves are byte-deterministic.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import hashlib
import json
import math
import os
import platform
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    WAVE_MODELS,
    classify_field_region,
    compute_wave_gain,
    fraunhofer_distance,
    model_consistency,
    radiation_pattern,
    reactive_boundary,
)
from .channel import Side, apply_surface, equivalent_circuit_power
from .core import incident_field
from .errors import EXIT_CONFIG, ConfigError, OmnisurfError
from .scenario import Scenario, load_scenario, scenario_with_value

GAIN_COLUMNS = (
    "scenario_digest",
    "model",
    "receiver_id",
    "sweep_value",
    "h_abs_db",
    "h_arg_rad",
)
PATTERN_COLUMNS = ("theta_rad", "phi_rad", "power_db")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "-inf" if value < 0 else "inf"
        return f"{value:.12g}"
    return str(value)


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _append_manifest(out_dir: Path, entry: dict):
    entry = dict(entry)
    entry["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    entry["versions"] = {
        "omnisurf": __version__,
        "numpy": np.__version__,
        "python": platform.python_version(),
    }
    entry.setdefault("seed", None)
    with open(out_dir / "run_manifest.jsonl", "a") as fh:
        fh.write(json.dumps(entry, sort_keys=True) + "\n")


def _workers(args) -> int:
    if args.workers is not None:
        return max(1, args.workers)
    env = os.environ.get("OMNISURF_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ConfigError(f"OMNISURF_WORKERS must be an integer, got {env!r}") from exc
    return 1


def _selected_models(scenario: Scenario, args) -> list[str]:
    if args.models:
        models = [m.strip() for m in args.models.split(",") if m.strip()]
        unknown = [m for m in models if m not in WAVE_MODELS + ("equivalent_circuit",)]
        if unknown:
            raise ConfigError(f"unknown channel models: {', '.join(unknown)}")
        return models
    return list(scenario.channel_models)


def _gain_rows(scenario: Scenario, models, sweep_value=None):
    """One (model, receiver) row per combination, in sorted emission order."""
    source = scenario.source
    geometry = scenario.geometry
    coeffs = scenario.coefficients
    wave = [m for m in models if m in WAVE_MODELS]
    apertures = {}
    if wave:
        incident = incident_field(source, geometry, scenario.samples_per_element)
        apertures = {
            side: apply_surface(incident, geometry, coeffs, side)
            for side in (Side.REFLECT, Side.TRANSMIT)
        }
    rows = []
    for rx in scenario.receivers:
        for model in wave:
            gain = compute_wave_gain(
                model, source, rx.position, rx.side, geometry, coeffs,
                apertures[rx.side],
            )
            rows.append(
                (scenario.digest, model, rx.id, sweep_value,
                 gain.power_gain_db, gain.phase_rad)
            )
    if "equivalent_circuit" in models:
        net = scenario.build_port_network()
        powers = equivalent_circuit_power(net)
        v = net.source_voltages
        re_loads = net.loads.real
        active = np.abs(v) > 0
        avail = float(np.sum(np.abs(v[active]) ** 2 / (8.0 * re_loads[active])))
        for i, rx in enumerate(scenario.receivers):
            p = float(powers[i])
            db = 10.0 * math.log10(p / avail) if p > 0 and avail > 0 else -math.inf
            rows.append(
                (scenario.digest, "equivalent_circuit", rx.id, sweep_value,
                 db, float("nan"))
            )
    rows.sort(key=lambda r: (r[3] if r[3] is not None else 0.0, r[2], r[1]))
    return rows


def cmd_validate(scenario: Scenario, args, out_dir: Path) -> int:
    print(f"scenario OK: digest={scenario.digest} "
          f"({scenario.geometry.nx}x{scenario.geometry.ny} elements, "
          f"{len(scenario.receivers)} receivers)")
    return 0


def cmd_gain(scenario: Scenario, args, out_dir: Path) -> int:
    if not scenario.receivers:
        raise ConfigError("gain requires at least one receiver")
    models = _selected_models(scenario, args)
    rows = _gain_rows(scenario, models)
    path = out_dir / "gains.csv"
    _write_csv(path, GAIN_COLUMNS, rows)
    print(f"wrote {path} ({len(rows)} rows)")
    return 0


def cmd_sweep(scenario: Scenario, args, out_dir: Path) -> int:
    if scenario.sweep is None:
        raise ConfigError("sweep requires a sweep block in the scenario")
    if not scenario.receivers:
        raise ConfigError("sweep requires at least one receiver")
    models = _selected_models(scenario, args)
    values = scenario.sweep.values()

    def run_point(value: float):
        point = scenario_with_value(scenario, scenario.sweep.parameter, float(value))
        return _gain_rows(point, models, sweep_value=float(value))

    n_workers = _workers(args)
    if n_workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=n_workers) as pool:
            chunks = list(pool.map(run_point, values))
    else:
        chunks = [run_point(v) for v in values]
    rows = [row for chunk in chunks for row in chunk]
    rows.sort(key=lambda r: (r[3], r[2], r[1]))
    path = out_dir / "sweep.csv"
    _write_csv(path, GAIN_COLUMNS, rows)
    print(f"wrote {path} ({len(rows)} rows)")
    return 0


def cmd_pattern(scenario: Scenario, args, out_dir: Path) -> int:
    method = "ray_tracing"
    if args.models:
        models = [m.strip() for m in args.models.split(",") if m.strip()]
        if len(models) != 1 or models[0] not in WAVE_MODELS:
            raise ConfigError(
                "pattern takes exactly one wave-model method via --models"
            )
        method = models[0]
    resolution = math.radians(args.resolution)
    pattern = radiation_pattern(
        scenario.geometry,
        scenario.coefficients,
        scenario.source,
        resolution,
        method=method,
        samples_per_element=scenario.samples_per_element,
    )
    for side in (Side.REFLECT, Side.TRANSMIT):
        rows = []
        values = pattern.db[side]
        for it, th in enumerate(pattern.theta):
            for ip, ph in enumerate(pattern.phi):
                rows.append((float(th), float(ph), float(values[it, ip])))
        path = out_dir / f"pattern_{side.value}.csv"
        _write_csv(path, PATTERN_COLUMNS, rows)
        note = " (empty hemisphere)" if pattern.empty[side] else ""
        print(f"wrote {path}{note}")
    return 0


def cmd_compare(scenario: Scenario, args, out_dir: Path) -> int:
    if not scenario.receivers:
        raise ConfigError("compare requires at least one receiver")
    if args.models:
        models = tuple(m.strip() for m in args.models.split(","))
        scenario = _with_models(scenario, models)
    report = model_consistency(scenario)
    json_path = out_dir / "consistency.json"
    json_path.write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    rows = []
    for rc in report.receivers:
        for (a, b), dev in sorted(rc.deviation_db.items()):
            rows.append(
                (rc.receiver_id, a, b, dev, rc.deviation_arg_rad[(a, b)])
            )
    csv_path = out_dir / "consistency.csv"
    _write_csv(
        csv_path,
        ("receiver_id", "model_a", "model_b", "deviation_db", "deviation_arg_rad"),
        rows,
    )
    print(f"wrote {json_path} and {csv_path}")
    return 0


def _with_models(scenario: Scenario, models) -> Scenario:
    from .scenario import parse_scenario_dict

    doc = json.loads(json.dumps(scenario.normalized))
    doc["channel_models"] = list(models)
    return parse_scenario_dict(doc, scenario.base_dir)


def cmd_regions(scenario: Scenario, args, out_dir: Path) -> int:
    geometry = scenario.geometry
    wavelength = scenario.wavelength
    doc = {
        "scenario_digest": scenario.digest,
        "reactive_boundary_m": reactive_boundary(geometry, wavelength),
        "fraunhofer_boundary_m": fraunhofer_distance(geometry, wavelength),
        "receivers": [],
    }
    for rx in scenario.receivers:
        distance = float(
            np.linalg.norm(rx.position.as_array() - geometry.origin.as_array())
        )
        region = classify_field_region(distance, geometry, wavelength)
        doc["receivers"].append(
            {
                "id": rx.id,
                "distance_m": distance,
                "region": region.kind.value,
            }
        )
    path = out_dir / "regions.json"
    path.write_text(json.dumps(doc, indent=2, sort_keys=True))
    print(f"wrote {path}")
    return 0


COMMANDS = {
    "gain": cmd_gain,
    "pattern": cmd_pattern,
    "sweep": cmd_sweep,
    "compare": cmd_compare,
    "regions": cmd_regions,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="omnisurf",
        description="Channel and hardware modeling for simultaneously "
        "transmitting and reflecting smart surfaces.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("gain", "end-to-end channel gains per receiver and model"),
        ("pattern", "radiation pattern CSV per hemisphere"),
        ("sweep", "gains over the scenario's sweep block"),
        ("compare", "cross-model consistency report"),
        ("regions", "field-region boundaries and receiver classification"),
        ("validate", "validate a scenario and exit"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--scenario", required=True, help="scenario JSON path")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument(
            "--models", default=None,
            help="comma-separated channel models (pattern: one method)",
        )
        p.add_argument(
            "--resolution", type=float, default=1.0,
            help="pattern angular resolution in degrees (<= 1)",
        )
        p.add_argument(
            "--workers", type=int, default=None,
            help="worker threads (fallback: OMNISURF_WORKERS)",
        )
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code or 0
        return EXIT_CONFIG if code not in (0,) else 0
    started = time.monotonic()
    try:
        scenario = load_scenario(args.scenario)
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        code = COMMANDS[args.command](scenario, args, out_dir)
        _append_manifest(
            out_dir,
            {
                "command": args.command,
                "scenario_digest": scenario.digest,
                "scenario_sha256": hashlib.sha256(
                    Path(args.scenario).read_bytes()
                ).hexdigest(),
                "wall_time_ms": (time.monotonic() - started) * 1000.0,
                "flags": {
                    "models": args.models,
                    "resolution": args.resolution,
                    "workers": args.workers,
                },
            },
        )
        return code
    except OmnisurfError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
