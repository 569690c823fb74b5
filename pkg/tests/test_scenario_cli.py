import json
import math

import numpy as np
import pytest

from omnisurf import ConfigError, PhysicsError, Side
from omnisurf.cli import main
from omnisurf.scenario import (
    load_impedance_matrix,
    parse_scenario,
    parse_scenario_dict,
    scenario_with_value,
)

BASIC = {
    "name": "basic",
    "wavelength_m": 1.0,
    "surface": {"nx": 3, "ny": 3, "dx_wavelengths": 0.5},
    "receivers": [
        {"id": "r1", "position": [0.0, 0.0, -40.0], "side": "reflect"},
        {"id": "t1", "position": [1.0, 0.0, 40.0], "side": "transmit"},
    ],
    "channel_models": ["ray_tracing", "fresnel_kirchhoff"],
}


def write_scenario(tmp_path, doc, name="scn.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


def test_defaults_match_reference_setup():
    s = parse_scenario_dict({})
    assert s.geometry.nx == 10 and s.geometry.ny == 10
    assert s.wavelength.frequency_hz == pytest.approx(28e9)
    assert s.geometry.dx == pytest.approx(s.wavelength.lambda_m / 2)
    assert s.samples_per_element == 2
    assert "ray_tracing" in s.channel_models


def test_digest_invariant_to_key_order():
    a = parse_scenario(json.dumps(BASIC))
    reordered = json.dumps(dict(reversed(list(BASIC.items()))))
    b = parse_scenario(reordered)
    assert a.digest == b.digest


def test_serialization_round_trip():
    s = parse_scenario(json.dumps(BASIC))
    again = parse_scenario(s.to_json())
    assert again.digest == s.digest
    assert again.geometry == s.geometry


def test_schema_violation_reports_json_path():
    doc = dict(BASIC, surface={"nx": 0, "ny": 3})
    with pytest.raises(ConfigError, match=r"\$\.surface\.nx"):
        parse_scenario(json.dumps(doc))


def test_wavelength_and_frequency_conflict():
    with pytest.raises(ConfigError, match="not both"):
        parse_scenario_dict({"wavelength_m": 1.0, "frequency_hz": 28e9})


def test_receiver_side_consistency_enforced():
    doc = dict(
        BASIC,
        receivers=[{"id": "r1", "position": [0.0, 0.0, 5.0], "side": "reflect"}],
    )
    with pytest.raises(PhysicsError, match="side tag"):
        parse_scenario(json.dumps(doc))


def test_duplicate_receiver_ids_rejected():
    doc = dict(
        BASIC,
        receivers=[
            {"id": "x", "position": [0, 0, -5.0], "side": "reflect"},
            {"id": "x", "position": [0, 0, -6.0], "side": "reflect"},
        ],
    )
    with pytest.raises(ConfigError, match="unique"):
        parse_scenario(json.dumps(doc))


def test_hardware_blocks_resolve():
    n = 9
    doc = dict(BASIC, hardware={"type": "phase_shift", "beta_r": 0.6, "beta_t": 0.6,
                                "phi_r": list(np.linspace(0, 3, n)), "phi_t": 0.0})
    s = parse_scenario(json.dumps(doc))
    assert np.allclose(np.abs(s.coefficients.r), 0.6)

    doc = dict(BASIC, hardware={"type": "impedance", "ye": [0.0, 1e-4], "zm": 0.0})
    s = parse_scenario(json.dumps(doc))
    assert len(s.coefficients) == n

    doc = dict(BASIC, hardware={"type": "coefficient_table",
                                "r": [0.5, 0.1], "t": [0.0, 0.5]})
    s = parse_scenario(json.dumps(doc))
    assert s.coefficients.r[0] == 0.5 + 0.1j


def test_gstc_hardware_block():
    doc = dict(BASIC, hardware={"type": "gstc", "chi_ee": 0.02, "chi_mm": 0.01,
                                "fine_samples_per_element": 4})
    s = parse_scenario(json.dumps(doc))
    assert s.coefficients.lossless


def test_coupled_pin_table_snapping():
    doc = dict(
        BASIC,
        hardware={
            "type": "phase_shift",
            "beta_r": 0.7,
            "beta_t": 0.1,
            "coupled_pin_table": [[[0.7, 0.0], 0.0], [0.0, [0.7, 0.0]]],
        },
    )
    s = parse_scenario(json.dumps(doc))
    assert np.all(s.coefficients.r == 0.7)
    assert np.all(s.coefficients.t == 0.0)


def test_equivalent_circuit_requires_port_network():
    doc = dict(BASIC, channel_models=["equivalent_circuit"])
    with pytest.raises(ConfigError, match="port_network"):
        parse_scenario(json.dumps(doc))


def test_sweep_values_and_path_override():
    doc = dict(
        BASIC,
        sweep={"parameter": "receivers[0].position[2]", "start": -50.0,
               "stop": -30.0, "count": 3},
    )
    s = parse_scenario(json.dumps(doc))
    np.testing.assert_allclose(s.sweep.values(), [-50.0, -40.0, -30.0])
    moved = scenario_with_value(s, s.sweep.parameter, -35.0)
    assert moved.receivers[0].position.z == -35.0
    with pytest.raises(ConfigError, match="not found"):
        scenario_with_value(s, "receivers[9].position[2]", -35.0)


def test_impedance_matrix_file_round_trip(tmp_path):
    z = [[50.0, [0.0, 2.5]], [[0.0, 2.5], 50.0]]
    path = tmp_path / "z.json"
    path.write_text(json.dumps({"z": z}))
    loaded = load_impedance_matrix(path)
    assert loaded[0, 1] == 2.5j
    with pytest.raises(ConfigError, match="not found"):
        load_impedance_matrix(tmp_path / "missing.json")


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

def run_cli(*argv):
    return main(list(argv))


def test_cli_validate_ok(tmp_path, capsys):
    scn = write_scenario(tmp_path, BASIC)
    code = run_cli("validate", "--scenario", str(scn), "--out", str(tmp_path / "o"))
    assert code == 0
    assert "digest=" in capsys.readouterr().out


def test_cli_missing_scenario_is_config_error(tmp_path, capsys):
    code = run_cli("gain", "--scenario", str(tmp_path / "nope.json"))
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_cli_physics_violation_exits_2(tmp_path):
    doc = dict(
        BASIC,
        receivers=[{"id": "r1", "position": [0, 0, 5.0], "side": "reflect"}],
    )
    scn = write_scenario(tmp_path, doc)
    assert run_cli("gain", "--scenario", str(scn), "--out", str(tmp_path / "o")) == 2


def test_cli_numerical_failure_exits_3(tmp_path):
    (tmp_path / "z.json").write_text(json.dumps({"z": [[0, 0], [0, 0]]}))
    doc = {
        "wavelength_m": 1.0,
        "surface": {"nx": 1, "ny": 1, "dx_wavelengths": 0.5},
        "receivers": [{"id": "r1", "position": [0, 0, -5.0], "side": "reflect"}],
        "channel_models": ["equivalent_circuit"],
        "port_network": {
            "z_matrix_file": "z.json",
            "element_loads": 0.0,
            "receiver_loads": 0.0,
        },
    }
    scn = write_scenario(tmp_path, doc)
    assert run_cli("gain", "--scenario", str(scn), "--out", str(tmp_path / "o")) == 3


def test_cli_gain_output_deterministic(tmp_path):
    scn = write_scenario(tmp_path, BASIC)
    for sub in ("a", "b"):
        assert run_cli("gain", "--scenario", str(scn), "--out", str(tmp_path / sub)) == 0
    assert (tmp_path / "a" / "gains.csv").read_bytes() == (
        tmp_path / "b" / "gains.csv"
    ).read_bytes()
    header = (tmp_path / "a" / "gains.csv").read_text().splitlines()[0]
    assert header == "scenario_digest,model,receiver_id,sweep_value,h_abs_db,h_arg_rad"


def test_cli_sweep_workers_do_not_change_output(tmp_path, monkeypatch):
    doc = dict(
        BASIC,
        sweep={"parameter": "receivers[0].position[2]", "start": -60.0,
               "stop": -30.0, "count": 4},
    )
    scn = write_scenario(tmp_path, doc)
    assert run_cli("sweep", "--scenario", str(scn), "--out", str(tmp_path / "w1"),
                   "--workers", "1") == 0
    monkeypatch.setenv("OMNISURF_WORKERS", "4")
    assert run_cli("sweep", "--scenario", str(scn), "--out", str(tmp_path / "w4")) == 0
    assert (tmp_path / "w1" / "sweep.csv").read_bytes() == (
        tmp_path / "w4" / "sweep.csv"
    ).read_bytes()
    rows = (tmp_path / "w1" / "sweep.csv").read_text().splitlines()[1:]
    sweep_vals = [float(r.split(",")[3]) for r in rows]
    assert sweep_vals == sorted(sweep_vals)


def test_cli_pattern_csv_contract(tmp_path):
    scn = write_scenario(tmp_path, BASIC)
    out = tmp_path / "o"
    assert run_cli("pattern", "--scenario", str(scn), "--out", str(out),
                   "--models", "angular_spectrum", "--resolution", "1") == 0
    for side in ("reflect", "transmit"):
        lines = (out / f"pattern_{side}.csv").read_text().splitlines()
        assert lines[0] == "theta_rad,phi_rad,power_db"
        assert len(lines) == 1 + 91 * 360
    # every dB value is <= 0 after normalization
    body = (out / "pattern_reflect.csv").read_text().splitlines()[1:]
    assert max(float(r.split(",")[2]) for r in body) == 0.0


def test_cli_pattern_rejects_model_lists(tmp_path):
    scn = write_scenario(tmp_path, BASIC)
    code = run_cli("pattern", "--scenario", str(scn), "--out", str(tmp_path / "o"),
                   "--models", "ray_tracing,angular_spectrum")
    assert code == 1


def test_cli_compare_and_regions(tmp_path):
    scn = write_scenario(tmp_path, BASIC)
    out = tmp_path / "o"
    assert run_cli("compare", "--scenario", str(scn), "--out", str(out)) == 0
    report = json.loads((out / "consistency.json").read_text())
    assert {r["receiver_id"] for r in report["receivers"]} == {"r1", "t1"}
    assert run_cli("regions", "--scenario", str(scn), "--out", str(out)) == 0
    regions = json.loads((out / "regions.json").read_text())
    assert regions["fraunhofer_boundary_m"] == pytest.approx(2 * 4.5 / 1.0)
    assert regions["receivers"][0]["region"] == "far_field"
    manifest = (out / "run_manifest.jsonl").read_text().splitlines()
    assert len(manifest) == 2
    entry = json.loads(manifest[0])
    assert entry["command"] == "compare"
    assert "wall_time_ms" in entry and "versions" in entry


def test_cli_sweep_without_block_is_config_error(tmp_path):
    scn = write_scenario(tmp_path, BASIC)
    assert run_cli("sweep", "--scenario", str(scn), "--out", str(tmp_path / "o")) == 1
