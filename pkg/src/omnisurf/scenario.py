"""Scenario file parsing, validation, and serialization.

Scenarios are UTF-8 JSON documents. Complex numbers are written either
as a plain number (purely real) or as a two-element [re, im] array.
Defaults mirror the reference setup: a 10x10 surface at 0.5 lambda
pitch, 28 GHz carrier, broadside unit plane wave.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema
import numpy as np

from .channel import PortNetwork, Side, build_port_network
from .core import (
    PlaneWaveSource,
    PointSource,
    Position3D,
    Source,
    SurfaceGeometry,
    Wavelength,
    incident_field,
)
from .errors import ConfigError, OmnisurfError, PhysicsError
from .hardware import (
    CoefficientTable,
    ElementCoefficients,
    ImpedanceProfile,
    PhaseShiftProfile,
    SusceptibilityProfile,
    coefficients_from_gstc,
    coefficients_from_impedance,
    coefficients_from_phase_shift,
    snap_to_table,
)

DEFAULT_FREQUENCY_HZ = 28e9
DEFAULT_NX = DEFAULT_NY = 10
DEFAULT_PITCH_WAVELENGTHS = 0.5
DEFAULT_MODELS = [
    "ray_tracing",
    "fresnel_kirchhoff",
    "rayleigh_sommerfeld",
    "angular_spectrum",
]
ALL_MODELS = DEFAULT_MODELS + ["equivalent_circuit"]

_COMPLEX = {
    "oneOf": [
        {"type": "number"},
        {
            "type": "array",
            "items": {"type": "number"},
            "minItems": 2,
            "maxItems": 2,
        },
    ]
}
# anyOf, not oneOf: a plain [re, im] pair also matches the list branch
_COMPLEX_OR_LIST = {"anyOf": [_COMPLEX, {"type": "array", "items": _COMPLEX}]}
_REAL_OR_LIST = {
    "anyOf": [{"type": "number"}, {"type": "array", "items": {"type": "number"}}]
}

SCENARIO_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string"},
        "wavelength_m": {"type": "number", "exclusiveMinimum": 0},
        "frequency_hz": {"type": "number", "exclusiveMinimum": 0},
        "surface": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "nx": {"type": "integer", "minimum": 1},
                "ny": {"type": "integer", "minimum": 1},
                "dx_m": {"type": "number", "exclusiveMinimum": 0},
                "dy_m": {"type": "number", "exclusiveMinimum": 0},
                "dx_wavelengths": {"type": "number", "exclusiveMinimum": 0},
                "dy_wavelengths": {"type": "number", "exclusiveMinimum": 0},
                "origin": {
                    "type": "array",
                    "items": {"type": "number"},
                    "minItems": 3,
                    "maxItems": 3,
                },
            },
        },
        "hardware": {
            "type": "object",
            "properties": {
                "type": {
                    "enum": ["phase_shift", "impedance", "gstc", "coefficient_table"]
                },
                "beta_r": _REAL_OR_LIST,
                "beta_t": _REAL_OR_LIST,
                "phi_r": _REAL_OR_LIST,
                "phi_t": _REAL_OR_LIST,
                "ye": _COMPLEX_OR_LIST,
                "zm": _COMPLEX_OR_LIST,
                "chi_ee": _COMPLEX_OR_LIST,
                "chi_mm": _COMPLEX_OR_LIST,
                "fine_samples_per_element": {"type": "integer", "minimum": 4},
                "r": _COMPLEX_OR_LIST,
                "t": _COMPLEX_OR_LIST,
                "coupled_pin_table": {
                    "type": "array",
                    "items": {
                        "type": "array",
                        "items": _COMPLEX,
                        "minItems": 2,
                        "maxItems": 2,
                    },
                    "minItems": 1,
                },
            },
            "required": ["type"],
            "additionalProperties": False,
        },
        "source": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "type": {"enum": ["plane_wave", "point"]},
                "amplitude": _COMPLEX,
                "direction": {
                    "type": "array",
                    "items": {"type": "number"},
                    "minItems": 3,
                    "maxItems": 3,
                },
                "position": {
                    "type": "array",
                    "items": {"type": "number"},
                    "minItems": 3,
                    "maxItems": 3,
                },
            },
            "required": ["type"],
        },
        "receivers": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "string"},
                    "position": {
                        "type": "array",
                        "items": {"type": "number"},
                        "minItems": 3,
                        "maxItems": 3,
                    },
                    "side": {"enum": ["reflect", "transmit"]},
                },
                "required": ["position", "side"],
            },
        },
        "channel_models": {
            "type": "array",
            "items": {"enum": ALL_MODELS},
            "minItems": 1,
        },
        "sampling": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "samples_per_element": {"type": "integer", "minimum": 1}
            },
        },
        "port_network": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "z_matrix_file": {"type": "string"},
                "self_impedance": _COMPLEX,
                "dipole_length_m": {"type": "number", "exclusiveMinimum": 0},
                "element_loads": _COMPLEX_OR_LIST,
                "receiver_loads": _COMPLEX_OR_LIST,
                "source_voltages": {
                    "oneOf": [
                        {"const": "from_incident"},
                        {"type": "array", "items": _COMPLEX},
                    ]
                },
            },
        },
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "parameter": {"type": "string"},
                "start": {"type": "number"},
                "stop": {"type": "number"},
                "count": {"type": "integer", "minimum": 2},
                "scale": {"enum": ["linear", "log"]},
            },
            "required": ["parameter", "start", "stop", "count"],
        },
    },
}

_VALIDATOR = jsonschema.Draft202012Validator(SCENARIO_SCHEMA)


def _parse_complex(value) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    return complex(float(value[0]), float(value[1]))


def _parse_complex_vector(value, n: int, name: str) -> np.ndarray:
    if isinstance(value, (int, float)) or (
        isinstance(value, list)
        and len(value) == 2
        and all(isinstance(v, (int, float)) for v in value)
    ):
        return np.full(n, _parse_complex(value), dtype=complex)
    arr = np.array([_parse_complex(v) for v in value], dtype=complex)
    if arr.size != n:
        raise ConfigError(f"hardware.{name}: expected {n} entries, got {arr.size}")
    return arr


def _parse_real_vector(value, n: int, name: str) -> np.ndarray:
    if isinstance(value, (int, float)):
        return np.full(n, float(value))
    arr = np.asarray(value, dtype=float)
    if arr.size != n:
        raise ConfigError(f"hardware.{name}: expected {n} entries, got {arr.size}")
    return arr


def _encode_complex(value: complex):
    if value.imag == 0:
        return value.real
    return [value.real, value.imag]


@dataclass(frozen=True)
class Receiver:
    id: str
    position: Position3D
    side: Side


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    start: float
    stop: float
    count: int
    scale: str = "linear"

    def values(self) -> np.ndarray:
        if self.scale == "log":
            if self.start <= 0 or self.stop <= 0:
                raise ConfigError("log sweeps require positive endpoints")
            return np.geomspace(self.start, self.stop, self.count)
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True, eq=False)
class Scenario:
    """A fully validated simulation scenario."""

    name: str
    wavelength: Wavelength
    geometry: SurfaceGeometry
    source: Source
    coefficients: ElementCoefficients
    hardware_kind: str
    receivers: tuple
    channel_models: tuple
    samples_per_element: int
    sweep: SweepSpec | None
    port_network: dict | None
    base_dir: Path
    normalized: dict = field(repr=False, default_factory=dict)

    @property
    def digest(self) -> str:
        payload = json.dumps(self.normalized, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    def to_json(self) -> str:
        return json.dumps(self.normalized, indent=2, sort_keys=True)

    def build_port_network(self) -> PortNetwork:
        """Resolve the scenario's port-network block into a PortNetwork."""
        if self.port_network is None:
            raise ConfigError("scenario has no port_network block")
        blk = self.port_network
        rx_positions = [r.position for r in self.receivers]
        n = self.geometry.num_elements
        m = len(rx_positions)
        dipole_length = blk.get("dipole_length_m") or self.wavelength.lambda_m / 8.0
        el = _parse_complex_vector(blk.get("element_loads", 50.0), n, "element_loads")
        rl = _parse_complex_vector(
            blk.get("receiver_loads", 50.0), m, "receiver_loads"
        ) if m else np.zeros(0, dtype=complex)

        v_spec = blk.get("source_voltages", "from_incident")
        if v_spec == "from_incident":
            inc = incident_field(self.source, self.geometry, 1)
            v = np.concatenate(
                [inc.values.reshape(-1) * dipole_length, np.zeros(m, dtype=complex)]
            )
        else:
            v = np.array([_parse_complex(x) for x in v_spec], dtype=complex)
            if v.size != n + m:
                raise ConfigError(
                    f"source_voltages must have {n + m} entries, got {v.size}"
                )

        if "z_matrix_file" in blk:
            z = load_impedance_matrix(self.base_dir / blk["z_matrix_file"])
            if z.shape[0] != n + m:
                raise ConfigError(
                    f"impedance matrix is {z.shape[0]}x{z.shape[0]}, "
                    f"but the scenario has {n + m} ports"
                )
            return PortNetwork(z, v, el, rl)
        return build_port_network(
            self.geometry,
            rx_positions,
            self.wavelength,
            self_impedance=_parse_complex(blk.get("self_impedance", 50.0)),
            dipole_length=dipole_length,
            source_voltages=v,
            element_loads=el,
            receiver_loads=rl,
        )


def load_impedance_matrix(path: Path) -> np.ndarray:
    """Read an externally supplied impedance matrix.

    Format: JSON object {"z": [[entry, ...], ...]} where each entry is a
    number or a [re, im] pair.
    """
    try:
        doc = json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"impedance matrix file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"impedance matrix file {path}: {exc}") from exc
    if not isinstance(doc, dict) or "z" not in doc:
        raise ConfigError(f"impedance matrix file {path} must contain a 'z' key")
    rows = doc["z"]
    z = np.array([[_parse_complex(e) for e in row] for row in rows], dtype=complex)
    if z.ndim != 2 or z.shape[0] != z.shape[1]:
        raise ConfigError("impedance matrix must be square")
    return z


def _resolve_coefficients(
    hw: dict, geometry: SurfaceGeometry, wavelength: Wavelength
) -> ElementCoefficients:
    n = geometry.num_elements
    kind = hw["type"]
    if kind == "phase_shift":
        profile = PhaseShiftProfile(
            beta_r=_parse_real_vector(hw.get("beta_r", 2**-0.5), n, "beta_r"),
            beta_t=_parse_real_vector(hw.get("beta_t", 2**-0.5), n, "beta_t"),
            phi_r=_parse_real_vector(hw.get("phi_r", 0.0), n, "phi_r"),
            phi_t=_parse_real_vector(hw.get("phi_t", 0.0), n, "phi_t"),
        )
        coeffs = coefficients_from_phase_shift(profile)
    elif kind == "impedance":
        profile = ImpedanceProfile(
            ye=_parse_complex_vector(hw.get("ye", 0.0), n, "ye"),
            zm=_parse_complex_vector(hw.get("zm", 0.0), n, "zm"),
        )
        coeffs = coefficients_from_impedance(profile)
    elif kind == "gstc":
        s = int(hw.get("fine_samples_per_element", 4))
        shape = (geometry.ny * s, geometry.nx * s)

        def expand(value, name):
            if isinstance(value, list) and value and isinstance(value[0], list) and (
                len(value[0]) != 2 or isinstance(value[0][0], list)
            ):
                arr = np.array(
                    [[_parse_complex(e) for e in row] for row in value], dtype=complex
                )
            else:
                arr = np.full(shape, _parse_complex(value), dtype=complex)
            if arr.shape != shape:
                raise ConfigError(
                    f"hardware.{name}: expected shape {shape}, got {arr.shape}"
                )
            return arr

        profile = SusceptibilityProfile(
            chi_ee=expand(hw.get("chi_ee", 0.0), "chi_ee"),
            chi_mm=expand(hw.get("chi_mm", 0.0), "chi_mm"),
        )
        coeffs = coefficients_from_gstc(profile, geometry, wavelength)
    else:  # coefficient_table
        coeffs = ElementCoefficients(
            r=_parse_complex_vector(hw.get("r", 0.0), n, "r"),
            t=_parse_complex_vector(hw.get("t", 0.0), n, "t"),
        )
    if "coupled_pin_table" in hw:
        pairs = np.array(
            [[_parse_complex(p[0]), _parse_complex(p[1])] for p in hw["coupled_pin_table"]],
            dtype=complex,
        )
        coeffs = snap_to_table(coeffs, CoefficientTable(pairs))
    return coeffs


def parse_scenario_dict(doc: dict, base_dir: Path | None = None) -> Scenario:
    """Validate and resolve a scenario document."""
    errors = sorted(_VALIDATOR.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        path = "$" + "".join(
            f"[{p}]" if isinstance(p, int) else f".{p}" for p in e.absolute_path
        )
        raise ConfigError(f"scenario schema violation at {path}: {e.message}")

    if "wavelength_m" in doc and "frequency_hz" in doc:
        raise ConfigError(
            "specify either wavelength_m or frequency_hz, not both"
        )
    if "wavelength_m" in doc:
        wavelength = Wavelength(doc["wavelength_m"])
    else:
        wavelength = Wavelength.from_frequency(
            doc.get("frequency_hz", DEFAULT_FREQUENCY_HZ)
        )

    surf = doc.get("surface", {})
    lam = wavelength.lambda_m
    if ("dx_m" in surf and "dx_wavelengths" in surf) or (
        "dy_m" in surf and "dy_wavelengths" in surf
    ):
        raise ConfigError("specify surface pitch in meters or wavelengths, not both")
    dx = surf.get("dx_m", surf.get("dx_wavelengths", DEFAULT_PITCH_WAVELENGTHS) * lam)
    if "dy_m" in surf:
        dy = surf["dy_m"]
    elif "dy_wavelengths" in surf:
        dy = surf["dy_wavelengths"] * lam
    else:
        dy = dx
    origin = Position3D.from_sequence(surf.get("origin", (0.0, 0.0, 0.0)))
    geometry = SurfaceGeometry(
        nx=surf.get("nx", DEFAULT_NX),
        ny=surf.get("ny", DEFAULT_NY),
        dx=dx,
        dy=dy,
        origin=origin,
    )

    src = doc.get("source", {"type": "plane_wave"})
    amplitude = _parse_complex(src.get("amplitude", 1.0))
    if src["type"] == "plane_wave":
        direction = src.get("direction", (0.0, 0.0, 1.0))
        d = np.asarray(direction, dtype=float)
        norm = float(np.linalg.norm(d))
        if norm == 0:
            raise PhysicsError("plane wave direction must be nonzero")
        source: Source = PlaneWaveSource(amplitude, tuple(d / norm), wavelength)
    else:
        if "position" not in src:
            raise ConfigError("point source requires a position")
        pos = Position3D.from_sequence(src["position"])
        if pos.z >= 0:
            raise PhysicsError("point source must lie in the z < 0 half-space")
        source = PointSource(pos, amplitude, wavelength)

    coefficients = _resolve_coefficients(
        doc.get("hardware", {"type": "phase_shift"}), geometry, wavelength
    )

    receivers = []
    for i, r in enumerate(doc.get("receivers", [])):
        side = Side(r["side"])
        pos = Position3D.from_sequence(r["position"])
        want_negative = side is Side.REFLECT
        if pos.z == 0 or (pos.z < 0) != want_negative:
            raise PhysicsError(
                f"receiver {i}: side tag '{side.value}' inconsistent with z = {pos.z}"
            )
        receivers.append(Receiver(r.get("id", f"rx{i}"), pos, side))
    ids = [r.id for r in receivers]
    if len(set(ids)) != len(ids):
        raise ConfigError("receiver ids must be unique")

    models = tuple(doc.get("channel_models", DEFAULT_MODELS))
    if "equivalent_circuit" in models and "port_network" not in doc:
        raise ConfigError(
            "channel model 'equivalent_circuit' requires a port_network block"
        )
    sweep = None
    if "sweep" in doc:
        s = doc["sweep"]
        sweep = SweepSpec(
            parameter=s["parameter"],
            start=float(s["start"]),
            stop=float(s["stop"]),
            count=int(s["count"]),
            scale=s.get("scale", "linear"),
        )

    normalized = {
        "name": doc.get("name", "scenario"),
        "wavelength_m": wavelength.lambda_m,
        "surface": {
            "nx": geometry.nx,
            "ny": geometry.ny,
            "dx_m": geometry.dx,
            "dy_m": geometry.dy,
            "origin": [origin.x, origin.y, origin.z],
        },
        "hardware": doc.get("hardware", {"type": "phase_shift"}),
        "source": src,
        "receivers": [
            {"id": r.id, "position": [r.position.x, r.position.y, r.position.z],
             "side": r.side.value}
            for r in receivers
        ],
        "channel_models": list(models),
        "sampling": {
            "samples_per_element": doc.get("sampling", {}).get(
                "samples_per_element", 2
            )
        },
    }
    if "port_network" in doc:
        normalized["port_network"] = doc["port_network"]
    if sweep is not None:
        normalized["sweep"] = {
            "parameter": sweep.parameter,
            "start": sweep.start,
            "stop": sweep.stop,
            "count": sweep.count,
            "scale": sweep.scale,
        }

    return Scenario(
        name=normalized["name"],
        wavelength=wavelength,
        geometry=geometry,
        source=source,
        coefficients=coefficients,
        hardware_kind=doc.get("hardware", {"type": "phase_shift"})["type"],
        receivers=tuple(receivers),
        channel_models=models,
        samples_per_element=normalized["sampling"]["samples_per_element"],
        sweep=sweep,
        port_network=doc.get("port_network"),
        base_dir=base_dir or Path.cwd(),
        normalized=normalized,
    )


def parse_scenario(text: str, base_dir: Path | None = None) -> Scenario:
    """Parse a scenario JSON document into a validated Scenario."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"scenario is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("scenario document must be a JSON object")
    return parse_scenario_dict(doc, base_dir)


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError as exc:
        raise ConfigError(f"scenario file not found: {path}") from exc
    return parse_scenario(text, base_dir=path.parent)


_PATH_TOKEN = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)|\[(\d+)\]")


def _path_tokens(path: str) -> list:
    tokens = []
    pos = 0
    for m in _PATH_TOKEN.finditer(path.replace(".", " ")):
        tokens.append(m.group(1) if m.group(1) is not None else int(m.group(2)))
        pos = m.end()
    if not tokens:
        raise ConfigError(f"invalid sweep parameter path: {path!r}")
    return tokens


def set_path(doc: dict, path: str, value):
    """Set a dotted/indexed path such as 'receivers[0].position[2]'."""
    tokens = _path_tokens(path)
    node = doc
    try:
        for tok in tokens[:-1]:
            node = node[tok]
        node[tokens[-1]] = value
    except (KeyError, IndexError, TypeError) as exc:
        raise ConfigError(f"sweep parameter path {path!r} not found: {exc}") from exc


def scenario_with_value(scenario: Scenario, path: str, value: float) -> Scenario:
    """Rebuild the scenario with one parameter replaced (used by sweeps)."""
    doc = json.loads(json.dumps(scenario.normalized))
    doc.pop("sweep", None)
    set_path(doc, path, value)
    return parse_scenario_dict(doc, scenario.base_dir)
