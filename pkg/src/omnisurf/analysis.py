"""Field-region classification, radiation patterns, beam-steering
verification, and cross-model consistency reporting.

Field-region boundaries follow standard antenna theory:
reactive near field below 0.62 sqrt(D^3 / lambda), far field from the
Fraunhofer distance 2 D^2 / lambda, radiating near field in between.
Both constants are exposed for override.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .channel import (
    ApertureDistribution,
    BoundaryKind,
    ChannelGain,
    Side,
    _diffraction_field_many,
    angular_spectrum_point_gain,
    angular_spectrum_values_at,
    apply_surface,
    equivalent_circuit_power,
    fresnel_kirchhoff_gain,
    ray_tracing_gain,
    ray_tracing_gain_many,
    rayleigh_sommerfeld_gain,
)
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
    ElementCoefficients,
    coefficients_from_phase_shift,
    linear_phase_gradient_profile,
)

WAVE_MODELS = (
    "ray_tracing",
    "fresnel_kirchhoff",
    "rayleigh_sommerfeld",
    "angular_spectrum",
)

FRAUNHOFER_COEFF = 2.0       # d_far = FRAUNHOFER_COEFF * D^2 / lambda
REACTIVE_COEFF = 0.62        # d_reactive = REACTIVE_COEFF * sqrt(D^3 / lambda)
PATTERN_RADIUS_FACTOR = 100  # pattern sphere radius in Fraunhofer distances


class FieldRegionKind(enum.Enum):
    REACTIVE_NEAR_FIELD = "reactive_near_field"
    RADIATING_NEAR_FIELD = "radiating_near_field"
    FAR_FIELD = "far_field"


@dataclass(frozen=True)
class FieldRegion:
    kind: FieldRegionKind
    reactive_boundary_m: float
    fraunhofer_boundary_m: float

    def __post_init__(self):
        if not 0 < self.reactive_boundary_m < self.fraunhofer_boundary_m:
            raise PhysicsError(
                "field-region boundaries must satisfy 0 < reactive < fraunhofer"
            )


def fraunhofer_distance(geometry: SurfaceGeometry, wavelength: Wavelength) -> float:
    """Far-field boundary 2 D^2 / lambda with D the aperture diagonal."""
    d = geometry.diagonal
    return FRAUNHOFER_COEFF * d * d / wavelength.lambda_m


def reactive_boundary(geometry: SurfaceGeometry, wavelength: Wavelength) -> float:
    """Reactive near-field boundary 0.62 sqrt(D^3 / lambda)."""
    d = geometry.diagonal
    return REACTIVE_COEFF * math.sqrt(d**3 / wavelength.lambda_m)


def classify_field_region(
    distance: float, geometry: SurfaceGeometry, wavelength: Wavelength
) -> FieldRegion:
    """Classify a radial distance from the surface into the three regions.

    The far field is a closed lower bound: d = 2 D^2 / lambda is far field.
    """
    if distance <= 0:
        raise ConfigError("distance must be positive")
    r_re = reactive_boundary(geometry, wavelength)
    r_ff = fraunhofer_distance(geometry, wavelength)
    if distance >= r_ff:
        kind = FieldRegionKind.FAR_FIELD
    elif distance < r_re:
        kind = FieldRegionKind.REACTIVE_NEAR_FIELD
    else:
        kind = FieldRegionKind.RADIATING_NEAR_FIELD
    return FieldRegion(kind, r_re, r_ff)


# ---------------------------------------------------------------------------
# Radiation patterns
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RadiationPattern:
    """Normalized power pattern over both hemispheres.

    ``db[side]`` holds 10 log10(p / p_peak) on the (theta, phi) grid; the
    global peak over both hemispheres is exactly 0 dB. An all-zero
    hemisphere is stored as -inf and flagged in ``empty``.
    """

    theta: np.ndarray
    phi: np.ndarray
    db: dict
    resolution: float
    peak_side: Side
    peak_theta: float
    peak_phi: float
    empty: dict

    def argmax(self, side: Side) -> tuple[float, float]:
        """(theta, phi) of the hemisphere maximum; ties resolve to the
        lowest theta, then the lowest phi."""
        values = self.db[side]
        idx = int(np.argmax(values))
        it, ip = divmod(idx, values.shape[1])
        return float(self.theta[it]), float(self.phi[ip])

    def principal_cut(self, side: Side, phi: float = 0.0):
        """Signed-theta cut through phi and phi + pi.

        Returns (signed_theta, db) with theta < 0 mapped to the phi + pi
        half-plane.
        """
        ip_pos = int(np.argmin(np.abs(self.phi - phi % (2 * np.pi))))
        ip_neg = int(np.argmin(np.abs(self.phi - (phi + np.pi) % (2 * np.pi))))
        values = self.db[side]
        neg = values[:0:-1, ip_neg]
        pos = values[:, ip_pos]
        signed = np.concatenate([-self.theta[:0:-1], self.theta])
        return signed, np.concatenate([neg, pos])


def _pattern_points(
    geometry: SurfaceGeometry, radius: float, theta: np.ndarray, phi: np.ndarray,
    z_sign: float,
) -> np.ndarray:
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    st = np.sin(tt)
    pts = np.empty((tt.size, 3))
    pts[:, 0] = geometry.origin.x + radius * (st * np.cos(pp)).ravel()
    pts[:, 1] = geometry.origin.y + radius * (st * np.sin(pp)).ravel()
    pts[:, 2] = geometry.origin.z + z_sign * radius * np.cos(tt).ravel()
    return pts


def _hemisphere_power(
    method: str,
    side: Side,
    geometry: SurfaceGeometry,
    coeffs: ElementCoefficients,
    illumination: Source,
    theta: np.ndarray,
    phi: np.ndarray,
    radius: float,
    aperture: ApertureDistribution,
) -> np.ndarray:
    z_sign = -1.0 if side is Side.REFLECT else 1.0
    if method == "angular_spectrum":
        k = illumination.wavelength.k
        tt, pp = np.meshgrid(theta, phi, indexing="ij")
        kx = k * (np.sin(tt) * np.cos(pp)).ravel()
        ky = k * (np.sin(tt) * np.sin(pp)).ravel()
        a = angular_spectrum_values_at(aperture, kx, ky)
        return (np.abs(a) ** 2).reshape(tt.shape)
    pts = _pattern_points(geometry, radius, theta, phi, z_sign)
    if method == "ray_tracing":
        h = ray_tracing_gain_many(illumination, pts, geometry, coeffs, side)
    elif method == "fresnel_kirchhoff":
        h = _diffraction_field_many(illumination, pts, aperture, "fk")
    elif method == "rayleigh_sommerfeld":
        h = _diffraction_field_many(
            illumination, pts, aperture, "rs", BoundaryKind.DIRICHLET
        )
    else:
        raise ConfigError(f"unknown radiation-pattern method: {method!r}")
    return (np.abs(h) ** 2).reshape(theta.size, phi.size)


def radiation_pattern(
    geometry: SurfaceGeometry,
    coeffs: ElementCoefficients,
    illumination: Source,
    angular_resolution: float,
    method: str = "ray_tracing",
    samples_per_element: int = 2,
    radius: float | None = None,
) -> RadiationPattern:
    """Normalized power pattern over both hemispheres on a far-field
    sphere (default radius 100 Fraunhofer distances).

    ``angular_resolution`` is in radians and must not exceed 1 degree.
    """
    if method not in WAVE_MODELS:
        raise ConfigError(f"unknown radiation-pattern method: {method!r}")
    if angular_resolution > math.radians(1.0) + 1e-12:
        raise ConfigError("angular resolution must be <= 1 degree")
    wavelength = illumination.wavelength
    if radius is None:
        radius = PATTERN_RADIUS_FACTOR * fraunhofer_distance(geometry, wavelength)
    n_theta = int(round((np.pi / 2) / angular_resolution)) + 1
    theta = np.arange(n_theta) * angular_resolution
    theta[-1] = min(theta[-1], np.pi / 2)
    n_phi = int(round(2 * np.pi / angular_resolution))
    phi = np.arange(n_phi) * angular_resolution

    incident = incident_field(illumination, geometry, samples_per_element)
    power = {}
    for side in (Side.REFLECT, Side.TRANSMIT):
        aperture = apply_surface(incident, geometry, coeffs, side)
        power[side] = _hemisphere_power(
            method, side, geometry, coeffs, illumination, theta, phi, radius, aperture
        )

    peak = max(float(power[s].max()) for s in power)
    if peak <= 0.0:
        raise PhysicsError("surface radiates no power into either hemisphere")
    db = {}
    empty = {}
    peak_side = None
    for side, p in power.items():
        hemi_peak = float(p.max())
        empty[side] = hemi_peak <= 0.0
        with np.errstate(divide="ignore"):
            db[side] = 10.0 * np.log10(p / peak)
        if hemi_peak == peak and peak_side is None:
            peak_side = side
    idx = int(np.argmax(db[peak_side]))
    it, ip = divmod(idx, phi.size)
    return RadiationPattern(
        theta=theta,
        phi=phi,
        db=db,
        resolution=angular_resolution,
        peak_side=peak_side,
        peak_theta=float(theta[it]),
        peak_phi=float(phi[ip]),
        empty=empty,
    )


# ---------------------------------------------------------------------------
# Beam steering
# ---------------------------------------------------------------------------

def predicted_steering_angle(
    incident_angle: float, phase_gradient: float, wavelength: Wavelength
) -> float:
    """Generalized Snell's law for the outgoing beam direction.

    With the package's e^{-j k r} convention a surface phase phi(x) adds
    -dphi/dx to the transverse wavenumber, so
    sin(theta_out) = sin(theta_in) - (1/k) dphi/dx
    (same form on both sides, each with its own gradient).
    """
    s = math.sin(incident_angle) - phase_gradient / wavelength.k
    if abs(s) > 1.0:
        raise PhysicsError(
            f"|sin(theta_out)| = {abs(s):.4g} > 1: steered beam is evanescent"
        )
    return math.asin(s)


@dataclass(frozen=True)
class SteeringReport:
    side: Side
    method: str
    predicted_rad: float
    measured_rad: float
    deviation_rad: float
    bin_rad: float

    @property
    def within_one_bin(self) -> bool:
        return self.deviation_rad <= self.bin_rad + 1e-9


def verify_steering(
    geometry: SurfaceGeometry,
    wavelength: Wavelength,
    incident_angle: float,
    target_angle: float,
    method: str = "ray_tracing",
    side: Side = Side.REFLECT,
    angular_resolution: float = math.radians(1.0),
    samples_per_element: int = 2,
) -> SteeringReport:
    """Build a linear phase-gradient profile for ``target_angle``, compute
    the pattern, and compare the argmax with the generalized-Snell
    prediction in the steering (x-z) plane."""
    profile = linear_phase_gradient_profile(
        geometry, wavelength, target_angle, target_angle
    )
    coeffs = coefficients_from_phase_shift(profile)
    gradient = -wavelength.k * math.sin(target_angle)
    predicted = predicted_steering_angle(incident_angle, gradient, wavelength)
    direction = (math.sin(incident_angle), 0.0, math.cos(incident_angle))
    illumination = PlaneWaveSource(1.0 + 0.0j, direction, wavelength)
    pattern = radiation_pattern(
        geometry,
        coeffs,
        illumination,
        angular_resolution,
        method=method,
        samples_per_element=samples_per_element,
    )
    signed_theta, cut_db = pattern.principal_cut(side, 0.0)
    measured = float(signed_theta[int(np.argmax(cut_db))])
    return SteeringReport(
        side=side,
        method=method,
        predicted_rad=predicted,
        measured_rad=measured,
        deviation_rad=abs(measured - predicted),
        bin_rad=angular_resolution,
    )


# ---------------------------------------------------------------------------
# Cross-model consistency
# ---------------------------------------------------------------------------

@dataclass
class ModelResult:
    model: str
    h_abs_db: float | None = None
    h_arg_rad: float | None = None
    flags: list[str] = field(default_factory=list)
    error: str | None = None
    power_based: bool = False


@dataclass
class ReceiverConsistency:
    receiver_id: str
    region: str
    results: dict
    deviation_db: dict
    deviation_arg_rad: dict


@dataclass
class ConsistencyReport:
    scenario_digest: str
    receivers: list

    def to_dict(self) -> dict:
        return {
            "scenario_digest": self.scenario_digest,
            "receivers": [
                {
                    "receiver_id": rc.receiver_id,
                    "region": rc.region,
                    "models": {
                        name: {
                            "h_abs_db": res.h_abs_db,
                            "h_arg_rad": res.h_arg_rad,
                            "flags": res.flags,
                            "error": res.error,
                            "power_based": res.power_based,
                        }
                        for name, res in rc.results.items()
                    },
                    "deviation_db": {
                        f"{a}|{b}": v for (a, b), v in rc.deviation_db.items()
                    },
                    "deviation_arg_rad": {
                        f"{a}|{b}": v for (a, b), v in rc.deviation_arg_rad.items()
                    },
                }
                for rc in self.receivers
            ],
        }


def _wrap_angle(a: float) -> float:
    return abs(math.atan2(math.sin(a), math.cos(a)))


def compute_wave_gain(
    model: str,
    source: Source,
    receiver_pos: Position3D,
    side: Side,
    geometry: SurfaceGeometry,
    coeffs: ElementCoefficients,
    aperture: ApertureDistribution,
) -> ChannelGain:
    """Dispatch a single wave-model gain computation."""
    if model == "ray_tracing":
        return ray_tracing_gain(source, receiver_pos, geometry, coeffs, side)
    if model == "fresnel_kirchhoff":
        return fresnel_kirchhoff_gain(source, receiver_pos, aperture)
    if model == "rayleigh_sommerfeld":
        return rayleigh_sommerfeld_gain(
            source, receiver_pos, aperture, BoundaryKind.DIRICHLET
        )
    if model == "angular_spectrum":
        return angular_spectrum_point_gain(source, receiver_pos, aperture)
    raise ConfigError(f"unknown channel model: {model!r}")


def model_consistency(scenario) -> ConsistencyReport:
    """Run every applicable channel model on the identical scenario and
    tabulate the pairwise |h| (dB) and arg(h) deviations per receiver.

    Per-model failures are recorded in the corresponding cell rather than
    aborting the report. Far-field-only models (ray tracing, angular
    spectrum point evaluation) are flagged out-of-validity for receivers
    that are not in the far field.
    """
    source = scenario.source
    geometry = scenario.geometry
    coeffs = scenario.coefficients
    wavelength = scenario.wavelength
    incident = incident_field(source, geometry, scenario.samples_per_element)
    apertures = {
        side: apply_surface(incident, geometry, coeffs, side)
        for side in (Side.REFLECT, Side.TRANSMIT)
    }
    wave_models = [m for m in scenario.channel_models if m in WAVE_MODELS]
    ec_requested = "equivalent_circuit" in scenario.channel_models
    ec_powers = None
    ec_error = None
    if ec_requested and scenario.port_network is not None:
        try:
            net = scenario.build_port_network()
            ec_powers = equivalent_circuit_power(net)
            v = net.source_voltages
            re_loads = net.loads.real
            active = np.abs(v) > 0
            if not np.any(active) or np.any(re_loads[active] <= 0):
                raise PhysicsError(
                    "available source power undefined for lossless source loads"
                )
            ec_avail = float(
                np.sum(np.abs(v[active]) ** 2 / (8.0 * re_loads[active]))
            )
        except OmnisurfError as exc:
            ec_powers = None
            ec_error = str(exc)

    receivers = []
    for idx, rx in enumerate(scenario.receivers):
        distance = float(
            np.linalg.norm(rx.position.as_array() - geometry.origin.as_array())
        )
        region = classify_field_region(distance, geometry, wavelength)
        results: dict[str, ModelResult] = {}
        for model in wave_models:
            res = ModelResult(model=model)
            try:
                gain = compute_wave_gain(
                    model, source, rx.position, rx.side, geometry, coeffs,
                    apertures[rx.side],
                )
                res.h_abs_db = gain.power_gain_db
                res.h_arg_rad = gain.phase_rad
            except OmnisurfError as exc:
                res.error = str(exc)
            if (
                model in ("ray_tracing", "angular_spectrum")
                and region.kind is not FieldRegionKind.FAR_FIELD
            ):
                res.flags.append(
                    "far-field model; receiver is in the "
                    f"{region.kind.value.replace('_', ' ')}"
                )
            results[model] = res
        if ec_requested:
            res = ModelResult(model="equivalent_circuit", power_based=True)
            if ec_powers is not None:
                p = float(ec_powers[idx])
                res.h_abs_db = (
                    10.0 * math.log10(p / ec_avail) if p > 0 else -math.inf
                )
            else:
                res.error = ec_error or "no port network provided"
            results["equivalent_circuit"] = res

        dev_db: dict[tuple[str, str], float | None] = {}
        dev_arg: dict[tuple[str, str], float | None] = {}
        names = list(results)
        for i, a in enumerate(names):
            for b in names[i + 1 :]:
                ra, rb = results[a], results[b]
                if ra.h_abs_db is None or rb.h_abs_db is None:
                    dev_db[(a, b)] = None
                    dev_arg[(a, b)] = None
                    continue
                dev_db[(a, b)] = abs(ra.h_abs_db - rb.h_abs_db)
                if ra.h_arg_rad is None or rb.h_arg_rad is None:
                    dev_arg[(a, b)] = None
                else:
                    dev_arg[(a, b)] = _wrap_angle(ra.h_arg_rad - rb.h_arg_rad)
        receivers.append(
            ReceiverConsistency(
                receiver_id=rx.id,
                region=region.kind.value,
                results=results,
                deviation_db=dev_db,
                deviation_arg_rad=dev_arg,
            )
        )
    return ConsistencyReport(scenario_digest=scenario.digest, receivers=receivers)
