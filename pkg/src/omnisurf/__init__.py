"""Modeling toolkit for surfaces that reflect and transmit simultaneously.

The package covers element-level hardware models (phase shift, load
impedance, boundary-condition susceptibility sheets), several wave-level
channel models plus a mutual-coupling circuit model, field-region and
radiation-pattern analysis, and a scenario-driven CLI.
"""

__version__ = "0.1.0"

from .analysis import (
    FieldRegion,
    FieldRegionKind,
    RadiationPattern,
    SteeringReport,
    classify_field_region,
    compute_wave_gain,
    fraunhofer_distance,
    model_consistency,
    predicted_steering_angle,
    radiation_pattern,
    reactive_boundary,
    verify_steering,
)
from .channel import (
    AngularSpectrum,
    BoundaryKind,
    ChannelGain,
    PortNetwork,
    Side,
    angular_spectrum_of,
    angular_spectrum_point_gain,
    angular_spectrum_propagate,
    apply_surface,
    build_port_network,
    coupling_impedance,
    equivalent_circuit_power,
    fresnel_kirchhoff_gain,
    inverse_angular_spectrum,
    ray_tracing_gain,
    rayleigh_sommerfeld_gain,
    solve_port_currents,
    source_delivered_power,
)
from .core import (
    C0,
    ETA0,
    ApertureDistribution,
    FieldGrid,
    PlaneWaveSource,
    PointSource,
    Position3D,
    SurfaceGeometry,
    Wavelength,
    element_center,
    incident_field,
    sampling_grid,
)
from .errors import (
    AliasingError,
    AlignmentError,
    ConfigError,
    NumericalError,
    OmnisurfError,
    PassivityError,
    PhysicsError,
    SideError,
)
from .hardware import (
    CoefficientTable,
    ElementCoefficients,
    ImpedanceProfile,
    PhaseShiftProfile,
    SusceptibilityProfile,
    coefficients_from_gstc,
    coefficients_from_impedance,
    coefficients_from_phase_shift,
    impedance_from_susceptibility,
    linear_phase_gradient_profile,
    phase_profile_from_coefficients,
    snap_to_table,
    surface_average_susceptibility,
)
from .scenario import Scenario, load_scenario, parse_scenario

__all__ = [name for name in dir() if not name.startswith("_")]
