"""Geometry, sources, field containers, and global conventions.

Conventions used throughout the package:

* time dependence e^{+j w t}; outgoing waves carry e^{-j k r},
* free-space scalar Green's function G(r) = e^{-j k r} / (4 pi r),
* the surface lies in the z = 0 plane; sources illuminate from z < 0
  (the reflection half-space); z > 0 is the transmission half-space,
* all fields are scalar complex amplitudes (single polarization).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, SideError

C0 = 299792458.0           # speed of light, m/s
ETA0 = 376.730313668       # free-space wave impedance, ohms


@dataclass(frozen=True)
class Wavelength:
    """Free-space wavelength with derived wavenumber and frequency."""

    lambda_m: float

    def __post_init__(self):
        if not (self.lambda_m > 0 and math.isfinite(self.lambda_m)):
            raise ConfigError(f"wavelength must be positive, got {self.lambda_m}")

    @property
    def k(self) -> float:
        """Wavenumber 2 pi / lambda, rad/m."""
        return 2.0 * math.pi / self.lambda_m

    @property
    def frequency_hz(self) -> float:
        return C0 / self.lambda_m

    @classmethod
    def from_frequency(cls, frequency_hz: float) -> "Wavelength":
        if not (frequency_hz > 0 and math.isfinite(frequency_hz)):
            raise ConfigError(f"frequency must be positive, got {frequency_hz}")
        return cls(C0 / frequency_hz)


@dataclass(frozen=True)
class Position3D:
    x: float
    y: float
    z: float

    def __post_init__(self):
        for name in ("x", "y", "z"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"position coordinate {name} is not finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    @classmethod
    def from_sequence(cls, seq) -> "Position3D":
        x, y, z = (float(v) for v in seq)
        return cls(x, y, z)


_ORIGIN = Position3D(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class SurfaceGeometry:
    """Planar nx-by-ny element grid centered on ``origin`` in the z = 0 plane.

    Element m = iy * nx + ix sits at
    origin + ((ix - (nx-1)/2) dx, (iy - (ny-1)/2) dy, 0).
    """

    nx: int
    ny: int
    dx: float
    dy: float
    origin: Position3D = _ORIGIN

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ConfigError("element counts must be positive integers")
        if not (self.dx > 0 and self.dy > 0):
            raise ConfigError("element pitch must be positive")

    @property
    def num_elements(self) -> int:
        return self.nx * self.ny

    @property
    def extent_x(self) -> float:
        return self.nx * self.dx

    @property
    def extent_y(self) -> float:
        return self.ny * self.dy

    @property
    def diagonal(self) -> float:
        """Aperture diagonal D = sqrt(Dx^2 + Dy^2)."""
        return math.hypot(self.extent_x, self.extent_y)

    def element_centers(self) -> np.ndarray:
        """(N, 3) array of element center positions, row m = element m."""
        m = np.arange(self.num_elements)
        ix = m % self.nx
        iy = m // self.nx
        out = np.empty((self.num_elements, 3))
        out[:, 0] = self.origin.x + (ix - (self.nx - 1) / 2.0) * self.dx
        out[:, 1] = self.origin.y + (iy - (self.ny - 1) / 2.0) * self.dy
        out[:, 2] = self.origin.z
        return out


def element_center(geometry: SurfaceGeometry, m: int) -> Position3D:
    """Center position of element ``m`` (row-major, m = iy*nx + ix)."""
    if not 0 <= m < geometry.num_elements:
        raise ConfigError(
            f"element index {m} out of range [0, {geometry.num_elements})"
        )
    ix = m % geometry.nx
    iy = m // geometry.nx
    return Position3D(
        geometry.origin.x + (ix - (geometry.nx - 1) / 2.0) * geometry.dx,
        geometry.origin.y + (iy - (geometry.ny - 1) / 2.0) * geometry.dy,
        geometry.origin.z,
    )


@dataclass(frozen=True)
class PlaneWaveSource:
    """Plane wave impinging on the surface from the z < 0 half-space.

    ``direction`` is the unit propagation vector and must point toward
    the surface (positive z component).
    """

    amplitude: complex
    direction: tuple[float, float, float]
    wavelength: Wavelength

    def __post_init__(self):
        d = np.asarray(self.direction, dtype=float)
        if d.shape != (3,):
            raise ConfigError("plane wave direction must be a 3-vector")
        norm = float(np.linalg.norm(d))
        if abs(norm - 1.0) > 1e-12:
            raise ConfigError(f"plane wave direction must be unit length, |d| = {norm}")
        if d[2] <= 0:
            raise SideError("plane wave must impinge from the z < 0 side (d_z > 0)")
        object.__setattr__(self, "direction", (float(d[0]), float(d[1]), float(d[2])))

    def direction_array(self) -> np.ndarray:
        return np.asarray(self.direction, dtype=float)

    def field_at(self, points: np.ndarray) -> np.ndarray:
        """Complex field at the given (..., 3) points."""
        k = self.wavelength.k
        phase = points @ self.direction_array()
        return self.amplitude * np.exp(-1j * k * phase)


@dataclass(frozen=True)
class PointSource:
    """Isotropic spherical-wave source; field at distance d is
    amplitude * e^{-j k d} / d.
    """

    position: Position3D
    amplitude: complex
    wavelength: Wavelength

    def __post_init__(self):
        if self.position.z == 0.0:
            raise SideError("point source cannot lie on the surface plane")

    def field_at(self, points: np.ndarray) -> np.ndarray:
        k = self.wavelength.k
        d = np.linalg.norm(points - self.position.as_array(), axis=-1)
        return self.amplitude * np.exp(-1j * k * d) / d


Source = PlaneWaveSource | PointSource


@dataclass(frozen=True, eq=False)
class FieldGrid:
    """Sampled 2-D complex field on a plane with normal z.

    ``values[iy, ix]`` holds the sample at
    (origin.x + (ix - (Nx-1)/2) dx, origin.y + (iy - (Ny-1)/2) dy, origin.z).
    """

    values: np.ndarray
    dx: float
    dy: float
    origin: Position3D = _ORIGIN

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise ConfigError("field grid must be a 2-D array of at least 1x1")
        if not (self.dx > 0 and self.dy > 0):
            raise ConfigError("sampling pitch must be positive")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def x_coords(self) -> np.ndarray:
        nx = self.values.shape[1]
        return self.origin.x + (np.arange(nx) - (nx - 1) / 2.0) * self.dx

    def y_coords(self) -> np.ndarray:
        ny = self.values.shape[0]
        return self.origin.y + (np.arange(ny) - (ny - 1) / 2.0) * self.dy

    def points(self) -> np.ndarray:
        """(Ny, Nx, 3) sample positions."""
        xx, yy = np.meshgrid(self.x_coords(), self.y_coords())
        return np.stack([xx, yy, np.full_like(xx, self.origin.z)], axis=-1)

    @property
    def cell_area(self) -> float:
        return self.dx * self.dy

    def total_power(self) -> float:
        """Quadrature estimate of the integrated |field|^2."""
        return float(np.sum(np.abs(self.values) ** 2) * self.cell_area)


@dataclass(frozen=True)
class ApertureDistribution:
    """A FieldGrid sampled on the surface plane, tied to a wavelength."""

    field: FieldGrid
    wavelength: Wavelength

    @property
    def values(self) -> np.ndarray:
        return self.field.values


def sampling_grid(geometry: SurfaceGeometry, samples_per_element: int = 1) -> FieldGrid:
    """Zero field grid exactly covering the aperture, aligned to elements."""
    if samples_per_element < 1:
        raise ConfigError("samples_per_element must be >= 1")
    s = samples_per_element
    values = np.zeros((geometry.ny * s, geometry.nx * s), dtype=complex)
    return FieldGrid(values, geometry.dx / s, geometry.dy / s, geometry.origin)


def incident_field(
    source: Source,
    geometry: SurfaceGeometry,
    samples_per_element: int = 1,
) -> ApertureDistribution:
    """Sample the source field on the surface plane.

    Plane waves give amplitude * e^{-j k (direction . r)}; point sources
    give amplitude * e^{-j k d} / d per sample point.
    """
    if isinstance(source, PointSource) and source.position.z >= 0:
        raise SideError(
            "incident field requires the point source on the reflection side (z < 0)"
        )
    grid = sampling_grid(geometry, samples_per_element)
    values = source.field_at(grid.points())
    return ApertureDistribution(
        FieldGrid(values, grid.dx, grid.dy, grid.origin), source.wavelength
    )
