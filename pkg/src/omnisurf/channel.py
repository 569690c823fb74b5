"""Channel models: ray tracing, Fresnel-Kirchhoff, Rayleigh-Sommerfeld,
angular spectrum, and the equivalent-circuit port network.

All wave models share the e^{+j w t} / e^{-j k r} convention fixed in
:mod:`omnisurf.core`. The diffraction prefactor is j/lambda, which makes
the on-axis single-element phase -k (d1 + d2) + pi/2 and keeps the four
wave models phase-consistent in the far field.

Field sums rely on numpy's pairwise summation in a fixed index order, so
results are deterministic and independent of worker count.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core import (
    ETA0,
    ApertureDistribution,
    FieldGrid,
    PlaneWaveSource,
    PointSource,
    Position3D,
    Source,
    SurfaceGeometry,
    Wavelength,
)
from .errors import (
    AliasingError,
    AlignmentError,
    ConfigError,
    NumericalError,
    PassivityError,
    SideError,
    SingularDistanceError,
    SingularNetworkError,
)
from .hardware import ElementCoefficients


class Side(enum.Enum):
    """Which half-space the receiver occupies relative to the source."""

    REFLECT = "reflect"
    TRANSMIT = "transmit"


@dataclass(frozen=True)
class ChannelGain:
    """Complex end-to-end gain h (received field per unit source amplitude)."""

    h: complex

    def __post_init__(self):
        if not (math.isfinite(self.h.real) and math.isfinite(self.h.imag)):
            raise NumericalError("channel gain is not finite")

    @property
    def power_gain_db(self) -> float:
        """20 log10 |h|; -inf for a null channel."""
        mag = abs(self.h)
        return 20.0 * math.log10(mag) if mag > 0 else -math.inf

    @property
    def phase_rad(self) -> float:
        return math.atan2(self.h.imag, self.h.real)


def _source_side(source: Source) -> float:
    """-1.0 when the source illuminates from z < 0, +1.0 otherwise."""
    if isinstance(source, PlaneWaveSource):
        return -1.0
    return -1.0 if source.position.z < 0 else 1.0


def _check_receiver_side(source: Source, rx_z: float, side: Side, plane_z: float):
    if rx_z == plane_z:
        raise SideError("receiver must not lie on the surface plane")
    src_sign = _source_side(source)
    rx_sign = -1.0 if rx_z < plane_z else 1.0
    want = src_sign if side is Side.REFLECT else -src_sign
    if rx_sign != want:
        raise SideError(
            f"receiver at z = {rx_z} is on the wrong side for {side.value}"
        )


# ---------------------------------------------------------------------------
# Surface application
# ---------------------------------------------------------------------------

def apply_surface(
    incident: ApertureDistribution,
    geometry: SurfaceGeometry,
    coeffs: ElementCoefficients,
    side: Side,
) -> ApertureDistribution:
    """Multiply each aperture sample by its element's r (reflect) or
    t (transmit) coefficient; samples outside the aperture are zeroed.

    The grid must subdivide the element grid with an integer number of
    samples per element.
    """
    if len(coeffs) != geometry.num_elements:
        raise ConfigError(
            f"{len(coeffs)} coefficient pairs for {geometry.num_elements} elements"
        )
    grid = incident.field
    sx = geometry.dx / grid.dx
    sy = geometry.dy / grid.dy
    if abs(sx - round(sx)) > 1e-9 or abs(sy - round(sy)) > 1e-9:
        raise AlignmentError(
            "aperture sampling pitch must divide the element pitch"
        )
    sx, sy = int(round(sx)), int(round(sy))
    ny_s, nx_s = grid.shape
    if nx_s != geometry.nx * sx or ny_s != geometry.ny * sy:
        raise AlignmentError(
            f"grid {ny_s}x{nx_s} does not cover the aperture with "
            f"{sy}x{sx} samples per element"
        )
    if (
        abs(grid.origin.x - geometry.origin.x) > 1e-9 * geometry.dx
        or abs(grid.origin.y - geometry.origin.y) > 1e-9 * geometry.dy
    ):
        raise AlignmentError("grid center does not coincide with the aperture center")
    c = coeffs.r if side is Side.REFLECT else coeffs.t
    c_grid = c.reshape(geometry.ny, geometry.nx)
    c_fine = np.repeat(np.repeat(c_grid, sy, axis=0), sx, axis=1)
    return ApertureDistribution(
        FieldGrid(grid.values * c_fine, grid.dx, grid.dy, grid.origin),
        incident.wavelength,
    )


# ---------------------------------------------------------------------------
# Ray tracing
# ---------------------------------------------------------------------------

def _incident_on_points(source: Source, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(complex field / source amplitude, cos of incidence angle) per point."""
    if isinstance(source, PlaneWaveSource):
        k = source.wavelength.k
        d = source.direction_array()
        inc = np.exp(-1j * k * (points @ d))
        cos1 = np.full(points.shape[0], d[2])
    else:
        k = source.wavelength.k
        delta = points - source.position.as_array()
        d1 = np.linalg.norm(delta, axis=-1)
        if np.any(d1 < 1e-12):
            raise SingularDistanceError("source coincides with a surface point")
        inc = np.exp(-1j * k * d1) / d1
        cos1 = np.abs(delta[:, 2]) / d1
    return inc, cos1


def ray_tracing_gain_many(
    source: Source,
    rx_points: np.ndarray,
    geometry: SurfaceGeometry,
    coeffs: ElementCoefficients,
    side: Side,
) -> np.ndarray:
    """Vectorized ray-tracing gain for an (Q, 3) array of receivers.

    h = sum_m c_m inc_m (dx dy K_m) (j/lambda) e^{-j k d2_m} / d2_m with
    K_m = (cos th1_m + cos th2_m)/2 evaluated at the element centers.
    """
    wavelength = source.wavelength
    k = wavelength.k
    p = geometry.element_centers()
    inc, cos1 = _incident_on_points(source, p)
    c = coeffs.r if side is Side.REFLECT else coeffs.t
    if c.size != p.shape[0]:
        raise ConfigError("coefficient count does not match the element count")

    rx_points = np.asarray(rx_points, dtype=float)
    delta = rx_points[:, None, :] - p[None, :, :]          # (Q, N, 3)
    d2 = np.linalg.norm(delta, axis=-1)
    if np.any(d2 < 1e-12):
        raise SingularDistanceError("receiver coincides with an element center")
    cos2 = np.abs(delta[:, :, 2]) / d2
    lean = (cos1[None, :] + cos2) / 2.0
    terms = (
        c[None, :]
        * inc[None, :]
        * lean
        * (geometry.dx * geometry.dy)
        * (1j / wavelength.lambda_m)
        * np.exp(-1j * k * d2)
        / d2
    )
    return np.sum(terms, axis=1)


def ray_tracing_gain(
    source: Source,
    rx: Position3D,
    geometry: SurfaceGeometry,
    coeffs: ElementCoefficients,
    side: Side,
) -> ChannelGain:
    """End-to-end gain treating each element as a distinct scatterer."""
    _check_receiver_side(source, rx.z, side, geometry.origin.z)
    h = ray_tracing_gain_many(source, rx.as_array()[None, :], geometry, coeffs, side)[0]
    return ChannelGain(complex(h))


# ---------------------------------------------------------------------------
# Aperture-integral models (Fresnel-Kirchhoff, Rayleigh-Sommerfeld)
# ---------------------------------------------------------------------------

class BoundaryKind(enum.Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"


def _aperture_flat(aperture: ApertureDistribution):
    grid = aperture.field
    pts = grid.points().reshape(-1, 3)
    return pts, grid.values.reshape(-1), grid.cell_area


def _refine_aperture(aperture: ApertureDistribution, factor: int) -> ApertureDistribution:
    """Subdivide each sample into factor x factor constant sub-samples."""
    grid = aperture.field
    values = np.repeat(np.repeat(grid.values, factor, axis=0), factor, axis=1)
    return ApertureDistribution(
        FieldGrid(values, grid.dx / factor, grid.dy / factor, grid.origin),
        aperture.wavelength,
    )


def _check_sampling(aperture: ApertureDistribution):
    lam = aperture.wavelength.lambda_m
    if aperture.field.dx > lam / 2 + 1e-12 or aperture.field.dy > lam / 2 + 1e-12:
        raise AliasingError(
            "aperture sampling coarser than lambda/2 aliases the propagating band"
        )


def _diffraction_field_many(
    source: Source,
    rx_points: np.ndarray,
    aperture: ApertureDistribution,
    kernel: str,
    kind: BoundaryKind = BoundaryKind.DIRICHLET,
) -> np.ndarray:
    """Midpoint-quadrature aperture integral at each receiver point.

    ``kernel`` is "fk" for Fresnel-Kirchhoff or "rs" for Rayleigh-
    Sommerfeld with the given boundary kind. Returns the field divided by
    the source amplitude.
    """
    rx_points = np.asarray(rx_points, dtype=float)
    grid = aperture.field
    plane_z = grid.origin.z
    pitch = max(grid.dx, grid.dy)
    near_plane = np.abs(rx_points[:, 2] - plane_z) < pitch
    x = grid.x_coords()
    y = grid.y_coords()
    over_aperture = (
        (rx_points[:, 0] > x[0] - pitch)
        & (rx_points[:, 0] < x[-1] + pitch)
        & (rx_points[:, 1] > y[0] - pitch)
        & (rx_points[:, 1] < y[-1] + pitch)
    )
    if np.any(near_plane & over_aperture):
        warnings.warn(
            "receiver within one sample pitch of the surface plane; "
            "refining local quadrature",
            RuntimeWarning,
            stacklevel=2,
        )
        aperture = _refine_aperture(aperture, 4)

    wavelength = aperture.wavelength
    k = wavelength.k
    pts, u, da = _aperture_flat(aperture)
    inc_cos1 = None
    if kernel == "fk" or (kernel == "rs" and kind is BoundaryKind.NEUMANN):
        _, inc_cos1 = _incident_on_points(source, pts)

    out = np.empty(rx_points.shape[0], dtype=complex)
    chunk = max(1, int(4e6 // max(1, u.size)))
    for lo in range(0, rx_points.shape[0], chunk):
        q = rx_points[lo : lo + chunk]
        delta = q[:, None, :] - pts[None, :, :]
        s = np.linalg.norm(delta, axis=-1)
        if np.any(s < 1e-12):
            raise SingularDistanceError("receiver coincides with an aperture sample")
        phase = np.exp(-1j * k * s) / s
        if kernel == "fk":
            cos2 = np.abs(delta[:, :, 2]) / s
            lean = (inc_cos1[None, :] + cos2) / 2.0
            integrand = u[None, :] * lean * phase * (1j / wavelength.lambda_m)
        elif kind is BoundaryKind.DIRICHLET:
            z_r = np.abs(q[:, 2] - plane_z)[:, None]
            integrand = u[None, :] * (z_r / s) * (1j * k + 1.0 / s) * phase / (2 * np.pi)
        else:
            dudn = 1j * k * inc_cos1[None, :] * u[None, :]
            integrand = dudn * phase / (2 * np.pi)
        out[lo : lo + chunk] = np.sum(integrand, axis=1) * da

    amplitude = source.amplitude
    if amplitude == 0:
        raise ConfigError("source amplitude must be nonzero")
    return out / amplitude


def fresnel_kirchhoff_gain(
    source: Source,
    rx: Position3D,
    aperture: ApertureDistribution,
) -> ChannelGain:
    """Fresnel-Kirchhoff diffraction integral over the surface-plane
    aperture (field after :func:`apply_surface`), midpoint quadrature."""
    h = _diffraction_field_many(source, rx.as_array()[None, :], aperture, "fk")[0]
    return ChannelGain(complex(h))


def rayleigh_sommerfeld_gain(
    source: Source,
    rx: Position3D,
    aperture: ApertureDistribution,
    kind: BoundaryKind = BoundaryKind.DIRICHLET,
) -> ChannelGain:
    """First (Dirichlet) or second (Neumann) Rayleigh-Sommerfeld solution
    with the hemisphere contribution taken as zero (radiation condition).

    The Neumann normal derivative is approximated as j k cos(th1) U.
    """
    h = _diffraction_field_many(
        source, rx.as_array()[None, :], aperture, "rs", kind
    )[0]
    return ChannelGain(complex(h))


# ---------------------------------------------------------------------------
# Angular spectrum
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class AngularSpectrum:
    """Plane-wave spectrum A(kx, ky) of an aperture distribution.

    A(kx, ky) = integral U(x, y) e^{+j(kx x + ky y)} dx dy, so a beam
    travelling toward +theta in the x-z plane peaks at kx = k sin(theta).
    Values and axes are stored fftshifted (ascending kx, ky).
    """

    values: np.ndarray
    kx: np.ndarray
    ky: np.ndarray
    wavelength: Wavelength
    # spatial bookkeeping for the inverse transform
    dx: float
    dy: float
    x_first: float
    y_first: float
    origin: Position3D
    orig_shape: tuple[int, int]
    offset: tuple[int, int]

    @property
    def dkx(self) -> float:
        return 2 * np.pi / (self.values.shape[1] * self.dx)

    @property
    def dky(self) -> float:
        return 2 * np.pi / (self.values.shape[0] * self.dy)

    def total_power(self) -> float:
        """Parseval-side power: sum |A|^2 dkx dky / (2 pi)^2."""
        return float(
            np.sum(np.abs(self.values) ** 2) * self.dkx * self.dky / (2 * np.pi) ** 2
        )

    def propagating_band_power(self) -> float:
        """Power restricted to kx^2 + ky^2 <= k^2."""
        k = self.wavelength.k
        kxx, kyy = np.meshgrid(self.kx, self.ky)
        mask = kxx**2 + kyy**2 <= k**2
        return float(
            np.sum(np.abs(self.values[mask]) ** 2)
            * self.dkx
            * self.dky
            / (2 * np.pi) ** 2
        )


def _shift_phases(kx_un: np.ndarray, ky_un: np.ndarray, x0: float, y0: float):
    return np.exp(1j * ky_un[:, None] * y0) * np.exp(1j * kx_un[None, :] * x0)


def angular_spectrum_of(
    aperture: ApertureDistribution, pad_factor: int = 2
) -> AngularSpectrum:
    """Discrete Fourier transform of the aperture distribution, zero-padded
    to ``pad_factor`` times the aperture extent."""
    _check_sampling(aperture)
    if pad_factor < 1:
        raise ConfigError("pad_factor must be >= 1")
    grid = aperture.field
    ny, nx = grid.shape
    my, mx = ny * pad_factor, nx * pad_factor
    oy, ox = (my - ny) // 2, (mx - nx) // 2
    padded = np.zeros((my, mx), dtype=complex)
    padded[oy : oy + ny, ox : ox + nx] = grid.values

    x_first = grid.x_coords()[0] - ox * grid.dx
    y_first = grid.y_coords()[0] - oy * grid.dy
    kx_un = 2 * np.pi * np.fft.fftfreq(mx, grid.dx)
    ky_un = 2 * np.pi * np.fft.fftfreq(my, grid.dy)

    a = np.fft.ifft2(padded) * (mx * my * grid.dx * grid.dy)
    a *= _shift_phases(kx_un, ky_un, x_first, y_first)
    return AngularSpectrum(
        values=np.fft.fftshift(a),
        kx=np.fft.fftshift(kx_un),
        ky=np.fft.fftshift(ky_un),
        wavelength=aperture.wavelength,
        dx=grid.dx,
        dy=grid.dy,
        x_first=x_first,
        y_first=y_first,
        origin=grid.origin,
        orig_shape=(ny, nx),
        offset=(oy, ox),
    )


def inverse_angular_spectrum(spectrum: AngularSpectrum) -> ApertureDistribution:
    """Inverse transform back to the (cropped) original aperture grid."""
    my, mx = spectrum.values.shape
    kx_un = np.fft.ifftshift(spectrum.kx)
    ky_un = np.fft.ifftshift(spectrum.ky)
    a = np.fft.ifftshift(spectrum.values)
    a = a / _shift_phases(kx_un, ky_un, spectrum.x_first, spectrum.y_first)
    u = np.fft.fft2(a) / (mx * my * spectrum.dx * spectrum.dy)
    oy, ox = spectrum.offset
    ny, nx = spectrum.orig_shape
    u = u[oy : oy + ny, ox : ox + nx]
    return ApertureDistribution(
        FieldGrid(u, spectrum.dx, spectrum.dy, spectrum.origin),
        spectrum.wavelength,
    )


def propagation_kernel(
    kx: np.ndarray, ky: np.ndarray, k: float, z_offset: float
) -> np.ndarray:
    """Transfer function e^{-j kz |z|} with kz = sqrt(k^2 - kt^2) in the
    propagating band and kz = -j sqrt(kt^2 - k^2) for evanescent modes."""
    kxx, kyy = np.meshgrid(kx, ky)
    kt2 = kxx**2 + kyy**2
    kz = np.where(
        kt2 <= k**2,
        np.sqrt(np.maximum(k**2 - kt2, 0.0)).astype(complex),
        -1j * np.sqrt(np.maximum(kt2 - k**2, 0.0)),
    )
    return np.exp(-1j * kz * abs(z_offset))


def angular_spectrum_propagate(
    aperture: ApertureDistribution, z_offset: float, pad_factor: int = 2
) -> FieldGrid:
    """Propagate the aperture field to the plane at ``z_offset`` (signed
    meters) via the plane-wave spectrum; evanescent modes decay as
    e^{-|kz| |z|}."""
    spectrum = angular_spectrum_of(aperture, pad_factor)
    kernel = propagation_kernel(
        spectrum.kx, spectrum.ky, aperture.wavelength.k, z_offset
    )
    shifted = AngularSpectrum(
        values=spectrum.values * kernel,
        kx=spectrum.kx,
        ky=spectrum.ky,
        wavelength=spectrum.wavelength,
        dx=spectrum.dx,
        dy=spectrum.dy,
        x_first=spectrum.x_first,
        y_first=spectrum.y_first,
        origin=spectrum.origin,
        orig_shape=spectrum.orig_shape,
        offset=spectrum.offset,
    )
    out = inverse_angular_spectrum(shifted)
    o = out.field.origin
    return FieldGrid(
        out.field.values,
        out.field.dx,
        out.field.dy,
        Position3D(o.x, o.y, o.z + z_offset),
    )


def angular_spectrum_values_at(
    aperture: ApertureDistribution, kx: np.ndarray, ky: np.ndarray
) -> np.ndarray:
    """Exact DTFT of the aperture at arbitrary spatial frequencies.

    Evaluates A(kx_q, ky_q) = sum U e^{+j(kx x + ky y)} dx dy without
    gridding or interpolation; used for far-field point evaluation and
    angular-spectrum radiation patterns.
    """
    grid = aperture.field
    x = grid.x_coords()
    y = grid.y_coords()
    kx = np.atleast_1d(np.asarray(kx, dtype=float))
    ky = np.atleast_1d(np.asarray(ky, dtype=float))
    ey = np.exp(1j * ky[:, None] * y[None, :])          # (Q, Ny)
    t = ey @ grid.values                                 # (Q, Nx)
    ex = np.exp(1j * kx[:, None] * x[None, :])
    return np.sum(t * ex, axis=1) * grid.cell_area


def angular_spectrum_point_gain(
    source: Source, rx: Position3D, aperture: ApertureDistribution
) -> ChannelGain:
    """Far-field gain from the plane-wave spectrum (stationary-phase
    evaluation): h = (j k cos th / 2 pi) A(k x/r, k y/r) e^{-j k r} / r.

    Valid for receivers in the far field of the aperture.
    """
    k = aperture.wavelength.k
    o = aperture.field.origin
    rvec = rx.as_array() - np.array([o.x, o.y, o.z])
    r = float(np.linalg.norm(rvec))
    if r < 1e-12:
        raise SingularDistanceError("receiver coincides with the aperture center")
    if rvec[2] == 0:
        raise SideError("receiver must not lie on the surface plane")
    cos_th = abs(rvec[2]) / r
    # frequencies are evaluated relative to the aperture-centered frame
    a = angular_spectrum_values_at(
        ApertureDistribution(
            FieldGrid(aperture.field.values, aperture.field.dx, aperture.field.dy),
            aperture.wavelength,
        ),
        k * rvec[0] / r,
        k * rvec[1] / r,
    )[0]
    h = (1j * k * cos_th / (2 * np.pi)) * a * np.exp(-1j * k * r) / r
    return ChannelGain(complex(h / source.amplitude))


# ---------------------------------------------------------------------------
# Equivalent circuit
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PortNetwork:
    """(N+M)-port impedance description: N surface elements, M receivers.

    ``z`` is the (N+M)x(N+M) impedance matrix; ``source_voltages`` the
    Thevenin drive per port; element and receiver loads terminate the
    ports (element terminations model the surface reconfiguration).
    """

    z: np.ndarray
    source_voltages: np.ndarray
    element_loads: np.ndarray
    receiver_loads: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.z, dtype=complex)
        if z.ndim != 2 or z.shape[0] != z.shape[1]:
            raise ConfigError("impedance matrix must be square")
        v = np.asarray(self.source_voltages, dtype=complex).reshape(-1)
        el = np.asarray(self.element_loads, dtype=complex).reshape(-1)
        rl = np.asarray(self.receiver_loads, dtype=complex).reshape(-1)
        if el.size + rl.size != z.shape[0] or v.size != z.shape[0]:
            raise ConfigError(
                "port count must equal element loads + receiver loads"
            )
        scale = float(np.max(np.abs(z))) or 1.0
        if np.max(np.abs(z - z.T)) > 1e-9 * scale:
            raise PassivityError("impedance matrix violates reciprocity (Z != Z^T)")
        herm = (z + z.conj().T) / 2.0
        eigs = np.linalg.eigvalsh(herm)
        if eigs.size and eigs[0] < -1e-9 * scale:
            raise PassivityError("impedance matrix is not passive")
        for name, arr in (("z", z), ("source_voltages", v),
                          ("element_loads", el), ("receiver_loads", rl)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def num_elements(self) -> int:
        return self.element_loads.size

    @property
    def num_receivers(self) -> int:
        return self.receiver_loads.size

    @property
    def loads(self) -> np.ndarray:
        return np.concatenate([self.element_loads, self.receiver_loads])


def coupling_impedance(
    distance: float, wavelength: Wavelength, dipole_length: float
) -> complex:
    """Scalar Hertzian-dipole coupling kernel
    Z = j eta0 k l^2 / (4 pi) e^{-j k d} / d."""
    if distance <= 0:
        raise SingularNetworkError("coincident ports have singular coupling")
    k = wavelength.k
    return (
        1j * ETA0 * k * dipole_length**2 / (4 * np.pi)
        * np.exp(-1j * k * distance)
        / distance
    )


def build_port_network(
    geometry: SurfaceGeometry,
    rx_positions: list[Position3D],
    wavelength: Wavelength,
    self_impedance: complex = 50.0 + 0.0j,
    dipole_length: float | None = None,
    source_voltages: np.ndarray | None = None,
    element_loads: np.ndarray | complex = 50.0 + 0.0j,
    receiver_loads: np.ndarray | complex = 50.0 + 0.0j,
) -> PortNetwork:
    """Impedance matrix with Hertzian-dipole mutual coupling between all
    element and receiver ports (default effective dipole length lambda/8)."""
    if dipole_length is None:
        dipole_length = wavelength.lambda_m / 8.0
    pos = np.vstack(
        [geometry.element_centers()]
        + [p.as_array()[None, :] for p in rx_positions]
    )
    n_ports = pos.shape[0]
    delta = pos[:, None, :] - pos[None, :, :]
    d = np.linalg.norm(delta, axis=-1)
    off = ~np.eye(n_ports, dtype=bool)
    if np.any(d[off] < 1e-12):
        raise SingularNetworkError("coincident ports have singular coupling")
    k = wavelength.k
    z = np.zeros((n_ports, n_ports), dtype=complex)
    z[off] = (
        1j * ETA0 * k * dipole_length**2 / (4 * np.pi)
        * np.exp(-1j * k * d[off])
        / d[off]
    )
    np.fill_diagonal(z, self_impedance)
    n = geometry.num_elements
    m = len(rx_positions)
    if source_voltages is None:
        source_voltages = np.zeros(n_ports, dtype=complex)
    el = np.broadcast_to(np.asarray(element_loads, dtype=complex), (n,)).copy()
    rl = np.broadcast_to(np.asarray(receiver_loads, dtype=complex), (m,)).copy()
    return PortNetwork(z, source_voltages, el, rl)


def solve_port_currents(net: PortNetwork) -> np.ndarray:
    """Port currents from (Z + diag(loads)) I = V."""
    a = net.z + np.diag(net.loads)
    cond = np.linalg.cond(a)
    if not np.isfinite(cond) or cond > 1e12:
        raise SingularNetworkError(
            f"port network near resonance; condition number {cond:.3e}"
        )
    return np.linalg.solve(a, net.source_voltages)


def equivalent_circuit_power(net: PortNetwork) -> np.ndarray:
    """Time-averaged received power per receiver port,
    P_p = 1/2 |I_p|^2 Re(load_p), watts."""
    currents = solve_port_currents(net)
    i_rx = currents[net.num_elements :]
    return 0.5 * np.abs(i_rx) ** 2 * net.receiver_loads.real


def source_delivered_power(net: PortNetwork, currents: np.ndarray | None = None) -> float:
    """Total time-averaged power delivered by the port sources,
    1/2 Re(sum V_p I_p*)."""
    if currents is None:
        currents = solve_port_currents(net)
    return float(0.5 * np.real(np.sum(net.source_voltages * np.conj(currents))))
