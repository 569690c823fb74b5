"""Hardware models of the surface and the reductions between them.

Three abstractions of decreasing idealization, all reducible to
per-element complex reflection/transmission coefficients (r, t):

* phase-shift profile: per-element amplitudes and phase delays,
* load impedance profile: electric sheet admittance Ye and magnetic
  sheet impedance Zm per element, mapped through the two-current
  Huygens-sheet boundary solution,
* susceptibility profile: continuous electric/magnetic surface
  susceptibilities, surface-averaged per element and mapped through
  the impedance formula with ye = j k chi_ee / 2, zm = j k chi_mm / 2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ETA0, SurfaceGeometry, Wavelength
from .errors import (
    AlignmentError,
    ConfigError,
    CoverageError,
    PassivityError,
    SingularSheetError,
)

PASSIVITY_TOL = 1e-9
TWO_PI = 2.0 * np.pi


def _as_complex_vector(a, name: str) -> np.ndarray:
    out = np.atleast_1d(np.asarray(a, dtype=complex))
    if out.ndim != 1:
        raise ConfigError(f"{name} must be a 1-D per-element array")
    return out


@dataclass(frozen=True, eq=False)
class ElementCoefficients:
    """Per-element reflection (r) and transmission (t) coefficients."""

    r: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        r = _as_complex_vector(self.r, "r")
        t = _as_complex_vector(self.t, "t")
        if r.shape != t.shape:
            raise ConfigError("r and t must have the same length")
        power = np.abs(r) ** 2 + np.abs(t) ** 2
        bad = np.flatnonzero(power > 1.0 + PASSIVITY_TOL)
        if bad.size:
            m = int(bad[0])
            raise PassivityError(
                f"element {m}: |r|^2 + |t|^2 = {power[m]:.6g} > 1"
            )
        r.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "t", t)

    def __len__(self) -> int:
        return self.r.size

    @property
    def lossless(self) -> bool:
        """True when every element satisfies |r|^2 + |t|^2 = 1 within 1e-9."""
        power = np.abs(self.r) ** 2 + np.abs(self.t) ** 2
        return bool(np.all(np.abs(power - 1.0) <= PASSIVITY_TOL))


@dataclass(frozen=True, eq=False)
class PhaseShiftProfile:
    """Per-element amplitudes in [0, 1] and phases stored mod 2 pi."""

    beta_r: np.ndarray
    beta_t: np.ndarray
    phi_r: np.ndarray
    phi_t: np.ndarray

    def __post_init__(self):
        arrays = {}
        n = None
        for name in ("beta_r", "beta_t", "phi_r", "phi_t"):
            a = np.atleast_1d(np.asarray(getattr(self, name), dtype=float))
            if n is None:
                n = a.size
            elif a.size != n:
                raise ConfigError("phase-shift profile arrays must share a length")
            arrays[name] = a
        for name in ("beta_r", "beta_t"):
            a = arrays[name]
            if np.any(a < 0) or np.any(a > 1):
                raise ConfigError(f"{name} amplitudes must lie in [0, 1]")
        power = arrays["beta_r"] ** 2 + arrays["beta_t"] ** 2
        bad = np.flatnonzero(power > 1.0 + PASSIVITY_TOL)
        if bad.size:
            m = int(bad[0])
            raise PassivityError(
                f"element {m}: beta_r^2 + beta_t^2 = {power[m]:.6g} > 1"
            )
        for name in ("phi_r", "phi_t"):
            arrays[name] = np.mod(arrays[name], TWO_PI)
        for name, a in arrays.items():
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    def __len__(self) -> int:
        return self.beta_r.size


@dataclass(frozen=True, eq=False)
class ImpedanceProfile:
    """Per-element electric sheet admittance Ye (S) and magnetic sheet
    impedance Zm (ohms).

    Passivity requires Re(Ye) >= 0 and Re(Zm) >= 0; the element is
    lossless iff both are purely imaginary.
    """

    ye: np.ndarray
    zm: np.ndarray
    eta0: float = ETA0

    def __post_init__(self):
        ye = _as_complex_vector(self.ye, "ye")
        zm = _as_complex_vector(self.zm, "zm")
        if ye.shape != zm.shape:
            raise ConfigError("ye and zm must have the same length")
        if np.any(ye.real < -PASSIVITY_TOL) or np.any(zm.real < -PASSIVITY_TOL):
            raise PassivityError("sheet impedances require Re(Ye) >= 0 and Re(Zm) >= 0")
        ye.setflags(write=False)
        zm.setflags(write=False)
        object.__setattr__(self, "ye", ye)
        object.__setattr__(self, "zm", zm)

    def __len__(self) -> int:
        return self.ye.size


@dataclass(frozen=True, eq=False)
class SusceptibilityProfile:
    """Scalar surface susceptibilities sampled on a fine grid covering
    the full aperture, values in meters.

    The fine grid must subdivide each element into at least 4x4 samples.
    """

    chi_ee: np.ndarray
    chi_mm: np.ndarray

    def __post_init__(self):
        ee = np.asarray(self.chi_ee, dtype=complex)
        mm = np.asarray(self.chi_mm, dtype=complex)
        if ee.ndim != 2 or ee.shape != mm.shape:
            raise ConfigError("chi_ee and chi_mm must be equal-shape 2-D arrays")
        ee.setflags(write=False)
        mm.setflags(write=False)
        object.__setattr__(self, "chi_ee", ee)
        object.__setattr__(self, "chi_mm", mm)

    def samples_per_element(self, geometry: SurfaceGeometry) -> tuple[int, int]:
        """(sy, sx) fine samples per element; raises if not aligned."""
        ny_f, nx_f = self.chi_ee.shape
        if nx_f % geometry.nx or ny_f % geometry.ny:
            raise AlignmentError(
                f"fine grid {ny_f}x{nx_f} does not subdivide the "
                f"{geometry.ny}x{geometry.nx} element grid"
            )
        sy, sx = ny_f // geometry.ny, nx_f // geometry.nx
        if sx == 0 or sy == 0:
            raise CoverageError("element footprint contains no susceptibility samples")
        if sx < 4 or sy < 4:
            raise CoverageError(
                f"need at least 4x4 samples per element, got {sy}x{sx}"
            )
        return sy, sx


def coefficients_from_phase_shift(profile: PhaseShiftProfile) -> ElementCoefficients:
    """r = beta_r e^{j phi_r}, t = beta_t e^{j phi_t} per element."""
    r = profile.beta_r * np.exp(1j * profile.phi_r)
    t = profile.beta_t * np.exp(1j * profile.phi_t)
    return ElementCoefficients(r, t)


def _sheet_coefficients(ye: np.ndarray, zm: np.ndarray) -> ElementCoefficients:
    """Normalized sheet parameters -> (r, t) via the Huygens-sheet solution."""
    pole = np.minimum(np.abs(1.0 + ye), np.abs(1.0 + zm))
    if np.any(pole < 1e-12):
        m = int(np.argmin(pole))
        raise SingularSheetError(
            f"element {m}: sheet parameters at the ye = -1 / zm = -1 pole"
        )
    u = (1.0 - ye) / (1.0 + ye)
    v = (1.0 - zm) / (1.0 + zm)
    return ElementCoefficients(r=(u - v) / 2.0, t=(u + v) / 2.0)


def coefficients_from_impedance(profile: ImpedanceProfile) -> ElementCoefficients:
    """Normal-incidence (r, t) of a sheet with electric admittance Ye and
    magnetic impedance Zm.

    With ye = eta0 Ye / 2 and zm = Zm / (2 eta0):
    u = (1-ye)/(1+ye), v = (1-zm)/(1+zm), t = (u+v)/2, r = (u-v)/2.
    """
    ye = profile.eta0 * profile.ye / 2.0
    zm = profile.zm / (2.0 * profile.eta0)
    return _sheet_coefficients(ye, zm)


def surface_average_susceptibility(
    profile: SusceptibilityProfile, geometry: SurfaceGeometry
) -> tuple[np.ndarray, np.ndarray]:
    """Arithmetic mean of the fine-grid samples inside each element.

    Returns per-element (chi_ee_bar, chi_mm_bar) in element order
    m = iy * nx + ix.
    """
    sy, sx = profile.samples_per_element(geometry)

    def block_mean(a: np.ndarray) -> np.ndarray:
        blocks = a.reshape(geometry.ny, sy, geometry.nx, sx)
        return blocks.mean(axis=(1, 3)).reshape(-1)

    return block_mean(profile.chi_ee), block_mean(profile.chi_mm)


def impedance_from_susceptibility(
    profile: SusceptibilityProfile,
    geometry: SurfaceGeometry,
    wavelength: Wavelength,
) -> ImpedanceProfile:
    """Surface-average chi per element, then Ye = j k chi_ee / eta0 and
    Zm = j k chi_mm eta0 (so that ye = j k chi_ee / 2, zm = j k chi_mm / 2)."""
    chi_ee, chi_mm = surface_average_susceptibility(profile, geometry)
    k = wavelength.k
    return ImpedanceProfile(ye=1j * k * chi_ee / ETA0, zm=1j * k * chi_mm * ETA0)


def coefficients_from_gstc(
    profile: SusceptibilityProfile,
    geometry: SurfaceGeometry,
    wavelength: Wavelength,
) -> ElementCoefficients:
    """GSTC susceptibilities -> per-element (r, t), by composition through
    the load impedance model."""
    return coefficients_from_impedance(
        impedance_from_susceptibility(profile, geometry, wavelength)
    )


def phase_profile_from_coefficients(coeffs: ElementCoefficients) -> PhaseShiftProfile:
    """beta = |c|, phi = arg(c) mod 2 pi; zero coefficients map to
    beta = 0, phi = 0 by convention."""

    def polar(c: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        beta = np.abs(c)
        phi = np.where(beta > 0, np.mod(np.angle(c), TWO_PI), 0.0)
        return beta, phi

    beta_r, phi_r = polar(coeffs.r)
    beta_t, phi_t = polar(coeffs.t)
    return PhaseShiftProfile(beta_r, beta_t, phi_r, phi_t)


def linear_phase_gradient_profile(
    geometry: SurfaceGeometry,
    wavelength: Wavelength,
    target_angle_r: float,
    target_angle_t: float,
    beta_r: float = 2.0 ** -0.5,
    beta_t: float = 2.0 ** -0.5,
) -> PhaseShiftProfile:
    """Linear phase gradient steering a broadside-illuminated beam toward
    the target angles (radians, in the x-z plane):
    phi(m) = -k sin(target) x_m mod 2 pi.
    """
    for angle in (target_angle_r, target_angle_t):
        if not abs(angle) < np.pi / 2:
            raise ConfigError("target angles must satisfy |angle| < pi/2")
    k = wavelength.k
    x = geometry.element_centers()[:, 0]
    n = geometry.num_elements
    return PhaseShiftProfile(
        beta_r=np.full(n, beta_r),
        beta_t=np.full(n, beta_t),
        phi_r=np.mod(-k * np.sin(target_angle_r) * x, TWO_PI),
        phi_t=np.mod(-k * np.sin(target_angle_t) * x, TWO_PI),
    )


@dataclass(frozen=True, eq=False)
class CoefficientTable:
    """Finite set of realizable (r, t) pairs, e.g. the states reachable by
    a PIN-diode element whose reflection and transmission are coupled."""

    pairs: np.ndarray  # (K, 2) complex, columns (r, t)

    def __post_init__(self):
        p = np.asarray(self.pairs, dtype=complex)
        if p.ndim != 2 or p.shape[1] != 2 or p.shape[0] < 1:
            raise ConfigError("coefficient table must be a (K, 2) array of (r, t)")
        power = np.abs(p[:, 0]) ** 2 + np.abs(p[:, 1]) ** 2
        if np.any(power > 1.0 + PASSIVITY_TOL):
            raise PassivityError("coefficient table contains a non-passive state")
        p.setflags(write=False)
        object.__setattr__(self, "pairs", p)


def snap_to_table(
    coeffs: ElementCoefficients, table: CoefficientTable
) -> ElementCoefficients:
    """Replace each element's (r, t) by the nearest table state in the
    joint Euclidean metric |dr|^2 + |dt|^2 (coupled-control mode)."""
    dr = coeffs.r[:, None] - table.pairs[None, :, 0]
    dt = coeffs.t[:, None] - table.pairs[None, :, 1]
    best = np.argmin(np.abs(dr) ** 2 + np.abs(dt) ** 2, axis=1)
    return ElementCoefficients(table.pairs[best, 0], table.pairs[best, 1])
