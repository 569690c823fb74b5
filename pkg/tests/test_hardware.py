import numpy as np
import pytest

from omnisurf import (
    CoefficientTable,
    ConfigError,
    ElementCoefficients,
    ImpedanceProfile,
    PassivityError,
    PhaseShiftProfile,
    SurfaceGeometry,
    SusceptibilityProfile,
    Wavelength,
    coefficients_from_gstc,
    coefficients_from_impedance,
    coefficients_from_phase_shift,
    impedance_from_susceptibility,
    linear_phase_gradient_profile,
    phase_profile_from_coefficients,
    snap_to_table,
    surface_average_susceptibility,
)
from omnisurf.errors import CoverageError, SingularSheetError
from omnisurf.hardware import _sheet_coefficients


def sheet_jump_solution(ye, zm):
    """Oracle: solve the two-sheet boundary conditions as a 2x2 system.

    With normalized fields (eta0 = 1) at z = 0:
    (1 - r) - t = ye (1 + r + t) and (1 + r) - t = zm (1 - r + t).
    """
    a = np.array([[-(1 + ye), -(1 + ye)], [(1 + zm), -(1 + zm)]], dtype=complex)
    b = np.array([ye - 1, zm - 1], dtype=complex)
    r, t = np.linalg.solve(a, b)
    return r, t


def test_sheet_map_matches_boundary_condition_oracle():
    rng = np.random.default_rng(7)
    for _ in range(50):
        ye = complex(abs(rng.normal()), rng.normal())
        zm = complex(abs(rng.normal()), rng.normal())
        coeffs = _sheet_coefficients(np.array([ye]), np.array([zm]))
        r_ref, t_ref = sheet_jump_solution(ye, zm)
        assert coeffs.r[0] == pytest.approx(r_ref, abs=1e-13)
        assert coeffs.t[0] == pytest.approx(t_ref, abs=1e-13)


def test_impedance_map_normalization():
    # Ye = 0, Zm = 0: transparent sheet (r = 0, t = 1)
    coeffs = coefficients_from_impedance(ImpedanceProfile(ye=[0.0], zm=[0.0]))
    assert coeffs.r[0] == pytest.approx(0.0, abs=1e-15)
    assert coeffs.t[0] == pytest.approx(1.0, abs=1e-15)


def test_reactive_sheets_are_lossless():
    rng = np.random.default_rng(11)
    ye = 1j * rng.normal(size=32)
    zm = 1j * rng.normal(size=32)
    coeffs = coefficients_from_impedance(ImpedanceProfile(ye=ye, zm=zm))
    assert coeffs.lossless


def test_sheet_pole_raises():
    # the ye = -1 pole is only reachable for active sheets, so exercise the
    # normalized map directly
    with pytest.raises(SingularSheetError, match="element 0"):
        _sheet_coefficients(np.array([-1.0 + 0j]), np.array([0.5 + 0j]))


def test_impedance_profile_rejects_active_sheets():
    with pytest.raises(PassivityError):
        ImpedanceProfile(ye=[-0.1], zm=[0.0])


def test_element_coefficients_passivity_names_element():
    r = np.array([0.5, 0.9])
    t = np.array([0.5, 0.9])
    with pytest.raises(PassivityError, match="element 1"):
        ElementCoefficients(r, t)


def test_phase_shift_profile_wraps_phases():
    p = PhaseShiftProfile(
        beta_r=[0.5], beta_t=[0.5], phi_r=[3 * np.pi], phi_t=[-np.pi / 2]
    )
    assert p.phi_r[0] == pytest.approx(np.pi)
    assert p.phi_t[0] == pytest.approx(3 * np.pi / 2)


def test_phase_shift_profile_passivity():
    with pytest.raises(PassivityError):
        PhaseShiftProfile(beta_r=[0.9], beta_t=[0.9], phi_r=[0.0], phi_t=[0.0])
    with pytest.raises(ConfigError):
        PhaseShiftProfile(beta_r=[1.1], beta_t=[0.0], phi_r=[0.0], phi_t=[0.0])


def test_phase_profile_round_trip():
    rng = np.random.default_rng(3)
    n = 40
    angles_r = rng.uniform(0, 2 * np.pi, n)
    angles_t = rng.uniform(0, 2 * np.pi, n)
    beta = rng.uniform(0, 2 ** -0.5, (2, n))
    coeffs = ElementCoefficients(
        beta[0] * np.exp(1j * angles_r), beta[1] * np.exp(1j * angles_t)
    )
    back = coefficients_from_phase_shift(phase_profile_from_coefficients(coeffs))
    np.testing.assert_allclose(back.r, coeffs.r, rtol=0, atol=1e-14)
    np.testing.assert_allclose(back.t, coeffs.t, rtol=0, atol=1e-14)


def test_zero_coefficient_maps_to_zero_beta():
    profile = phase_profile_from_coefficients(ElementCoefficients([0.0], [0.5]))
    assert profile.beta_r[0] == 0.0
    assert profile.phi_r[0] == 0.0


def test_surface_average_is_blockwise_mean():
    g = SurfaceGeometry(nx=2, ny=2, dx=0.5, dy=0.5)
    fine = np.arange(64, dtype=float).reshape(8, 8) * (1 + 0j)
    profile = SusceptibilityProfile(chi_ee=fine, chi_mm=2 * fine)
    ee, mm = surface_average_susceptibility(profile, g)
    expected = np.array(
        [fine[:4, :4].mean(), fine[:4, 4:].mean(), fine[4:, :4].mean(), fine[4:, 4:].mean()]
    )
    np.testing.assert_allclose(ee, expected)
    np.testing.assert_allclose(mm, 2 * expected)


def test_susceptibility_requires_4x4_per_element():
    g = SurfaceGeometry(nx=2, ny=2, dx=0.5, dy=0.5)
    fine = np.zeros((4, 4), dtype=complex)  # 2x2 per element
    with pytest.raises(CoverageError):
        surface_average_susceptibility(SusceptibilityProfile(fine, fine), g)


def test_gstc_sign_convention():
    # With e^{+j w t}, a lossless sheet has purely imaginary ye = j k chi/2,
    # which requires real chi; the resulting coefficients are lossless.
    g = SurfaceGeometry(nx=1, ny=1, dx=0.5, dy=0.5)
    w = Wavelength(1.0)
    fine = np.full((4, 4), 0.03 + 0j)
    prof = impedance_from_susceptibility(SusceptibilityProfile(fine, fine), g, w)
    assert prof.ye[0].real == pytest.approx(0.0, abs=1e-15)
    assert prof.zm[0].real == pytest.approx(0.0, abs=1e-15)
    coeffs = coefficients_from_gstc(SusceptibilityProfile(fine, fine), g, w)
    assert coeffs.lossless


def test_linear_phase_gradient_profile_slope():
    g = SurfaceGeometry(nx=8, ny=1, dx=0.005, dy=0.005)
    w = Wavelength(0.01)
    target = np.radians(30.0)
    prof = linear_phase_gradient_profile(g, w, target, target)
    x = g.element_centers()[:, 0]
    expected = np.mod(-w.k * np.sin(target) * x, 2 * np.pi)
    np.testing.assert_allclose(prof.phi_r, expected, atol=1e-12)
    np.testing.assert_allclose(prof.phi_t, expected, atol=1e-12)


def test_snap_to_table_picks_joint_nearest():
    table = CoefficientTable(
        np.array([[0.7, 0.0], [0.0, 0.7], [0.5, 0.5]], dtype=complex)
    )
    coeffs = ElementCoefficients([0.65 + 0j, 0.05 + 0j], [0.1 + 0j, 0.72 + 0j])
    snapped = snap_to_table(coeffs, table)
    assert snapped.r[0] == 0.7 and snapped.t[0] == 0.0
    assert snapped.r[1] == 0.0 and snapped.t[1] == 0.7


def test_table_rejects_active_states():
    with pytest.raises(PassivityError):
        CoefficientTable(np.array([[1.0, 0.2]], dtype=complex))
