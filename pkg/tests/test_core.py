import math

import numpy as np
import pytest

from omnisurf import (
    C0,
    ConfigError,
    PlaneWaveSource,
    PointSource,
    Position3D,
    SideError,
    SurfaceGeometry,
    Wavelength,
    element_center,
    incident_field,
    sampling_grid,
)


def test_wavelength_k_identity():
    for lam in (1.0, 0.010707, 3e8):
        w = Wavelength(lam)
        assert w.k * w.lambda_m == pytest.approx(2 * math.pi, rel=1e-15)


def test_wavelength_from_frequency_28ghz():
    w = Wavelength.from_frequency(28e9)
    assert w.lambda_m == pytest.approx(C0 / 28e9, rel=1e-15)
    assert w.lambda_m == pytest.approx(0.010707, rel=1e-4)


def test_wavelength_rejects_nonpositive():
    with pytest.raises(ConfigError):
        Wavelength(0.0)
    with pytest.raises(ConfigError):
        Wavelength.from_frequency(-1.0)


def test_geometry_extents_and_diagonal():
    g = SurfaceGeometry(nx=10, ny=10, dx=0.5, dy=0.5)
    assert g.extent_x == pytest.approx(5.0)
    assert g.extent_y == pytest.approx(5.0)
    assert g.diagonal == pytest.approx(math.sqrt(50.0))
    assert g.num_elements == 100


def test_element_centers_row_major_and_centered():
    g = SurfaceGeometry(nx=3, ny=2, dx=0.1, dy=0.2, origin=Position3D(1.0, -1.0, 0.0))
    centers = g.element_centers()
    assert centers.shape == (6, 3)
    # element 0 is the (ix=0, iy=0) corner
    assert centers[0] == pytest.approx([1.0 - 0.1, -1.0 - 0.1, 0.0])
    # element m = iy*nx + ix
    assert centers[4] == pytest.approx([1.0, -1.0 + 0.1, 0.0])
    # the grid is centered on the origin
    assert centers.mean(axis=0) == pytest.approx([1.0, -1.0, 0.0])
    for m in range(6):
        c = element_center(g, m)
        assert centers[m] == pytest.approx([c.x, c.y, c.z])


def test_element_center_bounds():
    g = SurfaceGeometry(nx=2, ny=2, dx=0.1, dy=0.1)
    with pytest.raises(ConfigError):
        element_center(g, 4)
    with pytest.raises(ConfigError):
        element_center(g, -1)


def test_geometry_rejects_bad_counts_and_pitch():
    with pytest.raises(ConfigError):
        SurfaceGeometry(nx=0, ny=1, dx=0.1, dy=0.1)
    with pytest.raises(ConfigError):
        SurfaceGeometry(nx=1, ny=1, dx=-0.1, dy=0.1)


def test_plane_wave_direction_checks():
    w = Wavelength(1.0)
    with pytest.raises(ConfigError):
        PlaneWaveSource(1.0, (0.0, 0.0, 2.0), w)
    with pytest.raises(SideError):
        PlaneWaveSource(1.0, (0.0, 0.0, -1.0), w)


def test_plane_wave_phase_convention():
    # propagation along +z: field at z carries e^{-jkz}
    w = Wavelength(2.0)
    src = PlaneWaveSource(1.0, (0.0, 0.0, 1.0), w)
    pts = np.array([[0.0, 0.0, 0.5]])
    assert src.field_at(pts)[0] == pytest.approx(np.exp(-1j * w.k * 0.5))


def test_point_source_spherical_wave():
    w = Wavelength(1.0)
    src = PointSource(Position3D(0.0, 0.0, -2.0), 3.0, w)
    val = src.field_at(np.array([[0.0, 0.0, 0.0]]))[0]
    assert val == pytest.approx(3.0 * np.exp(-1j * w.k * 2.0) / 2.0)


def test_point_source_rejects_surface_plane():
    with pytest.raises(SideError):
        PointSource(Position3D(0.0, 0.0, 0.0), 1.0, Wavelength(1.0))


def test_sampling_grid_alignment():
    g = SurfaceGeometry(nx=4, ny=3, dx=0.5, dy=0.5)
    grid = sampling_grid(g, samples_per_element=2)
    assert grid.shape == (6, 8)
    assert grid.dx == pytest.approx(0.25)
    assert grid.x_coords().mean() == pytest.approx(0.0, abs=1e-15)
    assert grid.total_power() == 0.0


def test_incident_field_plane_wave_oblique():
    w = Wavelength(1.0)
    g = SurfaceGeometry(nx=2, ny=1, dx=0.5, dy=0.5)
    th = math.radians(30)
    src = PlaneWaveSource(1.0, (math.sin(th), 0.0, math.cos(th)), w)
    ap = incident_field(src, g, 1)
    x = ap.field.x_coords()
    expected = np.exp(-1j * w.k * math.sin(th) * x)
    assert ap.values[0] == pytest.approx(expected)


def test_incident_field_rejects_source_behind_surface():
    w = Wavelength(1.0)
    g = SurfaceGeometry(nx=2, ny=2, dx=0.5, dy=0.5)
    src = PointSource(Position3D(0.0, 0.0, 1.0), 1.0, w)
    with pytest.raises(SideError):
        incident_field(src, g)
