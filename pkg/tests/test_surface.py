import numpy as np
import pytest
from hypothesis import given, strategies as st

from motslab import surface as S
from motslab.ambient import builtin_model
from motslab.errors import GeometryError, MeshError

EUC = builtin_model("euclidean", {})


def test_unit_sphere_geometry():
    s = S.sphere_surface(EUC, (16, 32))
    g = s.geometry
    assert np.allclose(g.H, 2.0, atol=1e-12)
    assert np.allclose(g.S_intrinsic, 2.0, atol=1e-12)
    assert S.area(s) == pytest.approx(4 * np.pi, rel=1e-13)


def test_spherical_harmonics_are_laplacian_eigenfunctions():
    s = S.sphere_surface(EUC, (24, 48), radius=2.0)
    th, ph = s.mesh.grid()
    for l, m in ((1, 0), (2, -1), (3, 2), (5, 5)):
        Y = S.real_harmonic(l, m, th, ph)
        assert np.max(np.abs(S.laplace_beltrami(s, Y) + l * (l + 1) / 4.0 * Y)) < 1e-9


@given(st.integers(0, 2**31 - 1), st.floats(0.02, 0.15))
def test_divergence_of_gradient_is_the_laplacian(seed, amp):
    # two nested spectral derivatives alias more than one; 32x64 resolves this family
    mesh = S.build_mesh("sphere", (32, 64))
    rng = np.random.default_rng(seed)
    s = S.EmbeddedSurface(mesh, EUC, 1.0 + S.band_limited_field(mesh, 3, rng, amp))
    f = S.band_limited_field(mesh, 4, rng)
    lap = S.laplace_beltrami(s, f)
    assert np.max(np.abs(S.divergence(s, S.gradient(s, f)) - lap)) < 1e-5
    assert abs(S.integrate(s, lap)) < 1e-9


@given(st.integers(0, 2**31 - 1))
def test_gauss_equation_holds_pointwise(seed):
    mesh = S.build_mesh("sphere", (20, 40))
    rng = np.random.default_rng(seed)
    model = builtin_model("schwarzschild_isotropic", {"m": 1.0})
    s = S.EmbeddedSurface(mesh, model, 1.5 + S.band_limited_field(mesh, 3, rng, 0.2))
    assert np.max(np.abs(s.geometry.gauss_residual)) < 1e-9


def test_cusp_slice_is_umbilic_with_h_equal_two():
    s = S.torus_surface(builtin_model("hyperbolic_cusp", {}), (16, 16), height=0.4)
    g = s.geometry
    assert np.allclose(g.H, 2.0, atol=1e-12)
    assert np.allclose(g.B, g.h, atol=1e-12)
    assert S.area(s) == pytest.approx(4 * np.pi**2 * np.exp(0.8), rel=1e-12)
    assert S.yamabe_type(s) is S.YamabeType.NON_POSITIVE


def test_flipping_the_normal_flips_mean_curvature():
    s = S.sphere_surface(EUC, (12, 24), radius=1.5)
    assert np.allclose(s.flipped().geometry.H, -s.geometry.H)


def test_band_limited_field_has_requested_sup_norm_and_zero_mean():
    mesh = S.build_mesh("sphere", (16, 32))
    f = S.band_limited_field(mesh, 4, np.random.default_rng(0), amplitude=0.3)
    assert np.max(np.abs(f)) == pytest.approx(0.3)
    assert abs(mesh.integrate_param(f)) < 1e-12


def test_mesh_and_graph_validation():
    with pytest.raises(MeshError):
        S.build_mesh("sphere", (4, 4))
    with pytest.raises(MeshError):
        S.build_mesh("klein", (16, 16))
    mesh = S.build_mesh("sphere", (12, 24))
    with pytest.raises(GeometryError):
        S.EmbeddedSurface(mesh, EUC, -np.ones(mesh.shape))
    with pytest.raises(GeometryError):
        S.EmbeddedSurface(mesh, EUC, np.ones((3, 3)))


def test_nodal_csv_export_is_plain_and_repeatable(tmp_path):
    s = S.sphere_surface(EUC, (8, 16))
    a = S.export_nodal_csv(tmp_path / "a.csv", s.mesh, {"H": s.geometry.H}).read_bytes()
    b = S.export_nodal_csv(tmp_path / "b.csv", s.mesh, {"H": s.geometry.H}).read_bytes()
    assert a == b and b"\r" not in a
    assert a.splitlines()[0] == b"theta,phi,H"
