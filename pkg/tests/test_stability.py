import numpy as np
import pytest
from hypothesis import given, strategies as st

from motslab import stability as T
from motslab import surface as S
from motslab.ambient import builtin_model
from motslab.errors import OperatorError

EUC = builtin_model("euclidean", {})
SCHW = builtin_model("schwarzschild_isotropic", {"m": 1.0})
DRIFT = builtin_model("conformally_flat", {"psi": "1", "K": {"trace": 0.1, "xz": "0.3*(1 + x*y)"}})


def test_unit_sphere_jacobi_spectrum():
    op = T.assemble("L_minimal", S.sphere_surface(EUC, (16, 32)))
    sp = T.principal_eigenvalue(op)
    assert sp.lambda1 == pytest.approx(-2.0, abs=1e-10)
    ev = np.sort(sp.eigenvalues.real)
    assert np.allclose(ev[:4], [-2, 0, 0, 0], atol=1e-9)
    assert sp.positivity_ok and sp.imag_residual == 0.0


def test_schwarzschild_horizon_operators_agree():
    s = S.sphere_surface(SCHW, (16, 32), radius=0.5)
    lams = [T.principal_eigenvalue(T.assemble(k, s)).lambda1 for k in ("L_minimal", "L0_symmetrized", "L_bar_mots")]
    assert np.allclose(lams, 0.25, atol=1e-10)
    gauss = T.assemble("L_minimal", s, form="gauss").matrix
    assert np.max(np.abs(gauss - T.assemble("L_minimal", s).matrix)) < 1e-9


def test_drift_operator_is_nonsymmetric_but_has_real_principal_pair():
    mesh = S.build_mesh("sphere", (16, 32))
    s = S.EmbeddedSurface(mesh, DRIFT, 1 + S.band_limited_field(mesh, 2, np.random.default_rng(2), 0.1))
    op = T.assemble("L_bar_mots", s)
    assert not op.symmetric_flag
    sp = T.principal_eigenvalue(op)
    assert sp.imag_residual <= 1e-10 and np.min(sp.eigenfunction) > 0


@given(st.integers(0, 10_000))
def test_rayleigh_quotient_bounds_principal_eigenvalue(seed):
    mesh = S.build_mesh("sphere", (12, 24))
    rng = np.random.default_rng(seed)
    s = S.EmbeddedSurface(mesh, SCHW, 1.5 + S.band_limited_field(mesh, 2, rng, 0.2))
    op = T.assemble("L_minimal", s)
    lam = T.principal_eigenvalue(op).lambda1
    psi = 1 + S.band_limited_field(mesh, 3, rng, 0.5)
    assert T.rayleigh_quotient(op, psi) >= lam - 1e-10


def test_rayleigh_minimize_reaches_L0_eigenvalue():
    s = S.sphere_surface(DRIFT, (16, 32))
    op = T.assemble("L0_symmetrized", s)
    res = T.rayleigh_minimize(op, trials=8, seed=1)
    assert res.value == pytest.approx(T.principal_eigenvalue(op).lambda1, abs=1e-8)


def test_comparison_gap_vanishes_without_drift():
    model = builtin_model("minkowski_slice_with_K", {"K": {"trace": -0.3}})
    cmp = T.eigenvalue_comparison(S.sphere_surface(model, (12, 24), radius=1.2))
    assert cmp["X_sup"] < 1e-14
    assert abs(cmp["gap"]) < 1e-10


@given(st.integers(0, 10_000), st.floats(0.05, 0.4))
def test_conformal_scalar_formula_matches_direct_route(seed, amp):
    mesh = S.build_mesh("sphere", (16, 32))
    rng = np.random.default_rng(seed)
    s = S.EmbeddedSurface(mesh, SCHW, 1.5 + S.band_limited_field(mesh, 2, rng, 0.1))
    phi = 1 + S.band_limited_field(mesh, 3, rng, amp)
    assert T.conformal_scalar(s, phi).residual < 1e-7


def test_conformal_scalar_rejects_nonpositive_factor():
    s = S.sphere_surface(EUC, (8, 16))
    with pytest.raises(OperatorError):
        T.conformal_scalar(s, np.zeros(s.mesh.shape))


def test_brane_operator_on_cusp_slice_has_zero_principal_eigenvalue():
    s = S.torus_surface(builtin_model("hyperbolic_cusp", {}), (16, 16))
    assert abs(T.principal_eigenvalue(T.assemble("L_brane", s)).lambda1) < 1e-9
