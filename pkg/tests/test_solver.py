import numpy as np
import pytest

from motslab import solver as V
from motslab import surface as S
from motslab.ambient import builtin_model
from motslab.errors import HypothesisError, SolverError

SCHW = builtin_model("schwarzschild_isotropic", {"m": 1.0})
EUC = builtin_model("euclidean", {})
CUSP = builtin_model("hyperbolic_cusp", {})


@pytest.mark.slow
def test_horizon_from_perturbed_guess_converges_quadratically():
    mesh = S.build_mesh("sphere", (16, 32))
    guess = S.EmbeddedSurface(mesh, SCHW, 0.7 + S.band_limited_field(mesh, 2, np.random.default_rng(1), 0.05))
    res = V.find_mots(SCHW, guess)
    assert np.max(np.abs(res.surface.F - 0.5)) < 1e-8
    assert res.lambda1 == pytest.approx(0.25, abs=1e-8)
    tail = [h["residual"] for h in res.history][-3:]
    assert tail[-1] < 1e-10 and tail[-2] < 1e-3


def test_K_minus_delta_mots_is_the_unit_sphere():
    model = builtin_model("minkowski_slice_with_K", {"K": {"trace": -1.0}})
    res = V.find_mots(model, S.sphere_surface(model, (12, 24), radius=1.4))
    # translates of the unit sphere are MOTS too; the least-squares step may pick a tiny shift
    X = res.surface.embedding()
    centre = np.array([S.integrate(res.surface, X[..., i]) for i in range(3)]) / S.area(res.surface)
    assert np.allclose(np.linalg.norm(X - centre, axis=-1), 1.0, atol=1e-9)
    assert S.area(res.surface) == pytest.approx(4 * np.pi, rel=1e-10)


def test_no_mots_in_flat_time_symmetric_space():
    with pytest.raises(SolverError) as info:
        V.find_mots(EUC, S.sphere_surface(EUC, (12, 24), radius=1.0))
    assert info.value.history


@pytest.mark.parametrize("policy", ["auto", "project_out_constants", "pin_mean_height"])
def test_cusp_cmc_recovers_a_flat_slice(policy):
    mesh = S.build_mesh("torus", (16, 16), CUSP.params["periods"])
    U1, _ = mesh.grid()
    res = V.find_cmc(CUSP, S.EmbeddedSurface(mesh, CUSP, 0.1 * np.sin(U1)), 2.0, V.SolveOptions(kernel_policy=policy))
    assert np.ptp(res.surface.F) < 1e-9
    assert res.residual_sup <= 1e-10


def test_round_sphere_cmc_in_flat_space():
    res = V.find_cmc(EUC, S.sphere_surface(EUC, (12, 24), radius=2.3), 1.0)
    assert np.allclose(res.surface.F, 2.0, atol=1e-9)


@pytest.mark.slow
def test_cusp_foliation_is_the_warped_splitting():
    fol = V.foliate(CUSP, S.torus_surface(CUSP, (16, 16)), "cmc", (-0.2, 0.2), 5)
    t = np.array([r.t for r in fol.records])
    A = np.array([r.area for r in fol.records])
    assert np.allclose(A, 4 * np.pi**2 * np.exp(2 * t), rtol=1e-10)
    assert fol.first_variation_error() < 1e-6
    assert all(abs(r.constant - 2) < 1e-10 for r in fol.records)


def test_variation_check_orders_on_horizon():
    s = S.sphere_surface(SCHW, (16, 32), radius=0.5)
    phi = 1 + S.band_limited_field(s.mesh, 2, np.random.default_rng(0), 0.3)
    for which in ("area_second_variation", "null_expansion_derivative"):
        rep = V.variation_check(s, phi, which)
        assert rep.passed(1.9), rep


def test_variation_check_refuses_non_stationary_surfaces():
    s = S.sphere_surface(SCHW, (12, 24), radius=0.9)
    phi = np.ones(s.mesh.shape)
    with pytest.raises(HypothesisError):
        V.variation_check(s, phi, "area_second_variation")
    with pytest.raises(HypothesisError):
        V.variation_check(s, phi, "null_expansion_derivative")


@pytest.mark.slow
def test_constant_expansion_foliation_of_round_spheres():
    # flat slice with K = -g: leaves are spheres r = 1 + t with theta_+ = 2/r - 2
    model = builtin_model("minkowski_slice_with_K", {"K": {"trace": -1.0}})
    fol = V.foliate(model, S.sphere_surface(model, (12, 24)), "constant_null_expansion", (-0.2, 0.2), 5,
                    check_conformal=False)
    for r in fol.records:
        assert r.constant == pytest.approx(2 / (1 + r.t) - 2, abs=1e-9)
        assert r.constant_rate == pytest.approx(-2 / (1 + r.t) ** 2, rel=1e-6)
