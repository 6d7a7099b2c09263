import numpy as np
import pytest

from motslab import constraint as C
from motslab import surface as S
from motslab.ambient import builtin_model


def test_round_sphere_in_K_minus_delta_slice():
    # K = -g: theta_pm = H -/+ 2 on the sphere of radius r, so r = 1 is a MOTS
    model = builtin_model("minkowski_slice_with_K", {"K": {"trace": -1.0}})
    for r, expected in ((1.0, C.TrappingClass.MOTS), (2.0, C.TrappingClass.TRAPPED), (0.5, C.TrappingClass.UNTRAPPED)):
        s = S.sphere_surface(model, (12, 24), radius=r)
        ng = C.null_expansions(s)
        assert np.allclose(ng.theta_plus, 2 / r - 2, atol=1e-12)
        assert np.allclose(ng.theta_minus, -2 / r - 2, atol=1e-12)
        assert np.max(np.abs(ng.X)) < 1e-14
        assert C.classify(s) is expected


def test_schwarzschild_horizon_is_a_mots_and_vacuum():
    s = S.sphere_surface(builtin_model("schwarzschild_isotropic", {"m": 1.0}), (16, 32), radius=0.5)
    assert C.classify(s) is C.TrappingClass.MOTS
    em = C.energy_momentum(s)
    assert np.max(np.abs(em.mu)) < 1e-10
    assert np.max(np.abs(em.J)) < 1e-12


def test_expansion_matches_trace_of_null_second_fundamental_form():
    model = builtin_model("conformally_flat", {"psi": "1", "K": {"trace": 0.1, "xz": "0.3*(1 + x*y)"}})
    mesh = S.build_mesh("sphere", (16, 32))
    s = S.EmbeddedSurface(mesh, model, 1 + S.band_limited_field(mesh, 3, np.random.default_rng(4), 0.1))
    ng = C.null_expansions(s)
    assert np.max(np.abs(ng.theta_plus - ng.theta_plus_from_chi)) < 1e-12
    assert np.max(np.abs(ng.X)) > 0.1


def test_energy_density_of_trace_K_slice():
    # flat metric, K = tau g: 2 mu = (tr K)^2 - |K|^2 = 6 tau^2, J = 0
    model = builtin_model("minkowski_slice_with_K", {"K": {"trace": 0.4}})
    mu, J, _ = C.energy_momentum_at(model, np.array([[0.3, 0.1, -0.2]]))
    assert mu[0] == pytest.approx(3 * 0.16)
    assert np.max(np.abs(J)) < 1e-14
