"""Resolution studies behind the two criteria left unmet at the reference grids.

The same randomized fixtures are rebuilt on finer grids. Errors must fall
geometrically and sit well under the acceptance tolerance one step up.
"""

import numpy as np
import pytest

from motslab import stability as T
from motslab import surface as S
from motslab.ambient import builtin_model

from test_acceptance import _drift_model


def _gb_sphere_error(res):
    mesh = S.build_mesh("sphere", res)
    worst = 0.0
    for name, params, r0 in (("euclidean", {}, 1.0), ("schwarzschild_isotropic", {"m": 1.0}, 1.5)):
        model = builtin_model(name, params)
        for k in range(10):
            F = r0 * (1.0 + S.band_limited_field(mesh, 4, np.random.default_rng(1000 + k), amplitude=0.2))
            s = S.EmbeddedSurface(mesh, model, F)
            worst = max(worst, abs(S.integrate(s, s.geometry.S_intrinsic) - 8 * np.pi))
    return worst


def _gb_torus_error(res):
    worst = 0.0
    for name in ("hyperbolic_cusp", "product_line_x_flat_torus"):
        base = S.torus_surface(builtin_model(name, {}), res)
        for k in range(5):
            rng = np.random.default_rng(2000 + k)
            s = base.with_height(0.2 * k / 4 + S.band_limited_field(base.mesh, 3, rng, amplitude=0.3))
            worst = max(worst, abs(S.integrate(s, s.geometry.S_intrinsic)))
    return worst


@pytest.mark.slow
def test_gauss_bonnet_converges_spectrally_on_spheres():
    errs = [_gb_sphere_error(r) for r in ((24, 48), (32, 64), (40, 80))]
    assert errs[1] < errs[0] / 50 and errs[2] < errs[1] / 50
    assert errs[1] <= 1e-8


@pytest.mark.slow
def test_gauss_bonnet_converges_spectrally_on_tori():
    errs = [_gb_torus_error(r) for r in ((32, 32), (48, 48), (64, 64))]
    assert errs[1] < errs[0] / 100 and errs[2] < errs[1] / 100
    assert errs[2] <= 1e-8


@pytest.mark.slow
def test_divergence_identity_worst_case_converges():
    # case 4 of the comparison suite is the one that exceeds 1e-6 at 24x48
    out = []
    for res in ((24, 48), (32, 64)):
        rng = np.random.default_rng(5004)
        model = _drift_model(rng, True)
        mesh = S.build_mesh("sphere", res)
        s = S.EmbeddedSurface(mesh, model, 1.0 + S.band_limited_field(mesh, 3, rng, amplitude=0.1))
        sp = T.principal_eigenvalue(T.assemble("L_bar_mots", s))
        out.append((sp.lambda1, T.divergence_identity_check(s, sp)["residual_sup"]))
    (lam0, r0), (lam1, r1) = out
    assert r0 > 1e-6
    assert r1 <= 1e-7
    # the field is sup-normalized over grid nodes, so the two surfaces differ slightly
    assert abs(lam0 - lam1) < 1e-3
