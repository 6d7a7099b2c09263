import numpy as np
import pytest
from hypothesis import given, strategies as st

from motslab import brane_mass as BM
from motslab import surface as S
from motslab.ambient import builtin_model
from motslab.errors import BraneMassError

CUSP = builtin_model("hyperbolic_cusp", {})


@given(st.floats(-1.0, 1.0))
def test_brane_action_vanishes_on_every_slice(t):
    s = S.torus_surface(CUSP, (12, 12), height=t)
    ev = BM.brane_action(s)
    assert ev.area == pytest.approx(4 * np.pi**2 * np.exp(2 * t), rel=1e-12)
    assert abs(ev.action) <= 1e-10 * ev.area


@given(st.integers(0, 10_000), st.floats(0.01, 0.1))
def test_slices_minimize_the_brane_action(seed, amp):
    base = S.torus_surface(CUSP, (16, 16))
    pert = base.with_height(S.band_limited_field(base.mesh, 3, np.random.default_rng(seed), amp))
    assert BM.brane_action(pert).action >= BM.brane_action(base).action - 1e-8


def test_brane_second_variation_of_a_single_mode():
    s = S.torus_surface(CUSP, (16, 16))
    U1, _ = s.mesh.grid()
    var = BM.brane_variations(s, np.sin(U1))
    assert var["first"] == pytest.approx(0.0, abs=1e-12)
    # int |grad sin x|^2 over the flat 2pi-torus
    assert var["second"] == pytest.approx(2 * np.pi**2, rel=1e-10)


@given(st.floats(-5, 5))
def test_mass_of_pure_trace_aspect(c):
    m = BM.mass_aspect({"tt": repr(c), "pp": f"{c!r}*sin(theta)**2"})
    assert m.mass == pytest.approx(8 * np.pi * c, abs=1e-10)


def test_traceless_aspect_has_zero_mass_and_class():
    m = BM.mass_aspect({"tt": "cos(phi)*sin(theta)", "pp": "-cos(phi)*sin(theta)**3"})
    assert abs(m.mass) < 1e-12
    assert m.sign_class is BM.SignClass.ZERO


def test_mixed_sign_aspect():
    m = BM.mass_aspect({"tt": "cos(theta)", "pp": "cos(theta)*sin(theta)**2"})
    assert m.sign_class is BM.SignClass.MIXED and abs(m.mass) < 1e-12


def test_mass_aspect_rejects_asymmetric_and_misshaped_input():
    with pytest.raises(BraneMassError):
        BM.mass_aspect({"tt": "1", "tp": "1", "pt": "0", "pp": "sin(theta)**2"})
    with pytest.raises(BraneMassError):
        BM.mass_aspect(np.zeros((3, 3, 2, 2)))


def test_brane_action_needs_a_torus():
    with pytest.raises(BraneMassError):
        BM.brane_action(S.sphere_surface(builtin_model("euclidean", {}), (8, 16)))


@pytest.mark.parametrize("expr", ["1 +", "rho*sin(theta)"])
def test_mass_aspect_rejects_unparsable_components(expr):
    with pytest.raises(BraneMassError):
        BM.mass_aspect({"tt": expr, "pp": "sin(theta)**2"})


@given(st.floats(-3, 3))
def test_action_differences_ignore_the_potential_constant(offset):
    shifted = builtin_model("hyperbolic_cusp", {"potential_offset": offset})
    mesh = S.build_mesh("torus", (12, 12), CUSP.params["periods"])
    F = 0.2 + S.band_limited_field(mesh, 2, np.random.default_rng(3), 0.1)
    diffs = []
    for model in (CUSP, shifted):
        a = BM.brane_action(S.EmbeddedSurface(mesh, model, F)).action
        b = BM.brane_action(S.EmbeddedSurface(mesh, model, np.zeros(mesh.shape))).action
        diffs.append(a - b)
    assert diffs[0] == pytest.approx(diffs[1], abs=1e-10)
