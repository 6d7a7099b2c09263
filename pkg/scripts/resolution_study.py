"""Truncation error of the geometric identities against grid resolution.

Prints, per grid, the worst Gauss-Bonnet defect over a family of random
star-shaped spheres and the worst divergence-identity residual over random
drift cases. Used to size fixtures against the reference grids.
"""

import argparse

import numpy as np

from motslab import stability as T
from motslab import surface as S
from motslab.ambient import builtin_model


def gauss_bonnet_defect(res, amplitude, count):
    mesh = S.build_mesh("sphere", res)
    model = builtin_model("schwarzschild_isotropic", {"m": 1.0})
    worst = 0.0
    for k in range(count):
        F = 1.5 * (1 + S.band_limited_field(mesh, 4, np.random.default_rng(1000 + k), amplitude))
        s = S.EmbeddedSurface(mesh, model, F)
        worst = max(worst, abs(S.integrate(s, s.geometry.S_intrinsic) - 8 * np.pi))
    return worst


def divergence_residual(res, drift, count):
    mesh = S.build_mesh("sphere", res)
    worst = 0.0
    for k in range(count):
        rng = np.random.default_rng(5000 + k)
        a, b = drift * rng.uniform(-1, 1, 2)
        model = builtin_model("conformally_flat", {"psi": "1", "K": {"xz": f"{float(a)!r}*(1 + x*y)", "yz": f"{float(b)!r}*z"}})
        s = S.EmbeddedSurface(mesh, model, 1 + S.band_limited_field(mesh, 3, rng, 0.1))
        worst = max(worst, T.divergence_identity_check(s)["residual_sup"])
    return worst


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--amplitude", type=float, default=0.2, help="relative surface perturbation")
    ap.add_argument("--drift", type=float, default=0.4, help="size of the off-diagonal K components")
    ap.add_argument("--count", type=int, default=5)
    args = ap.parse_args()
    print(f"{'grid':>9} {'GB defect':>12} {'div identity':>14}")
    for res in ((16, 32), (24, 48), (32, 64), (40, 80)):
        gb = gauss_bonnet_defect(res, args.amplitude, args.count)
        dv = divergence_residual(res, args.drift, args.count)
        print(f"{res[0]:>4}x{res[1]:<4} {gb:12.3e} {dv:14.3e}", flush=True)


if __name__ == "__main__":
    main()
