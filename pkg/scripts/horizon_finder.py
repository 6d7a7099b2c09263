"""Find the Schwarzschild horizon from a non-round guess and report Newton convergence."""

import argparse

import numpy as np

from motslab import solver as V
from motslab import surface as S
from motslab.ambient import builtin_model


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mass", type=float, default=1.0)
    ap.add_argument("--radius", type=float, default=0.8)
    ap.add_argument("--wiggle", type=float, default=0.05)
    ap.add_argument("--resolution", type=int, nargs=2, default=(24, 48))
    args = ap.parse_args()
    model = builtin_model("schwarzschild_isotropic", {"m": args.mass})
    mesh = S.build_mesh("sphere", args.resolution)
    guess = S.EmbeddedSurface(mesh, model, args.radius + S.band_limited_field(mesh, 3, np.random.default_rng(0), args.wiggle))
    res = V.find_mots(model, guess)
    for h in res.history:
        print(f"iter {h['iteration']:2d}  sup|theta+| {h['residual']:.3e}")
    A = S.area(res.surface)
    print(f"graph deviation from r = m/2: {np.max(np.abs(res.surface.F - args.mass / 2)):.3e}")
    print(f"area / 16 pi m^2 - 1: {A / (16 * np.pi * args.mass**2) - 1:.3e}")
    print(f"lambda1 of the MOTS operator: {res.lambda1:.12f}")


if __name__ == "__main__":
    main()
