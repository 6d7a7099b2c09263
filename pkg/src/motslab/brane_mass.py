"""Brane action of graphs in hyperbolic models and the mass-aspect integral."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import sympy

from .errors import BraneMassError
from .stability import OperatorKind, assemble
from .surface import EmbeddedSurface, SurfaceMesh, area, build_mesh, integrate

N_AMBIENT = 3


@dataclass(frozen=True)
class BraneEvaluation:
    area: float
    volume_term: float
    action: float
    reference_offset: float


def brane_action(surface: EmbeddedSurface) -> BraneEvaluation:
    """B = A - (n - 1) V with V the integral over the graph of the model's potential form.

    The potential form is Lambda = P(t) dx1 ^ dx2 with dP/dt the volume
    density, so V(graph t = F) is the flat-torus integral of P(F).
    """
    model = surface.model
    if model.potential is None:
        raise BraneMassError(f"model {model.name!r} has no registered potential form")
    if surface.mesh.topology != "torus":
        raise BraneMassError("brane action is defined for graphs over the torus base")
    A = area(surface)
    V = surface.mesh.integrate_param(model.potential(surface.F))
    offset = float(model.params.get("potential_offset", 0.0))
    return BraneEvaluation(A, V, A - (N_AMBIENT - 1) * V, offset)


def brane_variations(surface: EmbeddedSurface, phi, tol: float = 1e-8, second: bool = True) -> dict:
    """First variation int (H - (n-1)) phi dA and, on stationary surfaces, int phi L phi dA."""
    phi = np.asarray(phi, dtype=float)
    H = surface.geometry.H
    out = {"first": integrate(surface, (H - (N_AMBIENT - 1)) * phi)}
    if second:
        dev = float(np.max(np.abs(H - (N_AMBIENT - 1))))
        if dev > tol:
            raise BraneMassError(f"second variation requires H = {N_AMBIENT - 1} (sup deviation {dev:.3g})")
        op = assemble(OperatorKind.L_BRANE, surface)
        out["second"] = integrate(surface, phi * op.apply(phi))
    return out


class SignClass(str, Enum):
    NEGATIVE = "negative"
    ZERO = "zero"
    POSITIVE = "positive"
    MIXED = "mixed"


@dataclass(frozen=True, eq=False)
class MassAspect:
    k: np.ndarray = field(repr=False)           # (n1, n2, 2, 2) components in (theta, phi)
    trace_field: np.ndarray = field(repr=False)
    mass: float = 0.0
    sign_class: SignClass = SignClass.ZERO
    mesh: SurfaceMesh = field(default=None, repr=False)


_THETA, _PHI = sympy.symbols("theta phi", real=True)
_KEYS = {"tt": (0, 0), "tp": (0, 1), "pt": (1, 0), "pp": (1, 1)}


def _k_from_expressions(spec: dict, theta, phi):
    k = np.zeros(theta.shape + (2, 2))
    seen = {}
    for key, expr in spec.items():
        if key not in _KEYS:
            raise BraneMassError(f"unknown mass-aspect component {key!r}; use tt, tp, pt, pp")
        try:
            e = sympy.sympify(expr, locals={"theta": _THETA, "phi": _PHI})
        except (sympy.SympifyError, TypeError, SyntaxError, ValueError, AttributeError, NameError) as exc:
            raise BraneMassError(f"cannot parse mass-aspect component {key}: {expr!r}") from exc
        if e.free_symbols - {_THETA, _PHI}:
            raise BraneMassError(f"mass-aspect component {key} uses symbols other than theta, phi: {expr!r}")
        f = sympy.lambdify((_THETA, _PHI), e, "numpy")
        seen[key] = np.broadcast_to(f(theta, phi), theta.shape)
    for key, val in seen.items():
        i, j = _KEYS[key]
        k[..., i, j] = val
    if "tp" in seen and "pt" not in seen:
        k[..., 1, 0] = k[..., 0, 1]
    if "pt" in seen and "tp" not in seen:
        k[..., 0, 1] = k[..., 1, 0]
    return k


def mass_aspect(k_spec, mesh: SurfaceMesh | None = None, tol: float = 1e-10) -> MassAspect:
    """Trace field and mass of a symmetric 2-tensor on the unit round sphere.

    ``k_spec`` is a nodal array (n1, n2, 2, 2), a callable ``(theta, phi) ->``
    such an array, or a mapping of component expressions in ``theta`` and
    ``phi`` keyed tt, tp, pp.  The mass is the raw integral of the trace.
    """
    mesh = mesh or build_mesh("sphere", (24, 48))
    if mesh.topology != "sphere":
        raise BraneMassError("mass aspect lives on the sphere")
    theta, phi = mesh.grid()
    if isinstance(k_spec, dict):
        k = _k_from_expressions(k_spec, theta, phi)
    elif callable(k_spec):
        k = np.asarray(k_spec(theta, phi), dtype=float)
    else:
        k = np.asarray(k_spec, dtype=float)
    if k.shape != mesh.shape + (2, 2):
        raise BraneMassError(f"mass aspect must have shape {mesh.shape + (2, 2)}, got {k.shape}")
    asym = float(np.max(np.abs(k[..., 0, 1] - k[..., 1, 0])))
    if asym > tol * max(1.0, float(np.max(np.abs(k)))):
        raise BraneMassError(f"mass aspect tensor is not symmetric (residual {asym:.3g})")
    tr = k[..., 0, 0] + k[..., 1, 1] / np.sin(theta) ** 2
    mass = mesh.integrate_param(tr)
    pos, neg = np.any(tr > tol), np.any(tr < -tol)
    if pos and neg:
        sign = SignClass.MIXED
    elif pos:
        sign = SignClass.POSITIVE
    elif neg:
        sign = SignClass.NEGATIVE
    else:
        sign = SignClass.ZERO
    return MassAspect(k, tr, float(mass), sign, mesh)
