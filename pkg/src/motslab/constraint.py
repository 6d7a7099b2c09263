"""Initial-data quantities along a surface: null expansions, mu, J, drift X."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .ambient import christoffel_from_jet
from .surface import EmbeddedSurface, area, divergence


@dataclass(frozen=True, eq=False)
class NullGeometry:
    theta_plus: np.ndarray
    theta_minus: np.ndarray
    chi_plus: np.ndarray
    chi_minus: np.ndarray
    chi_plus_norm2: np.ndarray
    chi_minus_norm2: np.ndarray
    tr_h_K: np.ndarray
    K_surface: np.ndarray       # K restricted to T Sigma, components (n1, n2, 2, 2)
    X: np.ndarray               # tangent drift, chart components (n1, n2, 3)
    div_X: np.ndarray
    X_norm2: np.ndarray
    h_inv: np.ndarray

    @property
    def theta_plus_from_chi(self) -> np.ndarray:
        return np.einsum("...ij,...ij->...", self.h_inv, self.chi_plus)


@dataclass(frozen=True, eq=False)
class EnergyMomentum:
    mu: np.ndarray
    J: np.ndarray               # covector chart components (n1, n2, 3)
    J_nu: np.ndarray
    J_norm: np.ndarray

    @property
    def dec_margin(self) -> np.ndarray:
        return self.mu - self.J_norm


def _norm2(h_inv, T):
    return np.einsum("...ik,...jl,...ij,...kl->...", h_inv, h_inv, T, T)


def null_expansions(surface: EmbeddedSurface) -> NullGeometry:
    """chi_pm = K|_Sigma +- B and theta_pm = tr_h K +- H for the surface's normal."""
    geo = surface.geometry
    K = surface.model.extrinsic(geo.X)
    Ks = np.einsum("...ab,...ia,...jb->...ij", K, geo.tangents, geo.tangents)
    trK = np.einsum("...ij,...ij->...", geo.h_inv, Ks)
    chi_p = Ks + geo.B
    chi_m = Ks - geo.B
    w = np.einsum("...ab,...a,...jb->...j", K, geo.nu, geo.tangents)   # K(nu, X_j)
    X = np.einsum("...ij,...j,...ia->...a", geo.h_inv, w, geo.tangents)
    return NullGeometry(
        theta_plus=trK + geo.H,
        theta_minus=trK - geo.H,
        chi_plus=chi_p,
        chi_minus=chi_m,
        chi_plus_norm2=_norm2(geo.h_inv, chi_p),
        chi_minus_norm2=_norm2(geo.h_inv, chi_m),
        tr_h_K=trK,
        K_surface=Ks,
        X=X,
        div_X=divergence(surface, X),
        X_norm2=np.einsum("...ij,...i,...j->...", geo.h_inv, w, w),
        h_inv=geo.h_inv,
    )


def energy_momentum_at(model, x):
    """Pointwise (mu, J) at chart points; ambient metric and connection throughout."""
    x = np.asarray(x, dtype=float)
    g, dg, _ = model.jet(x)
    ginv = np.linalg.inv(g)
    K, dK = model.extrinsic_jet_at(x)
    _, S = model.curvature(x)
    trK = np.einsum("...ab,...ab->...", ginv, K)
    K_up = np.einsum("...ac,...bd,...cd->...ab", ginv, ginv, K)
    mu = 0.5 * (S + trK**2 - np.einsum("...ab,...ab->...", K_up, K))
    gam = christoffel_from_jet(g, dg)
    # nabla_c K_ab = d_c K_ab - Gamma^d_ca K_db - Gamma^d_cb K_ad
    covK = dK - np.einsum("...dca,...db->...cab", gam, K) - np.einsum("...dcb,...ad->...cab", gam, K)
    divK = np.einsum("...bc,...cba->...a", ginv, covK)
    # d_a(g^bc K_bc) with d g^bc = -g^bd (d g_de) g^ec
    dginv = -np.einsum("...bd,...ade,...ec->...abc", ginv, dg, ginv)
    dtrK = np.einsum("...bc,...abc->...a", ginv, dK) + np.einsum("...abc,...bc->...a", dginv, K)
    J = divK - dtrK
    return mu, J, ginv


def energy_momentum(surface: EmbeddedSurface) -> EnergyMomentum:
    geo = surface.geometry
    mu, J, ginv = energy_momentum_at(surface.model, geo.X)
    return EnergyMomentum(
        mu=mu,
        J=J,
        J_nu=np.einsum("...a,...a->...", J, geo.nu),
        J_norm=np.sqrt(np.maximum(np.einsum("...ab,...a,...b->...", ginv, J, J), 0.0)),
    )


class TrappingClass(str, Enum):
    TRAPPED = "trapped"
    OUTER_TRAPPED = "outer_trapped"
    MOTS = "MOTS"
    UNTRAPPED = "untrapped"
    MIXED = "mixed"


def mots_tolerance(surface: EmbeddedSurface, scale: float = 1e-8) -> float:
    """Default MOTS tolerance: ``scale`` over the area radius of the surface."""
    return scale / np.sqrt(area(surface) / (4 * np.pi))


def classify(surface: EmbeddedSurface, tol: float | None = None) -> TrappingClass:
    ng = null_expansions(surface)
    tol = mots_tolerance(surface) if tol is None else tol
    tp, tm = ng.theta_plus, ng.theta_minus
    if np.max(np.abs(tp)) <= tol:
        return TrappingClass.MOTS
    if np.all(tp < -tol) and np.all(tm < -tol):
        return TrappingClass.TRAPPED
    if np.all(tp < -tol):
        return TrappingClass.OUTER_TRAPPED
    if np.all(tp > tol):
        return TrappingClass.UNTRAPPED
    return TrappingClass.MIXED
