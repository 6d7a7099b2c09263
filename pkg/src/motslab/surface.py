"""Pseudospectral closed 2-surfaces embedded as graphs in an ambient chart.

Two base topologies are supported:

* ``sphere``: Gauss-Legendre nodes in colatitude times equispaced longitude.
  Nodal functions are represented in a double-Fourier-sphere basis: Fourier
  modes in longitude and, for each longitudinal wavenumber m, cos(k theta)
  (m even) or sin(k theta) (m odd).  This keeps differentiation spectrally
  accurate for every smooth scalar on the sphere while never touching the
  poles.
* ``torus``: equispaced periodic tensor grid with Fourier differentiation.

A surface is a graph ``X(u) = base(u) + F(u) * dir(u)``: radial over a round
sphere (``base = center``, ``dir`` the unit radial vector) or a level graph
``t = F(x1, x2)`` over a flat torus.  Only smooth scalars (chart components
of X and of tangent vector fields, test functions) are ever differentiated;
tensor components are assembled from them by the chain rule.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from math import comb
from pathlib import Path

import numpy as np
from scipy.special import sph_harm_y

from .ambient import AmbientModel, christoffel_from_jet
from .errors import GeometryError, MeshError

SPHERE_MIN = (8, 16)
TORUS_MIN = (8, 8)

# all (a, b) with a + b <= 3: a derivatives in u1, b in u2
DERIV_ORDERS = [(a, b) for n in range(4) for a in range(n, -1, -1) for b in [n - a]]


@dataclass(frozen=True, eq=False)
class SurfaceMesh:
    topology: str
    resolution: tuple[int, int]
    u1: np.ndarray = field(repr=False)
    u2: np.ndarray = field(repr=False)
    quad_weights: np.ndarray = field(repr=False)
    periods: tuple[float, float]
    _theta_ops: dict = field(default_factory=dict, repr=False)
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def shape(self) -> tuple[int, int]:
        return self.resolution

    @property
    def size(self) -> int:
        return self.resolution[0] * self.resolution[1]

    @property
    def param_area(self) -> float:
        return 4 * np.pi if self.topology == "sphere" else self.periods[0] * self.periods[1]

    def grid(self):
        return np.meshgrid(self.u1, self.u2, indexing="ij")

    def deriv(self, f, a: int = 0, b: int = 0) -> np.ndarray:
        """d^a/du1^a d^b/du2^b of nodal ``f`` with shape (..., n1, n2)."""
        f = np.asarray(f, dtype=float)
        if a == 0 and b == 0:
            return f.copy()
        n1, n2 = self.resolution
        if self.topology == "torus":
            c = np.fft.fft2(f, axes=(-2, -1))
            c = c * _fourier_mult(n1, self.periods[0], a)[:, None] * _fourier_mult(n2, self.periods[1], b)[None, :]
            return np.real(np.fft.ifft2(c, axes=(-2, -1)))
        c = np.fft.rfft(f, axis=-1)
        c = c * _rfourier_mult(n2, b)
        out = np.empty_like(c)
        m = np.arange(c.shape[-1])
        even, odd = m % 2 == 0, m % 2 == 1
        out[..., even] = np.einsum("ij,...jm->...im", self._theta_ops[0, a], c[..., even])
        out[..., odd] = np.einsum("ij,...jm->...im", self._theta_ops[1, a], c[..., odd])
        return np.fft.irfft(out, n=n2, axis=-1)

    def deriv_matrix(self, a: int, b: int) -> np.ndarray:
        """Dense (N, N) matrix of ``deriv`` acting on row-major flattened nodal vectors."""
        key = ("D", a, b)
        if key not in self._cache:
            eye = np.eye(self.size).reshape((self.size,) + self.resolution)
            cols = self.deriv(eye, a, b).reshape(self.size, self.size)
            self._cache[key] = np.ascontiguousarray(cols.T)
        return self._cache[key]

    def integrate_param(self, f) -> float:
        return float(np.sum(self.quad_weights * f))

    def band_basis(self, degree: int) -> np.ndarray:
        """Real band-limited basis at the nodes, shape (count, n1, n2).

        Sphere: real spherical harmonics with l <= degree.  Torus: real
        Fourier modes with |k1|, |k2| <= degree.
        """
        key = ("basis", degree)
        if key in self._cache:
            return self._cache[key]
        U1, U2 = self.grid()
        funcs = []
        if self.topology == "sphere":
            for l in range(degree + 1):
                for m in range(-l, l + 1):
                    funcs.append(real_harmonic(l, m, U1, U2))
        else:
            w1 = 2 * np.pi / self.periods[0]
            w2 = 2 * np.pi / self.periods[1]
            for k1 in range(degree + 1):
                for k2 in range(-degree, degree + 1):
                    if k1 == 0 and k2 < 0:
                        continue
                    arg = k1 * w1 * U1 + k2 * w2 * U2
                    funcs.append(np.cos(arg))
                    if k1 or k2:
                        funcs.append(np.sin(arg))
        basis = np.array(funcs)
        self._cache[key] = basis
        return basis


def _fourier_mult(n, period, order):
    k = np.fft.fftfreq(n, d=1.0 / n) * (2 * np.pi / period)
    mult = (1j * k) ** order
    if order % 2 == 1 and n % 2 == 0:
        mult[n // 2] = 0.0
    return mult


def _rfourier_mult(n, order):
    m = np.arange(n // 2 + 1, dtype=float)
    mult = (1j * m) ** order
    if order % 2 == 1 and n % 2 == 0:
        mult[-1] = 0.0
    return mult


def _theta_basis(theta, parity, order):
    n = theta.size
    ks = np.arange(n) if parity == 0 else np.arange(1, n + 1)
    ang = np.outer(theta, ks)
    if parity == 0:
        fns = (np.cos, lambda t: -np.sin(t), lambda t: -np.cos(t), np.sin)
    else:
        fns = (np.sin, np.cos, lambda t: -np.sin(t), lambda t: -np.cos(t))
    return fns[order % 4](ang) * ks.astype(float) ** order


def build_mesh(topology: str, resolution, periods=None) -> SurfaceMesh:
    """Nodes, quadrature and spectral differentiation for a base surface.

    ``resolution`` is (n_theta, n_phi) for the sphere and (n1, n2) for the
    torus; torus ``periods`` default to (2 pi, 2 pi).
    """
    n1, n2 = (int(r) for r in resolution)
    if topology == "sphere":
        if n1 < SPHERE_MIN[0] or n2 < SPHERE_MIN[1]:
            raise MeshError(f"sphere resolution {n1}x{n2} below minimum {SPHERE_MIN[0]}x{SPHERE_MIN[1]}")
        if n2 % 2:
            raise MeshError("sphere longitude count must be even")
        x, w = np.polynomial.legendre.leggauss(n1)
        theta = np.arccos(x)[::-1].copy()
        w = w[::-1].copy()
        phi = 2 * np.pi * np.arange(n2) / n2
        weights = np.outer(w, np.full(n2, 2 * np.pi / n2))
        ops = {}
        for parity in (0, 1):
            vinv = np.linalg.inv(_theta_basis(theta, parity, 0))
            for order in range(4):
                ops[parity, order] = _theta_basis(theta, parity, order) @ vinv
        return SurfaceMesh("sphere", (n1, n2), theta, phi, weights, (np.pi, 2 * np.pi), ops)
    if topology == "torus":
        if n1 < TORUS_MIN[0] or n2 < TORUS_MIN[1]:
            raise MeshError(f"torus resolution {n1}x{n2} below minimum {TORUS_MIN[0]}x{TORUS_MIN[1]}")
        p1, p2 = (2 * np.pi, 2 * np.pi) if periods is None else (float(periods[0]), float(periods[1]))
        if p1 <= 0 or p2 <= 0:
            raise MeshError("torus periods must be positive")
        u1 = p1 * np.arange(n1) / n1
        u2 = p2 * np.arange(n2) / n2
        weights = np.full((n1, n2), p1 * p2 / (n1 * n2))
        return SurfaceMesh("torus", (n1, n2), u1, u2, weights, (p1, p2))
    raise MeshError(f"unknown topology {topology!r}")


def real_harmonic(l: int, m: int, theta, phi) -> np.ndarray:
    """Orthonormal real spherical harmonic of degree l and order m."""
    y = sph_harm_y(l, abs(m), theta, phi)
    if m > 0:
        return np.sqrt(2) * (-1) ** m * y.real
    if m < 0:
        return np.sqrt(2) * (-1) ** m * y.imag
    return y.real


def band_limited_field(mesh: SurfaceMesh, degree: int, rng: np.random.Generator, amplitude: float = 1.0, decay: float = 1.0) -> np.ndarray:
    """Random real field with modes up to ``degree`` and sup-norm ``amplitude``.

    Coefficients are standard normal damped by (1 + l)^-decay; the constant
    mode is excluded.
    """
    basis = mesh.band_basis(degree)
    if mesh.topology == "sphere":
        levels = np.concatenate([[l] * (2 * l + 1) for l in range(degree + 1)])
    else:
        levels = []
        for k1 in range(degree + 1):
            for k2 in range(-degree, degree + 1):
                if k1 == 0 and k2 < 0:
                    continue
                lv = max(k1, abs(k2))
                levels += [lv, lv] if (k1 or k2) else [lv]
        levels = np.array(levels)
    coef = rng.standard_normal(len(basis)) * (1.0 + levels) ** (-decay)
    coef[levels == 0] = 0.0
    f = np.tensordot(coef, basis, axes=1)
    return amplitude * f / np.max(np.abs(f))


# ---------------------------------------------------------------------------
# embedded surfaces


class GraphKind(str, Enum):
    RADIAL_OVER_SPHERE = "radial_over_sphere"
    LEVEL_GRAPH_OVER_TORUS = "level_graph_over_torus"


def _unit_radial_derivs(theta, phi):
    """Derivatives d^a_theta d^b_phi of (sin t cos p, sin t sin p, cos t)."""
    out = {}
    for a, b in DERIV_ORDERS:
        st = np.sin(theta + a * np.pi / 2)
        ct = np.cos(theta + a * np.pi / 2)
        cp = np.cos(phi + b * np.pi / 2)
        sp = np.sin(phi + b * np.pi / 2)
        z = ct if b == 0 else np.zeros_like(ct)
        out[a, b] = np.stack([st * cp, st * sp, z], axis=-1)
    return out


@dataclass(frozen=True, eq=False)
class EmbeddedSurface:
    """Immutable graph surface; ``geometry`` is computed lazily and cached."""

    mesh: SurfaceMesh
    model: AmbientModel
    F: np.ndarray
    normal_orientation: str = "outward"
    center: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        F = np.array(self.F, dtype=float)
        if F.ndim == 0:
            F = np.full(self.mesh.shape, float(F))
        if F.shape != self.mesh.shape:
            raise GeometryError(f"graph height shape {F.shape} does not match mesh {self.mesh.shape}")
        if not np.all(np.isfinite(F)):
            raise GeometryError("graph height has non-finite values")
        if self.normal_orientation not in ("outward", "inward"):
            raise GeometryError("normal_orientation must be 'outward' or 'inward'")
        if self.graph_kind is GraphKind.RADIAL_OVER_SPHERE and np.any(F <= 0):
            raise GeometryError("radial graph requires F > 0 everywhere")
        F.setflags(write=False)
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        X = self.embedding()
        if not np.all(self.model.domain.contains(X)):
            raise GeometryError(f"surface leaves the chart domain of {self.model.name!r}")

    @property
    def graph_kind(self) -> GraphKind:
        if self.mesh.topology == "sphere":
            return GraphKind.RADIAL_OVER_SPHERE
        return GraphKind.LEVEL_GRAPH_OVER_TORUS

    def with_height(self, F) -> "EmbeddedSurface":
        return EmbeddedSurface(self.mesh, self.model, F, self.normal_orientation, self.center)

    def flipped(self) -> "EmbeddedSurface":
        o = "inward" if self.normal_orientation == "outward" else "outward"
        return EmbeddedSurface(self.mesh, self.model, self.F, o, self.center)

    @cached_property
    def _base_derivs(self):
        U1, U2 = self.mesh.grid()
        if self.graph_kind is GraphKind.RADIAL_OVER_SPHERE:
            direction = _unit_radial_derivs(U1, U2)
            base = {k: np.zeros(U1.shape + (3,)) for k in DERIV_ORDERS}
            base[0, 0] = np.broadcast_to(np.asarray(self.center), U1.shape + (3,)).copy()
        else:
            direction = {k: np.zeros(U1.shape + (3,)) for k in DERIV_ORDERS}
            direction[0, 0][..., 2] = 1.0
            base = {k: np.zeros(U1.shape + (3,)) for k in DERIV_ORDERS}
            base[0, 0] = np.stack([U1, U2, np.zeros_like(U1)], axis=-1)
            base[1, 0][..., 0] = 1.0
            base[0, 1][..., 1] = 1.0
        return base, direction

    @property
    def direction(self) -> np.ndarray:
        """Graph direction ``dir(u)`` (chart components), shape (n1, n2, 3)."""
        return self._base_derivs[1][0, 0]

    def embedding(self) -> np.ndarray:
        base, direction = self._base_derivs
        return base[0, 0] + self.F[..., None] * direction[0, 0]

    @cached_property
    def embedding_derivatives(self) -> dict:
        """All d^a_u1 d^b_u2 X with a + b <= 3, each (n1, n2, 3)."""
        base, direction = self._base_derivs
        dF = {k: self.mesh.deriv(self.F, *k) for k in DERIV_ORDERS}
        out = {}
        for a, b in DERIV_ORDERS:
            acc = base[a, b].copy()
            for al in range(a + 1):
                for be in range(b + 1):
                    acc += comb(a, al) * comb(b, be) * dF[al, be][..., None] * direction[a - al, b - be]
            out[a, b] = acc
        return out

    @cached_property
    def geometry(self) -> "SurfaceGeometry":
        return compute_geometry(self)


@dataclass(frozen=True, eq=False)
class SurfaceGeometry:
    """Per-node geometry; scalar fields have the mesh shape (n1, n2)."""

    h: np.ndarray
    h_inv: np.ndarray
    B: np.ndarray
    H: np.ndarray
    nu: np.ndarray
    S_intrinsic: np.ndarray
    area_element: np.ndarray
    B_norm2: np.ndarray
    B0_norm2: np.ndarray
    # supporting data used by operators downstream
    X: np.ndarray
    tangents: np.ndarray          # (n1, n2, 2, 3) chart components of dX/du^i
    dh: np.ndarray                # (n1, n2, k, i, j) = d_k h_ij
    ddh: np.ndarray               # (n1, n2, k, l, i, j)
    christoffel: np.ndarray       # surface Gamma^k_ij, (n1, n2, k, i, j)
    g: np.ndarray
    ambient_christoffel: np.ndarray
    ric_nn: np.ndarray
    ambient_scalar: np.ndarray
    graph_speed: np.ndarray       # g(dir, nu): normal speed per unit graph height

    @property
    def gauss_residual(self) -> np.ndarray:
        """Ric(nu,nu) + |B|^2 - (S + |B|^2 + H^2 - S_Sigma)/2, pointwise."""
        rhs = 0.5 * (self.ambient_scalar + self.B_norm2 + self.H**2 - self.S_intrinsic)
        return self.ric_nn + self.B_norm2 - rhs


def _idx3(i, j, k):
    ones = i + j + k
    return (3 - ones, ones)


def gauss_curvature(h, dh, ddh) -> np.ndarray:
    """Brioschi formula from the metric and its first/second coordinate derivatives."""
    E, F, G = h[..., 0, 0], h[..., 0, 1], h[..., 1, 1]
    Eu, Ev = dh[..., 0, 0, 0], dh[..., 1, 0, 0]
    Fu, Fv = dh[..., 0, 0, 1], dh[..., 1, 0, 1]
    Gu, Gv = dh[..., 0, 1, 1], dh[..., 1, 1, 1]
    Evv = ddh[..., 1, 1, 0, 0]
    Fuv = ddh[..., 0, 1, 0, 1]
    Guu = ddh[..., 0, 0, 1, 1]
    m1 = np.stack(
        [
            np.stack([-0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev], axis=-1),
            np.stack([Fv - 0.5 * Gu, E, F], axis=-1),
            np.stack([0.5 * Gv, F, G], axis=-1),
        ],
        axis=-2,
    )
    z = np.zeros_like(E)
    m2 = np.stack(
        [
            np.stack([z, 0.5 * Ev, 0.5 * Gu], axis=-1),
            np.stack([0.5 * Ev, E, F], axis=-1),
            np.stack([0.5 * Gu, F, G], axis=-1),
        ],
        axis=-2,
    )
    return (np.linalg.det(m1) - np.linalg.det(m2)) / (E * G - F * F) ** 2


def surface_christoffel(h_inv, dh):
    return 0.5 * (
        np.einsum("...kl,...ijl->...kij", h_inv, dh)
        + np.einsum("...kl,...jil->...kij", h_inv, dh)
        - np.einsum("...kl,...lij->...kij", h_inv, dh)
    )


def compute_geometry(surface: EmbeddedSurface) -> SurfaceGeometry:
    """Induced metric, second fundamental form, curvatures and normal."""
    shape = surface.mesh.shape
    N = surface.mesh.size
    D = {k: v.reshape(N, 3) for k, v in surface.embedding_derivatives.items()}
    X = D[0, 0]
    Xi = np.stack([D[1, 0], D[0, 1]], axis=1)
    Xij = np.empty((N, 2, 2, 3))
    Xijk = np.empty((N, 2, 2, 2, 3))
    for i in range(2):
        for j in range(2):
            Xij[:, i, j] = D[(2 - i - j, i + j)]
            for k in range(2):
                Xijk[:, i, j, k] = D[_idx3(i, j, k)]

    model = surface.model
    g, dg, ddg = model.jet(X)
    ginv = np.linalg.inv(g)
    gam = christoffel_from_jet(g, dg)

    h = np.einsum("nab,nia,njb->nij", g, Xi, Xi)
    det = h[:, 0, 0] * h[:, 1, 1] - h[:, 0, 1] ** 2
    if np.any(det <= 0) or not np.all(np.isfinite(det)):
        raise GeometryError("degenerate induced metric (det h <= 0): collapsed or self-intersecting graph")
    h_inv = np.linalg.inv(h)

    dgX = np.einsum("ncab,nkc->nkab", dg, Xi)
    gXi = np.einsum("nab,nia->nib", g, Xi)                  # g_ab X_i^a
    dh = np.einsum("nkab,nia,njb->nkij", dgX, Xi, Xi)
    dh += np.einsum("nkia,nja->nkij", Xij, gXi) + np.einsum("nkja,nia->nkij", Xij, gXi)

    G2 = np.einsum("ncdab,nld,nkc->nlkab", ddg, Xi, Xi) + np.einsum("ncab,nlkc->nlkab", dg, Xij)
    ddh = np.einsum("nlkab,nia,njb->nlkij", G2, Xi, Xi)
    ddh += np.einsum("nkab,nlia,njb->nlkij", dgX, Xij, Xi) + np.einsum("nkab,nia,nljb->nlkij", dgX, Xi, Xij)
    ddh += np.einsum("nlab,nkia,njb->nlkij", dgX, Xij, Xi) + np.einsum("nlab,nia,nkjb->nlkij", dgX, Xi, Xij)
    gXij = np.einsum("nab,nkia->nkib", g, Xij)               # g_ab X_ki^a
    ddh += np.einsum("nlkia,nja->nlkij", Xijk, gXi) + np.einsum("nlkja,nia->nlkij", Xijk, gXi)
    ddh += np.einsum("nkib,nljb->nlkij", gXij, Xij) + np.einsum("nlib,nkjb->nlkij", gXij, Xij)

    n_cov = np.cross(Xi[:, 0], Xi[:, 1])
    nu = np.einsum("nab,nb->na", ginv, n_cov)
    nu /= np.sqrt(np.einsum("na,na->n", nu, n_cov))[:, None]
    direction = surface.direction.reshape(N, 3)
    sign = np.sign(np.einsum("na,na->n", n_cov, direction))
    if np.any(sign == 0):
        raise GeometryError("graph direction tangent to the surface")
    if surface.normal_orientation == "inward":
        sign = -sign
    nu *= sign[:, None]

    acc = Xij + np.einsum("nacd,nic,njd->nija", gam, Xi, Xi)
    nu_low = np.einsum("nab,nb->na", g, nu)
    B = -np.einsum("nija,na->nij", acc, nu_low)
    H = np.einsum("nij,nij->n", h_inv, B)
    B_norm2 = np.einsum("nik,njl,nij,nkl->n", h_inv, h_inv, B, B)
    B0 = B - h
    B0_norm2 = np.einsum("nik,njl,nij,nkl->n", h_inv, h_inv, B0, B0)

    S_sigma = 2.0 * gauss_curvature(h, dh, ddh)
    ric, s_amb = model.curvature(X)
    ric_nn = np.einsum("nab,na,nb->n", ric, nu, nu)

    sqrt_det = np.sqrt(det)
    if surface.mesh.topology == "sphere":
        U1, _ = surface.mesh.grid()
        area_element = sqrt_det / np.sin(U1).reshape(N)
    else:
        area_element = sqrt_det
    speed = np.einsum("na,na->n", nu_low, direction)

    def r(a):
        return a.reshape(shape + a.shape[1:])

    return SurfaceGeometry(
        h=r(h), h_inv=r(h_inv), B=r(B), H=r(H), nu=r(nu), S_intrinsic=r(S_sigma),
        area_element=r(area_element), B_norm2=r(B_norm2), B0_norm2=r(B0_norm2),
        X=r(X), tangents=r(Xi), dh=r(dh), ddh=r(ddh),
        christoffel=r(surface_christoffel(h_inv, dh)), g=r(g), ambient_christoffel=r(gam),
        ric_nn=r(ric_nn), ambient_scalar=r(np.broadcast_to(s_amb, (N,)).copy()), graph_speed=r(speed),
    )


# ---------------------------------------------------------------------------
# intrinsic operators


def _first_derivs(mesh, f):
    return np.stack([mesh.deriv(f, 1, 0), mesh.deriv(f, 0, 1)], axis=-1)


def laplace_beltrami(surface: EmbeddedSurface, f) -> np.ndarray:
    geo = surface.geometry
    mesh = surface.mesh
    f = np.asarray(f, dtype=float)
    d1 = _first_derivs(mesh, f)
    d2 = np.empty(f.shape + (2, 2))
    d2[..., 0, 0] = mesh.deriv(f, 2, 0)
    d2[..., 1, 1] = mesh.deriv(f, 0, 2)
    d2[..., 0, 1] = d2[..., 1, 0] = mesh.deriv(f, 1, 1)
    return np.einsum("...ij,...ij->...", geo.h_inv, d2) - np.einsum("...ij,...kij,...k->...", geo.h_inv, geo.christoffel, d1)


def gradient(surface: EmbeddedSurface, f) -> np.ndarray:
    """Surface gradient as chart components, shape (n1, n2, 3)."""
    geo = surface.geometry
    d1 = _first_derivs(surface.mesh, f)
    return np.einsum("...ij,...j,...ia->...a", geo.h_inv, d1, geo.tangents)


def divergence(surface: EmbeddedSurface, V) -> np.ndarray:
    """Surface divergence of a tangent field given by chart components (n1, n2, 3)."""
    geo = surface.geometry
    V = np.asarray(V, dtype=float)
    dV = np.stack([surface.mesh.deriv(np.moveaxis(V, -1, 0), 1, 0), surface.mesh.deriv(np.moveaxis(V, -1, 0), 0, 1)], axis=0)
    dV = np.moveaxis(dV, (0, 1), (-2, -1))                        # (..., i, a)
    cov = dV + np.einsum("...acd,...ic,...d->...ia", geo.ambient_christoffel, geo.tangents, V)
    low = np.einsum("...ab,...jb->...ja", geo.g, geo.tangents)    # g_ab X_j^b
    return np.einsum("...ij,...ia,...ja->...", geo.h_inv, cov, low)


def inner(surface: EmbeddedSurface, U, V) -> np.ndarray:
    return np.einsum("...a,...ab,...b->...", U, surface.geometry.g, V)


def integrate(surface: EmbeddedSurface, f) -> float:
    geo = surface.geometry
    return float(np.sum(surface.mesh.quad_weights * geo.area_element * np.asarray(f, dtype=float)))


def area(surface: EmbeddedSurface) -> float:
    return integrate(surface, np.ones(surface.mesh.shape))


def euler_characteristic_estimate(surface: EmbeddedSurface) -> float:
    return integrate(surface, surface.geometry.S_intrinsic) / (4 * np.pi)


class YamabeType(str, Enum):
    POSITIVE = "positive"
    NON_POSITIVE = "non_positive"


def yamabe_type(surface: EmbeddedSurface, tol: float = 0.25) -> YamabeType:
    """Classify a closed 2-surface by the sign of its total scalar curvature."""
    chi = euler_characteristic_estimate(surface)
    expected = 2.0 if surface.mesh.topology == "sphere" else 0.0
    if abs(chi - expected) > tol:
        raise GeometryError(
            f"total curvature gives chi = {chi:.6g} for a {surface.mesh.topology}: inconsistent discretization"
        )
    return YamabeType.POSITIVE if chi > 1.0 else YamabeType.NON_POSITIVE


# ---------------------------------------------------------------------------
# constructors and export


def sphere_surface(model: AmbientModel, resolution=(24, 48), radius=1.0, center=(0.0, 0.0, 0.0), normal_orientation="outward", mesh=None) -> EmbeddedSurface:
    """Radial graph; ``radius`` is a constant or a nodal array."""
    mesh = mesh or build_mesh("sphere", resolution)
    F = np.broadcast_to(np.asarray(radius, dtype=float), mesh.shape)
    return EmbeddedSurface(mesh, model, F, normal_orientation, center)


def torus_surface(model: AmbientModel, resolution=(32, 32), height=0.0, normal_orientation="outward", mesh=None) -> EmbeddedSurface:
    """Level graph t = F(x1, x2) over the model's periodic torus."""
    if mesh is None:
        periods = model.params.get("periods", (2 * np.pi, 2 * np.pi))
        mesh = build_mesh("torus", resolution, periods)
    F = np.broadcast_to(np.asarray(height, dtype=float), mesh.shape)
    return EmbeddedSurface(mesh, model, F, normal_orientation)


def export_nodal_csv(path, mesh: SurfaceMesh, fields: dict) -> Path:
    """Write nodal fields with parametric coordinates; floats round-trip exactly."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    U1, U2 = mesh.grid()
    names = ("theta", "phi") if mesh.topology == "sphere" else ("x1", "x2")
    cols = {names[0]: U1.ravel(), names[1]: U2.ravel()}
    for key, val in fields.items():
        val = np.asarray(val, dtype=float)
        if val.shape == mesh.shape:
            cols[key] = val.ravel()
        else:
            flat = val.reshape(mesh.size, -1)
            for c in range(flat.shape[1]):
                cols[f"{key}_{c}"] = flat[:, c]
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(cols))
        for row in zip(*cols.values()):
            w.writerow([repr(float(v)) for v in row])
    return path
