"""Stability operators as nodal matrices, principal eigenpairs and the identities they satisfy.

Operators act on row-major flattened nodal vectors.  All four kinds share
the form ``-Lap + 2<X, grad .> + V`` with a drift ``X`` that is nonzero only
for the MOTS operator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.linalg as sla
from scipy.sparse.linalg import eigs, lobpcg

from .constraint import energy_momentum, null_expansions
from .errors import EigenError, OperatorError
from .surface import (
    EmbeddedSurface,
    band_limited_field,
    divergence,
    gauss_curvature,
    gradient,
    inner,
    laplace_beltrami,
)

DENSE_LIMIT = 4096


class OperatorKind(str, Enum):
    L_MINIMAL = "L_minimal"
    L0_SYMMETRIZED = "L0_symmetrized"
    L_BAR_MOTS = "L_bar_mots"
    L_BRANE = "L_brane"


def mots_potential_Q(surface: EmbeddedSurface) -> np.ndarray:
    """Q = S_Sigma/2 - (mu + J(nu)) - |chi_+|^2/2."""
    geo = surface.geometry
    ng = null_expansions(surface)
    em = energy_momentum(surface)
    return 0.5 * geo.S_intrinsic - (em.mu + em.J_nu) - 0.5 * ng.chi_plus_norm2


def potential(kind, surface: EmbeddedSurface, form: str = "ricci", n: int = 3):
    """Zeroth-order coefficient and drift field (or None) of an operator kind.

    ``form`` only matters for L_minimal: ``"ricci"`` uses -(Ric(nu,nu) + |B|^2),
    ``"gauss"`` uses (S_Sigma - S - |B|^2)/2, which agrees when H = 0.
    """
    kind = OperatorKind(kind)
    geo = surface.geometry
    if kind is OperatorKind.L_MINIMAL:
        if form == "ricci":
            return -(geo.ric_nn + geo.B_norm2), None
        if form == "gauss":
            return 0.5 * (geo.S_intrinsic - geo.ambient_scalar - geo.B_norm2), None
        raise OperatorError(f"unknown L_minimal form {form!r}")
    if kind is OperatorKind.L_BRANE:
        s_n = geo.ambient_scalar + n * (n - 1)
        return 0.5 * (geo.S_intrinsic - s_n - geo.B0_norm2), None
    Q = mots_potential_Q(surface)
    if kind is OperatorKind.L0_SYMMETRIZED:
        return Q, None
    ng = null_expansions(surface)
    return Q + ng.div_X - ng.X_norm2, ng.X


def laplacian_matrix(surface: EmbeddedSurface) -> np.ndarray:
    geo = surface.geometry
    mesh = surface.mesh
    hi = geo.h_inv.reshape(-1, 2, 2)
    c = -np.einsum("nij,nkij->nk", hi, geo.christoffel.reshape(-1, 2, 2, 2))
    L = hi[:, 0, 0, None] * mesh.deriv_matrix(2, 0)
    L += 2 * hi[:, 0, 1, None] * mesh.deriv_matrix(1, 1)
    L += hi[:, 1, 1, None] * mesh.deriv_matrix(0, 2)
    L += c[:, 0, None] * mesh.deriv_matrix(1, 0)
    L += c[:, 1, None] * mesh.deriv_matrix(0, 1)
    return L


def drift_matrix(surface: EmbeddedSurface, X) -> np.ndarray:
    """Matrix of phi -> 2 <X, grad phi>."""
    geo = surface.geometry
    w = np.einsum("...ab,...a,...ib->...i", geo.g, X, geo.tangents).reshape(-1, 2)
    d = 2 * np.einsum("nij,ni->nj", geo.h_inv.reshape(-1, 2, 2), w)
    mesh = surface.mesh
    return d[:, 0, None] * mesh.deriv_matrix(1, 0) + d[:, 1, None] * mesh.deriv_matrix(0, 1)


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    kind: OperatorKind
    matrix: np.ndarray
    symmetric_flag: bool
    potential: np.ndarray
    drift: np.ndarray | None
    surface: EmbeddedSurface = field(repr=False)
    form: str = "ricci"

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def apply(self, f) -> np.ndarray:
        f = np.asarray(f, dtype=float)
        return (self.matrix @ f.ravel()).reshape(f.shape)

    @property
    def weights(self) -> np.ndarray:
        s = self.surface
        return (s.mesh.quad_weights * s.geometry.area_element).ravel()


def assemble(kind, surface: EmbeddedSurface, form: str = "ricci", n: int = 3, drift_tol: float = 1e-13) -> OperatorMatrix:
    kind = OperatorKind(kind)
    V, X = potential(kind, surface, form=form, n=n)
    A = -laplacian_matrix(surface)
    A[np.diag_indices_from(A)] += V.ravel()
    symmetric = True
    if X is not None:
        if np.max(np.abs(X)) > drift_tol:
            A += drift_matrix(surface, X)
            symmetric = False
    return OperatorMatrix(kind, A, symmetric, V, X, surface, form)


@dataclass(frozen=True, eq=False)
class Spectrum:
    lambda1: float
    imag_residual: float
    eigenfunction: np.ndarray
    positivity_ok: bool
    solver_residual: float
    method: str
    skipped: int = 0
    eigenvalues: np.ndarray | None = field(default=None, repr=False)

    def summary(self) -> dict:
        return {
            "lambda1": self.lambda1,
            "imag_residual": self.imag_residual,
            "positivity_ok": self.positivity_ok,
            "solver_residual": self.solver_residual,
            "method": self.method,
            "skipped_candidates": self.skipped,
        }


def _normalize(v):
    v = v / v[np.argmax(np.abs(v))]
    return v


def _inverse_iteration(A, lam, steps=3):
    n = A.shape[0]
    scale = max(1.0, np.abs(lam))
    shift = lam + 1e-10 * scale
    dtype = float if lam.imag == 0 else complex
    shift = shift.real if dtype is float else shift
    lu = sla.lu_factor(A - shift * np.eye(n, dtype=dtype), check_finite=False)
    v = np.ones(n, dtype=dtype)
    for _ in range(steps):
        v = sla.lu_solve(lu, v)
        v /= np.linalg.norm(v)
    return v


def _candidate_order(vals, tie_tol, limit=None):
    """Indices by ascending real part; near-ties broken by smallest |imag|."""
    order = np.argsort(vals.real, kind="stable")
    out, i = [], 0
    while i < len(order) and (limit is None or len(out) < limit):
        head = vals[order[i]].real
        j = i
        while j < len(order) and vals[order[j]].real - head <= tie_tol:
            j += 1
        out.extend(sorted(order[i:j], key=lambda k: (abs(vals[k].imag), vals[k].real)))
        i = j
    return out


def principal_eigenvalue(op: OperatorMatrix, tol: float = 1e-8, max_candidates: int = 12, positivity_tol: float = 0.0) -> Spectrum:
    """Smallest-real-part eigenvalue carrying a one-signed eigenfunction.

    Candidates are visited in ascending real part; those whose normalized
    eigenvector is not strictly positive are skipped (and counted).  No
    positive candidate among the first ``max_candidates`` is a hard error.
    """
    A = op.matrix
    N = op.size
    if N <= DENSE_LIMIT:
        try:
            vals = sla.eigvals(A, check_finite=False)
        except sla.LinAlgError as exc:
            raise EigenError(f"dense eigensolver failed: {exc}") from exc
        method = "dense_full_spectrum"
    else:
        shift = float(np.min(np.diag(A))) - 1.0 - np.max(np.abs(op.potential))
        try:
            vals = eigs(A, k=min(max_candidates, N - 2), sigma=shift, which="LM", return_eigenvectors=False)
        except Exception as exc:  # ARPACK raises several unrelated types
            raise EigenError(f"iterative eigensolver failed: {exc}") from exc
        method = "iterative"
    scale = max(1.0, float(np.max(np.abs(np.diag(A)))))
    tie_tol = 1e-9 * max(1.0, np.min(np.abs(vals.real)))
    skipped = 0
    for idx in _candidate_order(vals, tie_tol, max_candidates)[:max_candidates]:
        lam = vals[idx]
        v = _normalize(_inverse_iteration(A, lam))
        if np.max(np.abs(v.imag)) > 1e-6 or np.min(v.real) <= positivity_tol:
            skipped += 1
            continue
        phi = v.real
        res = float(np.linalg.norm(A @ phi - lam.real * phi) / np.linalg.norm(phi))
        if res > tol * scale:
            raise EigenError(f"principal eigenpair residual {res:.3g} exceeds tolerance")
        return Spectrum(
            lambda1=float(lam.real),
            imag_residual=float(abs(lam.imag)),
            eigenfunction=phi.reshape(op.surface.mesh.shape),
            positivity_ok=True,
            solver_residual=res,
            method=method,
            skipped=skipped,
            eigenvalues=np.sort_complex(vals),
        )
    raise EigenError(
        f"no one-signed eigenfunction among the {min(max_candidates, len(vals))} lowest eigenvalues of {op.kind.value}"
        " (assembly bug or under-resolved mesh)"
    )


def rayleigh_quotient(op: OperatorMatrix, psi) -> float:
    """(int psi L psi dA) / (int psi^2 dA) for a symmetric operator."""
    if not op.symmetric_flag:
        raise OperatorError("Rayleigh quotient requires a symmetric operator")
    psi = np.asarray(psi, dtype=float).ravel()
    w = op.weights
    den = float(np.sum(w * psi * psi))
    if not den > 0:
        raise OperatorError("test function vanishes identically")
    return float(np.sum(w * psi * (op.matrix @ psi)) / den)


@dataclass(frozen=True)
class RayleighResult:
    value: float
    best_trial: float
    minimizer: np.ndarray = field(repr=False)
    degree: int = 0


def rayleigh_minimize(op: OperatorMatrix, trials: int = 64, seed: int = 0, degree: int | None = None) -> RayleighResult:
    """Upper bound for lambda_1 from band-limited trial functions.

    Random trial combinations seed a LOBPCG descent on the Galerkin pencil of
    the band-limited subspace; the returned ``value`` is the quotient of the
    final nodal trial function.
    """
    if not op.symmetric_flag:
        raise OperatorError("Rayleigh minimization requires a symmetric operator")
    mesh = op.surface.mesh
    if degree is None:
        degree = min(mesh.shape[0] - 4, 16) if mesh.topology == "sphere" else min(mesh.shape[0] // 2 - 2, 8)
    basis = mesh.band_basis(degree).reshape(-1, mesh.size)
    w = op.weights
    Aphi = basis @ op.matrix.T                     # rows: L applied to basis functions
    Ag = (basis * w) @ Aphi.T
    Ag = 0.5 * (Ag + Ag.T)
    Mg = (basis * w) @ basis.T
    Mg = 0.5 * (Mg + Mg.T)
    rng = np.random.default_rng(seed)
    coefs = rng.standard_normal((trials, basis.shape[0]))
    coefs[:, 0] += 3.0                               # bias towards one-signed trials
    num = np.einsum("ti,ij,tj->t", coefs, Ag, coefs)
    den = np.einsum("ti,ij,tj->t", coefs, Mg, coefs)
    best = int(np.argmin(num / den))
    best_trial = float(num[best] / den[best])
    x0 = coefs[best][:, None]
    vals, vecs = lobpcg(Ag, x0, B=Mg, largest=False, tol=1e-12, maxiter=500)
    psi = vecs[:, 0] @ basis
    value = rayleigh_quotient(op, psi)
    return RayleighResult(value=min(value, best_trial), best_trial=best_trial, minimizer=psi.reshape(mesh.shape), degree=degree)


def eigenvalue_comparison(surface: EmbeddedSurface) -> dict:
    """lambda_1(L0) - lambda_1(Lbar), which is nonnegative for every surface."""
    s0 = principal_eigenvalue(assemble(OperatorKind.L0_SYMMETRIZED, surface))
    sb = principal_eigenvalue(assemble(OperatorKind.L_BAR_MOTS, surface))
    ng = null_expansions(surface)
    return {
        "lambda1_L0": s0.lambda1,
        "lambda1_Lbar": sb.lambda1,
        "gap": s0.lambda1 - sb.lambda1,
        "X_sup": float(np.sqrt(np.max(ng.X_norm2))),
        "imag_residual_Lbar": sb.imag_residual,
        "positivity_ok": s0.positivity_ok and sb.positivity_ok,
        "spectra": (s0, sb),
    }


def divergence_identity_check(surface: EmbeddedSurface, spectrum: Spectrum | None = None) -> dict:
    """Residual of Q + div Y - |Y|^2 - lambda_1(Lbar) with Y = X - grad ln(phi)."""
    if spectrum is None:
        spectrum = principal_eigenvalue(assemble(OperatorKind.L_BAR_MOTS, surface))
    phi = spectrum.eigenfunction
    if not spectrum.positivity_ok or np.min(phi) <= 0:
        raise EigenError("divergence identity needs a positive principal eigenfunction")
    ng = null_expansions(surface)
    Y = ng.X - gradient(surface, np.log(phi))
    resid = mots_potential_Q(surface) + divergence(surface, Y) - inner(surface, Y, Y) - spectrum.lambda1
    return {"lambda1": spectrum.lambda1, "residual_sup": float(np.max(np.abs(resid))), "residual": resid}


@dataclass(frozen=True, eq=False)
class ConformalScalar:
    S_tilde_formula: np.ndarray
    S_tilde_direct: np.ndarray
    residual: float
    S_tilde_eigen: np.ndarray | None = None
    residual_eigen: float | None = None


def conformal_scalar(surface: EmbeddedSurface, phi, n: int = 3, eigenvalue: float | None = None,
                     mean_curvature_rate=None) -> ConformalScalar:
    """Scalar curvature of phi^(2/(n-2)) h by formula and by direct recomputation.

    Only n = 3 is supported: the surface is two dimensional.  With
    ``eigenvalue`` (phi the principal eigenfunction of the minimal-surface
    operator on an H = 0 surface) the eigenvalue form is also evaluated;
    with ``mean_curvature_rate`` (dH/dt along a foliation with lapse phi) the
    leaf form including H^2 is evaluated instead.
    """
    if n != 3:
        raise OperatorError("conformal_scalar supports n = 3 (two-dimensional surfaces) only")
    phi = np.asarray(phi, dtype=float)
    if np.any(phi <= 0):
        raise OperatorError("conformal factor must be positive everywhere")
    geo = surface.geometry
    mesh = surface.mesh
    lap = laplace_beltrami(surface, phi)
    grad = gradient(surface, phi)
    g2 = inner(surface, grad, grad)
    formula = phi**-3 * (-2 * lap + geo.S_intrinsic * phi + 2 * g2 / phi)

    d = {k: mesh.deriv(phi, *k) for k in [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]}
    p1 = np.stack([d[1, 0], d[0, 1]], axis=-1)
    p2 = np.empty(phi.shape + (2, 2))
    p2[..., 0, 0], p2[..., 1, 1] = d[2, 0], d[0, 2]
    p2[..., 0, 1] = p2[..., 1, 0] = d[1, 1]
    f2 = phi**2
    h, dh, ddh = geo.h, geo.dh, geo.ddh
    ht = f2[..., None, None] * h
    dht = 2 * (phi[..., None] * p1)[..., :, None, None] * h[..., None, :, :] + f2[..., None, None, None] * dh
    ddht = (
        2 * (p1[..., :, None] * p1[..., None, :] + phi[..., None, None] * p2)[..., None, None] * h[..., None, None, :, :]
        + 2 * (phi[..., None] * p1)[..., None, :, None, None] * dh[..., :, None, :, :]
        + 2 * (phi[..., None] * p1)[..., :, None, None, None] * dh[..., None, :, :, :]
        + f2[..., None, None, None, None] * ddh
    )
    direct = 2 * gauss_curvature(ht, dht, ddht)
    out = dict(S_tilde_formula=formula, S_tilde_direct=direct, residual=float(np.max(np.abs(formula - direct))))
    base = geo.ambient_scalar + geo.B_norm2
    if mean_curvature_rate is not None:
        alt = phi**-2 * (2 * np.asarray(mean_curvature_rate) / phi + base + geo.H**2 + 2 * g2 / phi**2)
    elif eigenvalue is not None:
        alt = phi**-2 * (2 * eigenvalue + base + 2 * g2 / phi**2)
    else:
        alt = None
    if alt is not None:
        out.update(S_tilde_eigen=alt, residual_eigen=float(np.max(np.abs(alt - direct))))
    return ConformalScalar(**out)


def positive_supersolution_probe(op: OperatorMatrix, trials: int = 20, seed: int = 0, amplitude: float = 0.5) -> dict:
    """Evidence for the sign equivalence of lambda_1 and positive supersolutions.

    With lambda_1 >= 0 the principal eigenfunction is a positive phi with
    L(phi) >= 0.  With lambda_1 < 0, every member of a random positive trial
    family has min L(phi)/phi < 0.
    """
    spec = principal_eigenvalue(op)
    rng = np.random.default_rng(seed)
    mins = []
    for _ in range(trials):
        phi = 1.0 + amplitude * band_limited_field(op.surface.mesh, 4, rng)
        mins.append(float(np.min(op.apply(phi) / phi)))
    eig_ratio = float(np.min(op.apply(spec.eigenfunction) / spec.eigenfunction))
    return {"lambda1": spec.lambda1, "eigen_ratio_min": eig_ratio, "trial_ratio_mins": mins}
