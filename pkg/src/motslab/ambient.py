"""Analytic ambient geometries (M, g, K) and their curvature.

All models live in a three-dimensional chart.  A model supplies the metric
``g_ij`` and (optionally) the extrinsic curvature ``K_ij`` as functions of
chart points.  Builtin models also register analytic *jets* (first and
second metric derivatives, first derivatives of K) and closed-form Ricci and
scalar curvature.  A generic fourth-order finite-difference pipeline
reconstructs the same quantities from ``metric_eval`` alone; it is what
``validate_model`` compares the closed forms against.

Index conventions for arrays with leading batch axes ``...``:

    g[..., i, j]          metric components
    dg[..., k, i, j]      d_k g_ij
    ddg[..., k, l, i, j]  d_k d_l g_ij
    gamma[..., i, j, k]   Christoffel symbol Gamma^i_jk
    dK[..., k, i, j]      d_k K_ij

Curvature sign convention: the unit round 2-sphere has scalar curvature +2
and hyperbolic 3-space has S = -6.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np
import sympy

from .errors import ChartError, ModelError

DIM = 3

ArrayFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ChartDomain:
    """Axis-aligned box, periodic along flagged axes, minus an optional ball."""

    lower: tuple[float, float, float]
    upper: tuple[float, float, float]
    periodic: tuple[bool, bool, bool] = (False, False, False)
    min_radius: float = 0.0

    @property
    def periods(self) -> np.ndarray:
        return np.asarray(self.upper) - np.asarray(self.lower)

    def contains(self, x, margin: float = 0.0) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        ok = np.ones(x.shape[:-1], dtype=bool)
        for a in range(DIM):
            if self.periodic[a]:
                continue
            ok &= (x[..., a] > self.lower[a] + margin) & (x[..., a] < self.upper[a] - margin)
        if self.min_radius > 0.0:
            ok &= np.linalg.norm(x, axis=-1) > self.min_radius + margin
        return ok

    def sample(self, rng: np.random.Generator, count: int, margin: float = 0.0) -> np.ndarray:
        lo = np.array([self.lower[a] if self.periodic[a] else self.lower[a] + margin for a in range(DIM)])
        hi = np.array([self.upper[a] if self.periodic[a] else self.upper[a] - margin for a in range(DIM)])
        # stay clear of the excluded ball by a comfortable factor
        rmin = 1.5 * self.min_radius + margin if self.min_radius > 0 else 0.0
        out = np.empty((0, DIM))
        while len(out) < count:
            pts = rng.uniform(lo, hi, size=(4 * count, DIM))
            keep = np.linalg.norm(pts, axis=-1) > rmin
            out = np.concatenate([out, pts[keep]])
        return out[:count]


@dataclass(frozen=True)
class AmbientModel:
    """An analytic chart of an initial data set (M, g, K) with n = 3.

    ``metric_jet(x) -> (g, dg, ddg)`` and ``extrinsic_jet(x) -> (K, dK)`` are
    optional analytic derivatives; when absent, finite differences of the
    evaluators are used.  ``closed_form_curvature(x) -> (Ric, S)`` is
    optional.  ``potential(t)`` is the coefficient of the brane potential
    form along level graphs (Lambda = potential(t) dx1^dx2); only warped
    models register one.
    """

    name: str
    domain: ChartDomain
    metric_eval: ArrayFn
    extrinsic_eval: ArrayFn | None = None
    closed_form_curvature: Callable | None = None
    metric_jet: Callable | None = None
    extrinsic_jet: Callable | None = None
    potential: Callable | None = None
    params: Mapping = field(default_factory=dict)
    description: str = ""
    dim: int = DIM
    fd_step: float = 1e-3

    @property
    def time_symmetric(self) -> bool:
        return self.extrinsic_eval is None

    def metric(self, x) -> np.ndarray:
        return self.metric_eval(np.asarray(x, dtype=float))

    def extrinsic(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.extrinsic_eval is None:
            return np.zeros(x.shape[:-1] + (DIM, DIM))
        return self.extrinsic_eval(x)

    def jet(self, x, step: float | None = None):
        """Return ``(g, dg, ddg)`` at chart points ``x``."""
        x = np.asarray(x, dtype=float)
        if self.metric_jet is not None:
            return self.metric_jet(x)
        return fd_metric_jet(self, x, self.fd_step if step is None else step)

    def extrinsic_jet_at(self, x, step: float | None = None):
        """Return ``(K, dK)`` at chart points ``x``."""
        x = np.asarray(x, dtype=float)
        if self.extrinsic_eval is None:
            z = np.zeros(x.shape[:-1] + (DIM, DIM))
            return z, np.zeros(x.shape[:-1] + (DIM, DIM, DIM))
        if self.extrinsic_jet is not None:
            return self.extrinsic_jet(x)
        return fd_extrinsic_jet(self, x, self.fd_step if step is None else step)

    def curvature(self, x, step: float | None = None):
        """``(Ric, S)`` at points; closed form when registered."""
        x = np.asarray(x, dtype=float)
        if self.closed_form_curvature is not None:
            return self.closed_form_curvature(x)
        g, dg, ddg = self.jet(x, step)
        ric = ricci_from_jet(g, dg, ddg)
        return ric, scalar_from_ricci(g, ric)


@dataclass(frozen=True)
class CurvatureSample:
    point: np.ndarray
    metric: np.ndarray
    christoffel: np.ndarray
    ricci: np.ndarray
    scalar: float
    method: str

    def ric_nn(self, v) -> float:
        """Ric(nu, nu) for ``v`` normalised to unit length in g."""
        v = np.asarray(v, dtype=float)
        v = v / np.sqrt(v @ self.metric @ v)
        return float(v @ self.ricci @ v)


# ---------------------------------------------------------------------------
# curvature pipeline


def christoffel_from_jet(g, dg):
    ginv = np.linalg.inv(g)
    return 0.5 * (
        np.einsum("...il,...jlk->...ijk", ginv, dg)
        + np.einsum("...il,...klj->...ijk", ginv, dg)
        - np.einsum("...il,...ljk->...ijk", ginv, dg)
    )


def ricci_from_jet(g, dg, ddg):
    ginv = np.linalg.inv(g)
    gam = christoffel_from_jet(g, dg)
    dgam = -np.einsum("...ia,...mab,...bjk->...mijk", ginv, dg, gam) + 0.5 * (
        np.einsum("...il,...mjlk->...mijk", ginv, ddg)
        + np.einsum("...il,...mklj->...mijk", ginv, ddg)
        - np.einsum("...il,...mljk->...mijk", ginv, ddg)
    )
    return (
        np.einsum("...iijk->...jk", dgam)
        - np.einsum("...kiji->...jk", dgam)
        + np.einsum("...iip,...pjk->...jk", gam, gam)
        - np.einsum("...ikp,...pji->...jk", gam, gam)
    )


def scalar_from_ricci(g, ric):
    return np.einsum("...ij,...ij->...", np.linalg.inv(g), ric)


_D1 = {-2: 1.0 / 12, -1: -8.0 / 12, 1: 8.0 / 12, 2: -1.0 / 12}
_D2 = {-2: -1.0 / 12, -1: 16.0 / 12, 0: -30.0 / 12, 1: 16.0 / 12, 2: -1.0 / 12}


def _stencil():
    """Offsets (in units of h) for all 4th-order first/second/mixed stencils."""
    offs = [np.zeros(DIM)]
    for a in range(DIM):
        for s in (-2, -1, 1, 2):
            e = np.zeros(DIM)
            e[a] = s
            offs.append(e)
    for a in range(DIM):
        for b in range(a + 1, DIM):
            for s in (-2, -1, 1, 2):
                for t in (-2, -1, 1, 2):
                    e = np.zeros(DIM)
                    e[a], e[b] = s, t
                    offs.append(e)
    offs = np.array(offs)
    index = {tuple(o): i for i, o in enumerate(offs)}
    return offs, index


_OFFSETS, _OFFSET_INDEX = _stencil()


def _check_stencil(model: AmbientModel, x, step):
    pts = x[..., None, :] + step * _OFFSETS
    if not np.all(model.domain.contains(pts)):
        raise ChartError(f"point too close to the chart boundary of {model.name!r} for the stencil (step {step})")
    return pts


def fd_metric_jet(model: AmbientModel, x, step: float):
    """Fourth-order centred differences of ``metric_eval`` (61-point stencil)."""
    x = np.asarray(x, dtype=float)
    pts = _check_stencil(model, x, step)
    vals = model.metric_eval(pts)
    sym = 0.5 * (vals + np.swapaxes(vals, -1, -2))
    if np.any(np.linalg.eigvalsh(sym)[..., 0] <= 0.0):
        raise ChartError(f"metric of {model.name!r} not positive definite at a stencil node")
    g = vals[..., 0, :, :]
    dg = np.zeros(x.shape[:-1] + (DIM, DIM, DIM))
    ddg = np.zeros(x.shape[:-1] + (DIM, DIM, DIM, DIM))
    for a in range(DIM):
        for s, c in _D1.items():
            e = [0, 0, 0]
            e[a] = s
            dg[..., a, :, :] += c * vals[..., _OFFSET_INDEX[tuple(float(v) for v in e)], :, :]
        for s, c in _D2.items():
            e = [0, 0, 0]
            e[a] = s
            ddg[..., a, a, :, :] += c * vals[..., _OFFSET_INDEX[tuple(float(v) for v in e)], :, :]
    for a in range(DIM):
        for b in range(a + 1, DIM):
            acc = 0.0
            for s, cs in _D1.items():
                for t, ct in _D1.items():
                    e = [0.0, 0.0, 0.0]
                    e[a], e[b] = s, t
                    acc = acc + cs * ct * vals[..., _OFFSET_INDEX[tuple(e)], :, :]
            ddg[..., a, b, :, :] = acc
            ddg[..., b, a, :, :] = acc
    return g, dg / step, ddg / step**2


def fd_extrinsic_jet(model: AmbientModel, x, step: float):
    x = np.asarray(x, dtype=float)
    pts = _check_stencil(model, x, step)
    axis_pts = pts[..., : 1 + 4 * DIM, :]
    vals = model.extrinsic_eval(axis_pts)
    dK = np.zeros(x.shape[:-1] + (DIM, DIM, DIM))
    for a in range(DIM):
        for s, c in _D1.items():
            e = [0.0, 0.0, 0.0]
            e[a] = s
            dK[..., a, :, :] += c * vals[..., _OFFSET_INDEX[tuple(e)], :, :]
    return vals[..., 0, :, :], dK / step


def curvature_at(model: AmbientModel, point, step: float | None = None, closed_form: bool = True) -> CurvatureSample:
    """Christoffels, Ricci and scalar curvature of ``model`` at one chart point."""
    x = np.asarray(point, dtype=float)
    if x.shape != (DIM,):
        raise ModelError(f"expected a single chart point of length {DIM}")
    if not model.domain.contains(x):
        raise ChartError(f"point {x.tolist()} outside the chart domain of {model.name!r}")
    use_closed = closed_form and model.closed_form_curvature is not None
    if model.metric_jet is not None and use_closed:
        g, dg, _ = model.metric_jet(x)
    else:
        g, dg, ddg = fd_metric_jet(model, x, model.fd_step if step is None else step)
    gam = christoffel_from_jet(g, dg)
    if use_closed:
        ric, s = model.closed_form_curvature(x)
        method = "closed_form"
    else:
        ric = ricci_from_jet(g, dg, ddg)
        s = scalar_from_ricci(g, ric)
        method = "finite_difference"
    return CurvatureSample(x, g, gam, ric, float(s), method)


@dataclass
class ValidationReport:
    model: str
    sample_count: int
    seed: int
    max_metric_asymmetry: float = 0.0
    max_extrinsic_asymmetry: float = 0.0
    min_metric_eigenvalue: float = np.inf
    max_ricci_discrepancy: float = 0.0
    max_scalar_discrepancy: float = 0.0
    closed_form: bool = False
    failures: list = field(default_factory=list)

    def passed(self, tol: float = 1e-6) -> bool:
        return (
            not self.failures
            and self.max_metric_asymmetry <= tol
            and self.max_extrinsic_asymmetry <= tol
            and self.min_metric_eigenvalue > 0.0
            and self.max_ricci_discrepancy <= tol
            and self.max_scalar_discrepancy <= tol
        )

    def summary(self) -> dict:
        return {
            "max_metric_asymmetry": self.max_metric_asymmetry,
            "max_extrinsic_asymmetry": self.max_extrinsic_asymmetry,
            "min_metric_eigenvalue": self.min_metric_eigenvalue,
            "max_ricci_discrepancy": self.max_ricci_discrepancy,
            "max_scalar_discrepancy": self.max_scalar_discrepancy,
            "closed_form": self.closed_form,
            "failures": list(self.failures),
        }


def validate_model(model: AmbientModel, sample_count: int = 100, seed: int = 0, step: float | None = None) -> ValidationReport:
    """Randomised sanity report; problems are recorded, never raised."""
    if sample_count < 1:
        raise ModelError("sample_count must be >= 1")
    step = model.fd_step if step is None else step
    rep = ValidationReport(model.name, sample_count, seed, closed_form=model.closed_form_curvature is not None)
    rng = np.random.default_rng(seed)
    pts = model.domain.sample(rng, sample_count, margin=4 * step)
    try:
        g = model.metric(pts)
        rep.max_metric_asymmetry = float(np.max(np.abs(g - np.swapaxes(g, -1, -2))))
        rep.min_metric_eigenvalue = float(np.min(np.linalg.eigvalsh(0.5 * (g + np.swapaxes(g, -1, -2)))))
        K = model.extrinsic(pts)
        rep.max_extrinsic_asymmetry = float(np.max(np.abs(K - np.swapaxes(K, -1, -2))))
    except Exception as exc:  # noqa: BLE001 - reported, not raised
        rep.failures.append(f"evaluation: {exc}")
        return rep
    if rep.closed_form:
        try:
            ric_c, s_c = model.closed_form_curvature(pts)
            g_fd, dg_fd, ddg_fd = fd_metric_jet(model, pts, step)
            ric_f = ricci_from_jet(g_fd, dg_fd, ddg_fd)
            s_f = scalar_from_ricci(g_fd, ric_f)
            rep.max_scalar_discrepancy = float(np.max(np.abs(s_f - s_c) / (1.0 + np.abs(s_c))))
            ric_scale = 1.0 + np.abs(ric_c).max(axis=(-1, -2))
            rep.max_ricci_discrepancy = float(np.max(np.abs(ric_f - ric_c).max(axis=(-1, -2)) / ric_scale))
        except Exception as exc:  # noqa: BLE001
            rep.failures.append(f"curvature: {exc}")
    return rep


# ---------------------------------------------------------------------------
# builtin models


def _eye_like(x):
    return np.broadcast_to(np.eye(DIM), x.shape[:-1] + (DIM, DIM)).copy()


def _conformally_flat(name, psi_jet, domain, params, description, extrinsic=None):
    """g = psi^4 delta with psi_jet(x) -> (psi, dpsi[...,k], ddpsi[...,k,l])."""

    def metric_eval(x):
        psi = psi_jet(x)[0]
        return psi[..., None, None] ** 4 * _eye_like(x)

    def metric_jet(x):
        psi, d, dd = psi_jet(x)
        eye = _eye_like(x)
        p = psi[..., None, None]
        g = p**4 * eye
        dg = (4 * psi**3)[..., None, None, None] * d[..., :, None, None] * eye[..., None, :, :]
        coef = 12 * psi[..., None, None] ** 2 * d[..., :, None] * d[..., None, :] + 4 * psi[..., None, None] ** 3 * dd
        ddg = coef[..., :, :, None, None] * eye[..., None, None, :, :]
        return g, dg, ddg

    def curvature(x):
        psi, d, dd = psi_jet(x)
        w1 = 2 * d / psi[..., None]
        w2 = 2 * dd / psi[..., None, None] - 2 * d[..., :, None] * d[..., None, :] / psi[..., None, None] ** 2
        lap_w = np.trace(w2, axis1=-2, axis2=-1)
        grad2 = np.sum(w1 * w1, axis=-1)
        ric = -(w2 - w1[..., :, None] * w1[..., None, :]) - (lap_w + grad2)[..., None, None] * _eye_like(x)
        s = psi**-4 * (-4 * lap_w - 2 * grad2)
        return ric, s

    ext_eval = ext_jet = None
    if extrinsic is not None:
        ext_eval, ext_jet = extrinsic(metric_jet)
    return AmbientModel(
        name=name,
        domain=domain,
        metric_eval=metric_eval,
        extrinsic_eval=ext_eval,
        closed_form_curvature=curvature,
        metric_jet=metric_jet,
        extrinsic_jet=ext_jet,
        params=dict(params),
        description=description,
    )


def _warped(name, a, periods, params, description, potential_offset=0.0):
    """g = e^{2at}(dx1^2 + dx2^2) + dt^2 in chart (x1, x2, t)."""

    def metric_eval(x):
        e = np.exp(2 * a * x[..., 2])
        g = np.zeros(x.shape[:-1] + (DIM, DIM))
        g[..., 0, 0] = e
        g[..., 1, 1] = e
        g[..., 2, 2] = 1.0
        return g

    def metric_jet(x):
        e = np.exp(2 * a * x[..., 2])
        g = metric_eval(x)
        dg = np.zeros(x.shape[:-1] + (DIM, DIM, DIM))
        ddg = np.zeros(x.shape[:-1] + (DIM, DIM, DIM, DIM))
        for i in (0, 1):
            dg[..., 2, i, i] = 2 * a * e
            ddg[..., 2, 2, i, i] = 4 * a * a * e
        return g, dg, ddg

    def curvature(x):
        return -2 * a * a * metric_eval(x), np.full(x.shape[:-1], -6.0 * a * a)

    if a != 0.0:
        def potential(t):
            return np.exp(2 * a * t) / (2 * a) + potential_offset
    else:
        def potential(t):
            return t + potential_offset

    if periods is None:
        domain = ChartDomain((-10.0, -10.0, -4.0), (10.0, 10.0, 4.0))
    else:
        domain = ChartDomain((0.0, 0.0, -4.0), (float(periods[0]), float(periods[1]), 4.0), (True, True, False))
    return AmbientModel(
        name=name,
        domain=domain,
        metric_eval=metric_eval,
        closed_form_curvature=curvature,
        metric_jet=metric_jet,
        potential=potential,
        params=dict(params),
        description=description,
    )


def _psi_constant(c):
    def jet(x):
        shape = x.shape[:-1]
        return np.full(shape, float(c)), np.zeros(shape + (DIM,)), np.zeros(shape + (DIM, DIM))

    return jet


def _psi_point_mass(m, c=1.0):
    """psi = c + m / (2 r)."""

    def jet(x):
        r = np.linalg.norm(x, axis=-1)
        psi = c + m / (2 * r)
        d = -m / 2 * x / r[..., None] ** 3
        dd = -m / 2 * (np.eye(DIM) / r[..., None, None] ** 3 - 3 * x[..., :, None] * x[..., None, :] / r[..., None, None] ** 5)
        return psi, d, dd

    return jet


def _psi_power(coef, p):
    """psi = coef * r^p."""

    def jet(x):
        r = np.linalg.norm(x, axis=-1)
        psi = coef * r**p
        d = coef * p * r[..., None] ** (p - 2) * x
        dd = coef * p * (
            r[..., None, None] ** (p - 2) * np.eye(DIM)
            + (p - 2) * r[..., None, None] ** (p - 4) * x[..., :, None] * x[..., None, :]
        )
        return psi, d, dd

    return jet


_XYZ = sympy.symbols("x y z", real=True)


def _sympify(expr):
    x, y, z = _XYZ
    r = sympy.sqrt(x**2 + y**2 + z**2)
    try:
        out = sympy.sympify(expr, locals={"x": x, "y": y, "z": z, "r": r})
    except (sympy.SympifyError, TypeError, SyntaxError, ValueError, AttributeError, NameError) as exc:
        raise ModelError(f"cannot parse expression {expr!r}: {exc}") from exc
    stray = out.free_symbols - {x, y, z} if isinstance(out, sympy.Basic) else set()
    if stray:
        raise ModelError(f"expression {expr!r} uses unknown symbols {sorted(map(str, stray))}")
    return out


def _lambdify_all(exprs):
    fn = sympy.lambdify(_XYZ, exprs, "numpy")

    def call(x):
        vals = fn(x[..., 0], x[..., 1], x[..., 2])
        return [np.broadcast_to(np.asarray(v, dtype=float), x.shape[:-1]) for v in vals]

    return call


def psi_from_expression(expr):
    """Jet of a conformal factor given as a sympy-parsable string in x, y, z, r."""
    e = _sympify(expr)
    grad = [sympy.diff(e, s) for s in _XYZ]
    hess = [sympy.diff(gr, s) for gr in grad for s in _XYZ]
    call = _lambdify_all([e, *grad, *hess])

    def jet(x):
        vals = call(x)
        psi = vals[0]
        d = np.stack(vals[1:4], axis=-1)
        dd = np.stack(vals[4:], axis=-1).reshape(x.shape[:-1] + (DIM, DIM))
        return psi, d, dd

    return jet


_AXES = {"x": 0, "y": 1, "z": 2}


def _extrinsic_builder(spec):
    """K = trace * g + constant shear + expression components (chart)."""
    if spec is None:
        return None
    spec = dict(spec)
    trace = float(spec.pop("trace", 0.0))
    shear = np.asarray(spec.pop("shear", np.zeros((DIM, DIM))), dtype=float)
    if shear.shape != (DIM, DIM):
        raise ModelError("K.shear must be a 3x3 array")
    comps = {}
    for key, val in spec.items():
        if len(key) != 2 or key[0] not in _AXES or key[1] not in _AXES:
            raise ModelError(f"unknown K entry {key!r}; use trace, shear or components like 'xz'")
        i, j = sorted((_AXES[key[0]], _AXES[key[1]]))
        comps[(i, j)] = _sympify(val)
    comp_call = None
    if comps:
        keys = list(comps)
        exprs = []
        for k in keys:
            exprs.append(comps[k])
            exprs.extend(sympy.diff(comps[k], s) for s in _XYZ)
        comp_call = (keys, _lambdify_all(exprs))

    def make(metric_jet):
        def jet(x):
            g, dg, _ = metric_jet(x)
            K = trace * g + shear
            dK = trace * dg
            dK = dK + np.zeros(x.shape[:-1] + (DIM, DIM, DIM))
            if comp_call is not None:
                keys, call = comp_call
                vals = call(x)
                for n, (i, j) in enumerate(keys):
                    v = vals[4 * n]
                    dv = np.stack(vals[4 * n + 1: 4 * n + 4], axis=-1)
                    K[..., i, j] = K[..., i, j] + v
                    dK[..., :, i, j] = dK[..., :, i, j] + dv
                    if i != j:
                        K[..., j, i] = K[..., j, i] + v
                        dK[..., :, j, i] = dK[..., :, j, i] + dv
            return K, dK

        def evaluate(x):
            return jet(x)[0]

        return evaluate, jet

    return make


def _positive(params, key, default=None):
    val = params.get(key, default)
    if val is None:
        raise ModelError(f"missing parameter {key!r}")
    if isinstance(val, (list, tuple)):
        vals = [float(v) for v in val]
        if any(v <= 0 for v in vals):
            raise ModelError(f"parameter {key!r} must be positive, got {val!r}")
        return vals
    val = float(val)
    if not val > 0:
        raise ModelError(f"parameter {key!r} must be positive, got {val!r}")
    return val


MODEL_NAMES = (
    "euclidean",
    "minkowski_slice_with_K",
    "schwarzschild_isotropic",
    "cylinder_S2xR",
    "hyperbolic_g1",
    "hyperbolic_cusp",
    "product_line_x_flat_torus",
    "conformally_flat",
)


def builtin_model(name: str, params: Mapping | None = None) -> AmbientModel:
    """Construct a catalogued model by name.

    ``K`` (where accepted) is a mapping with optional ``trace`` (K = trace*g),
    ``shear`` (constant 3x3 chart components) and expression components
    keyed like ``"xz"``.
    """
    params = dict(params or {})
    box = float(params.get("box", 10.0))
    if name == "euclidean":
        dom = ChartDomain((-box,) * 3, (box,) * 3)
        return _conformally_flat(name, _psi_constant(1.0), dom, params, "flat R^3, Cartesian chart, K = 0")
    if name == "minkowski_slice_with_K":
        dom = ChartDomain((-box,) * 3, (box,) * 3)
        ext = _extrinsic_builder(params.get("K", {"trace": -1.0}))
        return _conformally_flat(name, _psi_constant(1.0), dom, params, "flat metric with prescribed K (not constrained)", ext)
    if name == "schwarzschild_isotropic":
        m = _positive(params, "m", 1.0)
        params["m"] = m
        dom = ChartDomain((-4 * m - box,) * 3, (4 * m + box,) * 3, min_radius=0.2 * m)
        ext = _extrinsic_builder(params.get("K"))
        return _conformally_flat(name, _psi_point_mass(m), dom, params, "psi = 1 + m/(2r), isotropic chart; horizon r = m/2", ext)
    if name == "cylinder_S2xR":
        rad = _positive(params, "radius", 1.0)
        params["radius"] = rad
        dom = ChartDomain((-box,) * 3, (box,) * 3, min_radius=0.1)
        # S^2(R) x R with the line coordinate s = R ln r: g = (R/r)^2 delta
        return _conformally_flat(name, _psi_power(np.sqrt(rad), -0.5), dom, params, "S^2 x R as (R/r)^2 delta; spheres r = const are totally geodesic")
    if name == "conformally_flat":
        psi = params.get("psi", "1")
        dom = ChartDomain((-box,) * 3, (box,) * 3, min_radius=float(params.get("min_radius", 0.0)))
        ext = _extrinsic_builder(params.get("K"))
        return _conformally_flat(name, psi_from_expression(str(psi)), dom, params, f"psi^4 delta with psi = {psi}", ext)
    if name == "hyperbolic_g1":
        return _warped(name, 1.0, None, params, "dt^2 + e^{2t}(dx1^2 + dx2^2), chart (x1, x2, t)", float(params.get("potential_offset", 0.0)))
    if name in ("hyperbolic_cusp", "product_line_x_flat_torus"):
        periods = _positive(params, "periods", [2 * np.pi, 2 * np.pi])
        if len(periods) != 2:
            raise ModelError("periods must have two entries")
        params["periods"] = periods
        a = 1.0 if name == "hyperbolic_cusp" else 0.0
        desc = "dt^2 + e^{2t} h, h flat torus" if a else "dt^2 + h, h flat torus"
        return _warped(name, a, periods, params, desc, float(params.get("potential_offset", 0.0)))
    raise ModelError(f"unknown model {name!r}; known: {', '.join(MODEL_NAMES)}")
