"""Newton solvers for MOTS and CMC graphs, leaf-by-leaf foliations and variation checks.

The unknown is the graph height F.  Moving F by dF moves the surface by
dF * dir, whose normal speed is omega * dF with omega = g(dir, nu), so the
Jacobian of a curvature quantity is its stability operator composed with
diag(omega).  The tangential part of the motion only reparametrizes the
surface, which adds the pointwise transport term <grad q, dir - omega nu>
for a quantity q; it vanishes at a solution but keeps Newton quadratic.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.linalg as sla

from .constraint import null_expansions
from .errors import ChartError, GeometryError, HypothesisError, SolverError
from .stability import OperatorKind, assemble, conformal_scalar, principal_eigenvalue
from .surface import EmbeddedSurface, area, gradient, inner, integrate


class KernelPolicy(str, Enum):
    NONE = "none"
    PROJECT_OUT_CONSTANTS = "project_out_constants"
    PIN_MEAN_HEIGHT = "pin_mean_height"
    AUTO = "auto"


@dataclass(frozen=True)
class SolveOptions:
    max_iterations: int = 40
    newton_tolerance: float = 1e-10
    damping: float = 1.0
    max_halvings: int = 30
    kernel_policy: KernelPolicy = KernelPolicy.AUTO
    seed: int = 0
    compute_spectrum: bool = True

    def __post_init__(self):
        if not self.newton_tolerance > 0:
            raise ValueError("newton_tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if not 0 < self.damping <= 1:
            raise ValueError("damping must lie in (0, 1]")
        object.__setattr__(self, "kernel_policy", KernelPolicy(self.kernel_policy))


@dataclass(frozen=True, eq=False)
class SolveResult:
    surface: EmbeddedSurface
    quantity: str
    constant: float                 # value the quantity is constant at
    residual_sup: float             # sup |quantity - constant|
    iterations: int
    history: list = field(repr=False)
    policy_used: str = "none"
    spectrum: object = field(default=None, repr=False)

    @property
    def lambda1(self) -> float | None:
        return None if self.spectrum is None else self.spectrum.lambda1

    def residual_ratios(self) -> list[float]:
        """r_{k+1} / r_k^2 along the Newton history."""
        r = [h["residual"] for h in self.history]
        return [r[k + 1] / r[k] ** 2 for k in range(len(r) - 1) if r[k] > 0]


def _quantity(surface: EmbeddedSurface, which: str) -> np.ndarray:
    if which == "H":
        return surface.geometry.H
    return null_expansions(surface).theta_plus


def _jacobian_kind(which):
    return OperatorKind.L_MINIMAL if which == "H" else OperatorKind.L_BAR_MOTS


def _mean_weights(surface):
    w = surface.mesh.quad_weights
    return (w / w.sum()).ravel()


def mean_height(surface: EmbeddedSurface) -> float:
    return float(_mean_weights(surface) @ surface.F.ravel())


def _lambda2_scale(surface):
    a = area(surface)
    return (8 * np.pi if surface.mesh.topology == "sphere" else 4 * np.pi**2) / a


def _try_surface(surface, F):
    try:
        s = surface.with_height(F)
        _ = s.geometry
        return s
    except (GeometryError, ChartError):
        return None


def _newton(guess: EmbeddedSurface, which: str, target, opts: SolveOptions, pin_mean: float | None = None) -> SolveResult:
    """Damped Newton for quantity == target (float) or == free constant (target None)."""
    surface = guess
    policy = opts.kernel_policy
    w = _mean_weights(surface)
    free_constant = target is None
    if policy is KernelPolicy.PIN_MEAN_HEIGHT and pin_mean is None:
        pin_mean = mean_height(surface)
        free_constant = True
    if pin_mean is not None:
        policy = KernelPolicy.PIN_MEAN_HEIGHT
        free_constant = True

    def merit(s):
        q = _quantity(s, which)
        if free_constant:
            c = float(integrate(s, q) / area(s))
            r = float(np.max(np.abs(q - c)))
            if pin_mean is not None:
                r = max(r, abs(mean_height(s) - pin_mean))
            return q, c, r
        return q, float(target), float(np.max(np.abs(q - target)))

    q, c, r = merit(surface)
    history = [{"iteration": 0, "residual": r, "step": 0.0}]
    used = policy
    for it in range(1, opts.max_iterations + 1):
        if r <= opts.newton_tolerance:
            break
        J = graph_jacobian(surface, which, q)
        N = J.shape[0]
        if policy is KernelPolicy.AUTO:
            # Rayleigh quotient of the constant function: its area-mean potential
            potential = assemble(_jacobian_kind(which), surface).potential
            near_kernel = abs(integrate(surface, potential) / area(surface)) < 0.1 * _lambda2_scale(surface)
            used = KernelPolicy.PROJECT_OUT_CONSTANTS if near_kernel else KernelPolicy.NONE
        rhs = -(q.ravel() - c)
        if used is KernelPolicy.NONE and not free_constant:
            M, b = J, rhs
        else:
            M = np.zeros((N + 1, N + 1))
            M[:N, :N] = J
            M[:N, N] = -1.0 if free_constant else 1.0
            M[N, :N] = w
            gap = (pin_mean - mean_height(surface)) if pin_mean is not None else 0.0
            b = np.concatenate([rhs, [gap]])
        try:
            sol = _solve(M, b)
        except (sla.LinAlgError, ValueError) as exc:
            raise SolverError(f"Jacobian solve failed: {exc}", r, history) from exc
        if not np.all(np.isfinite(sol)):
            raise SolverError("Jacobian singular beyond kernel handling", r, history)
        dF = sol[:N].reshape(surface.mesh.shape)
        alpha = opts.damping
        for _ in range(opts.max_halvings + 1):
            trial = _try_surface(surface, surface.F + alpha * dF)
            if trial is not None:
                tq, tc, tr = merit(trial)
                if tr < r or tr <= opts.newton_tolerance:
                    break
            alpha *= 0.5
        else:
            raise SolverError(f"line search failed after {opts.max_halvings} halvings", r, history)
        surface, q, c, r = trial, tq, tc, tr
        history.append({"iteration": it, "residual": r, "step": alpha})
    if r > opts.newton_tolerance:
        raise SolverError(f"Newton did not converge: residual {r:.3e} after {opts.max_iterations} iterations", r, history)
    spectrum = None
    if opts.compute_spectrum:
        spectrum = principal_eigenvalue(assemble(_jacobian_kind(which), surface))
    return SolveResult(surface, which, c, float(np.max(np.abs(_quantity(surface, which) - c))), len(history) - 1,
                       history, used.value, spectrum)


def _solve(M, b):
    """LU solve; (numerically) singular systems fall back to the minimum-norm solution.

    Rigid motions of round spheres in flat models are a genuine kernel, so
    the fallback is exercised by ordinary fixtures.
    """
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error", sla.LinAlgWarning)
            return sla.solve(M, b, check_finite=False)
    except (sla.LinAlgError, sla.LinAlgWarning):
        return sla.lstsq(M, b, cond=1e-10, lapack_driver="gelsd")[0]


def graph_jacobian(surface: EmbeddedSurface, which: str, q=None) -> np.ndarray:
    """Derivative of the nodal quantity with respect to nodal graph heights."""
    geo = surface.geometry
    q = _quantity(surface, which) if q is None else q
    op = assemble(_jacobian_kind(which), surface)
    J = op.matrix * geo.graph_speed.ravel()[None, :]
    tangential = surface.direction - geo.graph_speed[..., None] * geo.nu
    J[np.diag_indices_from(J)] += inner(surface, gradient(surface, q), tangential).ravel()
    return J


def _rebind(model, guess):
    if model is None or model is guess.model:
        return guess
    return EmbeddedSurface(guess.mesh, model, guess.F, guess.normal_orientation, guess.center)


def find_mots(model, guess: EmbeddedSurface, opts: SolveOptions | None = None) -> SolveResult:
    """Solve theta_+ = 0; the spectrum of the MOTS operator at the solution is attached."""
    return _newton(_rebind(model, guess), "theta", 0.0, opts or SolveOptions())


def find_cmc(model, guess: EmbeddedSurface, c: float, opts: SolveOptions | None = None) -> SolveResult:
    """Solve H = c with the minimal-surface operator as Jacobian."""
    return _newton(_rebind(model, guess), "H", float(c), opts or SolveOptions())


# ---------------------------------------------------------------------------
# foliations


@dataclass(frozen=True, eq=False)
class LeafRecord:
    t: float
    constant: float
    deviation: float
    area: float
    lambda1: float | None
    lapse: np.ndarray = field(repr=False)
    area_rate: float = np.nan          # A'(t) by differences
    constant_rate: float = np.nan      # dH/dt or dtheta/dt by differences
    first_variation: float = np.nan    # int H phi dA on the leaf
    conformal_residual: float | None = None


@dataclass(frozen=True, eq=False)
class FoliationResult:
    mode: str
    leaves: list = field(repr=False)
    t_values: np.ndarray = None
    records: list = field(default_factory=list)

    def table(self) -> list[dict]:
        return [
            {
                "t": r.t, "constant": r.constant, "deviation": r.deviation, "area": r.area,
                "lambda1": r.lambda1, "area_rate": r.area_rate, "int_H_phi": r.first_variation,
                "constant_rate": r.constant_rate, "lapse_min": float(np.min(r.lapse)),
                "lapse_max": float(np.max(r.lapse)), "conformal_residual": r.conformal_residual,
            }
            for r in self.records
        ]

    def first_variation_error(self) -> float:
        """max |A'(t) - int H phi| relative to the largest |int H phi| on the foliation."""
        num = np.array([abs(r.area_rate - r.first_variation) for r in self.records])
        scale = max(max(abs(r.first_variation) for r in self.records), 1e-300)
        return float(np.max(num) / scale)


_D4 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0


def foliate(model, base: EmbeddedSurface, mode: str, t_range, leaf_count: int, opts: SolveOptions | None = None,
            aux_step: float | None = None, check_conformal: bool = True) -> FoliationResult:
    """Leaves of constant H (``cmc``) or constant theta_+ (``constant_null_expansion``).

    Leaf k is the solution with mean graph height equal to the base mean plus
    ``t_k``.  Lapse, A'(t) and the rate of the leaf constant come from
    fourth-order centered differences over auxiliary leaves at t +- aux_step
    and t +- 2 aux_step.
    """
    if mode not in ("cmc", "constant_null_expansion"):
        raise ValueError(f"unknown foliation mode {mode!r}")
    if leaf_count < 3:
        raise ValueError("leaf_count must be at least 3")
    which = "H" if mode == "cmc" else "theta"
    opts = opts or SolveOptions()
    base = _rebind(model, base)
    t_values = np.linspace(float(t_range[0]), float(t_range[1]), leaf_count)
    spacing = (t_values[-1] - t_values[0]) / (leaf_count - 1)
    delta = aux_step if aux_step is not None else spacing / 8
    m0 = mean_height(base)
    plain = SolveOptions(opts.max_iterations, opts.newton_tolerance, opts.damping, opts.max_halvings,
                         KernelPolicy.PIN_MEAN_HEIGHT, opts.seed, False)

    def solve_at(start, t):
        return _newton(start, which, None, plain, pin_mean=m0 + t)

    start_idx = int(np.argmin(np.abs(t_values)))
    results = {}
    order = [start_idx] + list(range(start_idx + 1, leaf_count)) + list(range(start_idx - 1, -1, -1))
    for idx in order:
        t = t_values[idx]
        if idx == start_idx:
            seed_surface = base.with_height(base.F + t)
        else:
            nb = idx - 1 if idx > start_idx else idx + 1
            prev = results[nb].surface
            seed_surface = prev.with_height(prev.F + (t - t_values[nb]))
        try:
            results[idx] = solve_at(seed_surface, t)
        except SolverError as exc:
            raise SolverError(f"continuation stalled at leaf t = {t:.6g}: {exc}", exc.last_residual, exc.history) from exc

    leaves = [results[i].surface for i in range(leaf_count)]
    for a, b in zip(leaves, leaves[1:]):
        gap = b.F - a.F
        if not (np.all(gap > 0) or np.all(gap < 0)):
            raise SolverError("leaf collision: consecutive graphs intersect")

    records = []
    for i, leaf in enumerate(leaves):
        t = t_values[i]
        aux = [solve_at(leaf.with_height(leaf.F + k * delta), t + k * delta) for k in (-2, -1, 1, 2)]
        stencil = [aux[0], aux[1], results[i], aux[2], aux[3]]
        dF = sum(cf * s.surface.F for cf, s in zip(_D4, stencil)) / delta
        lapse = leaf.geometry.graph_speed * dF
        area_rate = sum(cf * area(s.surface) for cf, s in zip(_D4, stencil)) / delta
        const_rate = sum(cf * s.constant for cf, s in zip(_D4, stencil)) / delta
        first_var = integrate(leaf, leaf.geometry.H * lapse)
        lam = principal_eigenvalue(assemble(_jacobian_kind(which), leaf)).lambda1
        conf = None
        if check_conformal and which == "H" and np.all(lapse > 0):
            conf = conformal_scalar(leaf, lapse, mean_curvature_rate=const_rate).residual_eigen
        records.append(LeafRecord(
            t=float(t), constant=results[i].constant, deviation=results[i].residual_sup, area=area(leaf),
            lambda1=lam, lapse=lapse, area_rate=float(area_rate), constant_rate=float(const_rate),
            first_variation=float(first_var), conformal_residual=conf,
        ))
    return FoliationResult(mode, leaves, t_values, records)


# ---------------------------------------------------------------------------
# finite-difference checks of variation formulas


VARIATIONS = ("area_second_variation", "mean_curvature_evolution", "null_expansion_derivative", "brane_first", "brane_second")


@dataclass(frozen=True)
class VariationReport:
    which: str
    analytic: float | list
    eps: list
    errors: list
    orders: list
    observed_order: float
    exact: bool

    def passed(self, min_order: float = 1.9) -> bool:
        return self.exact or self.observed_order >= min_order


def _stationarity(surface, which, tol):
    geo = surface.geometry
    if which == "area_second_variation" and np.max(np.abs(geo.H)) > tol:
        raise HypothesisError(f"second variation of area needs a minimal surface (sup|H| = {np.max(np.abs(geo.H)):.3g})")
    if which == "mean_curvature_evolution" and np.ptp(geo.H) > tol:
        raise HypothesisError("pointwise mean-curvature evolution check needs constant H")
    if which == "null_expansion_derivative":
        th = null_expansions(surface).theta_plus
        if np.max(np.abs(th)) > tol:
            raise HypothesisError(f"expansion derivative needs a MOTS (sup|theta_+| = {np.max(np.abs(th)):.3g})")
    if which == "brane_second" and np.max(np.abs(geo.H - 2.0)) > tol:
        raise HypothesisError("brane second variation needs H = n - 1 everywhere")


def variation_check(surface: EmbeddedSurface, phi, which: str, eps_ladder=(0.04, 0.02, 0.01, 0.005),
                    hypothesis_tol: float = 1e-7, noise_floor: float = 1e-9) -> VariationReport:
    """Compare centered differences along F + eps * phi / omega with the analytic variation.

    Errors below ``noise_floor`` (relative to the analytic scale) are treated
    as exact agreement, since no order can be measured there.
    """
    from .brane_mass import brane_action

    if which not in VARIATIONS:
        raise ValueError(f"unknown variation {which!r}")
    eps_ladder = [float(e) for e in eps_ladder]
    if any(e <= 0 for e in eps_ladder) or any(b >= a for a, b in zip(eps_ladder, eps_ladder[1:])):
        raise ValueError("eps_ladder must be a decreasing positive sequence")
    _stationarity(surface, which, hypothesis_tol)
    phi = np.asarray(phi, dtype=float)
    geo = surface.geometry
    direction = phi / geo.graph_speed

    def at(eps):
        s = surface.with_height(surface.F + eps * direction)
        if which == "area_second_variation":
            return area(s)
        if which == "mean_curvature_evolution":
            return s.geometry.H
        if which == "null_expansion_derivative":
            return null_expansions(s).theta_plus
        return brane_action(s).action

    if which == "area_second_variation":
        op = assemble(OperatorKind.L_MINIMAL, surface)
        analytic = integrate(surface, phi * op.apply(phi))
    elif which == "mean_curvature_evolution":
        analytic = assemble(OperatorKind.L_MINIMAL, surface, form="ricci").apply(phi)
    elif which == "null_expansion_derivative":
        analytic = assemble(OperatorKind.L_BAR_MOTS, surface).apply(phi)
    elif which == "brane_first":
        analytic = integrate(surface, (geo.H - 2.0) * phi)
    else:
        analytic = integrate(surface, phi * assemble(OperatorKind.L_BRANE, surface).apply(phi))

    second = which in ("area_second_variation", "brane_second")
    base = at(0.0) if second else None
    errors = []
    for eps in eps_ladder:
        plus, minus = at(eps), at(-eps)
        fd = (plus - 2 * base + minus) / eps**2 if second else (plus - minus) / (2 * eps)
        errors.append(float(np.max(np.abs(fd - analytic))))
    scale = max(1.0, float(np.max(np.abs(analytic))))
    floor = noise_floor * scale
    orders = []
    for (e1, r1), (e2, r2) in zip(zip(eps_ladder, errors), zip(eps_ladder[1:], errors[1:])):
        if r1 > floor and r2 > floor:
            orders.append(float(np.log(r1 / r2) / np.log(e1 / e2)))
    exact = all(r <= floor for r in errors)
    observed = float(np.inf) if exact else (min(orders) if orders else float(np.inf))
    if not exact and not orders:
        # the finest errors dropped below the floor: judge on the resolved pairs only
        observed = float(np.inf)
    a_out = float(analytic) if np.ndim(analytic) == 0 else float(np.max(np.abs(analytic)))
    return VariationReport(which, a_out, eps_ladder, errors, orders, observed, exact)
