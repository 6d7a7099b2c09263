"""Task runners: each maps a Scenario to summary numbers, invariant verdicts and tables."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ambient import validate_model
from .brane_mass import brane_action, brane_variations, mass_aspect
from .constraint import classify, energy_momentum, null_expansions
from .scenario import Scenario
from .solver import SolveOptions, find_cmc, find_mots, foliate
from .stability import (
    assemble,
    conformal_scalar,
    divergence_identity_check,
    eigenvalue_comparison,
    principal_eigenvalue,
    rayleigh_minimize,
)
from .surface import (
    area,
    band_limited_field,
    build_mesh,
    divergence,
    gradient,
    integrate,
    laplace_beltrami,
    yamabe_type,
)


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tol: float
    passed: bool
    hard: bool = True

    def to_dict(self) -> dict:
        return {"name": self.name, "value": self.value, "tol": self.tol, "passed": bool(self.passed), "hard": self.hard}


def at_most(name, value, tol, hard=True) -> Check:
    value = float(value)
    return Check(name, value, float(tol), bool(value <= tol), hard)


def at_least(name, value, bound, hard=True) -> Check:
    value = float(value)
    return Check(name, value, float(bound), bool(value >= bound), hard)


@dataclass
class TaskOutput:
    summary: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)      # name -> (header, rows)
    nodal: dict = field(default_factory=dict)       # name -> (mesh, {field: array})


def _history_table(result):
    return (["iteration", "residual", "step"], [[h["iteration"], h["residual"], h["step"]] for h in result.history])


def _solve_options(scen: Scenario) -> SolveOptions:
    p = scen.params
    return SolveOptions(max_iterations=int(p["max_iterations"]), newton_tolerance=scen.tolerances["newton"],
                        damping=float(p["damping"]), kernel_policy=p["kernel_policy"], seed=scen.seed)


def task_validate_model(scen: Scenario) -> TaskOutput:
    model = scen.build_model()
    rep = validate_model(model, int(scen.params["sample_count"]), scen.seed)
    summary = {k: v for k, v in rep.summary().items() if k != "failures"}
    summary["failure_count"] = len(rep.failures)
    tol = scen.tolerances["model_validation"]
    checks = [
        at_most("metric_symmetry", rep.max_metric_asymmetry, tol),
        at_most("extrinsic_symmetry", rep.max_extrinsic_asymmetry, tol),
        at_least("metric_positive", rep.min_metric_eigenvalue, 0.0),
    ]
    if rep.closed_form:
        checks += [at_most("ricci_closed_vs_fd", rep.max_ricci_discrepancy, tol),
                   at_most("scalar_closed_vs_fd", rep.max_scalar_discrepancy, tol)]
    return TaskOutput(summary, checks)


def task_check_identities(scen: Scenario) -> TaskOutput:
    surface = scen.build_surface()
    geo = surface.geometry
    tol = scen.tolerances
    chi = 2.0 if surface.mesh.topology == "sphere" else 0.0
    total_S = integrate(surface, geo.S_intrinsic)
    gauss = float(np.max(np.abs(geo.gauss_residual)))
    ng = null_expansions(surface)
    rng = np.random.default_rng(scen.seed + 1)
    conf, divgrad = [], []
    for _ in range(int(scen.params["trials"])):
        phi = 1.0 + scen.params["phi_amplitude"] * band_limited_field(surface.mesh, int(scen.params["phi_degree"]), rng)
        conf.append(conformal_scalar(surface, phi).residual)
        divgrad.append(float(np.max(np.abs(divergence(surface, gradient(surface, phi)) - laplace_beltrami(surface, phi)))))
    ytype = yamabe_type(surface).value
    summary = {
        "area": area(surface), "total_scalar_curvature": total_S, "gauss_residual_sup": gauss,
        "conformal_residual_max": max(conf) if conf else None, "div_grad_residual_max": max(divgrad) if divgrad else None,
        "yamabe_type": ytype, "classification": classify(surface).value,
    }
    checks = [
        at_most("gauss_equation", gauss, tol["gauss"]),
        at_most("gauss_bonnet", abs(total_S - 4 * np.pi * chi), tol["gauss_bonnet"]),
        at_most("theta_plus_trace_consistency", np.max(np.abs(ng.theta_plus - ng.theta_plus_from_chi)), tol["identity"]),
        Check("yamabe_type_matches_topology", float(ytype == ("positive" if chi > 0 else "non_positive")), 1.0,
              ytype == ("positive" if chi > 0 else "non_positive")),
    ]
    if conf:
        checks.append(at_most("conformal_transformation", max(conf), tol["conformal"]))
        checks.append(at_most("div_grad_equals_laplacian", max(divgrad), tol["identity"], hard=False))
    nodal = {"geometry": (surface.mesh, {"F": surface.F, "H": geo.H, "S_intrinsic": geo.S_intrinsic,
                                         "gauss_residual": geo.gauss_residual, "theta_plus": ng.theta_plus})}
    return TaskOutput(summary, checks, nodal=nodal)


def _solve_summary(result):
    s = result.surface
    return {
        "iterations": result.iterations, "residual_sup": result.residual_sup, "constant": result.constant,
        "area": area(s), "lambda1": result.lambda1, "F_min": float(np.min(s.F)), "F_max": float(np.max(s.F)),
        "kernel_policy_used": result.policy_used,
    }


def task_find_mots(scen: Scenario) -> TaskOutput:
    guess = scen.build_surface()
    res = find_mots(guess.model, guess, _solve_options(scen))
    summary = _solve_summary(res)
    tol = scen.tolerances
    checks = [at_most("theta_plus_residual", res.residual_sup, tol["newton"]),
              Check("principal_eigenfunction_positive", 1.0, 1.0, bool(res.spectrum.positivity_ok))]
    r0 = scen.params.get("expected_radius")
    if r0 is not None:
        dev = float(np.max(np.abs(res.surface.F - r0)))
        summary["radius_deviation"] = dev
        checks.append(at_most("radius_deviation", dev, tol["horizon_radius"]))
    a0 = scen.params.get("expected_area")
    if a0 is not None:
        rel = abs(summary["area"] - a0) / a0
        summary["area_relative_error"] = rel
        checks.append(at_most("area_relative_error", rel, tol["horizon_area"]))
    nodal = {"solution": (res.surface.mesh, {"F": res.surface.F, "theta_plus": null_expansions(res.surface).theta_plus,
                                             "eigenfunction": res.spectrum.eigenfunction})}
    return TaskOutput(summary, checks, {"convergence": _history_table(res)}, nodal)


def task_find_cmc(scen: Scenario) -> TaskOutput:
    guess = scen.build_surface()
    res = find_cmc(guess.model, guess, float(scen.params["target"]), _solve_options(scen))
    summary = _solve_summary(res)
    checks = [at_most("mean_curvature_residual", res.residual_sup, scen.tolerances["newton"])]
    nodal = {"solution": (res.surface.mesh, {"F": res.surface.F, "H": res.surface.geometry.H})}
    return TaskOutput(summary, checks, {"convergence": _history_table(res)}, nodal)


def task_stability(scen: Scenario) -> TaskOutput:
    surface = scen.build_surface()
    tol = scen.tolerances
    summary, checks, fields = {}, [], {}
    for kind in scen.params["operators"]:
        op = assemble(kind, surface)
        spec = principal_eigenvalue(op)
        summary[kind] = spec.summary()
        fields[f"eigenfunction_{kind}"] = spec.eigenfunction
        checks.append(Check(f"{kind}_positive_eigenfunction", 1.0, 1.0, spec.positivity_ok))
        checks.append(at_most(f"{kind}_imag_residual", spec.imag_residual, tol["eigen_imag"]))
        trials = int(scen.params["rayleigh_trials"])
        if trials and op.symmetric_flag:
            ray = rayleigh_minimize(op, trials, scen.seed)
            summary[kind]["rayleigh_upper_bound"] = ray.value
            checks.append(at_least(f"{kind}_rayleigh_is_upper_bound", ray.value - spec.lambda1, -tol["comparison"]))
    if scen.params["compare"]:
        cmp = eigenvalue_comparison(surface)
        summary["comparison"] = {k: v for k, v in cmp.items() if k != "spectra"}
        checks.append(at_least("lambda1_L0_minus_Lbar", cmp["gap"], -tol["comparison"]))
        div = divergence_identity_check(surface, cmp["spectra"][1])
        summary["divergence_identity_residual"] = div["residual_sup"]
        checks.append(at_most("divergence_identity", div["residual_sup"], tol["divergence_identity"]))
        em = energy_momentum(surface)
        summary["dec_margin_min"] = float(np.min(em.dec_margin))
    return TaskOutput(summary, checks, nodal={"eigenfunctions": (surface.mesh, fields)})


def task_foliate(scen: Scenario) -> TaskOutput:
    base = scen.build_surface()
    p = scen.params
    opts = SolveOptions(newton_tolerance=scen.tolerances["newton"], seed=scen.seed)
    fol = foliate(base.model, base, p["mode"], p["t_range"], int(p["leaf_count"]), opts)
    table = fol.table()
    header = list(table[0])
    rows = [[r[h] for h in header] for r in table]
    tol = scen.tolerances
    areas = np.array([r.area for r in fol.records])
    consts = np.array([r.constant for r in fol.records])
    summary = {
        "leaf_count": len(fol.records), "constant_spread": float(np.ptp(consts)),
        "max_deviation": float(max(r.deviation for r in fol.records)),
        "first_variation_error": fol.first_variation_error(),
        "area_min": float(areas.min()), "area_max": float(areas.max()),
        "lambda1_min": float(min(r.lambda1 for r in fol.records)),
    }
    checks = [
        at_most("leaf_constancy", summary["max_deviation"], tol["foliation_constancy"]),
        at_most("first_variation_law", summary["first_variation_error"], tol["first_variation"]),
    ]
    rate = p.get("area_growth_rate")
    if rate is not None:
        i0 = int(np.argmin(np.abs(fol.t_values)))
        expected = areas[i0] * np.exp(float(rate) * (fol.t_values - fol.t_values[i0]))
        rel = float(np.max(np.abs(areas / expected - 1)))
        summary["warped_area_error"] = rel
        checks.append(at_most("warped_area_law", rel, tol["first_variation"]))
    return TaskOutput(summary, checks, {"foliation": (header, rows)})


def task_brane(scen: Scenario) -> TaskOutput:
    base = scen.build_surface()
    p = scen.params
    tol = scen.tolerances["brane"]
    stationary = base.model.name in ("hyperbolic_cusp", "hyperbolic_g1") and base.mesh.topology == "torus"
    actions = []
    rows = []
    for off in p["slice_offsets"]:
        ev = brane_action(base.with_height(base.F + off))
        actions.append(ev.action)
        rows.append([off, ev.area, ev.volume_term, ev.action])
    actions = np.array(actions)
    rng = np.random.default_rng(scen.seed)
    b0 = brane_action(base).action
    drops = []
    for _ in range(int(p["perturbations"])):
        pert = band_limited_field(base.mesh, 3, rng, float(p["perturbation_amplitude"]))
        drops.append(brane_action(base.with_height(base.F + pert)).action - b0)
    spec = principal_eigenvalue(assemble("L_brane", base))
    scale = max(1.0, float(np.max(np.abs(actions))))
    summary = {
        "action_base": b0, "action_spread": float(np.ptp(actions)), "min_perturbation_gain": float(min(drops)) if drops else None,
        "lambda1_L_brane": spec.lambda1, "B_minus_h_sup": float(np.max(np.abs(base.geometry.B - base.geometry.h))),
        "minimization_scope": "graph perturbations of the base slice only",
    }
    if stationary:
        ones = np.ones(base.mesh.shape)
        summary.update({f"variation_{k}": v for k, v in brane_variations(base, ones, tol=tol).items()})
    checks = [
        at_most("action_constant_along_slices", summary["action_spread"] / scale, tol, hard=stationary),
        at_most("lambda1_L_brane_zero", abs(spec.lambda1), tol, hard=stationary),
    ]
    if drops:
        checks.append(at_least("action_minimized_by_slice", min(drops), -tol, hard=stationary))
    return TaskOutput(summary, checks, {"slices": (["offset", "area", "volume_term", "action"], rows)})


def task_mass(scen: Scenario) -> TaskOutput:
    mesh = build_mesh("sphere", scen.params["resolution"])
    ma = mass_aspect(scen.params["k"], mesh, tol=scen.tolerances["mass"])
    summary = {"mass": ma.mass, "sign_class": ma.sign_class.value,
               "trace_min": float(np.min(ma.trace_field)), "trace_max": float(np.max(ma.trace_field))}
    checks = []
    expected = scen.params.get("expected_mass")
    if expected is not None:
        checks.append(at_most("mass_matches_expected", abs(ma.mass - expected), scen.tolerances["mass"]))
    return TaskOutput(summary, checks, nodal={"mass_aspect": (mesh, {"trace": ma.trace_field})})


RUNNERS = {
    "validate_model": task_validate_model,
    "check_identities": task_check_identities,
    "find_mots": task_find_mots,
    "find_cmc": task_find_cmc,
    "stability": task_stability,
    "foliate": task_foliate,
    "brane": task_brane,
    "mass": task_mass,
}
