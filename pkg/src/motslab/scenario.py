"""Declarative experiment files (TOML) and their validation.

Schema (all tables optional except ``model``)::

    task = "find_mots"          # or given on the command line
    seed = 0

    [model]
    name = "schwarzschild_isotropic"
    params = { m = 1.0 }        # model parameters, e.g. K = { trace = -1.0 }

    [surface]
    topology = "sphere"         # or "torus"
    resolution = [24, 48]
    radius = 0.8                # sphere base radius (torus: height = 0.0)
    center = [0.0, 0.0, 0.0]
    orientation = "outward"
    perturbation = { degree = 3, amplitude = 0.0 }

    [params]                    # task parameters, see TASK_DEFAULTS
    [tolerances]                # overrides of DEFAULT_TOLERANCES
"""

from __future__ import annotations

import copy
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import tomli

from .ambient import MODEL_NAMES, builtin_model
from .errors import MotslabError, ScenarioError
from .surface import EmbeddedSurface, band_limited_field, build_mesh

TASKS = ("validate_model", "check_identities", "find_mots", "find_cmc", "stability", "foliate", "brane", "mass")

DEFAULT_TOLERANCES = {
    "newton": 1e-10,
    "gauss": 1e-7,
    "gauss_bonnet": 1e-8,
    "conformal": 1e-7,
    "identity": 1e-8,
    "eigen_imag": 1e-10,
    "comparison": 1e-8,
    "divergence_identity": 1e-6,
    "first_variation": 1e-6,
    "foliation_constancy": 1e-8,
    "horizon_radius": 1e-6,
    "horizon_area": 1e-4,
    "brane": 1e-8,
    "mass": 1e-10,
    "model_validation": 1e-6,
}

TASK_DEFAULTS = {
    "validate_model": {"sample_count": 100},
    "check_identities": {"trials": 3, "phi_degree": 3, "phi_amplitude": 0.3},
    "find_mots": {"max_iterations": 40, "kernel_policy": "auto", "damping": 1.0,
                  "expected_radius": None, "expected_area": None},
    "find_cmc": {"target": 0.0, "max_iterations": 40, "kernel_policy": "auto", "damping": 1.0},
    "stability": {"operators": ["L_minimal"], "compare": False, "rayleigh_trials": 0},
    "foliate": {"mode": "cmc", "t_range": [-0.1, 0.1], "leaf_count": 7, "area_growth_rate": None},
    "brane": {"slice_offsets": [0.0, 0.1, 0.2], "perturbations": 10, "perturbation_amplitude": 0.05},
    "mass": {"k": {"tt": "1", "pp": "sin(theta)**2"}, "resolution": [24, 48], "expected_mass": None},
}


@dataclass(frozen=True)
class SurfaceSpec:
    topology: str = "sphere"
    resolution: tuple = (24, 48)
    radius: float = 1.0
    height: float = 0.0
    center: tuple = (0.0, 0.0, 0.0)
    orientation: str = "outward"
    perturbation_degree: int = 3
    perturbation_amplitude: float = 0.0

    def to_dict(self) -> dict:
        return {
            "topology": self.topology, "resolution": list(self.resolution), "radius": self.radius,
            "height": self.height, "center": list(self.center), "orientation": self.orientation,
            "perturbation": {"degree": self.perturbation_degree, "amplitude": self.perturbation_amplitude},
        }


@dataclass(frozen=True)
class Scenario:
    task: str
    model_name: str
    model_params: dict
    surface: SurfaceSpec
    params: dict
    tolerances: dict
    seed: int = 0
    output_dir: str | None = None
    source: str | None = None

    def to_dict(self) -> dict:
        return {
            "task": self.task, "seed": self.seed,
            "model": {"name": self.model_name, "params": copy.deepcopy(self.model_params)},
            "surface": self.surface.to_dict(), "params": copy.deepcopy(self.params),
            "tolerances": dict(self.tolerances), "output_dir": self.output_dir, "source": self.source,
        }

    def build_model(self):
        try:
            return builtin_model(self.model_name, self.model_params)
        except MotslabError as exc:
            raise ScenarioError(f"model.params: {exc}") from exc

    def build_surface(self, model=None) -> EmbeddedSurface:
        model = model or self.build_model()
        s = self.surface
        periods = model.params.get("periods") if s.topology == "torus" else None
        mesh = build_mesh(s.topology, s.resolution, periods)
        base = s.radius if s.topology == "sphere" else s.height
        F = np.full(mesh.shape, float(base))
        if s.perturbation_amplitude:
            rng = np.random.default_rng(self.seed)
            F = F + band_limited_field(mesh, s.perturbation_degree, rng, s.perturbation_amplitude)
        return EmbeddedSurface(mesh, model, F, s.orientation, s.center)


def _require(cond, path, message):
    if not cond:
        raise ScenarioError(f"{path}: {message}")


def _number(value, path, positive=False):
    _require(isinstance(value, (int, float)) and not isinstance(value, bool), path, f"expected a number, got {value!r}")
    if positive:
        _require(value > 0, path, f"must be positive, got {value!r}")
    return float(value)


def scenario_from_dict(data: dict, source: str | None = None, task: str | None = None) -> Scenario:
    data = dict(data)
    known = {"task", "seed", "model", "surface", "params", "tolerances", "output_dir"}
    unknown = set(data) - known
    _require(not unknown, "<root>", f"unknown keys {sorted(unknown)}")
    task = task or data.get("task")
    _require(task is not None, "task", "missing (set it in the file or use a subcommand)")
    _require(task in TASKS, "task", f"unknown task {task!r}; known: {', '.join(TASKS)}")
    seed = data.get("seed", 0)
    _require(isinstance(seed, int) and not isinstance(seed, bool), "seed", f"expected an integer, got {seed!r}")

    model = data.get("model")
    _require(isinstance(model, dict), "model", "missing [model] table")
    name = model.get("name")
    _require(name in MODEL_NAMES, "model.name", f"unknown model {name!r}; known: {', '.join(MODEL_NAMES)}")
    mparams = model.get("params", {})
    _require(isinstance(mparams, dict), "model.params", "expected a table")

    sdata = dict(data.get("surface", {}))
    topology = sdata.get("topology", "torus" if name in ("hyperbolic_cusp", "product_line_x_flat_torus") else "sphere")
    _require(topology in ("sphere", "torus"), "surface.topology", f"unknown topology {topology!r}")
    res = sdata.get("resolution", [24, 48] if topology == "sphere" else [32, 32])
    _require(isinstance(res, list) and len(res) == 2 and all(isinstance(r, int) for r in res),
             "surface.resolution", f"expected two integers, got {res!r}")
    try:
        build_mesh(topology, res)
    except MotslabError as exc:
        raise ScenarioError(f"surface.resolution: {exc}") from exc
    pert = sdata.get("perturbation", {})
    _require(isinstance(pert, dict), "surface.perturbation", "expected a table")
    orientation = sdata.get("orientation", "outward")
    _require(orientation in ("outward", "inward"), "surface.orientation", f"unknown orientation {orientation!r}")
    center = sdata.get("center", [0.0, 0.0, 0.0])
    _require(isinstance(center, list) and len(center) == 3, "surface.center", "expected three numbers")
    surface = SurfaceSpec(
        topology=topology,
        resolution=(int(res[0]), int(res[1])),
        radius=_number(sdata.get("radius", 1.0), "surface.radius", positive=True),
        height=_number(sdata.get("height", 0.0), "surface.height"),
        center=tuple(_number(c, "surface.center") for c in center),
        orientation=orientation,
        perturbation_degree=int(pert.get("degree", 3)),
        perturbation_amplitude=_number(pert.get("amplitude", 0.0), "surface.perturbation.amplitude"),
    )
    extra_surface = set(sdata) - {"topology", "resolution", "radius", "height", "center", "orientation", "perturbation"}
    _require(not extra_surface, "surface", f"unknown keys {sorted(extra_surface)}")

    params = copy.deepcopy(TASK_DEFAULTS[task])
    given = data.get("params", {})
    _require(isinstance(given, dict), "params", "expected a table")
    unknown = set(given) - set(params)
    _require(not unknown, "params", f"unknown keys for task {task}: {sorted(unknown)}")
    params.update(given)
    if task == "mass":
        mres = params["resolution"]
        try:
            build_mesh("sphere", mres)
        except MotslabError as exc:
            raise ScenarioError(f"params.resolution: {exc}") from exc

    tols = dict(DEFAULT_TOLERANCES)
    given_tols = data.get("tolerances", {})
    _require(isinstance(given_tols, dict), "tolerances", "expected a table")
    for key, val in given_tols.items():
        _require(key in tols, f"tolerances.{key}", "unknown tolerance")
        tols[key] = _number(val, f"tolerances.{key}", positive=True)

    out = data.get("output_dir")
    _require(out is None or isinstance(out, str), "output_dir", "expected a string")
    scen = Scenario(task, name, dict(mparams), surface, params, tols, seed, out, source)
    scen.build_model()
    return scen


def parse_scenario(path, task: str | None = None) -> Scenario:
    """Read and validate a scenario file; every default is materialized."""
    path = Path(path)
    if not path.is_file():
        raise ScenarioError(f"scenario file not found: {path}")
    try:
        data = tomli.loads(path.read_text(encoding="utf-8"))
    except tomli.TOMLDecodeError as exc:
        raise ScenarioError(f"{path}: parse error: {exc}") from exc
    return scenario_from_dict(data, source=str(path), task=task)


def with_overrides(scen: Scenario, seed: int | None = None, tolerances: dict | None = None,
                   output_dir: str | None = None) -> Scenario:
    tols = dict(scen.tolerances)
    for key, val in (tolerances or {}).items():
        _require(key in tols, f"--tol {key}", "unknown tolerance")
        tols[key] = _number(val, f"--tol {key}", positive=True)
    return Scenario(scen.task, scen.model_name, scen.model_params, scen.surface, scen.params, tols,
                    scen.seed if seed is None else seed, output_dir or scen.output_dir, scen.source)
