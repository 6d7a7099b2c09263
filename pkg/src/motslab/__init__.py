"""motslab: stability operators for minimal surfaces, MOTS and CMC surfaces in 3-dimensional initial data."""

__version__ = "0.1.0"

from .ambient import AmbientModel, ChartDomain, ValidationReport, builtin_model, validate_model
from .brane_mass import BraneEvaluation, MassAspect, SignClass, brane_action, brane_variations, mass_aspect
from .constraint import TrappingClass, classify, energy_momentum, null_expansions
from .errors import (
    BraneMassError, ChartError, EigenError, GeometryError, HypothesisError, MeshError, ModelError,
    MotslabError, OperatorError, ScenarioError, SolverError,
)
from .solver import (
    FoliationResult, KernelPolicy, SolveOptions, SolveResult, VariationReport, find_cmc, find_mots,
    foliate, variation_check,
)
from .stability import (
    OperatorKind, OperatorMatrix, Spectrum, assemble, conformal_scalar, divergence_identity_check,
    eigenvalue_comparison, principal_eigenvalue, rayleigh_minimize, rayleigh_quotient,
)
from .surface import (
    EmbeddedSurface, SurfaceMesh, area, build_mesh, integrate, sphere_surface, torus_surface, yamabe_type,
)
