"""Exception hierarchy shared by all modules."""


class MotslabError(Exception):
    """Base class; ``origin`` names the module that raised it."""

    origin = "motslab"


class ModelError(MotslabError, ValueError):
    origin = "ambient"


class ChartError(MotslabError, ValueError):
    """A point (or stencil node) lies outside the usable chart domain."""

    origin = "ambient"


class MeshError(MotslabError, ValueError):
    origin = "surface"


class GeometryError(MotslabError, ValueError):
    """Degenerate or invalid embedded surface."""

    origin = "surface"


class EigenError(MotslabError, RuntimeError):
    """Eigen-solver failure or principal eigenfunction not one-signed."""

    origin = "stability"


class OperatorError(MotslabError, ValueError):
    """Invalid operator request (unknown kind, zero test function, missing data)."""

    origin = "stability"


class HypothesisError(MotslabError, ValueError):
    """A variation formula was requested off its stationarity hypothesis."""

    origin = "solver"


class SolverError(MotslabError, RuntimeError):
    """Newton iteration or continuation did not converge."""

    origin = "solver"

    def __init__(self, message, last_residual=None, history=None):
        super().__init__(message)
        self.last_residual = last_residual
        self.history = list(history or [])


class ScenarioError(MotslabError, ValueError):
    origin = "cli"


class BraneMassError(MotslabError, ValueError):
    """Missing potential form, non-symmetric mass aspect, or violated hypothesis."""

    origin = "brane_mass"
