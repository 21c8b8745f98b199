"""Rigidity and stiffness spectra of bar-joint frameworks, bounds relating
them to the graph Laplacian, and estimation of d-dimensional algebraic
connectivity."""

__version__ = "0.1.0"

from rigidlab.graph import Graph, algebraic_connectivity, generate, laplacian  # noqa: E402
from rigidlab.optimizer import (  # noqa: E402
    EstimateResult,
    OptimizerConfig,
    RigidityEmbedding,
    estimate_ad,
)
from rigidlab.rigidity import (  # noqa: E402
    Configuration,
    Framework,
    rigidity_eigenvalue,
    rigidity_matrix,
    stiffness_matrix,
    trivial_basis,
)

__all__ = [
    "Configuration",
    "EstimateResult",
    "Framework",
    "Graph",
    "OptimizerConfig",
    "RigidityEmbedding",
    "algebraic_connectivity",
    "estimate_ad",
    "generate",
    "laplacian",
    "rigidity_eigenvalue",
    "rigidity_matrix",
    "stiffness_matrix",
    "trivial_basis",
]
