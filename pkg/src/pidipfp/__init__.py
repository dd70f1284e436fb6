"""Partial information decomposition of discrete joints via alternating I-projections."""

__version__ = "0.1.0"

from .dist import JointDistribution, MarginalPair, from_counts, info_profile, kl_divergence, marginals
from .oracle import GridOracleConfig, certify, grid_solve
from .pid import PidResult, contributions, decompose, pid
from .solver import Coupling, SolverConfig, SolveTrace, StopReason, solve

__all__ = [
    "__version__",
    "JointDistribution",
    "MarginalPair",
    "from_counts",
    "info_profile",
    "kl_divergence",
    "marginals",
    "GridOracleConfig",
    "certify",
    "grid_solve",
    "PidResult",
    "contributions",
    "decompose",
    "pid",
    "Coupling",
    "SolverConfig",
    "SolveTrace",
    "StopReason",
    "solve",
]
