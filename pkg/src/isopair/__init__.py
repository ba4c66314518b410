"""Numerical toolkit for pairs of commuting isometries.

Builds multiplier models of pure pairs on vector-valued Hardy spaces, reads
their wandering subspaces, analyzes the defect operator, computes analytic
intertwiners and decides joint unitary equivalence.
"""

from .bcl import BCLData, BCLPair, build_multipliers, extract_bcl, random_bcl_data
from .errors import IsopairError
from .linalg import DEFAULT_TOL, TolerancePolicy

__all__ = [
    "BCLData",
    "BCLPair",
    "build_multipliers",
    "extract_bcl",
    "random_bcl_data",
    "IsopairError",
    "TolerancePolicy",
    "DEFAULT_TOL",
]

__version__ = "0.1.0"
