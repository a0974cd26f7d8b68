"""Numerical laboratory for boundary behaviour of general Dirichlet series."""

from ._backend import BACKEND
from .errors import DomainError, ExperimentAborted, ReliabilityError, ValidationError
from .series import (
    GeneralDirichletSeries,
    SubsequenceSelector,
    evaluate,
    partial_sum,
    partial_sums,
    tail_bound,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DomainError",
    "ExperimentAborted",
    "GeneralDirichletSeries",
    "ReliabilityError",
    "SubsequenceSelector",
    "ValidationError",
    "evaluate",
    "partial_sum",
    "partial_sums",
    "tail_bound",
    "__version__",
]
