"""ebkit: empirical Bayes estimation tools."""

from . import errors, linear_eb, moments, pearson, ranking, saddlepoint, symbolic_cluster, tweedie
from .errors import EbkitError
from .moments import IntervalBox, MomentSummary, classical_moments
from .pearson import PearsonFit, fit_pearson, fit_sample

__version__ = "0.1.0"

__all__ = [
    "errors",
    "linear_eb",
    "moments",
    "pearson",
    "ranking",
    "saddlepoint",
    "symbolic_cluster",
    "tweedie",
    "EbkitError",
    "IntervalBox",
    "MomentSummary",
    "classical_moments",
    "PearsonFit",
    "fit_pearson",
    "fit_sample",
]
