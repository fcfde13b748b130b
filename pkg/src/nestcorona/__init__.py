"""Corona and interpolation problems in finite nest-algebra models."""

from .algebra import FiniteModel, SuperOp, make_model
from .approximation import nearest_in_algebra, nest_distance
from .factorization import cholesky_in_algebra, qr_in_algebra
from .interpolation import (
    CoronaCertificate,
    CoronaInstance,
    corona_solve_general,
    corona_solve_nest,
    epsilon_report,
    left_inverse_partial_isometry,
    toeplitz_corona,
)

__all__ = [
    "FiniteModel",
    "SuperOp",
    "make_model",
    "nest_distance",
    "nearest_in_algebra",
    "qr_in_algebra",
    "cholesky_in_algebra",
    "CoronaInstance",
    "CoronaCertificate",
    "epsilon_report",
    "left_inverse_partial_isometry",
    "corona_solve_general",
    "corona_solve_nest",
    "toeplitz_corona",
]

__version__ = "0.1.0"
