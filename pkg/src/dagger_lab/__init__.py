"""Finite-dimensional workbench for a discrete space-time operator algebra."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConvergenceError,
    DaggerLabError,
    DimensionMismatchError,
    NotADerivationError,
    NotComplexLinearError,
    NotHermitianError,
    ResidualExceedsToleranceError,
)
from .linalg_core import (  # noqa: E402
    adjoint,
    commutator,
    cstar_norm,
    evolution_unitary,
    hermitian_eig,
    spectral_radius,
)

__all__ = [
    "ConvergenceError",
    "DaggerLabError",
    "DimensionMismatchError",
    "NotADerivationError",
    "NotComplexLinearError",
    "NotHermitianError",
    "ResidualExceedsToleranceError",
    "adjoint",
    "commutator",
    "cstar_norm",
    "evolution_unitary",
    "hermitian_eig",
    "spectral_radius",
]
