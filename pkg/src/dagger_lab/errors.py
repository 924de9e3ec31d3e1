"""Exception hierarchy shared by every module."""

from __future__ import annotations


class DaggerLabError(Exception):
    """Base class for all package errors."""


class DimensionMismatchError(DaggerLabError, ValueError):
    pass


class InvalidOperatorError(DaggerLabError, ValueError):
    """Input is not a finite square complex matrix."""


class NotHermitianError(DaggerLabError, ValueError):
    def __init__(self, deviation: float, tolerance: float):
        self.deviation = float(deviation)
        self.tolerance = float(tolerance)
        super().__init__(
            f"operator is not Hermitian: ||A - A^dag|| = {self.deviation:.3e} "
            f"exceeds tolerance {self.tolerance:.3e}"
        )


class ConvergenceError(DaggerLabError, RuntimeError):
    def __init__(self, message: str, diagnostics: dict | None = None):
        self.diagnostics = dict(diagnostics or {})
        super().__init__(f"{message} ({self.diagnostics})" if self.diagnostics else message)


class NotComplexLinearError(DaggerLabError, ValueError):
    """A map handed to the superoperator constructor is not complex-linear."""


class NotADerivationError(DaggerLabError, ValueError):
    def __init__(self, message: str, report=None):
        self.report = report
        super().__init__(message)


class ResidualExceedsToleranceError(DaggerLabError, RuntimeError):
    def __init__(self, residual: float, tolerance: float, extraction=None):
        self.residual = float(residual)
        self.tolerance = float(tolerance)
        self.extraction = extraction
        super().__init__(
            f"generator residual {self.residual:.3e} exceeds tolerance {self.tolerance:.3e}"
        )


class UnderResolvedError(DaggerLabError, ValueError):
    """Wavepacket too narrow for the lattice, or touching the periodic boundary."""
