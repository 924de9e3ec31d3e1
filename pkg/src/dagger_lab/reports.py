"""Tolerance and pass/fail report records shared by the checking modules."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any


class AxiomId(str, Enum):
    INVOL_DOUBLE = "invol_double"
    INVOL_SCALAR = "invol_scalar"
    INVOL_SUM = "invol_sum"
    INVOL_PRODUCT = "invol_product"
    NORM_ADJOINT = "norm_adjoint"
    NORM_CSTAR = "norm_cstar"
    LEIBNIZ = "leibniz"
    LINEARITY = "linearity"


@dataclass(frozen=True)
class ToleranceConfig:
    """Residuals are normalized by the scale of their inputs (at least 1), and
    a check passes when the normalized residual is at most ``rel_tol + abs_tol``."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("rel_tol and abs_tol must be strictly positive")

    @property
    def threshold(self) -> float:
        return self.rel_tol + self.abs_tol


@dataclass(frozen=True)
class AxiomReport:
    axiom_id: AxiomId
    passed: bool
    max_residual: float
    witness: dict[str, Any] | None = None
    trials: int = 1
    seed: int = 0

    def __post_init__(self):
        if not self.passed and self.witness is None:
            raise ValueError("a failing report must carry a witness")

    def to_json(self) -> dict[str, Any]:
        return {
            "axiom_id": AxiomId(self.axiom_id).value,
            "passed": bool(self.passed),
            "max_residual": float(self.max_residual),
            "witness": self.witness,
            "trials": int(self.trials),
            "seed": int(self.seed),
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "AxiomReport":
        return cls(
            axiom_id=AxiomId(data["axiom_id"]),
            passed=bool(data["passed"]),
            max_residual=float(data["max_residual"]),
            witness=data.get("witness"),
            trials=int(data["trials"]),
            seed=int(data["seed"]),
        )


@dataclass
class ResidualTracker:
    """Keeps the worst normalized residual seen over a sweep and its witness."""

    axiom_id: AxiomId
    tol: ToleranceConfig
    seed: int = 0
    trials: int = 0
    worst: float = 0.0
    witness: dict[str, Any] | None = field(default=None, repr=False)

    def add(self, residual: float, witness_fn) -> None:
        self.trials += 1
        if math.isnan(self.worst):
            return
        if self.witness is None or not residual <= self.worst:
            self.worst = float(residual)
            self.witness = witness_fn()

    def report(self) -> AxiomReport:
        passed = self.worst <= self.tol.threshold
        return AxiomReport(
            axiom_id=self.axiom_id,
            passed=passed,
            max_residual=self.worst,
            witness=None if passed else self.witness,
            trials=self.trials,
            seed=self.seed,
        )
