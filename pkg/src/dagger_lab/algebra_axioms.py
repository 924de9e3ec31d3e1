"""Randomized checks of the involution axioms, the C*-norm identities and the
Leibniz rule.

Every residual is a ``cstar_norm`` of a difference divided by ``max(1, scale)``
where the scale is the natural size of the inputs, so pass/fail thresholds are
scale-free.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .derivations import Derivation, inner_derivation, leibniz_residual, linearity_residual
from .errors import DimensionMismatchError
from .linalg_core import as_operator, check_same_dim, cstar_norm
from .reports import AxiomId, AxiomReport, ResidualTracker, ToleranceConfig
from .serialization import operator_to_json

__all__ = [
    "AxiomId",
    "AxiomReport",
    "Ensemble",
    "RandomOperatorSpec",
    "ToleranceConfig",
    "axiom_sweep",
    "check_cstar_identity",
    "check_involution",
    "check_leibniz",
    "random_operator",
]


class Ensemble(str, Enum):
    GENERAL_GAUSSIAN = "general_gaussian"
    HERMITIAN_GAUSSIAN = "hermitian_gaussian"
    UNITARY_CONJUGATED_DIAGONAL = "unitary_conjugated_diagonal"


@dataclass(frozen=True)
class RandomOperatorSpec:
    dim: int
    ensemble: Ensemble = Ensemble.GENERAL_GAUSSIAN
    scale: float = 1.0

    def __post_init__(self):
        if int(self.dim) < 1:
            raise ValueError("dim must be >= 1")
        if not self.scale > 0:
            raise ValueError("scale must be > 0")
        object.__setattr__(self, "ensemble", Ensemble(self.ensemble))


def thread_count() -> int:
    """Worker cap from ``DAGGER_LAB_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("DAGGER_LAB_THREADS", "1")))
    except ValueError:
        return 1


def _ginibre(dim: int, rng: np.random.Generator) -> np.ndarray:
    # unit variance per complex entry: E|z|^2 = 1
    return (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)


def draw_operator(spec: RandomOperatorSpec, rng: np.random.Generator) -> np.ndarray:
    d = spec.dim
    if spec.ensemble is Ensemble.GENERAL_GAUSSIAN:
        return spec.scale * _ginibre(d, rng)
    if spec.ensemble is Ensemble.HERMITIAN_GAUSSIAN:
        G = spec.scale * _ginibre(d, rng)
        return (G + G.conj().T) / 2
    Q, R = np.linalg.qr(_ginibre(d, rng))
    # fix column phases so Q is Haar distributed
    Q = Q * (np.diag(R) / np.abs(np.diag(R)))
    diag = spec.scale * rng.standard_normal(d)
    X = (Q * diag) @ Q.conj().T
    return (X + X.conj().T) / 2


def random_operator(spec: RandomOperatorSpec, seed: int) -> np.ndarray:
    return draw_operator(spec, np.random.default_rng(seed))


def _involution_residuals(A, B, lam: complex) -> dict[AxiomId, float]:
    Ad, Bd = A.conj().T, B.conj().T
    nA, nB = cstar_norm(A), cstar_norm(B)
    return {
        AxiomId.INVOL_DOUBLE: cstar_norm(Ad.conj().T - A) / max(1.0, nA),
        AxiomId.INVOL_SCALAR: cstar_norm((lam * A).conj().T - np.conj(lam) * Ad) / max(1.0, abs(lam) * nA),
        AxiomId.INVOL_SUM: cstar_norm((A + B).conj().T - (Ad + Bd)) / max(1.0, nA + nB),
        AxiomId.INVOL_PRODUCT: cstar_norm((A @ B).conj().T - Bd @ Ad) / max(1.0, nA * nB),
    }


def _cstar_residuals(A, norm: Callable) -> dict[AxiomId, float]:
    nA = norm(A)
    scale = max(1.0, nA * nA)
    return {
        AxiomId.NORM_ADJOINT: abs(norm(A.conj().T) - nA) / scale,
        AxiomId.NORM_CSTAR: abs(norm(A.conj().T @ A) - nA * nA) / scale,
    }


def _single_reports(residuals: dict[AxiomId, float], witness: dict, tol: ToleranceConfig) -> list[AxiomReport]:
    out = []
    for axiom_id, r in residuals.items():
        tracker = ResidualTracker(axiom_id, tol)
        tracker.add(r, lambda: witness)
        out.append(tracker.report())
    return out


def check_involution(A, B, lam: complex, tol: ToleranceConfig = ToleranceConfig()) -> list[AxiomReport]:
    A, B = as_operator(A), as_operator(B)
    check_same_dim(A, B)
    lam = complex(lam)
    witness = {"A": operator_to_json(A), "B": operator_to_json(B), "lambda": [lam.real, lam.imag]}
    return _single_reports(_involution_residuals(A, B, lam), witness, tol)


def check_cstar_identity(A, tol: ToleranceConfig = ToleranceConfig(), norm: Callable = cstar_norm) -> list[AxiomReport]:
    """Both norm identities for ``A``. ``norm`` may be swapped (e.g. for
    ``spectral_radius``) to exhibit why only the operator norm satisfies them."""
    A = as_operator(A)
    return _single_reports(_cstar_residuals(A, norm), {"A": operator_to_json(A)}, tol)


def check_leibniz(delta: Derivation, A, B, tol: ToleranceConfig = ToleranceConfig()) -> AxiomReport:
    A, B = as_operator(A), as_operator(B)
    check_same_dim(A, B)
    if A.shape[0] != delta.algebra_dim:
        raise DimensionMismatchError(
            f"operators have dim {A.shape[0]}, derivation acts on dim {delta.algebra_dim}"
        )
    raw, scale = leibniz_residual(delta, A, B)
    tracker = ResidualTracker(AxiomId.LEIBNIZ, tol)
    tracker.add(raw / scale, lambda: {"A": operator_to_json(A), "B": operator_to_json(B)})
    return tracker.report()


def _trial_inputs(spec: RandomOperatorSpec, trial_seed: int):
    rng = np.random.default_rng(trial_seed)
    A = draw_operator(spec, rng)
    B = draw_operator(spec, rng)
    lam = complex(rng.standard_normal(), rng.standard_normal())
    T = draw_operator(RandomOperatorSpec(spec.dim, Ensemble.HERMITIAN_GAUSSIAN, spec.scale), rng)
    mix = complex(rng.standard_normal(), rng.standard_normal())
    return A, B, lam, T, mix


def _run_trial(spec: RandomOperatorSpec, trial_seed: int) -> dict[AxiomId, float]:
    A, B, lam, T, mix = _trial_inputs(spec, trial_seed)
    residuals = _involution_residuals(A, B, lam)
    residuals.update(_cstar_residuals(A, cstar_norm))
    delta = inner_derivation(T, 1.0)
    raw, scale = leibniz_residual(delta, A, B)
    residuals[AxiomId.LEIBNIZ] = raw / scale
    raw, scale = linearity_residual(delta, A, B, lam, mix)
    residuals[AxiomId.LINEARITY] = raw / scale
    return residuals


def _trial_witness(spec: RandomOperatorSpec, seed: int, trial: int) -> dict:
    A, B, lam, T, mix = _trial_inputs(spec, seed + trial)
    return {
        "trial": trial,
        "trial_seed": seed + trial,
        "ensemble": spec.ensemble.value,
        "A": operator_to_json(A),
        "B": operator_to_json(B),
        "lambda": [lam.real, lam.imag],
        "generator": operator_to_json(T),
        "mix": [mix.real, mix.imag],
    }


def axiom_sweep(
    spec: RandomOperatorSpec,
    trials: int,
    seed: int = 0,
    tol: ToleranceConfig = ToleranceConfig(),
    workers: int | None = None,
) -> list[AxiomReport]:
    """One report per axiom id over ``trials`` random draws.

    Trial ``k`` draws all of its inputs from ``seed + k``, so the result does
    not depend on ``workers`` or on scheduling order.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    workers = thread_count() if workers is None else max(1, workers)
    seeds = [seed + k for k in range(trials)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda s: _run_trial(spec, s), seeds))
    else:
        results = [_run_trial(spec, s) for s in seeds]

    trackers = {axiom_id: ResidualTracker(axiom_id, tol, seed=seed) for axiom_id in AxiomId}
    for k, residuals in enumerate(results):
        for axiom_id, r in residuals.items():
            trackers[axiom_id].add(r, lambda: _trial_witness(spec, seed, k))
    return [trackers[axiom_id].report() for axiom_id in AxiomId]
