"""Derivations of the full matrix algebra as superoperators, and recovery of
their inner generators.

Vectorization is column-stacking throughout: ``vec(A X B) = (B^T kron A) vec(X)``.
Two sign conventions are supported and tagged on construction:

* ``eq2``: ``delta F = [T, F]``
* ``eq3``: ``delta F = (1 / (i hbar)) [F, T]``

so that ``commutator_derivation(T) == -1j * hbar * inner_derivation(T, hbar)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Literal

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvalidOperatorError,
    NotADerivationError,
    NotComplexLinearError,
    ResidualExceedsToleranceError,
)
from .linalg_core import as_operator, commutator, cstar_norm, hermiticity_defect
from .reports import AxiomId, AxiomReport, ResidualTracker, ToleranceConfig
from .serialization import FormatError, operator_from_json, operator_to_json

Convention = Literal["eq2", "eq3"]

DEFAULT_PROBES = 50
DEFAULT_CHECK_TRIALS = 20
KNOWN_GENERATOR_TOL = 1e-12


def vec(F: np.ndarray) -> np.ndarray:
    return np.asarray(F).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(v).reshape((dim, dim), order="F")


def matrix_unit(dim: int, i: int, j: int) -> np.ndarray:
    E = np.zeros((dim, dim), dtype=complex)
    E[i, j] = 1.0
    return E


def commutator_superoperator(T) -> np.ndarray:
    """Matrix of ``F -> T F - F T`` acting on column-stacked ``F``."""
    T = as_operator(T)
    eye = np.eye(T.shape[0])
    return np.kron(eye, T) - np.kron(T.T, eye)


def _gaussian(dim: int, rng: np.random.Generator) -> np.ndarray:
    return (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)


@dataclass(frozen=True)
class GeneratorTag:
    generator: np.ndarray
    hbar: float
    convention: Convention

    def superoperator(self) -> np.ndarray:
        C = commutator_superoperator(self.generator)
        if self.convention == "eq2":
            return C
        if self.convention == "eq3":
            return C / (-1j * self.hbar)
        raise ValueError(f"unknown convention {self.convention!r}")


@dataclass(frozen=True)
class Derivation:
    """A linear map on d x d matrices stored as its d^2 x d^2 matrix."""

    algebra_dim: int
    matrix: np.ndarray
    known_generator: GeneratorTag | None = field(default=None)

    def __post_init__(self):
        d = int(self.algebra_dim)
        if d < 1:
            raise InvalidOperatorError("algebra_dim must be positive")
        M = np.array(self.matrix, dtype=complex)
        if M.shape != (d * d, d * d):
            raise InvalidOperatorError(f"superoperator must be {d * d}x{d * d}, got {M.shape}")
        if not np.all(np.isfinite(M)):
            raise InvalidOperatorError("superoperator has non-finite entries")
        M.setflags(write=False)
        object.__setattr__(self, "algebra_dim", d)
        object.__setattr__(self, "matrix", M)
        tag = self.known_generator
        if tag is not None:
            expected = tag.superoperator()
            if expected.shape != M.shape:
                raise DimensionMismatchError("tagged generator dimension does not match the algebra")
            gap = np.linalg.norm(M - expected)
            if gap > KNOWN_GENERATOR_TOL * max(1.0, np.linalg.norm(expected)):
                raise InvalidOperatorError(
                    f"superoperator disagrees with its tagged generator (gap {gap:.3e})"
                )

    def apply(self, F) -> np.ndarray:
        F = as_operator(F)
        if F.shape[0] != self.algebra_dim:
            raise DimensionMismatchError(
                f"operator has dim {F.shape[0]}, derivation acts on dim {self.algebra_dim}"
            )
        return unvec(self.matrix @ vec(F), self.algebra_dim)

    __call__ = apply

    @classmethod
    def from_map(cls, fn: Callable[[np.ndarray], np.ndarray], dim: int, seed: int = 0) -> "Derivation":
        """Tabulate ``fn`` on matrix units.

        Only complex-linear maps have a matrix representation; maps such as
        ``F -> F^dag`` are refused here, before any derivation test runs.
        """
        cols = []
        for j in range(dim):
            for i in range(dim):
                cols.append(vec(as_operator(fn(matrix_unit(dim, i, j)))))
        M = np.stack(cols, axis=1)
        rng = np.random.default_rng(seed)
        X, Y = _gaussian(dim, rng), _gaussian(dim, rng)
        alpha = complex(rng.standard_normal(), rng.standard_normal())
        lhs = as_operator(fn(alpha * X + Y))
        rhs = alpha * as_operator(fn(X)) + as_operator(fn(Y))
        tabulated = unvec(M @ vec(alpha * X + Y), dim)
        scale = max(1.0, cstar_norm(lhs), cstar_norm(rhs))
        gap = max(cstar_norm(lhs - rhs), cstar_norm(lhs - tabulated))
        if gap > 1e-10 * scale:
            raise NotComplexLinearError(
                f"map is not complex-linear (defect {gap / scale:.3e}); conjugating maps cannot be encoded"
            )
        return cls(dim, M)

    def to_json(self) -> dict[str, Any]:
        tag = self.known_generator
        out: dict[str, Any] = {
            "algebra_dim": self.algebra_dim,
            "superoperator": operator_to_json(self.matrix),
            "generator_tag": None if tag is None else {"hbar": tag.hbar, "convention": tag.convention},
        }
        if tag is not None:
            out["generator"] = operator_to_json(tag.generator)
        return out

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "Derivation":
        if not isinstance(data, dict):
            raise FormatError("derivation document must be an object")
        unknown = set(data) - {"algebra_dim", "superoperator", "generator_tag", "generator"}
        if unknown:
            raise FormatError(f"unknown derivation fields: {sorted(unknown)}")
        try:
            dim = int(data["algebra_dim"])
            matrix = operator_from_json(data["superoperator"])
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"malformed derivation document: {exc}") from exc
        tag_data = data.get("generator_tag")
        tag = None
        if tag_data is not None:
            if "generator" not in data or data["generator"] is None:
                raise FormatError("generator_tag given without a generator operator")
            try:
                tag = GeneratorTag(
                    generator=operator_from_json(data["generator"]),
                    hbar=float(tag_data["hbar"]),
                    convention=tag_data["convention"],
                )
            except (KeyError, TypeError) as exc:
                raise FormatError(f"malformed generator_tag: {exc}") from exc
            if tag.convention not in ("eq2", "eq3") or not tag.hbar > 0:
                raise FormatError("generator_tag needs hbar > 0 and convention eq2|eq3")
        try:
            return cls(dim, matrix, tag)
        except ValueError as exc:
            raise FormatError(str(exc)) from exc


def inner_derivation(T, hbar: float = 1.0) -> Derivation:
    """``F -> (1/(i hbar)) [F, T]``, the dynamical form."""
    if not hbar > 0:
        raise ValueError("hbar must be positive")
    T = as_operator(T)
    tag = GeneratorTag(T.copy(), float(hbar), "eq3")
    return Derivation(T.shape[0], tag.superoperator(), tag)


def commutator_derivation(T) -> Derivation:
    """``F -> [T, F]``."""
    T = as_operator(T)
    tag = GeneratorTag(T.copy(), 1.0, "eq2")
    return Derivation(T.shape[0], tag.superoperator(), tag)


def apply(delta: Derivation, F) -> np.ndarray:
    return delta.apply(F)


def leibniz_residual(delta: Derivation, A, B) -> tuple[float, float]:
    """Raw ``||delta(AB) - delta(A) B - A delta(B)||`` and the scale it is judged against."""
    A, B = as_operator(A), as_operator(B)
    dA, dB, dAB = delta.apply(A), delta.apply(B), delta.apply(A @ B)
    raw = cstar_norm(dAB - dA @ B - A @ dB)
    scale = max(1.0, cstar_norm(dAB), cstar_norm(dA) * cstar_norm(B), cstar_norm(A) * cstar_norm(dB))
    return raw, scale


def linearity_residual(delta: Derivation, A, B, alpha: complex, beta: complex) -> tuple[float, float]:
    dA, dB = delta.apply(A), delta.apply(B)
    raw = cstar_norm(delta.apply(alpha * A + beta * B) - alpha * dA - beta * dB)
    scale = max(1.0, abs(alpha) * cstar_norm(dA) + abs(beta) * cstar_norm(dB))
    return raw, scale


def _pair_witness(A, B, **extra) -> dict[str, Any]:
    return {"A": operator_to_json(A), "B": operator_to_json(B), **extra}


@dataclass(frozen=True)
class DerivationCheck:
    passed: bool
    leibniz: AxiomReport
    linearity: AxiomReport

    def __bool__(self) -> bool:
        return self.passed

    @property
    def reports(self) -> list[AxiomReport]:
        return [self.leibniz, self.linearity]


def is_derivation(
    delta: Derivation,
    trials: int = DEFAULT_CHECK_TRIALS,
    seed: int = 0,
    tol: ToleranceConfig = ToleranceConfig(),
) -> DerivationCheck:
    """Leibniz rule on the identity pair and on ``trials`` seeded Gaussian pairs.

    The identity pair goes first, so a map with ``delta(1) != 0`` fails with
    the identity as its witness.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    d = delta.algebra_dim
    eye = np.eye(d, dtype=complex)
    leib = ResidualTracker(AxiomId.LEIBNIZ, tol, seed=seed)
    lin = ResidualTracker(AxiomId.LINEARITY, tol, seed=seed)
    raw, scale = leibniz_residual(delta, eye, eye)
    leib.add(raw / scale, lambda: _pair_witness(eye, eye, trial=None))
    if raw / scale > tol.threshold:
        # delta(1) != 0 is conclusive; keep the identity as the witness
        raw, scale = linearity_residual(delta, eye, eye, 1j, 1.0)
        lin.add(raw / scale, lambda: _pair_witness(eye, eye, trial=None, alpha=[0.0, 1.0], beta=[1.0, 0.0]))
        return DerivationCheck(False, leib.report(), lin.report())
    for k in range(trials):
        rng = np.random.default_rng(seed + k)
        A, B = _gaussian(d, rng), _gaussian(d, rng)
        alpha = complex(rng.standard_normal(), rng.standard_normal())
        beta = complex(rng.standard_normal(), rng.standard_normal())
        raw, scale = leibniz_residual(delta, A, B)
        leib.add(raw / scale, lambda: _pair_witness(A, B, trial=k, trial_seed=seed + k))
        raw, scale = linearity_residual(delta, A, B, alpha, beta)
        lin.add(
            raw / scale,
            lambda: _pair_witness(A, B, trial=k, trial_seed=seed + k,
                                  alpha=[alpha.real, alpha.imag], beta=[beta.real, beta.imag]),
        )
    leibniz, linearity = leib.report(), lin.report()
    return DerivationCheck(leibniz.passed and linearity.passed, leibniz, linearity)


@dataclass(frozen=True)
class GeneratorExtraction:
    generator: np.ndarray
    minimal_norm_generator: np.ndarray
    residual: float
    derivation_norm_lower_bound: float
    derivation_norm_exact: float | None

    def to_json(self) -> dict[str, Any]:
        return {
            "generator": operator_to_json(self.generator),
            "minimal_norm_generator": operator_to_json(self.minimal_norm_generator),
            "residual": self.residual,
            "derivation_norm_lower_bound": self.derivation_norm_lower_bound,
            "derivation_norm_exact": self.derivation_norm_exact,
        }


def generator_from_matrix_units(delta: Derivation) -> np.ndarray:
    """Trace-zero ``T`` with ``delta = [T, .]``, from ``sum_i delta(E_i1) E_1i``."""
    d = delta.algebra_dim
    T = np.zeros((d, d), dtype=complex)
    for i in range(d):
        # delta(E_i1) E_1i keeps only the first column of delta(E_i1), moved to column i
        T[:, i] = delta.apply(matrix_unit(d, i, 0))[:, 0]
    return T - (np.trace(T) / d) * np.eye(d)


def probe_operators(dim: int, probes: int = DEFAULT_PROBES, seed: int = 0) -> list[np.ndarray]:
    """All matrix units followed by ``probes`` seeded Gaussians of unit operator norm."""
    ops = [matrix_unit(dim, i, j) for j in range(dim) for i in range(dim)]
    for k in range(probes):
        G = _gaussian(dim, np.random.default_rng(seed + k))
        ops.append(G / cstar_norm(G))
    return ops


def extract_generator(
    delta: Derivation,
    tol: ToleranceConfig = ToleranceConfig(),
    probes: int = DEFAULT_PROBES,
    seed: int = 0,
) -> GeneratorExtraction:
    check = is_derivation(delta, seed=seed, tol=tol)
    if not check:
        raise NotADerivationError(
            f"map fails the derivation test (leibniz residual {check.leibniz.max_residual:.3e}, "
            f"linearity residual {check.linearity.max_residual:.3e})",
            report=check,
        )
    d = delta.algebra_dim
    T0 = generator_from_matrix_units(delta)
    residual = 0.0
    lower = 0.0
    for F in probe_operators(d, probes, seed):
        dF = delta.apply(F)
        residual = max(residual, cstar_norm(dF - commutator(T0, F)))
        lower = max(lower, cstar_norm(dF))

    scale = max(1.0, cstar_norm(T0))
    exact = None
    minimal = T0
    if hermiticity_defect(T0) <= 1e-10 * scale:
        w = np.linalg.eigvalsh((T0 + T0.conj().T) / 2)
        exact = float(w[-1] - w[0])
        minimal = T0 - ((w[-1] + w[0]) / 2) * np.eye(d)
    result = GeneratorExtraction(
        generator=T0,
        minimal_norm_generator=minimal,
        residual=float(residual),
        derivation_norm_lower_bound=float(lower),
        derivation_norm_exact=exact,
    )
    limit = tol.threshold * max(1.0, lower)
    if residual > limit:
        raise ResidualExceedsToleranceError(residual, limit, extraction=result)
    return result


def ket_generator(T, hbar: float = 1.0) -> np.ndarray:
    """``D = (i / hbar) T``, so that ``[D, F]`` equals the dynamical derivation of ``F``
    and ``T = -i hbar D``."""
    if not hbar > 0:
        raise ValueError("hbar must be positive")
    return (1j / hbar) * as_operator(T)
