"""Heisenberg-picture flow generated by a Hermitian operator ``T``.

The flow parameter ``s`` is dimensionless and solves
``dF/ds = (1/(i hbar)) [F, T]``, i.e. ``F(s) = e^{isT/hbar} F e^{-isT/hbar}``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .derivations import inner_derivation
from .errors import UnderResolvedError
from .lattice import LatticeSpec, PlanckUnits, momentum_operator, position_operator
from .linalg_core import (
    as_operator,
    check_same_dim,
    cstar_norm,
    hermitian_eig,
    require_hermitian,
    unitary_from_eig,
)
from .serialization import csv_text, operator_to_json, write_json


class HeisenbergFlow:
    """Caches the eigendecomposition of ``T`` so many ``s`` values are cheap."""

    def __init__(self, T, hbar: float = 1.0, tol: float | None = None):
        if not hbar > 0:
            raise ValueError("hbar must be positive")
        self.T = require_hermitian(T, tol)
        self.hbar = float(hbar)
        self.eig = hermitian_eig(self.T, tol)

    def unitary(self, s: float) -> np.ndarray:
        return unitary_from_eig(self.eig, s, self.hbar)

    def evolve(self, F, s: float) -> np.ndarray:
        F = as_operator(F)
        check_same_dim(F, self.T)
        if s == 0:
            return F.copy()
        U = self.unitary(s)
        return U.conj().T @ F @ U


def heisenberg_evolve(F, T, s: float, hbar: float = 1.0, tol: float | None = None) -> np.ndarray:
    F, T = as_operator(F), as_operator(T)
    check_same_dim(F, T)
    return HeisenbergFlow(T, hbar, tol).evolve(F, s)


@dataclass(frozen=True)
class FlowDerivativeCheck:
    h: float
    residual: float
    residual_half: float
    observed_order: float


def _central_difference_residual(flow: HeisenbergFlow, F, exact, h: float) -> float:
    approx = (flow.evolve(F, h) - flow.evolve(F, -h)) / (2 * h)
    return cstar_norm(approx - exact)


def _log2_ratio(r1: float, r2: float, ratio: float = 2.0) -> float:
    if r1 <= 0 or r2 <= 0:
        return math.nan
    return math.log(r1 / r2) / math.log(ratio)


def flow_derivative_check(F, T, hbar: float = 1.0, h: float = 1e-3) -> FlowDerivativeCheck:
    """Central difference of the flow at ``s = 0`` against ``(1/(i hbar)) [F, T]``
    at steps ``h`` and ``h/2``."""
    if not h > 0:
        raise ValueError("h must be positive")
    F = as_operator(F)
    flow = HeisenbergFlow(T, hbar)
    exact = inner_derivation(flow.T, hbar).apply(F)
    r1 = _central_difference_residual(flow, F, exact, h)
    r2 = _central_difference_residual(flow, F, exact, h / 2)
    return FlowDerivativeCheck(h, r1, r2, _log2_ratio(r1, r2))


@dataclass(frozen=True)
class FlowDerivativeStudy:
    steps: np.ndarray
    residuals: np.ndarray
    local_orders: np.ndarray
    fitted_order: float
    fitted_constant: float


def flow_derivative_study(F, T, hbar: float = 1.0, steps: Sequence[float] = (1e-2, 5e-3, 2.5e-3)) -> FlowDerivativeStudy:
    """Residuals over several steps, local orders between neighbours, and a
    least-squares fit ``residual ~ C h^p`` in log-log space."""
    steps = np.asarray(steps, dtype=float)
    if steps.size < 2 or np.any(steps <= 0):
        raise ValueError("need at least two positive steps")
    F = as_operator(F)
    flow = HeisenbergFlow(T, hbar)
    exact = inner_derivation(flow.T, hbar).apply(F)
    res = np.array([_central_difference_residual(flow, F, exact, h) for h in steps])
    orders = np.array([_log2_ratio(res[i], res[i + 1], steps[i] / steps[i + 1]) for i in range(len(steps) - 1)])
    if np.all(res > 0):
        slope, intercept = np.polyfit(np.log(steps), np.log(res), 1)
        order, const = float(slope), float(np.exp(intercept))
    else:
        order, const = math.nan, math.nan
    return FlowDerivativeStudy(steps, res, orders, order, const)


@dataclass(frozen=True)
class TraceSample:
    s: float
    observable: np.ndarray = field(repr=False)
    deviation: float


@dataclass(frozen=True)
class EvolutionTrace:
    samples: tuple[TraceSample, ...]

    def __post_init__(self):
        s = [sample.s for sample in self.samples]
        if any(b <= a for a, b in zip(s, s[1:])):
            raise ValueError("trace samples must have strictly increasing s")
        if not all(math.isfinite(sample.deviation) for sample in self.samples):
            raise ValueError("trace deviations must be finite")

    @property
    def s_values(self) -> np.ndarray:
        return np.array([sample.s for sample in self.samples])

    @property
    def deviations(self) -> np.ndarray:
        return np.array([sample.deviation for sample in self.samples])

    def to_csv(self) -> str:
        return csv_text(("s", "deviation"), ((x.s, x.deviation) for x in self.samples))

    def dump_operators(self, directory: str | Path) -> list[Path]:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        paths = []
        for index, sample in enumerate(self.samples):
            path = directory / f"sample_{index}.json"
            write_json(path, operator_to_json(sample.observable))
            paths.append(path)
        return paths


def evolution_trace(F, T, s_values: Iterable[float], hbar: float = 1.0, tol: float | None = None) -> EvolutionTrace:
    """Orbit of ``F`` with ``deviation = ||F(s) - F||``."""
    F = as_operator(F)
    flow = HeisenbergFlow(T, hbar, tol)
    check_same_dim(F, flow.T)
    samples = []
    for s in s_values:
        Fs = flow.evolve(F, float(s))
        samples.append(TraceSample(float(s), Fs, cstar_norm(Fs - F)))
    return EvolutionTrace(tuple(samples))


def conserved_quantity_check(T, s_values: Iterable[float], hbar: float = 1.0, tol: float | None = None) -> EvolutionTrace:
    return evolution_trace(T, T, s_values, hbar, tol)


@dataclass(frozen=True)
class TimeOperatorFlow:
    trace: EvolutionTrace
    instantaneous: np.ndarray = field(repr=False)

    @property
    def rate(self) -> float:
        """First-order growth rate of the deviation, ``||delta t||``."""
        return cstar_norm(self.instantaneous)


def time_operator_flow(t_op, T, s_values: Iterable[float], hbar: float = 1.0, tol: float | None = None) -> TimeOperatorFlow:
    t_op, T = as_operator(t_op), as_operator(T)
    check_same_dim(t_op, T)
    trace = evolution_trace(t_op, T, s_values, hbar, tol)
    return TimeOperatorFlow(trace, inner_derivation(T, hbar).apply(t_op))


@dataclass(frozen=True)
class TranslationParams:
    eps_time: float = 0.0
    eps_space: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.eps_time) and math.isfinite(self.eps_space)):
            raise ValueError("translation parameters must be finite")
        if self.eps_time == 0 and self.eps_space == 0:
            warnings.warn("both translation parameters are zero; the generator is trivial", stacklevel=3)


def translation_generator(params: TranslationParams, P, H, tol: float | None = None) -> np.ndarray:
    """``eps_space * P - eps_time * H``."""
    P, H = require_hermitian(P, tol), require_hermitian(H, tol)
    check_same_dim(P, H)
    return params.eps_space * P - params.eps_time * H


@dataclass(frozen=True)
class SchrodingerSolution:
    eigenvalues: np.ndarray
    eigenkets: np.ndarray
    residuals: np.ndarray

    @property
    def kets(self) -> list[np.ndarray]:
        return [self.eigenkets[:, k].copy() for k in range(self.eigenkets.shape[1])]


def generalized_schrodinger(T, tol: float | None = None) -> SchrodingerSolution:
    """Eigenpairs ``T |n> = T_n |n>`` with per-pair residual norms."""
    T = as_operator(T)
    eig = hermitian_eig(T, tol)
    V = eig.eigenvectors
    residuals = np.linalg.norm(T @ V - V * eig.eigenvalues, axis=0)
    return SchrodingerSolution(eig.eigenvalues, V, residuals)


# Continuum correspondence -------------------------------------------------

BOUNDARY_AMPLITUDE = 1e-12
# half-interval beyond the packet, in widths; exp(-7.5**2 / 2) ~ 6e-13
BOUNDARY_WIDTHS = 7.5
MIN_SITES_PER_WIDTH = 4


@dataclass(frozen=True)
class Wavepacket:
    center: float = 0.0
    width: float = 1.0
    wavenumber: float = 1.0

    def __post_init__(self):
        if not self.width > 0:
            raise ValueError("wavepacket width must be positive")

    def __call__(self, x, shift: float = 0.0) -> np.ndarray:
        y = np.asarray(x, dtype=float) - shift
        return np.exp(-((y - self.center) ** 2) / (2 * self.width**2) + 1j * self.wavenumber * y)


@dataclass(frozen=True)
class ConvergenceRow:
    sites: int
    error: float
    order: float


@dataclass(frozen=True)
class ConvergenceTable:
    rows: tuple[ConvergenceRow, ...]
    interval: tuple[float, float]

    @property
    def errors(self) -> np.ndarray:
        return np.array([r.error for r in self.rows])

    @property
    def final_order(self) -> float:
        return self.rows[-1].order

    def to_csv(self) -> str:
        return csv_text(("sites", "error", "order"), ((r.sites, r.error, r.order) for r in self.rows))


def default_interval_length(wavepacket: Wavepacket, shift: float) -> float:
    return abs(shift) + 2 * BOUNDARY_WIDTHS * wavepacket.width


def continuum_limit_study(
    site_counts: Sequence[int],
    wavepacket: Wavepacket = Wavepacket(),
    shift: float = 0.5,
    hbar: float = 1.0,
    interval_length: float | None = None,
) -> ConvergenceTable:
    """Translate a Gaussian packet with ``exp(-i shift P / hbar)`` on periodic
    lattices of increasing size over one fixed interval, and compare with the
    exactly shifted packet.

    ``order`` on row ``k`` is ``log(err_{k-1}/err_k) / log(d_k/d_{k-1})``; the
    first row has none.
    """
    counts = [int(d) for d in site_counts]
    if not counts:
        raise ValueError("site_counts is empty")
    if any(d < 16 for d in counts):
        raise ValueError("every site count must be >= 16")
    if any(b <= a for a, b in zip(counts, counts[1:])):
        raise ValueError("site_counts must be strictly increasing")
    L = default_interval_length(wavepacket, shift) if interval_length is None else float(interval_length)
    if not L > 0:
        raise ValueError("interval length must be positive")
    left = wavepacket.center + shift / 2 - L / 2

    coarse = L / counts[0]
    if 2 * wavepacket.width / coarse < MIN_SITES_PER_WIDTH:
        raise UnderResolvedError(
            f"wavepacket of width {wavepacket.width} spans {2 * wavepacket.width / coarse:.2f} sites "
            f"within one width of its center at {counts[0]} sites; need >= {MIN_SITES_PER_WIDTH}"
        )
    edges = np.array([left, left + L])
    edge_amp = max(np.max(np.abs(wavepacket(edges))), np.max(np.abs(wavepacket(edges, shift))))
    if edge_amp >= BOUNDARY_AMPLITUDE:
        raise UnderResolvedError(f"wavepacket amplitude {edge_amp:.2e} at the periodic boundary")

    units = PlanckUnits(hbar=hbar)
    rows: list[ConvergenceRow] = []
    for k, d in enumerate(counts):
        spec = LatticeSpec(sites=d, spacing=L / d, boundary="periodic")
        x = left + np.real(np.diag(position_operator(spec, units)))
        flow = HeisenbergFlow(momentum_operator(spec, units), hbar)
        psi = flow.unitary(shift) @ wavepacket(x)
        error = float(np.sqrt(spec.spacing) * np.linalg.norm(psi - wavepacket(x, shift)))
        order = math.nan
        if k:
            prev = rows[-1]
            order = math.log(prev.error / error) / math.log(d / prev.sites) if prev.error > 0 and error > 0 else math.nan
        rows.append(ConvergenceRow(d, error, order))
    return ConvergenceTable(tuple(rows), (float(left), float(left + L)))
