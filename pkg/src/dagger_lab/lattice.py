"""Discrete-spectrum coordinate operators and finite-difference momentum.

Position and time are diagonal with eigenvalues ``n * unit * spacing``; the
site labels ``n`` run from 0 (``from_zero``) or symmetrically about 0
(``centered``, half-integers when the site count is even).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from enum import Enum
from typing import Any, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from .linalg_core import as_operator


class Centering(str, Enum):
    FROM_ZERO = "from_zero"
    CENTERED = "centered"


class Boundary(str, Enum):
    PERIODIC = "periodic"
    OPEN = "open"


@dataclass(frozen=True)
class PlanckUnits:
    ell_pl: float = 1.0
    tau_pl: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")


@dataclass(frozen=True)
class LatticeSpec:
    sites: int
    spacing: float = 1.0
    centering: Centering = Centering.FROM_ZERO
    boundary: Boundary = Boundary.PERIODIC

    def __post_init__(self):
        if isinstance(self.sites, bool) or int(self.sites) != self.sites or self.sites < 1:
            raise ValueError(f"sites must be a positive integer, got {self.sites!r}")
        if not (np.isfinite(self.spacing) and self.spacing > 0):
            raise ValueError(f"spacing must be positive, got {self.spacing!r}")
        object.__setattr__(self, "sites", int(self.sites))
        object.__setattr__(self, "spacing", float(self.spacing))
        object.__setattr__(self, "centering", Centering(self.centering))
        object.__setattr__(self, "boundary", Boundary(self.boundary))

    def to_json(self) -> dict[str, Any]:
        return {
            "sites": self.sites,
            "spacing": self.spacing,
            "centering": self.centering.value,
            "boundary": self.boundary.value,
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "LatticeSpec":
        unknown = set(data) - {"sites", "spacing", "centering", "boundary"}
        if unknown:
            raise ValueError(f"unknown lattice fields: {sorted(unknown)}")
        return cls(**data)


def site_labels(spec: LatticeSpec) -> np.ndarray:
    n = np.arange(spec.sites, dtype=float)
    if spec.centering is Centering.CENTERED:
        n -= (spec.sites - 1) / 2
    return n


def position_operator(spec: LatticeSpec, units: PlanckUnits = PlanckUnits()) -> np.ndarray:
    return np.diag(site_labels(spec) * (units.ell_pl * spec.spacing)).astype(complex)


def time_operator(spec: LatticeSpec, units: PlanckUnits = PlanckUnits()) -> np.ndarray:
    return np.diag(site_labels(spec) * (units.tau_pl * spec.spacing)).astype(complex)


def shift_operator(spec: LatticeSpec) -> np.ndarray:
    """One-step shift ``(S psi)_j = psi_{j+1}``; wraps around when periodic."""
    d = spec.sites
    S = np.eye(d, k=1, dtype=complex)
    if spec.boundary is Boundary.PERIODIC and d > 1:
        S[d - 1, 0] += 1.0
    return S


def momentum_operator(spec: LatticeSpec, units: PlanckUnits = PlanckUnits()) -> np.ndarray:
    """Central difference ``-i hbar (psi_{j+1} - psi_{j-1}) / (2a)``."""
    if spec.sites < 2:
        raise ValueError("momentum needs at least 2 sites")
    a = spec.spacing * units.ell_pl
    S = shift_operator(spec)
    return (-1j * units.hbar / (2 * a)) * (S - S.conj().T)


def hamiltonian_operator(
    spec: LatticeSpec,
    units: PlanckUnits = PlanckUnits(),
    mass: float = 1.0,
    potential: Sequence[float] = (),
) -> np.ndarray:
    """Stand-in ``P^2 / (2 m) + V(x)`` with ``V`` a polynomial given by its
    coefficients in increasing degree."""
    if not mass > 0:
        raise ValueError("mass must be positive")
    p = momentum_operator(spec, units)
    x = site_labels(spec) * (units.ell_pl * spec.spacing)
    V = P.polyval(x, np.asarray(potential, dtype=float)) if len(potential) else np.zeros_like(x)
    H = p @ p / (2 * mass) + np.diag(V)
    return (H + H.conj().T) / 2


def site_index(spec: LatticeSpec, n: float) -> int:
    labels = site_labels(spec)
    idx = int(np.rint(n - labels[0]))
    if not (0 <= idx < spec.sites) or labels[idx] != n:
        raise IndexError(f"site label {n!r} is not on the lattice (labels {labels[0]}..{labels[-1]})")
    return idx


def basis_ket(spec: LatticeSpec, n: float) -> np.ndarray:
    """Eigenket of the position/time operator with label ``n``."""
    psi = np.zeros(spec.sites, dtype=complex)
    psi[site_index(spec, n)] = 1.0
    return psi


def eigenrelation_residual(op, spec: LatticeSpec, n: float, eigenvalue: float) -> float:
    psi = basis_ket(spec, n)
    return float(np.linalg.norm(as_operator(op) @ psi - eigenvalue * psi))
