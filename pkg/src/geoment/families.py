"""Named families of symmetric states and their entanglement predictors.

Covers the basis-state and GHZ staples, equal-weight superpositions with
quadratic or linear phase profiles, and states built from optimized sphere
arrangements, together with the asymptotic scaling models each family
follows.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .arrangements import arrangement_to_majorana, optimize_arrangement
from .states import BlochPoint, DickeVector, dicke_basis_state, dicke_from_majorana

FAMILY_KINDS = (
    "ghz",
    "dicke_balanced",
    "dicke_k",
    "quadratic_phase",
    "linear_phase",
    "coulomb",
    "tammes",
    "covering",
)

_PHASE_KINDS = ("quadratic_phase", "linear_phase")
ARRANGEMENT_KINDS = ("coulomb", "tammes", "covering")


@dataclass(frozen=True)
class FamilySpec:
    """Recipe for one member of a named state family.

    `k` is required exactly for `dicke_k`; `gamma` exactly for the two
    phase-profile families.
    """

    kind: str
    n_qubits: int
    k: int | None = None
    gamma: float | None = None

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise ValueError(f"kind must be one of {FAMILY_KINDS}")
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        if (self.k is not None) != (self.kind == "dicke_k"):
            raise ValueError("k is required exactly for kind='dicke_k'")
        if self.k is not None and not 0 <= self.k <= self.n_qubits:
            raise ValueError("k must lie in [0, n_qubits]")
        if (self.gamma is not None) != (self.kind in _PHASE_KINDS):
            raise ValueError("gamma is required exactly for the phase families")

    def to_dict(self) -> dict:
        return {key: value for key, value in asdict(self).items() if value is not None}

    @classmethod
    def from_dict(cls, obj: dict) -> "FamilySpec":
        allowed = {"kind", "n_qubits", "k", "gamma"}
        unknown = set(obj) - allowed
        if unknown:
            raise ValueError(f"unknown FamilySpec fields: {sorted(unknown)}")
        return cls(**obj)


def build_state(spec: FamilySpec, restarts: int | None = None, seed: int = 0) -> DickeVector:
    """Construct the requested family member as a normalized state.

    Arrangement-backed kinds run the sphere optimizer (deterministic per
    seed) and convert the resulting points.
    """
    n = spec.n_qubits
    if spec.kind == "ghz":
        coeffs = np.zeros(n + 1, dtype=complex)
        coeffs[0] = coeffs[n] = 1.0
        return DickeVector(coeffs)
    if spec.kind == "dicke_balanced":
        return dicke_basis_state(n, n // 2)
    if spec.kind == "dicke_k":
        return dicke_basis_state(n, spec.k)
    if spec.kind == "quadratic_phase":
        k = np.arange(n + 1)
        return DickeVector(np.exp(1j * spec.gamma * k**2))
    if spec.kind == "linear_phase":
        k = np.arange(n + 1)
        return DickeVector(np.exp(1j * spec.gamma * k))
    arrangement = optimize_arrangement(n, spec.kind, restarts=restarts, seed=seed)
    return dicke_from_majorana(arrangement_to_majorana(arrangement))


def coulomb_scaling_model(n: int, c: float) -> float:
    """Entanglement model 1 - c/(n+1) for minimum-energy arrangements."""
    return 1.0 - c / (n + 1)


def quadratic_scaling_model(n: int, gamma: float, d_gamma: float) -> float:
    """Entanglement model 1 - d/(n+1) for the quadratic-phase family.

    `gamma` tags which family member the fitted constant `d_gamma` belongs
    to; the model value itself depends only on the constant.
    """
    del gamma
    return 1.0 - d_gamma / (n + 1)


def linear_phase_asymptotic(n: int) -> float:
    """Large-n entanglement of the linear-phase family, 1 - sqrt(2 pi n)/(n+1)."""
    if n < 1:
        raise ValueError("n must be positive")
    return 1.0 - math.sqrt(2.0 * math.pi * n) / (n + 1)


def linear_phase_overlap_profile(n: int, theta: float) -> float:
    """Gaussian-limit squared overlap of the linear-phase state at colatitude theta.

    Valid as an approximation for n of order 10 and above; the profile is
    sqrt(8 pi p (1-p) n)/(n+1) with p = cos^2(theta/2), maximal on the
    equator.
    """
    p = math.cos(theta / 2.0) ** 2
    return math.sqrt(8.0 * math.pi * p * (1.0 - p) * n) / (n + 1)


def spiral_prediction(n: int, gamma: float, k: int) -> BlochPoint:
    """Approximate location of the k-th sphere point of a quadratic-phase state.

    The points wind along a spiral: colatitudes uniform in cos(theta),
    azimuths advancing by -2*gamma per step.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if not 1 <= k <= n:
        raise ValueError("k must lie in [1, n]")
    theta = math.acos(1.0 - 2.0 * (k - 1) / (n - 1))
    phi = (gamma * (1.0 - 2.0 * k)) % (2.0 * math.pi)
    return BlochPoint(theta, phi)
