"""Chain specifications and single-excitation sector matrices.

All site indices exposed by this module are 1-based.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import SpecificationError


class Boundary(str, Enum):
    OPEN = "open"
    CLOSED = "closed"


class Topology(str, Enum):
    CHAINED = "chained"
    LOCAL = "local"


@dataclass(frozen=True)
class ChainSpec:
    """Identity of one experiment: length, boundary, noise topology, coupling, rate."""

    n_qubits: int
    boundary: Boundary = Boundary.OPEN
    topology: Topology = Topology.CHAINED
    coupling: float = 1.0
    rate: float = 0.0

    def __post_init__(self):
        try:
            object.__setattr__(self, "boundary", Boundary(self.boundary))
            object.__setattr__(self, "topology", Topology(self.topology))
        except ValueError as exc:
            raise SpecificationError(str(exc)) from None
        if isinstance(self.n_qubits, bool) or int(self.n_qubits) != self.n_qubits:
            raise SpecificationError(f"n_qubits must be an integer, got {self.n_qubits!r}")
        object.__setattr__(self, "n_qubits", int(self.n_qubits))
        object.__setattr__(self, "coupling", float(self.coupling))
        object.__setattr__(self, "rate", float(self.rate))
        if self.n_qubits < 2:
            raise SpecificationError("a chain needs at least 2 qubits")
        if self.boundary is Boundary.CLOSED and self.n_qubits < 3:
            raise SpecificationError("a closed chain needs at least 3 qubits")
        if not math.isfinite(self.coupling):
            raise SpecificationError("coupling must be finite")
        if not (math.isfinite(self.rate) and self.rate >= 0.0):
            raise SpecificationError("rate must be finite and non-negative")

    @property
    def n_bonds(self) -> int:
        return self.n_qubits if self.boundary is Boundary.CLOSED else self.n_qubits - 1

    def bonds(self):
        """Nearest-neighbour pairs (n, n+1), 1-based, wrapping to (N, 1) on a ring."""
        n = self.n_qubits
        return [(k, k % n + 1) for k in range(1, self.n_bonds + 1)]

    def replace(self, **changes) -> "ChainSpec":
        fields = dict(
            n_qubits=self.n_qubits,
            boundary=self.boundary,
            topology=self.topology,
            coupling=self.coupling,
            rate=self.rate,
        )
        fields.update(changes)
        return ChainSpec(**fields)


def build_hop_matrix(spec: ChainSpec) -> np.ndarray:
    """Hamiltonian restricted to the one-excitation sector (real symmetric, N x N)."""
    h = np.zeros((spec.n_qubits, spec.n_qubits))
    for a, b in spec.bonds():
        h[a - 1, b - 1] = spec.coupling
        h[b - 1, a - 1] = spec.coupling
    return h


def build_dissipation_matrix(spec: ChainSpec) -> np.ndarray:
    """Sum of v v^T over jump vectors; identity for local noise."""
    n = spec.n_qubits
    if spec.topology is Topology.LOCAL:
        return np.eye(n)
    m = np.zeros((n, n))
    for a, b in spec.bonds():
        v = np.zeros(n)
        v[a - 1] = 1.0
        v[b - 1] = 1.0
        m += np.outer(v, v)
    return m


def jump_vectors(spec: ChainSpec) -> list[np.ndarray]:
    """Coefficient vectors of the jump operators over the site lowering operators."""
    n = spec.n_qubits
    if spec.topology is Topology.LOCAL:
        return [row for row in np.eye(n)]
    out = []
    for a, b in spec.bonds():
        v = np.zeros(n)
        v[a - 1] = v[b - 1] = 1.0
        out.append(v)
    return out


def output_index(spec: ChainSpec) -> int:
    """Site farthest from the input qubit 1."""
    if spec.boundary is Boundary.OPEN:
        return spec.n_qubits
    return math.ceil(spec.n_qubits / 2) + 1


def effective_generator(spec: ChainSpec) -> np.ndarray:
    """G = -i h - rate * M, the no-jump generator of the excitation amplitudes."""
    return -1j * build_hop_matrix(spec) - spec.rate * build_dissipation_matrix(spec)
