"""Brute-force master-equation integration on the full 2^N Hilbert space.

Deliberately simple: dense matrices, the dissipator applied as sandwich
products, no vectorised superoperator.  Qubit 1 is the most significant
tensor factor; each factor is ordered (|0>, |1>).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np
from scipy.integrate import solve_ivp

from .chain import ChainSpec, jump_vectors, output_index
from .dynamics import initial_state, propagate_many
from .errors import NumericalFailure, ResourceGuardError, UsageError

MAX_QUBITS = 6
LOWER = np.array([[0.0, 1.0], [0.0, 0.0]])  # |0><1|


def build_lowering(n: int, k: int) -> np.ndarray:
    """Lowering operator of qubit k (1-based) in an n-qubit register."""
    if n > MAX_QUBITS:
        raise ResourceGuardError(f"full-space oracle is capped at {MAX_QUBITS} qubits, got {n}")
    if not 1 <= k <= n:
        raise UsageError(f"site {k} outside 1..{n}")
    factors = [np.eye(2)] * (k - 1) + [LOWER] + [np.eye(2)] * (n - k)
    return reduce(np.kron, factors)


def hamiltonian(spec: ChainSpec) -> np.ndarray:
    n = spec.n_qubits
    sig = [build_lowering(n, k) for k in range(1, n + 1)]
    H = np.zeros((2**n, 2**n))
    for a, b in spec.bonds():
        H += sig[a - 1] @ sig[b - 1].T + sig[a - 1].T @ sig[b - 1]
    return spec.coupling * H


def jump_operators(spec: ChainSpec) -> list[np.ndarray]:
    """sigma_n + sigma_{n+1} per bond (chained) or sigma_n per site (local)."""
    n = spec.n_qubits
    sig = [build_lowering(n, k) for k in range(1, n + 1)]
    return [sum(w * s for w, s in zip(v, sig) if w) for v in jump_vectors(spec)]


class Liouvillian:
    """Right-hand side -i[H, rho] + rate * sum(2 L rho L^+ - {L^+ L, rho})."""

    def __init__(self, spec: ChainSpec):
        if spec.n_qubits > MAX_QUBITS:
            raise ResourceGuardError(f"full-space oracle is capped at {MAX_QUBITS} qubits")
        self.spec = spec
        self.dim = 2**spec.n_qubits
        self.H = hamiltonian(spec)
        self.L = jump_operators(spec)
        self.LdL = sum(L.T @ L for L in self.L) if self.L else np.zeros_like(self.H)

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        g = self.spec.rate
        out = -1j * (self.H @ rho - rho @ self.H)
        if g:
            jumps = sum(L @ rho @ L.T for L in self.L)
            out += g * (2 * jumps - self.LdL @ rho - rho @ self.LdL)
        return out


def lindblad_rhs(rho, spec: ChainSpec) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2**spec.n_qubits,) * 2:
        raise UsageError(f"density matrix shape {rho.shape} does not match N={spec.n_qubits}")
    return Liouvillian(spec)(rho)


def initial_full(theta: float, phi: float, spec: ChainSpec) -> np.ndarray:
    n = spec.n_qubits
    if n > MAX_QUBITS:
        raise ResourceGuardError(f"full-space oracle is capped at {MAX_QUBITS} qubits")
    psi1 = np.array([np.cos(theta / 2), np.sin(theta / 2) * np.exp(1j * phi)])
    ground = np.array([1.0, 0.0])
    psi = reduce(np.kron, [psi1] + [ground] * (n - 1))
    return np.outer(psi, psi.conj())


def propagate_full(rho0, spec: ChainSpec, times, tolerance: float = 1e-11) -> list[np.ndarray]:
    """Adaptive Runge-Kutta (DOP853) integration; returns rho at each time.

    The right-hand side is evaluated on the Hermitian part of the current
    iterate and every returned matrix is re-symmetrised.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(times < 0):
        raise UsageError("times must be non-negative")
    liou = Liouvillian(spec)
    dim = liou.dim
    if rho0.shape != (dim, dim):
        raise UsageError("initial density matrix has the wrong shape")

    def rhs(_t, y):
        r = y.reshape(dim, dim)
        return liou(0.5 * (r + r.conj().T)).ravel()

    # integrate segment by segment so every output is a step endpoint, not an interpolant
    lookup = {0.0: rho0.copy()}
    y = rho0.ravel()
    t_prev = 0.0
    for t in np.unique(times):
        if t == 0.0:
            continue
        sol = solve_ivp(rhs, (t_prev, float(t)), y, method="DOP853", rtol=tolerance,
                        atol=tolerance * 1e-2)
        if not sol.success:
            raise NumericalFailure(f"full-space integration failed: {sol.message}",
                                   {"status": sol.status, "nfev": sol.nfev,
                                    "t_start": t_prev, "t_end": float(t)})
        y = sol.y[:, -1]
        r = y.reshape(dim, dim)
        lookup[float(t)] = 0.5 * (r + r.conj().T)
        t_prev = float(t)
    return [lookup[float(t)] for t in times]


def partial_trace_to_qubit(rho, site: int, n: int | None = None) -> np.ndarray:
    """Reduced state of one qubit, in the (|1>, |0>) layout used for output states."""
    rho = np.asarray(rho)
    if n is None:
        n = int(round(np.log2(rho.shape[0])))
    if not 1 <= site <= n:
        raise UsageError(f"site {site} outside 1..{n}")
    t = rho.reshape((2,) * (2 * n))
    k = site - 1
    # move the kept qubit's row/column axes to the front, trace the rest
    t = np.moveaxis(t, (k, n + k), (0, 1)).reshape(2, 2, 2 ** (n - 1), 2 ** (n - 1))
    red = np.trace(t, axis1=2, axis2=3)  # ordered (|0>, |1>)
    return red[::-1, ::-1].copy()


def excitation_number(n: int) -> np.ndarray:
    idx = np.arange(2**n)
    return np.array([bin(i).count("1") for i in idx])


def sector_leakage(rho, n: int) -> float:
    """Largest |rho_ij| with i or j carrying two or more excitations."""
    exc = excitation_number(n)
    outside = (exc[:, None] >= 2) | (exc[None, :] >= 2)
    return float(np.abs(np.asarray(rho)[outside]).max(initial=0.0))


@dataclass
class DeviationReport:
    n: int
    boundary: str
    topology: str
    xi: float
    gamma: float
    theta: float
    phi: float
    max_abs_deviation: float
    max_trace_error: float
    max_hermiticity_error: float
    min_eigenvalue: float
    max_sector_leakage: float
    times: list = field(default_factory=list)

    def as_dict(self):
        d = dict(self.__dict__)
        d.pop("times")
        return d


def compare_reduced(spec: ChainSpec, theta: float, phi: float, times,
                    tolerance: float = 1e-11) -> DeviationReport:
    """Elementwise deviation between oracle and reduced-engine output qubits."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    site = output_index(spec)
    full = propagate_full(initial_full(theta, phi, spec), spec, times, tolerance)
    reduced = propagate_many(initial_state(theta, phi, spec), spec, times)
    dev = trace_err = herm_err = leak = 0.0
    min_eig = np.inf
    for rho, red in zip(full, reduced):
        a = partial_trace_to_qubit(rho, site, spec.n_qubits)
        b = red.output_qubit(site)
        dev = max(dev, float(np.abs(a - b).max()))
        trace_err = max(trace_err, abs(np.trace(rho).real - 1.0))
        herm_err = max(herm_err, float(np.abs(rho - rho.conj().T).max()))
        min_eig = min(min_eig, float(np.linalg.eigvalsh(rho).min()))
        leak = max(leak, sector_leakage(rho, spec.n_qubits))
    return DeviationReport(spec.n_qubits, spec.boundary.value, spec.topology.value,
                           spec.coupling, spec.rate, theta, phi, dev, trace_err,
                           herm_err, min_eig, leak, list(times))


def reduced_state_from_full(rho, n: int):
    """Project a full density matrix onto the (vacuum, |k>) block."""
    idx = [0] + [1 << (n - k) for k in range(1, n + 1)]
    return np.asarray(rho)[np.ix_(idx, idx)]

