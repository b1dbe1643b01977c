"""Reduced dynamics on the vacuum + one-excitation subspace.

For an initial product state with at most one excitation the density
operator stays in the span of |0..0> and the N single-excitation states
|k>.  Writing G = -i h - rate * M, the master equation reduces to

    dR/dt  = G R + R G^H
    dc/dt  = G c
    dp00/dt = 2 rate tr(M R)

where R is the single-excitation block, c the column <k|rho|vac> and p00
the vacuum population.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg
from scipy.integrate import solve_ivp

from .chain import ChainSpec, build_dissipation_matrix, effective_generator
from .errors import NumericalFailure, UsageError

DEFAULT_RTOL = 1e-9
DEFAULT_ATOL = 1e-12

# above this eigenvector condition number the spectral exponential is not trusted
_COND_LIMIT = 1e3


@dataclass(frozen=True)
class ReducedState:
    """Density operator on span{vac, |1>, ..., |N>} (also used for increments)."""

    p00: float
    c: np.ndarray
    R: np.ndarray

    @property
    def n(self) -> int:
        return len(self.c)

    def matrix(self) -> np.ndarray:
        """(N+1) x (N+1) matrix in the ordering (vac, |1>, ..., |N>)."""
        n = self.n
        out = np.empty((n + 1, n + 1), dtype=complex)
        out[0, 0] = self.p00
        out[1:, 0] = self.c
        out[0, 1:] = self.c.conj()
        out[1:, 1:] = self.R
        return out

    def trace(self) -> float:
        return float(self.p00 + np.trace(self.R).real)

    def output_qubit(self, site: int) -> np.ndarray:
        """2x2 state of qubit ``site`` (1-based), excited-population entry first.

        Layout is [[P(excited), <1|rho|0>], [<0|rho|1>, P(ground)]].
        """
        pop = self.R[site - 1, site - 1].real
        coh = self.c[site - 1]
        return np.array([[pop, coh], [np.conj(coh), 1.0 - pop]], dtype=complex)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(_hermitian(self.matrix())).min())


def _hermitian(a):
    return 0.5 * (a + a.conj().T)


def initial_state(theta: float, phi: float, spec: ChainSpec) -> ReducedState:
    """Qubit 1 in cos(theta/2)|0> + sin(theta/2) e^{i phi}|1>, rest in |0>."""
    n = spec.n_qubits
    c = np.zeros(n, dtype=complex)
    R = np.zeros((n, n), dtype=complex)
    c[0] = 0.5 * np.sin(theta) * np.exp(1j * phi)
    R[0, 0] = np.sin(theta / 2) ** 2
    return ReducedState(float(np.cos(theta / 2) ** 2), c, R)


def _check_dims(state: ReducedState, spec: ChainSpec):
    n = spec.n_qubits
    if state.c.shape != (n,) or state.R.shape != (n, n):
        raise UsageError(
            f"state dimensions {state.c.shape}/{state.R.shape} do not match N={n}"
        )


def time_derivative(state: ReducedState, spec: ChainSpec) -> ReducedState:
    _check_dims(state, spec)
    G = effective_generator(spec)
    M = build_dissipation_matrix(spec)
    dR = G @ state.R + state.R @ G.conj().T
    dc = G @ state.c
    dp = 2.0 * spec.rate * np.trace(M @ state.R).real
    return ReducedState(float(dp), dc, dR)


# --- coefficient vectors -------------------------------------------------------

def pair_indices(n: int) -> list[tuple[int, int]]:
    """Ordered (k, l) pairs with k > l, 1-based: (2,1), (3,1), (3,2), (4,1), ..."""
    return [(k, l) for k in range(2, n + 1) for l in range(1, k)]


def to_pi_coefficients(state: ReducedState) -> np.ndarray:
    """Real coefficient vector of length (N+1)^2.

    Layout: a[0] = p00; a[k] = R[k][k]; a[N+2k-1], a[N+2k] = Re, Im c[k];
    then Re, Im R[k][l] for each pair of ``pair_indices``.  For N = 3 this is
    exactly the Pi_i numbering of the three-qubit operator basis.
    """
    n = state.n
    a = np.empty((n + 1) ** 2)
    a[0] = state.p00
    a[1 : n + 1] = np.diag(state.R).real
    a[n + 1 : 3 * n + 1 : 2] = state.c.real
    a[n + 2 : 3 * n + 1 : 2] = state.c.imag
    pairs = pair_indices(n)
    if pairs:
        ks, ls = np.array(pairs).T - 1
        vals = state.R[ks, ls]
        a[3 * n + 1 :: 2] = vals.real
        a[3 * n + 2 :: 2] = vals.imag
    return a


def from_pi_coefficients(a) -> ReducedState:
    a = np.asarray(a, dtype=float)
    n = int(round(np.sqrt(a.size))) - 1
    if a.ndim != 1 or n < 1 or (n + 1) ** 2 != a.size:
        raise UsageError(f"coefficient vector length {a.size} is not (N+1)^2")
    c = a[n + 1 : 3 * n + 1 : 2] + 1j * a[n + 2 : 3 * n + 1 : 2]
    R = np.diag(a[1 : n + 1]).astype(complex)
    pairs = pair_indices(n)
    if pairs:
        ks, ls = np.array(pairs).T - 1
        vals = a[3 * n + 1 :: 2] + 1j * a[3 * n + 2 :: 2]
        R[ks, ls] = vals
        R[ls, ks] = vals.conj()
    return ReducedState(float(a[0]), c, R)


def coefficient_generator(spec: ChainSpec) -> np.ndarray:
    """Real matrix A with da/dt = A a on the coefficient vector."""
    dim = (spec.n_qubits + 1) ** 2
    cols = []
    for j in range(dim):
        e = np.zeros(dim)
        e[j] = 1.0
        cols.append(to_pi_coefficients(time_derivative(from_pi_coefficients(e), spec)))
    return np.column_stack(cols)


# --- exponentials ----------------------------------------------------------------

class SpectralPropagator:
    """exp(G t) for many t from one decomposition of G.

    Uses the eigendecomposition when the eigenbasis is well conditioned,
    a unitary Schur form when G is normal, and scaling-and-squaring
    (scipy.linalg.expm) otherwise.
    """

    def __init__(self, G):
        self.G = np.asarray(G, dtype=complex)
        if self.G.ndim != 2 or self.G.shape[0] != self.G.shape[1]:
            raise UsageError("generator must be a square matrix")
        self.method = "expm"
        self._w = self._V = self._Vinv = None
        if self.G.size == 0:
            return
        w, V = np.linalg.eig(self.G)
        if np.linalg.cond(V) <= _COND_LIMIT:
            self.method = "eig"
            self._w, self._V, self._Vinv = w, V, np.linalg.inv(V)
            return
        T, Q = scipy.linalg.schur(self.G, output="complex")
        off = np.abs(np.triu(T, 1)).max(initial=0.0)
        if off <= 1e-13 * max(1.0, np.abs(T).max()):
            self.method = "schur"
            self._w, self._V, self._Vinv = np.diag(T).copy(), Q, Q.conj().T

    def matrix(self, t: float) -> np.ndarray:
        if self.method == "expm":
            return scipy.linalg.expm(self.G * t)
        return (self._V * np.exp(self._w * t)) @ self._Vinv

    def apply_many(self, times, v) -> np.ndarray:
        """Rows exp(G t_i) v for each time."""
        times = np.asarray(times, dtype=float)
        v = np.asarray(v, dtype=complex)
        if self.method == "expm":
            return np.array([scipy.linalg.expm(self.G * t) @ v for t in times]).reshape(len(times), -1)
        b = self._Vinv @ v
        return (np.exp(np.outer(times, self._w)) * b) @ self._V.T

    def apply(self, t: float, v) -> np.ndarray:
        v = np.asarray(v, dtype=complex)
        if self.method == "expm":
            return scipy.linalg.expm(self.G * t) @ v
        return self._V @ (np.exp(self._w * t) * (self._Vinv @ v))


def matrix_exponential_action(G, t: float, v) -> np.ndarray:
    """exp(G t) v."""
    G = np.asarray(G, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if G.ndim != 2 or G.shape[0] != G.shape[1] or G.shape[1] != v.shape[0]:
        raise UsageError(f"shapes {G.shape} and {v.shape} are not conformable")
    return SpectralPropagator(G).apply(t, v)


# --- propagation ---------------------------------------------------------------

ENGINES = ("expm", "rk")


def propagate(
    state0: ReducedState,
    spec: ChainSpec,
    t: float,
    tolerance: float = DEFAULT_RTOL,
    engine: str = "expm",
) -> ReducedState:
    """State at time ``t``; see ``propagate_many`` for the engines."""
    return propagate_many(state0, spec, [t], tolerance=tolerance, engine=engine)[0]


def propagate_many(
    state0: ReducedState,
    spec: ChainSpec,
    times: Sequence[float],
    tolerance: float = DEFAULT_RTOL,
    engine: str = "expm",
) -> list[ReducedState]:
    """States at each of ``times`` (non-negative, any order).

    engine="expm" sandwiches R between exp(G t) and its adjoint; engine="rk"
    integrates the real coefficient ODE with an embedded Runge-Kutta pair
    (rtol=tolerance, atol=tolerance*1e-3).
    """
    _check_dims(state0, spec)
    times = np.asarray(times, dtype=float)
    if np.any(times < 0):
        raise UsageError("times must be non-negative")
    if not tolerance > 0:
        raise UsageError("tolerance must be positive")
    if engine == "expm":
        return _propagate_expm(state0, spec, times)
    if engine == "rk":
        return _propagate_rk(state0, spec, times, tolerance)
    raise UsageError(f"unknown engine {engine!r}; expected one of {ENGINES}")


def _propagate_expm(state0, spec, times):
    prop = SpectralPropagator(effective_generator(spec))
    total = state0.trace()
    out = []
    for t in times:
        if t == 0.0:
            out.append(state0)
            continue
        E = prop.matrix(t)
        R = E @ state0.R @ E.conj().T
        R = _hermitian(R)
        out.append(ReducedState(float(total - np.trace(R).real), E @ state0.c, R))
    return out


def _propagate_rk(state0, spec, times, tolerance):
    A = coefficient_generator(spec)
    scale = max(abs(spec.coupling), spec.rate, 1e-12)
    lookup = {0.0: state0}
    a = to_pi_coefficients(state0)
    t_prev = 0.0
    # restart at every output time: results are step endpoints, never interpolants
    for t in np.unique(times):
        if t == 0.0:
            continue
        sol = solve_ivp(
            lambda _t, y: A @ y,
            (t_prev, float(t)),
            a,
            method="DOP853",
            rtol=tolerance,
            atol=tolerance * 1e-3,
            first_step=min(0.01 / scale, float(t) - t_prev),
        )
        if not sol.success:
            raise NumericalFailure(
                f"Runge-Kutta integration failed: {sol.message}",
                {"status": sol.status, "nfev": sol.nfev, "t_start": t_prev,
                 "t_reached": float(sol.t[-1]) if sol.t.size else t_prev,
                 "t_end": float(t), "rtol": tolerance},
            )
        a = sol.y[:, -1]
        lookup[float(t)] = from_pi_coefficients(a)
        t_prev = float(t)
    return [lookup[float(t)] for t in times]


def propagate_amplitude(spec: ChainSpec, t):
    """psi(t) = exp(G t) e_1; vectorised over an array of times (rows)."""
    prop = SpectralPropagator(effective_generator(spec))
    e1 = np.zeros(spec.n_qubits, dtype=complex)
    e1[0] = 1.0
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(ts < 0):
        raise UsageError("times must be non-negative")
    psi = prop.apply_many(ts, e1)
    psi[ts == 0.0] = e1
    return psi[0] if np.ndim(t) == 0 else psi


def amplitude_state(psi, theta: float, phi: float) -> ReducedState:
    """Rebuild the reduced state from a transfer amplitude and input angles."""
    psi = np.asarray(psi, dtype=complex)
    s2 = np.sin(theta / 2) ** 2
    R = s2 * np.outer(psi, psi.conj())
    c = 0.5 * np.sin(theta) * np.exp(1j * phi) * psi
    return ReducedState(float(1.0 - np.trace(R).real), c, R)
