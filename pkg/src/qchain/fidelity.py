"""Output-qubit signature, optimal average fidelity and its time maximum.

Two-by-two output states use the layout [[P(excited), <1|rho|0>], [c.c., P(ground)]],
i.e. the ordering (|1>, |0>), so that the state is

    [[rho s^2,                  sigma sin(theta) e^{i phi}],
     [conj(sigma) sin(theta) e^{-i phi}, 1 - rho s^2]]     with s = sin(theta/2),

and a local output unitary is V = [[conj(u), -conj(v)], [v, u]] in the same ordering.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .analytic import OutputSignature
from .chain import ChainSpec, effective_generator, output_index
from .dynamics import SpectralPropagator
from .errors import InvariantViolation, UsageError

DEFAULT_GRID = 2000
TIE_TOLERANCE = 1e-13


@dataclass(frozen=True)
class OutputUnitary:
    u: complex
    v: complex = 0.0

    def __post_init__(self):
        if abs(abs(self.u) ** 2 + abs(self.v) ** 2 - 1.0) > 1e-12:
            raise UsageError(f"|u|^2 + |v|^2 must be 1, got {abs(self.u) ** 2 + abs(self.v) ** 2}")

    @classmethod
    def identity(cls):
        return cls(1.0, 0.0)

    def matrix(self) -> np.ndarray:
        u, v = complex(self.u), complex(self.v)
        return np.array([[u.conjugate(), -v.conjugate()], [v, u]])


def _split(sig):
    rho, sigma = sig
    return np.asarray(rho, dtype=float), np.asarray(sigma, dtype=complex)


def output_qubit_state(sig, theta: float, phi: float) -> np.ndarray:
    rho, sigma = sig
    s2 = math.sin(theta / 2) ** 2
    coh = sigma * math.sin(theta) * np.exp(1j * phi)
    return np.array([[rho * s2, coh], [np.conj(coh), 1 - rho * s2]], dtype=complex)


def input_vector(theta: float, phi: float) -> np.ndarray:
    """cos(theta/2)|0> + sin(theta/2) e^{i phi}|1> in the (|1>, |0>) ordering."""
    return np.array([math.sin(theta / 2) * np.exp(1j * phi), math.cos(theta / 2)])


def single_input_fidelity(out, theta: float, phi: float, V=None) -> float:
    """<psi| V rho_out V^dag |psi> for one input state."""
    if V is None:
        V = OutputUnitary.identity()
    Vm = V.matrix() if isinstance(V, OutputUnitary) else np.asarray(V, dtype=complex)
    if Vm.shape != (2, 2) or not np.allclose(Vm @ Vm.conj().T, np.eye(2), atol=1e-12):
        raise UsageError("output operation must be a 2x2 unitary")
    psi = input_vector(theta, phi)
    return float(np.real(psi.conj() @ Vm @ np.asarray(out) @ Vm.conj().T @ psi))


def average_fidelity(sig, u: complex):
    """Bloch-sphere average of the single-input fidelity for output phase ``u``."""
    rho, sigma = _split(sig)
    u = complex(u)
    if abs(u) > 1 + 1e-12:
        raise UsageError("|u| must not exceed 1")
    cross = 2 * np.real(sigma * u.conjugate() ** 2)
    return 0.5 + (2 * rho * abs(u) ** 2 + 2 * cross - rho) / 6


def optimal_u(sig) -> complex:
    """Unit-modulus u aligning u^2 with sigma (u = 1 when sigma = 0)."""
    _, sigma = sig
    sigma = complex(sigma)
    if sigma == 0:
        return 1.0 + 0.0j
    return complex(np.exp(0.5j * np.angle(sigma)))


def literal_phase_u(sig) -> complex:
    """Phase rule exp{i[atan(Im/Re)/2 + sgn(Re) pi/2]}, kept for comparison only.

    It aligns the phase for Re(sigma) < 0 but anti-aligns it for Re(sigma) > 0.
    """
    _, sigma = sig
    sigma = complex(sigma)
    if sigma.real == 0:
        raise UsageError("phase rule undefined for Re(sigma) = 0")
    return complex(np.exp(1j * (0.5 * math.atan(sigma.imag / sigma.real) + np.sign(sigma.real) * math.pi / 2)))


def optimal_average_fidelity(sig):
    rho, sigma = _split(sig)
    if np.any(rho < -1e-12):
        raise InvariantViolation(f"negative population factor {rho.min()}")
    F = 0.5 + (rho + 4 * np.abs(sigma)) / 6
    return float(F) if F.ndim == 0 else F


class OutputTrace:
    """Output-qubit amplitude psi_o(t) of one chain, reusable across many times."""

    def __init__(self, spec: ChainSpec):
        self.spec = spec
        self.site = output_index(spec)
        prop = SpectralPropagator(effective_generator(spec))
        e1 = np.zeros(spec.n_qubits, dtype=complex)
        e1[0] = 1.0
        self._prop = prop
        self._e1 = e1
        if prop.method != "expm":
            b = prop._Vinv @ e1
            self._weights = prop._V[self.site - 1] * b
            self._rates = prop._w

    def amplitude(self, times) -> np.ndarray:
        times = np.atleast_1d(np.asarray(times, dtype=float))
        if np.any(times < 0):
            raise UsageError("times must be non-negative")
        if self._prop.method == "expm":
            psi = self._prop.apply_many(times, self._e1)[:, self.site - 1]
        else:
            psi = np.exp(np.outer(times, self._rates)) @ self._weights
        # the excitation starts on qubit 1, never on the output site
        psi[times == 0.0] = 0.0
        return psi

    def signature(self, times) -> OutputSignature:
        psi = self.amplitude(times)
        return OutputSignature(np.abs(psi) ** 2, 0.5 * psi)

    def fidelity(self, times) -> np.ndarray:
        psi = self.amplitude(times)
        return 0.5 + (np.abs(psi) ** 2 + 2 * np.abs(psi)) / 6


def output_signature(spec: ChainSpec, t) -> OutputSignature:
    """(rho, sigma) = (|psi_o|^2, psi_o / 2); scalar or array ``t``."""
    sig = OutputTrace(spec).signature(t)
    if np.ndim(t) == 0:
        return OutputSignature(float(sig.rho[0]), complex(sig.sigma[0]))
    return sig


def fidelity_curve(spec: ChainSpec, times) -> np.ndarray:
    return OutputTrace(spec).fidelity(times)


@dataclass
class FidelityResult:
    times: np.ndarray
    F: np.ndarray
    t_star: float
    F_max: float
    u_opt: complex

    def summary(self):
        return {"t_star": self.t_star, "F_max": self.F_max, "u_opt": self.u_opt}


def default_t_max(spec: ChainSpec) -> float:
    xi = abs(spec.coupling)
    scale = max(spec.rate, xi)
    if xi == 0:
        return 5.0 / scale if scale > 0 else 1.0
    return 10.0 / xi + 5.0 / scale


def max_fidelity(spec: ChainSpec, t_max: float | None = None, n_grid: int = DEFAULT_GRID,
                 rel_window: float = 1e-3) -> FidelityResult:
    """Global time maximum of the optimal average fidelity on [0, t_max].

    A uniform scan locates every local maximum within ``rel_window`` of the
    grid best; each is refined by bounded Brent search between its grid
    neighbours.
    """
    if t_max is None:
        t_max = default_t_max(spec)
    if not t_max > 0:
        raise UsageError("t_max must be positive")
    if n_grid < 100:
        raise UsageError("n_grid must be at least 100")
    trace = OutputTrace(spec)
    times = np.linspace(0.0, t_max, n_grid)
    F = trace.fidelity(times)
    best = float(F.max())
    scale = max(abs(spec.coupling), spec.rate, 1e-12)
    xatol = 1e-10 / scale
    found = [(float(times[int(F.argmax())]), best)]
    interior = (F[1:-1] >= F[:-2]) & (F[1:-1] >= F[2:])
    candidates = list(np.nonzero(interior)[0] + 1)
    if F[-1] >= F[-2]:
        candidates.append(n_grid - 1)
    for i in candidates:
        if F[i] < best - rel_window * best:
            continue
        lo, hi = times[max(i - 1, 0)], times[min(i + 1, n_grid - 1)]
        res = minimize_scalar(lambda tt: -trace.fidelity([tt])[0], bounds=(lo, hi),
                              method="bounded", options={"xatol": xatol})
        found += [(float(res.x), -float(res.fun)), (float(times[i]), float(F[i]))]
    # revivals can reach the same value to rounding; report the earliest
    top = max(f for _, f in found)
    t_star, F_star = min((t, f) for t, f in found if f >= top - TIE_TOLERANCE)
    sig = trace.signature([t_star])
    u = optimal_u((sig.rho[0], sig.sigma[0]))
    return FidelityResult(times, F, t_star, F_star, u)


@dataclass
class SweepRow:
    n: int
    boundary: str
    topology: str
    xi: float
    gamma: float
    t_star: float = math.nan
    f_max: float = math.nan
    error: str = ""

    def as_dict(self):
        return asdict(self)


def sweep(specs, t_max: float | None = None, n_grid: int = DEFAULT_GRID, workers: int = 1) -> list[SweepRow]:
    """``max_fidelity`` for every spec; rows keep the input order."""

    def one(spec):
        row = SweepRow(spec.n_qubits, spec.boundary.value, spec.topology.value, spec.coupling, spec.rate)
        try:
            res = max_fidelity(spec, t_max, n_grid)
        except Exception as exc:  # row-level error record
            row.error = f"{type(exc).__name__}: {exc}"
        else:
            row.t_star, row.f_max = res.t_star, res.F_max
        return row

    specs = list(specs)
    if workers <= 1:
        return [one(s) for s in specs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, specs))
