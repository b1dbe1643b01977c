"""Cross-checks run by ``qchain validate`` and the acceptance tests.

Each check yields a ``Check`` record.  Gating checks decide the exit code;
checks marked ``erratum-candidate`` document disagreements with printed
formulas and never gate.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import analytic
from .appendix import VARIANTS, compare_appendix
from .chain import ChainSpec, build_dissipation_matrix
from .dynamics import (
    ReducedState,
    coefficient_generator,
    from_pi_coefficients,
    initial_state,
    propagate_many,
    to_pi_coefficients,
)
from .fidelity import OutputTrace
from .oracle import Liouvillian, compare_reduced, reduced_state_from_full

ORACLE_RATES = (0.0, 0.5, 4.0, 20.0)
ORACLE_INPUT = (math.pi / 3, math.pi / 5)
ORACLE_TIMES = np.linspace(0.0, 2.0, 50)
ANALYTIC_PAIRS = ((1.0, 4.0), (1.0, 20.0), (1.0, 0.5))


@dataclass
class Check:
    name: str
    passed: bool
    max_deviation: float = 0.0
    tolerance: float = 0.0
    gating: bool = True
    status: str = ""
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.status:
            if not self.gating:
                self.status = "erratum-candidate" if not self.passed else "ok"
            else:
                self.status = "pass" if self.passed else "fail"

    def as_dict(self):
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "gating": self.gating,
            "status": self.status,
            "max_deviation": _finite(self.max_deviation),
            "tolerance": self.tolerance,
            "details": self.details,
        }


def _finite(x):
    x = float(x)
    return x if math.isfinite(x) else None


def chain_specs(ns, rates, xi=1.0):
    for n, boundary, topology, g in itertools.product(ns, ("open", "closed"), ("chained", "local"), rates):
        if boundary == "closed" and n < 3:
            continue
        yield ChainSpec(n, boundary, topology, xi, g)


# --- oracle -----------------------------------------------------------------------

def oracle_checks(max_n=5, tol=1e-8, tol_unitary=1e-9, times=ORACLE_TIMES, inputs=ORACLE_INPUT):
    reports = []
    for spec in chain_specs(range(3, max_n + 1), ORACLE_RATES):
        reports.append(compare_reduced(spec, *inputs, times))
    worst = max(r.max_abs_deviation for r in reports)
    worst_unitary = max((r.max_abs_deviation for r in reports if r.gamma == 0), default=0.0)
    leak = max(r.max_sector_leakage for r in reports)
    ok = all(r.max_abs_deviation <= (tol_unitary if r.gamma == 0 else tol) for r in reports)
    return [
        Check("oracle-equivalence", ok, worst, tol,
              details={"runs": len(reports), "worst_unitary": worst_unitary,
                       "rows": [r.as_dict() for r in reports]}),
        Check("oracle-sector-confinement", leak <= 1e-12, leak, 1e-12),
        Check("oracle-trace", max(r.max_trace_error for r in reports) <= 1e-10,
              max(r.max_trace_error for r in reports), 1e-10),
        Check("oracle-positivity", min(r.min_eigenvalue for r in reports) >= -1e-9,
              -min(r.min_eigenvalue for r in reports), 1e-9),
    ]


# --- appendix -----------------------------------------------------------------------

def oracle_coefficient_generator(spec: ChainSpec) -> np.ndarray:
    """Coefficient matrix obtained by projecting the full Liouvillian (N = 3)."""
    n = spec.n_qubits
    liou = Liouvillian(spec)
    idx = [0] + [1 << (n - k) for k in range(1, n + 1)]
    dim = (n + 1) ** 2
    cols = []
    for j in range(dim):
        e = np.zeros(dim)
        e[j] = 1.0
        small = from_pi_coefficients(e).matrix()
        full = np.zeros((2**n, 2**n), dtype=complex)
        full[np.ix_(idx, idx)] = small
        block = reduced_state_from_full(liou(full), n)
        cols.append(to_pi_coefficients(ReducedState(block[0, 0].real, block[1:, 0], block[1:, 1:])))
    return np.column_stack(cols)


def appendix_checks():
    checks = []
    for xi, g in ((1.0, 0.0), (0.0, 1.0), (2.0, 0.5)):
        for variant in VARIANTS:
            boundary, topology = variant.split("-")
            spec = ChainSpec(3, boundary, topology, xi, g)
            dev = float(np.abs(coefficient_generator(spec) - oracle_coefficient_generator(spec)).max())
            checks.append(Check(f"generator-vs-oracle[{variant},xi={xi},gamma={g}]", dev <= 1e-12, dev, 1e-12))
    for variant in VARIANTS:
        rep = compare_appendix(variant)
        if rep.exact:
            checks.append(Check(f"appendix[{variant}]", True, 0.0, 0.0, details=rep.as_dict()))
            continue
        # mismatching printed terms; the generator itself is pinned by the oracle checks above
        worst = max(abs(d.printed - d.derived) for d in rep.discrepancies)
        checks.append(Check(f"appendix[{variant}]", False, worst, 0.0, gating=False, details=rep.as_dict()))
    return checks


# --- analytic -----------------------------------------------------------------------

def analytic_checks(pairs=ANALYTIC_PAIRS, n_times=200):
    checks = []
    for variant in VARIANTS:
        boundary, topology = variant.split("-")
        exact_phase = variant in ("open-local", "closed-local")
        tol_sig = 1e-9 if exact_phase else 1e-6
        d_rho = d_abs = d_phase = d_fid = d_printed_sigma = 0.0
        for xi, g in pairs:
            ts = np.linspace(0.0, 5.0 / g, n_times)
            tr = OutputTrace(ChainSpec(3, boundary, topology, xi, g))
            psi = tr.amplitude(ts)
            rho, sigma = analytic.signature(variant, ts, xi, g)
            d_rho = max(d_rho, float(np.abs(rho - np.abs(psi) ** 2).max()))
            d_abs = max(d_abs, float(np.abs(np.abs(sigma) - np.abs(psi) / 2).max()))
            d_phase = max(d_phase, float(np.abs(sigma - psi / 2).max()))
            d_fid = max(d_fid, float(np.abs(analytic.printed_fidelity(variant, ts, xi, g)
                                             - analytic.pipeline_fidelity(variant, ts, xi, g)).max()))
            if variant == "closed-chained":
                d_printed_sigma = max(d_printed_sigma, float(np.abs(
                    analytic.closed_chained_sigma_printed(ts, xi, g) - psi / 2).max()))
        checks.append(Check(f"analytic-rho[{variant}]", d_rho <= tol_sig, d_rho, tol_sig))
        checks.append(Check(f"analytic-abs-sigma[{variant}]", d_abs <= tol_sig, d_abs, tol_sig))
        if exact_phase:
            checks.append(Check(f"analytic-sigma[{variant}]", d_phase <= 1e-9, d_phase, 1e-9))
        else:
            checks.append(Check(f"analytic-sigma-phase[{variant}]", d_phase <= 1e-6, d_phase, 1e-6, gating=False))
        checks.append(Check(f"analytic-fidelity-closed-form[{variant}]", d_fid <= 1e-9, d_fid, 1e-9, gating=False))
        if variant == "closed-chained":
            checks.append(Check("analytic-sigma-printed-phase[closed-chained]", d_printed_sigma <= 1e-6,
                                d_printed_sigma, 1e-6, gating=False))
    return checks


# --- invariants ---------------------------------------------------------------------

def invariant_checks(max_n=5, times=ORACLE_TIMES, inputs=ORACLE_INPUT):
    trace_err = rank_err = rank1_sig = 0.0
    min_eig = np.inf
    norm_increase = 0.0
    for spec in chain_specs(range(3, max_n + 1), ORACLE_RATES):
        states = propagate_many(initial_state(*inputs, spec), spec, times)
        norms = [np.linalg.norm(s.c) for s in states]
        norm_increase = max(norm_increase, float(np.max(np.diff(norms), initial=0.0)))
        for s in states:
            trace_err = max(trace_err, abs(s.trace() - 1.0))
            min_eig = min(min_eig, s.min_eigenvalue())
            ev = np.sort(np.linalg.eigvalsh(0.5 * (s.R + s.R.conj().T)))[::-1]
            if ev[0] > 1e-6:
                rank_err = max(rank_err, ev[1] / ev[0])
        sig = OutputTrace(spec).signature(times)
        rank1_sig = max(rank1_sig, float(np.abs(sig.rho - 4 * np.abs(sig.sigma) ** 2).max()))
    kernel = 0.0
    for n in range(2, 11):
        alt = (-1.0) ** np.arange(n)
        kernel = max(kernel, float(np.abs(build_dissipation_matrix(ChainSpec(n, "open", "chained")) @ alt).max()))
        if n >= 4 and n % 2 == 0:
            kernel = max(kernel, float(np.abs(build_dissipation_matrix(ChainSpec(n, "closed", "chained")) @ alt).max()))
    return [
        Check("invariant-trace", trace_err <= 1e-10, trace_err, 1e-10),
        Check("invariant-positivity", min_eig >= -1e-10, -min_eig, 1e-10),
        Check("invariant-rank-one-state", rank_err <= 1e-9, rank_err, 1e-9),
        Check("invariant-rank-one-signature", rank1_sig <= 1e-9, rank1_sig, 1e-9),
        Check("invariant-dark-kernel", kernel == 0.0, kernel, 0.0),
        Check("invariant-coherence-norm", norm_increase <= 1e-12, norm_increase, 1e-12),
    ]


def run_validation(max_n=5, oracle_tol=1e-8):
    checks = []
    checks += oracle_checks(max_n=max_n, tol=oracle_tol)
    checks += appendix_checks()
    checks += analytic_checks()
    checks += invariant_checks(max_n=max_n)
    gates_ok = all(c.passed for c in checks if c.gating)
    return {
        "max_n": max_n,
        "passed": gates_ok,
        "n_checks": len(checks),
        "n_gating_failures": sum(1 for c in checks if c.gating and not c.passed),
        "n_errata": sum(1 for c in checks if not c.gating and not c.passed),
        "checks": [c.as_dict() for c in checks],
    }

