import math

import numpy as np
import pytest

from qchain.analytic import open_local_signature
from qchain.chain import ChainSpec
from qchain.errors import ResourceGuardError, UsageError
from qchain.oracle import (
    MAX_QUBITS,
    Liouvillian,
    build_lowering,
    compare_reduced,
    initial_full,
    jump_operators,
    lindblad_rhs,
    partial_trace_to_qubit,
    propagate_full,
    reduced_state_from_full,
    sector_leakage,
)


def basis(bits):
    v = np.zeros(2 ** len(bits))
    v[int("".join(map(str, bits)), 2)] = 1.0
    return v


def random_density(dim, rng):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    r = a @ a.conj().T
    return r / np.trace(r)


def test_single_site_lowering():
    np.testing.assert_array_equal(build_lowering(1, 1), [[0, 1], [0, 0]])


@pytest.mark.parametrize("k", [1, 2, 3])
def test_lowering_flips_bit(k):
    bits = [1, 0, 1]
    bits_k = list(bits)
    bits_k[k - 1] = 1
    lowered = list(bits_k)
    lowered[k - 1] = 0
    s = build_lowering(3, k)
    np.testing.assert_array_equal(s @ basis(bits_k), basis(lowered))
    assert not (s @ s).any()


def test_lowering_guards():
    with pytest.raises(ResourceGuardError):
        build_lowering(MAX_QUBITS + 1, 1)
    with pytest.raises(UsageError):
        build_lowering(3, 4)
    with pytest.raises(ResourceGuardError):
        Liouvillian(ChainSpec(7))


@pytest.mark.parametrize("boundary", ["open", "closed"])
@pytest.mark.parametrize("topology", ["chained", "local"])
def test_jump_operators_lower_excitation(boundary, topology):
    spec = ChainSpec(4, boundary, topology, 1.0, 1.0)
    ground = basis([0, 0, 0, 0])
    exc = np.array([bin(i).count("1") for i in range(16)])
    for L in jump_operators(spec):
        assert not (L @ ground).any()
        rows, cols = np.nonzero(L)
        assert np.all(exc[cols] - exc[rows] == 1)


def test_rhs_examples():
    rng = np.random.default_rng(3)
    spec = ChainSpec(3, "closed", "chained", 0.8, 1.7)
    g = basis([0, 0, 0])
    assert not np.abs(lindblad_rhs(np.outer(g, g), spec)).max()
    rho = random_density(8, rng)
    assert abs(np.trace(lindblad_rhs(rho, spec))) < 1e-13
    with pytest.raises(UsageError):
        lindblad_rhs(np.eye(4), spec)


def test_singlet_is_dark_for_chained_pair():
    psi = (basis([1, 0]) - basis([0, 1])) / math.sqrt(2)
    rho = np.outer(psi, psi)
    for xi in (0.0, 1.3):
        full = lindblad_rhs(rho, ChainSpec(2, "open", "chained", xi, 2.5))
        coherent = lindblad_rhs(rho, ChainSpec(2, "open", "chained", xi, 0.0))
        assert np.abs(full - coherent).max() < 1e-15


def test_factor_two_convention():
    # a single excited qubit under local decay loses population at rate 2 gamma
    spec = ChainSpec(2, "open", "local", 0.0, 0.7)
    e = basis([1, 0])
    assert lindblad_rhs(np.outer(e, e), spec)[2, 2].real == pytest.approx(-1.4)


def test_propagate_full_basics():
    spec = ChainSpec(3, "open", "chained", 1.0, 0.0)
    rho0 = initial_full(1.0, 0.3, spec)
    out = propagate_full(rho0, spec, [0.0, 0.5, 1.5, 3.0])
    np.testing.assert_array_equal(out[0], rho0)
    for r in out:
        assert np.trace(r @ r).real == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(UsageError):
        propagate_full(rho0, spec, [-1.0])
    with pytest.raises(UsageError):
        propagate_full(np.eye(4), spec, [1.0])


def test_open_local_output_matches_closed_form():
    spec = ChainSpec(3, "open", "local", 1.0, 4.0)
    times = np.linspace(0, 1.5, 7)
    states = propagate_full(initial_full(math.pi / 2, 0.0, spec), spec, times)
    rho, sigma = open_local_signature(times, 1.0, 4.0)
    for r, rr, ss in zip(states, rho, sigma):
        out = partial_trace_to_qubit(r, 3)
        assert out[0, 0].real == pytest.approx(rr / 2, abs=1e-8)
        assert out[0, 1] == pytest.approx(ss, abs=1e-8)


def test_partial_trace_examples():
    rng = np.random.default_rng(5)
    factors = [random_density(2, rng) for _ in range(3)]
    prod = np.kron(np.kron(factors[0], factors[1]), factors[2])
    for k, f in enumerate(factors, start=1):
        np.testing.assert_allclose(partial_trace_to_qubit(prod, k), f[::-1, ::-1], atol=1e-15)
    np.testing.assert_allclose(partial_trace_to_qubit(np.eye(16) / 16, 2), np.eye(2) / 2)
    bell = (basis([0, 0]) + basis([1, 1])) / math.sqrt(2)
    np.testing.assert_allclose(partial_trace_to_qubit(np.outer(bell, bell), 2), np.eye(2) / 2)
    with pytest.raises(UsageError):
        partial_trace_to_qubit(np.eye(4) / 4, 3)


def test_partial_trace_layout():
    # excited population sits top-left
    r = np.outer(basis([0, 1]), basis([0, 1]))
    np.testing.assert_array_equal(partial_trace_to_qubit(r, 2), [[1, 0], [0, 0]])


def test_vacuum_input_has_no_deviation():
    rep = compare_reduced(ChainSpec(4, "closed", "local", 1.0, 4.0), 0.0, 0.0, np.linspace(0, 2, 5))
    assert rep.max_abs_deviation == 0.0


@pytest.mark.parametrize("spec", [ChainSpec(4, "open", "chained", 1.0, 0.5),
                                  ChainSpec(5, "closed", "chained", 1.0, 4.0),
                                  ChainSpec(3, "closed", "local", 1.0, 0.0)])
def test_compare_reduced_and_confinement(spec):
    rep = compare_reduced(spec, math.pi / 3, math.pi / 5, np.linspace(0, 2, 11))
    assert rep.max_abs_deviation <= (1e-9 if spec.rate == 0 else 1e-8)
    assert rep.max_sector_leakage <= 1e-12
    assert rep.max_trace_error <= 1e-10
    assert rep.min_eigenvalue >= -1e-9
    assert rep.as_dict()["n"] == spec.n_qubits and "times" not in rep.as_dict()


def test_reduced_block_extraction():
    spec = ChainSpec(3, "open", "local", 1.0, 1.0)
    rho = initial_full(1.2, 0.4, spec)
    blk = reduced_state_from_full(rho, 3)
    assert blk.shape == (4, 4)
    assert np.trace(blk).real == pytest.approx(1.0)
    assert sector_leakage(rho, 3) == 0.0
