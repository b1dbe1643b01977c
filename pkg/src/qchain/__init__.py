"""Quantum state transfer through dissipative Heisenberg-XY qubit chains."""

__version__ = "0.1.0"

from .chain import (  # noqa: E402
    Boundary,
    ChainSpec,
    Topology,
    build_dissipation_matrix,
    build_hop_matrix,
    effective_generator,
    output_index,
)
from .dynamics import ReducedState, initial_state, propagate, propagate_amplitude  # noqa: E402
from .fidelity import max_fidelity, optimal_average_fidelity, output_signature, sweep  # noqa: E402

__all__ = [
    "Boundary",
    "ChainSpec",
    "Topology",
    "build_dissipation_matrix",
    "build_hop_matrix",
    "effective_generator",
    "output_index",
    "ReducedState",
    "initial_state",
    "propagate",
    "propagate_amplitude",
    "max_fidelity",
    "optimal_average_fidelity",
    "output_signature",
    "sweep",
]
