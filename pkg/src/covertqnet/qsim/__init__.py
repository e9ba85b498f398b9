"""Dual-backend qubit simulator: dense vectors and stabilizer tableaus."""

from .dense import (DenseState, MeasurementRecord, GATES_1Q, MAX_DENSE_QUBITS,
                    apply_unitary_density, embed_operator, fidelity,
                    partial_trace)
from .tableau import StabilizerTableau


def apply_gate(state, gate, *targets, angle=None):
    """Apply a named gate on either backend; returns the state."""
    return state.apply(gate, *targets, angle=angle)


def measure(state, qubit, basis="Z", rng=None):
    """Measure one qubit on either backend.

    Returns (state, MeasurementRecord); the state is collapsed in place.
    """
    record = state.measure(qubit, basis=basis, rng=rng)
    return state, record


__all__ = ["DenseState", "StabilizerTableau", "MeasurementRecord",
           "GATES_1Q", "MAX_DENSE_QUBITS", "apply_gate", "measure",
           "fidelity", "partial_trace", "apply_unitary_density",
           "embed_operator"]
