"""Fault simulation of noisy Clifford circuits by fault propagation and by
commutation with precomputed backpropagated checks."""

from .circuit import CliffordCircuit, FaultOperator, Gate, Measurement, Periodicity, eta, validate
from .pauli import CliffordTableau, PauliOperator, commutator, conjugate, invert, multiply
from .spacetime import (
    BackpropagatedSet,
    CheckSet,
    derive_checks,
    f_of_u,
    logical_abc,
    logical_naive,
    precompute,
    precompute_periodic,
    syndrome_abc,
    syndrome_naive,
)

__version__ = "0.1.0"

__all__ = [
    "BackpropagatedSet", "CheckSet", "CliffordCircuit", "CliffordTableau", "FaultOperator", "Gate",
    "Measurement", "Periodicity", "PauliOperator", "commutator", "conjugate", "derive_checks", "eta",
    "f_of_u", "invert", "logical_abc", "logical_naive", "multiply", "precompute",
    "precompute_periodic", "syndrome_abc", "syndrome_naive", "validate",
]
