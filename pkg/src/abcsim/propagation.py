"""Forward and backward cumulants of fault operators, and fault effects.

Measurements act trivially in both directions; outcome flips are read off the
forward cumulant by commutation with the measured observable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .circuit import CliffordCircuit, FaultOperator
from .errors import DimensionError
from .pauli import PauliOperator


@dataclass(frozen=True)
class Cumulant:
    """``levels[i]`` is the accumulated (propagated) fault on slice ``i`` (slot ``i + 0.5``)."""

    circuit: CliffordCircuit
    levels: tuple[PauliOperator, ...]
    backward: bool = False

    def slice(self, level_slot: float) -> PauliOperator:
        return self.levels[int(level_slot - 0.5)]

    def as_fault_operator(self) -> FaultOperator:
        c = self.circuit
        return FaultOperator.from_slices(
            c.num_qubits, c.depth, {i: (p.x_bits, p.z_bits) for i, p in enumerate(self.levels)})


@dataclass(frozen=True)
class Effect:
    flips: int  # bit j-1 set iff outcome j flips
    residual: PauliOperator

    def flip_vector(self, num_measurements: int) -> tuple[int, ...]:
        return tuple((self.flips >> j) & 1 for j in range(num_measurements))


def _check(circuit: CliffordCircuit, F: FaultOperator) -> None:
    if F.num_qubits != circuit.num_qubits or F.depth != circuit.depth:
        raise DimensionError(
            f"fault operator sized for n={F.num_qubits}, depth={F.depth}; "
            f"circuit has n={circuit.num_qubits}, depth={circuit.depth}")


def _levels(circuit: CliffordCircuit, backward: bool, method: str):
    if method == "gates":
        return circuit.backward_levels if backward else circuit.forward_levels
    if method == "dense":
        return circuit.dense_levels(backward)
    raise ValueError(f"unknown propagation method {method!r}")


def stream_bits(circuit: CliffordCircuit, F: FaultOperator, method: str = "gates") -> Iterator[tuple[int, int]]:
    """Yield the forward cumulant slice by slice as packed ``(x, z)`` pairs."""
    slices = F.slices()
    levels = _levels(circuit, False, method)
    x, z = slices.get(0, (0, 0))
    yield x, z
    for i in range(1, circuit.depth + 1):
        x, z = levels[i - 1].apply(x, z)
        fx, fz = slices.get(i, (0, 0))
        x ^= fx
        z ^= fz
        yield x, z


def cumulant_stream(circuit: CliffordCircuit, F: FaultOperator, method: str = "gates") -> Iterator[PauliOperator]:
    """Forward cumulant slices in order, holding one slice of state at a time."""
    _check(circuit, F)
    n = circuit.num_qubits
    for x, z in stream_bits(circuit, F, method):
        yield PauliOperator(n, x, z)


def cumulant(circuit: CliffordCircuit, F: FaultOperator, method: str = "gates") -> Cumulant:
    return Cumulant(circuit, tuple(cumulant_stream(circuit, F, method)))


def back_cumulant(circuit: CliffordCircuit, G: FaultOperator, method: str = "gates") -> Cumulant:
    """Propagate ``G`` backward: slice i = (level i+1)^-1 applied to slice i+1, times G_i."""
    _check(circuit, G)
    n = circuit.num_qubits
    slices = G.slices()
    levels = _levels(circuit, True, method)
    d = circuit.depth
    x, z = slices.get(d, (0, 0))
    out = [PauliOperator(n, x, z)]
    for i in range(d - 1, -1, -1):
        x, z = levels[i].apply(x, z)
        gx, gz = slices.get(i, (0, 0))
        x ^= gx
        z ^= gz
        out.append(PauliOperator(n, x, z))
    out.reverse()
    return Cumulant(circuit, tuple(out), backward=True)


def flips_from_stream(circuit: CliffordCircuit, F: FaultOperator, method: str = "gates") -> tuple[int, int]:
    """Outcome-flip bitmask and final slice bits, streaming the cumulant.

    Outcome j measured at level l flips iff the cumulant slice just before
    level l anticommutes with the measured observable.
    """
    meas = circuit.measurements_by_level
    f = 0
    x = z = 0
    lv = 0
    for x, z in stream_bits(circuit, F, method):
        if lv < len(meas):
            for j, mx, mz in meas[lv]:
                if ((x & mz) ^ (z & mx)).bit_count() & 1:
                    f |= 1 << (j - 1)
        lv += 1
    return f, (x, z)


def effect_on_measurements(circuit: CliffordCircuit, F: FaultOperator, method: str = "gates") -> int:
    _check(circuit, F)
    return flips_from_stream(circuit, F, method)[0]


def effect(circuit: CliffordCircuit, F: FaultOperator, method: str = "gates") -> Effect:
    _check(circuit, F)
    f, (x, z) = flips_from_stream(circuit, F, method)
    return Effect(f, PauliOperator(circuit.num_qubits, x, z))


def residual_error(circuit: CliffordCircuit, F: FaultOperator) -> PauliOperator:
    return effect(circuit, F).residual
