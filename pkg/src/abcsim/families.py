"""Fixture circuits and circuit generators used by tests and benchmarks."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .circuit import CliffordCircuit, FaultOperator, Gate, Measurement, Periodicity
from .io import parse_check_rows, parse_circuit
from .pauli import GATE_ARITY, PauliOperator
from .spacetime import CheckSet

_DATA = resources.files("abcsim") / "data"


def data_path(name: str):
    return _DATA / name


@dataclass(frozen=True)
class Fixture:
    circuit: CliffordCircuit
    checks: CheckSet
    meta: dict


def load_fixture(stem: str) -> Fixture:
    circuit = parse_circuit((_DATA / f"{stem}.circuit").read_text(), f"{stem}.circuit")
    n_m = circuit.num_measurements
    syn = parse_check_rows((_DATA / f"{stem}.checks").read_text(), n_m)
    log = parse_check_rows((_DATA / f"{stem}.logical").read_text(), n_m, allow_empty_rows=True)
    meta = json.loads((_DATA / f"{stem}.json").read_text())
    return Fixture(circuit, CheckSet(n_m, syn, log), meta)


def rep5_fixture() -> Fixture:
    """Three data qubits and two ancillas measuring Z1Z2 and Z2Z3 twice, 12 outcomes."""
    return load_fixture("rep5")


def rep5_fault(fx: Fixture) -> FaultOperator:
    """The fixture's example fault, flipping outcomes 6 and 8."""
    terms = {}
    n = fx.circuit.num_qubits
    for slot, qubit, letter in fx.meta["example_fault"]:
        code = {"X": 1, "Z": 2, "Y": 3}[letter]
        k = int(slot - 0.5) * n + (qubit - 1)
        terms[k] = terms.get(k, 0) ^ code
    return FaultOperator.for_circuit(fx.circuit, terms)


@dataclass(frozen=True)
class RepetitionMemory:
    circuit: CliffordCircuit
    checks: CheckSet
    distance: int
    rounds: int


def repetition_memory(distance: int = 3, rounds: int = 3) -> RepetitionMemory:
    """Repetition-code memory: Z-parity checks via CZ onto X-measured ancillas.

    Data qubits 0..d-1, ancilla i (= d + i) couples to data i and i + 1.
    Level 1 measures every ancilla in X and every data qubit in Z. Each round
    is three levels: CZ to the left neighbour, CZ to the right neighbour,
    X-measure the ancillas. The last round also measures every data qubit in
    Z. Depth is ``3 * rounds + 1``.

    Ancillas are never reset, so round r reports the parity
    ``a(r) ^ a(r-1)``. Detectors compare that parity with the initial data
    measurement (round 1), with itself one round earlier (``a(r-2), a(r)``),
    and with the final data measurement. The logical row is the change of
    data qubit 0 between its first and last Z measurement.
    """
    if distance < 2 or rounds < 1:
        raise ValueError("need distance >= 2 and rounds >= 1")
    d = distance
    n = 2 * d - 1
    anc = list(range(d, n))

    def mx(q):
        return Measurement(PauliOperator.single(n, q, "X"))

    def mz(q):
        return Measurement(PauliOperator.single(n, q, "Z"))

    def round_levels(last: bool):
        a = [Gate.named("CZ", i, d + i) for i in range(d - 1)]
        b = [Gate.named("CZ", i + 1, d + i) for i in range(d - 1)]
        c = [mx(q) for q in anc]
        if last:
            c += [mz(q) for q in range(d)]
        return [a, b, c]

    levels = [[mx(q) for q in anc] + [mz(q) for q in range(d)]]
    for r in range(1, rounds + 1):
        levels += round_levels(last=(r == rounds))

    # Outcome indices (1-based). Round 0 is level 1.
    def a(r, i):
        return 1 + i if r == 0 else n + (r - 1) * (d - 1) + 1 + i

    def z0(q):
        return d + q

    def z(q):
        return n + rounds * (d - 1) + 1 + q

    rows = []
    boundary = []
    for i in range(d - 1):
        rows.append(tuple(sorted((a(0, i), a(1, i), z0(i), z0(i + 1)))))
        boundary.append(len(rows))
    for r in range(2, rounds + 1):
        for i in range(d - 1):
            rows.append((a(r - 2, i), a(r, i)))
            if r == 2 or r == rounds:
                boundary.append(len(rows))
    for i in range(d - 1):
        rows.append(tuple(sorted((z(i), z(i + 1), a(rounds - 1, i), a(rounds, i)))))
        boundary.append(len(rows))
    periodicity = None
    if rounds >= 2:
        # Rounds 1..rounds-1 are identical; the last one adds data measurements.
        periodicity = Periodicity(1, 3, rounds - 1, tuple(boundary))
    circuit = CliffordCircuit.from_ops(n, levels, periodicity)
    checks = CheckSet(circuit.num_measurements, tuple(rows), ((z0(0), z(0)),))
    return RepetitionMemory(circuit, checks, d, rounds)


_ONE_QUBIT = ("H", "S", "SDG", "X", "Y", "Z")
_TWO_QUBIT = ("CX", "CZ", "SWAP")


def random_circuit(rng: np.random.Generator, num_qubits: int, depth: int,
                   p_measure: float = 0.3, max_measure_weight: int = 3) -> CliffordCircuit:
    """Random leveled circuit of named gates and Pauli-product measurements.

    Each level visits qubits in random order; an unused qubit starts a
    measurement with probability ``p_measure``, otherwise a one- or two-qubit
    gate (chosen uniformly among the named gates that fit) or stays idle.
    """
    n = num_qubits
    levels = []
    for _ in range(depth):
        free = [int(q) for q in rng.permutation(n)]
        ops = []
        while free:
            q = free.pop()
            u = rng.random()
            if u < p_measure:
                w = int(rng.integers(1, min(max_measure_weight, len(free) + 1) + 1))
                qs = [q] + [free.pop() for _ in range(w - 1)]
                letters = rng.choice(list("XYZ"), size=len(qs))
                obs = PauliOperator.from_sparse(n, zip(qs, letters))
                ops.append(Measurement(obs))
            elif u < 0.85:
                names = list(_ONE_QUBIT) + (list(_TWO_QUBIT) if free else [])
                name = names[int(rng.integers(len(names)))]
                if GATE_ARITY[name] == 2:
                    ops.append(Gate.named(name, q, free.pop()))
                else:
                    ops.append(Gate.named(name, q))
        levels.append(ops)
    return CliffordCircuit.from_ops(n, levels)


def random_fault(rng: np.random.Generator, circuit: CliffordCircuit, density: float = 0.1) -> FaultOperator:
    """Each spacetime qubit independently carries a uniform non-identity Pauli with prob. ``density``."""
    size = circuit.spacetime_size
    hit = np.flatnonzero(rng.random(size) < density)
    codes = rng.integers(1, 4, size=hit.size)
    return FaultOperator(circuit.num_qubits, circuit.depth, dict(zip(hit.tolist(), codes.tolist())))
