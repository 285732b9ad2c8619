"""Leveled Clifford circuits, spacetime slots and fault operators.

A circuit on ``n`` qubits has ``depth`` levels numbered 1..depth. Faults live on
the ``depth + 1`` slices between levels: slice ``i`` (0-based) is the spacetime
slot ``i + 0.5``, i.e. right after level ``i`` and right before level ``i + 1``.
Qubit ``q`` of slice ``i`` has flat index ``i * n + q`` (0-based ``q``).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence, Union

from .errors import DimensionError, ValidationError
from .pauli import (
    CODE_TO_LETTER,
    NAMED_GATES,
    CliffordTableau,
    PauliOperator,
    invert,
)


@dataclass(frozen=True)
class Gate:
    tableau: CliffordTableau
    support: tuple[int, ...]
    name: str | None = None

    @classmethod
    def named(cls, name: str, *qubits: int) -> Gate:
        """Named gate on 0-based qubits."""
        return cls(NAMED_GATES[name.upper()], tuple(qubits), name.upper())


@dataclass(frozen=True)
class Measurement:
    observable: PauliOperator
    index: int = 0  # 1-based outcome index; 0 means "not yet assigned"

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(self.observable.support())


Operation = Union[Gate, Measurement]


@dataclass(frozen=True)
class Periodicity:
    """Declared time-periodic structure.

    Levels ``prefix + 1 .. prefix + period * repetitions`` consist of the same
    ``period`` levels repeated. ``boundary_checks`` lists 1-based check rows
    that must be backpropagated directly rather than by translation.
    """

    prefix: int
    period: int
    repetitions: int
    boundary_checks: tuple[int, ...] = ()

    @property
    def body_levels(self) -> range:
        return range(self.prefix + 1, self.prefix + self.period * self.repetitions + 1)


@dataclass(frozen=True)
class ValidationIssue:
    level: int | None
    position: int | None
    message: str

    def __str__(self) -> str:
        where = []
        if self.level is not None:
            where.append(f"level {self.level}")
        if self.position is not None:
            where.append(f"op {self.position}")
        prefix = ", ".join(where)
        return f"{prefix}: {self.message}" if prefix else self.message


class _CompiledGate:
    __slots__ = ("support", "mask", "table")

    def __init__(self, tableau: CliffordTableau, support: Sequence[int]):
        self.support = tuple(support)
        self.mask = 0
        for q in support:
            self.mask |= 1 << q
        table = []
        for lx, lz in tableau.local_table:
            gx = gz = 0
            for k, q in enumerate(support):
                gx |= ((lx >> k) & 1) << q
                gz |= ((lz >> k) & 1) << q
            table.append((gx, gz))
        self.table = tuple(table)


class CompiledLevel:
    """Fast conjugation of packed ``(x, z)`` bitsets through one level."""

    __slots__ = ("gates", "mask")

    def __init__(self, gates: list[_CompiledGate]):
        self.gates = gates
        self.mask = 0
        for g in gates:
            self.mask |= g.mask

    def apply(self, x: int, z: int) -> tuple[int, int]:
        if not ((x | z) & self.mask):
            return x, z
        for g in self.gates:
            m = g.mask
            if not ((x | z) & m):
                continue
            idx = 0
            k = 0
            sup = g.support
            w = len(sup)
            for q in sup:
                idx |= ((x >> q) & 1) << k
                idx |= ((z >> q) & 1) << (k + w)
                k += 1
            gx, gz = g.table[idx]
            x = (x & ~m) | gx
            z = (z & ~m) | gz
        return x, z


class DenseLevel:
    """Level conjugation as a dense 2n x 2n symplectic map on packed words."""

    __slots__ = ("x_images", "z_images")

    def __init__(self, n: int, level: CompiledLevel):
        self.x_images = tuple(level.apply(1 << q, 0) for q in range(n))
        self.z_images = tuple(level.apply(0, 1 << q) for q in range(n))

    def apply(self, x: int, z: int) -> tuple[int, int]:
        ox = oz = 0
        q = 0
        while x or z:
            if x & 1:
                ix, iz = self.x_images[q]
                ox ^= ix
                oz ^= iz
            if z & 1:
                ix, iz = self.z_images[q]
                ox ^= ix
                oz ^= iz
            x >>= 1
            z >>= 1
            q += 1
        return ox, oz


@dataclass(frozen=True)
class CliffordCircuit:
    """Immutable leveled circuit. ``levels[k]`` is level ``k + 1``."""

    num_qubits: int
    levels: tuple[tuple[Operation, ...], ...]
    periodicity: Periodicity | None = None

    @classmethod
    def from_ops(cls, num_qubits: int, levels: Iterable[Iterable[Operation]],
                 periodicity: Periodicity | None = None) -> CliffordCircuit:
        """Build a circuit, assigning outcome indices in level-then-textual order."""
        j = 0
        out = []
        for level in levels:
            ops = []
            for op in level:
                if isinstance(op, Measurement):
                    j += 1
                    op = Measurement(op.observable, j)
                ops.append(op)
            out.append(tuple(ops))
        return cls(num_qubits, tuple(out), periodicity)

    @property
    def depth(self) -> int:
        return len(self.levels)

    @property
    def num_slices(self) -> int:
        return self.depth + 1

    @property
    def spacetime_size(self) -> int:
        return self.num_qubits * (self.depth + 1)

    @cached_property
    def measurements(self) -> tuple[tuple[Measurement, int], ...]:
        """``(measurement, level)`` pairs sorted by outcome index."""
        found = []
        for lv, level in enumerate(self.levels, start=1):
            for op in level:
                if isinstance(op, Measurement):
                    found.append((op, lv))
        found.sort(key=lambda t: t[0].index)
        return tuple(found)

    @property
    def num_measurements(self) -> int:
        return len(self.measurements)

    @cached_property
    def gates(self) -> tuple[tuple[Gate, int], ...]:
        return tuple((op, lv) for lv, level in enumerate(self.levels, start=1)
                     for op in level if isinstance(op, Gate))

    @cached_property
    def forward_levels(self) -> tuple[CompiledLevel, ...]:
        return tuple(CompiledLevel([_CompiledGate(op.tableau, op.support)
                                    for op in level if isinstance(op, Gate)])
                     for level in self.levels)

    @cached_property
    def backward_levels(self) -> tuple[CompiledLevel, ...]:
        inverses: dict[CliffordTableau, CliffordTableau] = {}
        out = []
        for level in self.levels:
            gates = []
            for op in level:
                if isinstance(op, Gate):
                    inv = inverses.get(op.tableau)
                    if inv is None:
                        inv = inverses[op.tableau] = invert(op.tableau)
                    gates.append(_CompiledGate(inv, op.support))
            out.append(CompiledLevel(gates))
        return tuple(out)

    def dense_levels(self, backward: bool = False) -> tuple[DenseLevel, ...]:
        src = self.backward_levels if backward else self.forward_levels
        return tuple(DenseLevel(self.num_qubits, lv) for lv in src)

    @cached_property
    def measurements_by_level(self) -> tuple[tuple[tuple[int, int, int], ...], ...]:
        """Per level: ``(outcome_index, x_bits, z_bits)`` of each measured observable."""
        out = []
        for level in self.levels:
            out.append(tuple((op.index, op.observable.x_bits, op.observable.z_bits)
                             for op in level if isinstance(op, Measurement)))
        return tuple(out)

    def measurement_meta(self, j: int) -> tuple[PauliOperator, int]:
        """Observable and level of the measurement with 1-based outcome index ``j``."""
        n_m = self.num_measurements
        if not 1 <= j <= n_m:
            raise IndexError(f"outcome index {j} outside 1..{n_m}")
        m, lv = self.measurements[j - 1]
        return m.observable, lv

    def eta(self, level_slot: float, p: PauliOperator) -> FaultOperator:
        return eta(self, level_slot, p)


def validate(circuit: CliffordCircuit) -> list[ValidationIssue]:
    """Every invariant violation, with locations. Empty list means valid."""
    issues: list[ValidationIssue] = []
    n = circuit.num_qubits
    if n < 1:
        issues.append(ValidationIssue(None, None, "circuit needs at least one qubit"))
    expected = 1
    for lv, level in enumerate(circuit.levels, start=1):
        used: dict[int, int] = {}
        for pos, op in enumerate(level, start=1):
            if isinstance(op, Gate):
                sup = op.support
                if len(sup) != op.tableau.arity:
                    issues.append(ValidationIssue(lv, pos, "gate support does not match tableau arity"))
                if len(set(sup)) != len(sup):
                    issues.append(ValidationIssue(lv, pos, f"duplicate qubit in gate support {sup}"))
                if any(not 0 <= q < n for q in sup):
                    issues.append(ValidationIssue(lv, pos, f"gate qubit out of range in {sup}"))
                    continue
                if not op.tableau.is_symplectic():
                    issues.append(ValidationIssue(lv, pos, "gate tableau is not symplectic"))
            elif isinstance(op, Measurement):
                obs = op.observable
                if obs.num_qubits != n:
                    issues.append(ValidationIssue(lv, pos, "measurement observable has the wrong size"))
                    continue
                if obs.is_identity():
                    issues.append(ValidationIssue(lv, pos, "measurement of the identity"))
                if op.index != expected:
                    issues.append(ValidationIssue(
                        lv, pos, f"outcome index {op.index}, expected {expected}"))
                expected += 1
                sup = op.support
            else:
                issues.append(ValidationIssue(lv, pos, f"unknown operation {op!r}"))
                continue
            for q in sup:
                if q in used:
                    issues.append(ValidationIssue(
                        lv, pos, f"qubit {q + 1} overlaps with op {used[q]} in the same level"))
                else:
                    used[q] = pos
    per = circuit.periodicity
    if per is not None:
        if per.period < 1 or per.repetitions < 1 or per.prefix < 0:
            issues.append(ValidationIssue(None, None, "invalid periodicity declaration"))
        elif per.prefix + per.period * per.repetitions > circuit.depth:
            issues.append(ValidationIssue(None, None, "periodic block extends past the last level"))
        else:
            base = circuit.levels[per.prefix:per.prefix + per.period]
            for r in range(1, per.repetitions):
                start = per.prefix + r * per.period
                if not _same_up_to_indices(base, circuit.levels[start:start + per.period]):
                    issues.append(ValidationIssue(
                        start + 1, None, "repetition differs from the first period"))
                    break
    return issues


def _same_up_to_indices(a, b) -> bool:
    if len(a) != len(b):
        return False
    for la, lb in zip(a, b):
        if len(la) != len(lb):
            return False
        for oa, ob in zip(la, lb):
            if isinstance(oa, Measurement) and isinstance(ob, Measurement):
                if oa.observable != ob.observable:
                    return False
            elif oa != ob:
                return False
    return True


def check_valid(circuit: CliffordCircuit) -> None:
    issues = validate(circuit)
    if issues:
        raise ValidationError("; ".join(map(str, issues)), issues)


def slot_to_slice(circuit: CliffordCircuit, level_slot: float) -> int:
    i = level_slot - 0.5
    if i != int(i) or not 0 <= i <= circuit.depth:
        raise IndexError(f"slot {level_slot} outside 0.5..{circuit.depth + 0.5}")
    return int(i)


def flat_index(n: int, slice_index: int, qubit: int) -> int:
    return slice_index * n + qubit


def unflatten(n: int, flat: int) -> tuple[int, int]:
    return divmod(flat, n)


class FaultOperator:
    """Pauli operator on the ``n * (depth + 1)`` spacetime qubits of a circuit.

    Stored sparsely as ``{flat_index: code}`` with code = x | z << 1 (nonzero
    codes only). Treated as immutable.
    """

    __slots__ = ("num_qubits", "depth", "terms", "_packed")

    def __init__(self, num_qubits: int, depth: int, terms: Mapping[int, int] | None = None):
        self.num_qubits = num_qubits
        self.depth = depth
        self.terms: dict[int, int] = {} if terms is None else {k: v for k, v in terms.items() if v}
        self._packed = None

    @classmethod
    def identity(cls, circuit: CliffordCircuit) -> FaultOperator:
        return cls(circuit.num_qubits, circuit.depth)

    @classmethod
    def for_circuit(cls, circuit: CliffordCircuit, terms: Mapping[int, int]) -> FaultOperator:
        size = circuit.spacetime_size
        for k in terms:
            if not 0 <= k < size:
                raise DimensionError(f"flat index {k} outside 0..{size - 1}")
        return cls(circuit.num_qubits, circuit.depth, terms)

    @classmethod
    def from_pauli(cls, circuit: CliffordCircuit, p: PauliOperator) -> FaultOperator:
        if p.num_qubits != circuit.spacetime_size:
            raise DimensionError("Pauli does not span the spacetime register")
        return cls(circuit.num_qubits, circuit.depth, _sparse_from_bits(p.x_bits, p.z_bits))

    @classmethod
    def from_slices(cls, n: int, depth: int, slices: Mapping[int, tuple[int, int]]) -> FaultOperator:
        terms: dict[int, int] = {}
        for i, (x, z) in slices.items():
            base = i * n
            m = x | z
            while m:
                low = m & -m
                q = low.bit_length() - 1
                terms[base + q] = ((x >> q) & 1) | (((z >> q) & 1) << 1)
                m ^= low
        return cls(n, depth, terms)

    @property
    def size(self) -> int:
        return self.num_qubits * (self.depth + 1)

    @property
    def weight(self) -> int:
        return len(self.terms)

    def is_identity(self) -> bool:
        return not self.terms

    def _packed_bits(self) -> tuple[int, int]:
        if self._packed is None:
            x = z = 0
            for k, c in self.terms.items():
                if c & 1:
                    x |= 1 << k
                if c & 2:
                    z |= 1 << k
            self._packed = (x, z)
        return self._packed

    @property
    def pauli(self) -> PauliOperator:
        x, z = self._packed_bits()
        return PauliOperator(self.size, x, z)

    def slices(self) -> dict[int, tuple[int, int]]:
        """Nonidentity slices as ``{slice_index: (x_bits, z_bits)}`` on n qubits."""
        out: dict[int, list[int]] = {}
        n = self.num_qubits
        for k, c in self.terms.items():
            i, q = divmod(k, n)
            e = out.get(i)
            if e is None:
                e = out[i] = [0, 0]
            if c & 1:
                e[0] |= 1 << q
            if c & 2:
                e[1] |= 1 << q
        return {i: (v[0], v[1]) for i, v in out.items()}

    def slice(self, i: int) -> PauliOperator:
        x, z = self.slices().get(i, (0, 0))
        return PauliOperator(self.num_qubits, x, z)

    def support(self) -> list[tuple[float, int, str]]:
        """Sorted ``(slot, qubit, letter)`` triples; slot is half-integer, qubit 1-based."""
        n = self.num_qubits
        out = []
        for k in sorted(self.terms):
            i, q = divmod(k, n)
            out.append((i + 0.5, q + 1, CODE_TO_LETTER[self.terms[k]]))
        return out

    def _check(self, other: FaultOperator) -> None:
        if (self.num_qubits, self.depth) != (other.num_qubits, other.depth):
            raise DimensionError("fault operators belong to different circuits")

    def __mul__(self, other: FaultOperator) -> FaultOperator:
        self._check(other)
        terms = dict(self.terms)
        for k, c in other.terms.items():
            v = terms.get(k, 0) ^ c
            if v:
                terms[k] = v
            else:
                terms.pop(k, None)
        return FaultOperator(self.num_qubits, self.depth, terms)

    def commutator(self, other: FaultOperator) -> int:
        self._check(other)
        a, b = (self.terms, other.terms) if len(self.terms) <= len(other.terms) else (other.terms, self.terms)
        acc = 0
        for k, c in a.items():
            d = b.get(k)
            if d:
                acc ^= _SINGLE_COMM[c][d]
        return acc

    def __eq__(self, other) -> bool:
        if not isinstance(other, FaultOperator):
            return NotImplemented
        return (self.num_qubits, self.depth, self.terms) == (other.num_qubits, other.depth, other.terms)

    def __hash__(self):
        return hash((self.num_qubits, self.depth, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        body = " ".join(f"{l}{q}@{s}" for s, q, l in self.support())
        return f"FaultOperator(n={self.num_qubits}, depth={self.depth}, [{body}])"


# _SINGLE_COMM[a][b] = commutator of single-qubit codes a and b
_SINGLE_COMM = tuple(tuple(((a & 1) & (b >> 1)) ^ ((a >> 1) & (b & 1)) for b in range(4)) for a in range(4))


def _sparse_from_bits(x: int, z: int) -> dict[int, int]:
    terms = {}
    m = x | z
    while m:
        low = m & -m
        k = low.bit_length() - 1
        terms[k] = ((x >> k) & 1) | (((z >> k) & 1) << 1)
        m ^= low
    return terms


def eta(circuit: CliffordCircuit, level_slot: float, p: PauliOperator) -> FaultOperator:
    """Fault operator acting as ``p`` on slot ``level_slot`` and trivially elsewhere."""
    i = slot_to_slice(circuit, level_slot)
    if p.num_qubits != circuit.num_qubits:
        raise DimensionError(f"operator has {p.num_qubits} qubits, circuit has {circuit.num_qubits}")
    return FaultOperator.from_slices(circuit.num_qubits, circuit.depth, {i: (p.x_bits, p.z_bits)})


def fault_commutator(a: FaultOperator, b: FaultOperator) -> int:
    return a.commutator(b)


def parse_pauli_product(text: str, num_qubits: int) -> PauliOperator:
    """Parse ``X1*Z2*Y5`` (1-based qubits) into a Pauli on ``num_qubits`` qubits."""
    terms = []
    for tok in text.split("*"):
        tok = tok.strip()
        if len(tok) < 2 or tok[0].upper() not in "XYZ" or not tok[1:].isdigit():
            raise ValueError(f"bad Pauli factor {tok!r}")
        q = int(tok[1:])
        if not 1 <= q <= num_qubits:
            raise ValueError(f"qubit {q} outside 1..{num_qubits}")
        terms.append((q - 1, tok[0].upper()))
    return PauliOperator.from_sparse(num_qubits, terms)


def format_pauli_product(p: PauliOperator) -> str:
    return "*".join(f"{p.letter(q)}{q + 1}" for q in p.support())
