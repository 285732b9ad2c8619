"""Backpropagated check and logical operators, and syndromes without propagation.

For a row ``u`` of a check or logical matrix, ``F(u)`` places each measured
observable with ``u_j = 1`` on the slot right before its level. The bit
``(eff_m(F) | u)`` equals the commutator of ``F`` with the backward cumulant of
``F(u)``, so once those operators are precomputed a syndrome is a handful of
table lookups over the support of ``F``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import gf2
from .circuit import CliffordCircuit, FaultOperator, check_valid
from .errors import DimensionError, ValidationError
from .tableau_sim import sample_outcomes


@dataclass(frozen=True)
class CheckSet:
    """Syndrome rows and logical rows, each a sorted tuple of 1-based outcome indices."""

    num_outcomes: int
    syndrome_rows: tuple[tuple[int, ...], ...]
    logical_rows: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        for kind, rows in (("check", self.syndrome_rows), ("logical", self.logical_rows)):
            for k, row in enumerate(rows, start=1):
                if kind == "check" and not row:
                    raise ValidationError(f"check row {k} is empty")
                for j in row:
                    if not 1 <= j <= self.num_outcomes:
                        raise ValidationError(
                            f"{kind} row {k} references outcome {j} outside 1..{self.num_outcomes}")

    @classmethod
    def from_masks(cls, num_outcomes: int, syndrome: Iterable[int], logical: Iterable[int] = ()) -> CheckSet:
        return cls(num_outcomes,
                   tuple(tuple(gf2.mask_to_indices(m)) for m in syndrome),
                   tuple(tuple(gf2.mask_to_indices(m)) for m in logical))

    @classmethod
    def from_dense(cls, syndrome: Sequence[Sequence[int]], logical: Sequence[Sequence[int]] = ()) -> CheckSet:
        rows = list(syndrome) + list(logical)
        n_m = len(rows[0]) if rows else 0
        return cls.from_masks(n_m, [gf2.from_bits(r) for r in syndrome], [gf2.from_bits(r) for r in logical])

    @property
    def num_checks(self) -> int:
        return len(self.syndrome_rows)

    @property
    def num_logicals(self) -> int:
        return len(self.logical_rows)

    @property
    def syndrome_masks(self) -> tuple[int, ...]:
        return tuple(gf2.indices_to_mask(r) for r in self.syndrome_rows)

    @property
    def logical_masks(self) -> tuple[int, ...]:
        return tuple(gf2.indices_to_mask(r) for r in self.logical_rows)

    def with_logicals(self, logical_rows) -> CheckSet:
        return CheckSet(self.num_outcomes, self.syndrome_rows, tuple(tuple(sorted(r)) for r in logical_rows))


def _row_slices(circuit: CliffordCircuit, u: int) -> dict[int, tuple[int, int]]:
    slices: dict[int, tuple[int, int]] = {}
    meas = circuit.measurements
    while u:
        low = u & -u
        j = low.bit_length()
        u ^= low
        m, lv = meas[j - 1]
        i = lv - 1
        x, z = slices.get(i, (0, 0))
        slices[i] = (x ^ m.observable.x_bits, z ^ m.observable.z_bits)
    return slices


def _as_mask(circuit: CliffordCircuit, u) -> int:
    n_m = circuit.num_measurements
    if isinstance(u, int):
        if u >> n_m:
            raise DimensionError(f"row mask has bits beyond {n_m} outcomes")
        return u
    u = tuple(u)
    if len(u) != n_m:
        raise DimensionError(f"row has length {len(u)}, circuit has {n_m} outcomes")
    return gf2.from_bits(u)


def f_of_u(circuit: CliffordCircuit, u) -> FaultOperator:
    """Product of measured observables selected by ``u`` (bit vector or int mask),
    each placed right before its measurement level."""
    mask = _as_mask(circuit, u)
    return FaultOperator.from_slices(circuit.num_qubits, circuit.depth, _row_slices(circuit, mask))


def _backpropagate(circuit: CliffordCircuit, slices: dict[int, tuple[int, int]],
                   windowed: bool) -> tuple[dict[int, tuple[int, int]], int]:
    """Backward cumulant of the given slices.

    Returns ``(nonidentity slices, lowest term slice)``. With ``windowed`` the
    sweep stops at the lowest term slice instead of descending to slice 0; the
    caller is responsible for checking the result is localized.
    """
    out: dict[int, tuple[int, int]] = {}
    if not slices:
        return out, 0
    levels = circuit.backward_levels
    top = max(slices)
    low = min(slices)
    stop = low if windowed else 0
    x, z = slices[top]
    if x or z:
        out[top] = (x, z)
    for i in range(top - 1, stop - 1, -1):
        if x or z:
            x, z = levels[i].apply(x, z)
        t = slices.get(i)
        if t is not None:
            x ^= t[0]
            z ^= t[1]
        if x or z:
            out[i] = (x, z)
    return out, low


@dataclass(frozen=True)
class BackpropagatedSet:
    """Precomputed backward cumulants of F(u) for every check and logical row.

    ``incidence[flat]`` is a 4-tuple indexed by the single-qubit code of a
    fault at that spacetime qubit, giving the bitmask of syndrome rows whose
    operator anticommutes with it.
    """

    num_qubits: int
    depth: int
    syndrome_ops: tuple[FaultOperator, ...]
    logical_ops: tuple[FaultOperator, ...]
    incidence: dict[int, tuple[int, int, int, int]] = field(repr=False, compare=False)
    circuit_digest: str = ""
    checks_digest: str = ""
    # Same entries as ``incidence`` in a list indexed by flat position (None if empty).
    table: list = field(default_factory=list, repr=False, compare=False)

    @classmethod
    def build(cls, num_qubits: int, depth: int, syndrome_ops, logical_ops,
              circuit_digest: str = "", checks_digest: str = "") -> BackpropagatedSet:
        x_part: dict[int, int] = {}
        z_part: dict[int, int] = {}
        for k, op in enumerate(syndrome_ops):
            bit = 1 << k
            for flat, code in op.terms.items():
                # A fault X anticommutes with this row iff the row has a Z component, and vice versa.
                if code & 2:
                    x_part[flat] = x_part.get(flat, 0) | bit
                if code & 1:
                    z_part[flat] = z_part.get(flat, 0) | bit
        incidence = {}
        for flat in set(x_part) | set(z_part):
            mx = x_part.get(flat, 0)
            mz = z_part.get(flat, 0)
            incidence[flat] = (0, mx, mz, mx ^ mz)
        table = [None] * (num_qubits * (depth + 1))
        for flat, entry in incidence.items():
            table[flat] = entry
        return cls(num_qubits, depth, tuple(syndrome_ops), tuple(logical_ops),
                   incidence, circuit_digest, checks_digest, table)

    @property
    def num_checks(self) -> int:
        return len(self.syndrome_ops)

    @property
    def num_logicals(self) -> int:
        return len(self.logical_ops)

    def incidence_lists(self) -> dict[tuple[int, str], list[int]]:
        """``(flat index, 'X' or 'Z') -> sorted 1-based syndrome rows`` anticommuting with that Pauli."""
        out = {}
        for flat, inc in sorted(self.incidence.items()):
            for letter, m in (("X", inc[1]), ("Z", inc[2])):
                if m:
                    out[(flat, letter)] = gf2.mask_to_indices(m)
        return out

    def max_incidence(self) -> int:
        best = 0
        for inc in self.incidence.values():
            best = max(best, inc[1].bit_count(), inc[2].bit_count())
        return best

    def __eq__(self, other) -> bool:
        if not isinstance(other, BackpropagatedSet):
            return NotImplemented
        return (self.num_qubits, self.depth, self.syndrome_ops, self.logical_ops) == (
            other.num_qubits, other.depth, other.syndrome_ops, other.logical_ops)

    __hash__ = None


def back_propagated_row(circuit: CliffordCircuit, u) -> FaultOperator:
    """Backward cumulant of F(u), swept over the whole circuit."""
    mask = _as_mask(circuit, u)
    out, _ = _backpropagate(circuit, _row_slices(circuit, mask), windowed=False)
    return FaultOperator.from_slices(circuit.num_qubits, circuit.depth, out)


def _digests(circuit, checks):
    from .io import checks_digest, circuit_digest
    return circuit_digest(circuit), checks_digest(checks)


def _check_dims(circuit: CliffordCircuit, checks: CheckSet) -> None:
    if checks.num_outcomes != circuit.num_measurements:
        raise DimensionError(
            f"checks cover {checks.num_outcomes} outcomes, circuit has {circuit.num_measurements}")


def precompute(circuit: CliffordCircuit, checks: CheckSet) -> BackpropagatedSet:
    """Backpropagate every row of the check and logical matrices directly."""
    _check_dims(circuit, checks)
    syn = [back_propagated_row(circuit, m) for m in checks.syndrome_masks]
    log = [back_propagated_row(circuit, m) for m in checks.logical_masks]
    return BackpropagatedSet.build(circuit.num_qubits, circuit.depth, syn, log, *_digests(circuit, checks))


def precompute_periodic(circuit: CliffordCircuit, checks: CheckSet) -> BackpropagatedSet:
    """Precompute using the declared periodicity.

    Non-boundary check rows are shifted down to the first period, the
    representative is backpropagated once per distinct shape, and the result
    is translated back in time. Boundary rows and logical rows are computed
    directly.
    """
    _check_dims(circuit, checks)
    per = circuit.periodicity
    if per is None:
        raise ValidationError("circuit declares no periodicity")
    check_valid(circuit)
    n = circuit.num_qubits
    P = per.period
    body_first = per.prefix + 1
    body_last = per.prefix + P * per.repetitions
    meas = circuit.measurements
    level_of = [lv for _, lv in meas]
    # Outcome-index offset per period, taken from the first body measurement.
    body_idx = [j for j, lv in enumerate(level_of, start=1) if body_first <= lv <= body_last]
    per_period = len(body_idx) // per.repetitions if body_idx else 0
    boundary = set(per.boundary_checks)
    for b in boundary:
        if not 1 <= b <= checks.num_checks:
            raise ValidationError(f"boundary check {b} outside 1..{checks.num_checks}")
    cache: dict[tuple[int, ...], dict[int, tuple[int, int]]] = {}
    syn = []
    for k, row in enumerate(checks.syndrome_rows, start=1):
        if k in boundary or per.repetitions == 1:
            syn.append(back_propagated_row(circuit, gf2.indices_to_mask(row)))
            continue
        levels = [level_of[j - 1] for j in row]
        lo, hi = min(levels), max(levels)
        if lo < body_first or hi > body_last:
            raise ValidationError(
                f"check row {k} leaves the periodic block but is not declared a boundary row")
        shift = (lo - body_first) // P
        rep = tuple(j - shift * per_period for j in row)
        if any(level_of[j - 1] != level_of[j0 - 1] - shift * P for j, j0 in zip(rep, row)):
            raise ValidationError(f"check row {k} does not match the declared period")
        slices = cache.get(rep)
        if slices is None:
            slices, low = _backpropagate(circuit, _row_slices(circuit, gf2.indices_to_mask(rep)), windowed=True)
            if low in slices:
                raise ValidationError(
                    f"check row {k} is not localized in time; declare it a boundary row")
            cache[rep] = slices
        moved = {i + shift * P: v for i, v in slices.items()}
        syn.append(FaultOperator.from_slices(n, circuit.depth, moved))
    log = [back_propagated_row(circuit, m) for m in checks.logical_masks]
    return BackpropagatedSet.build(circuit.num_qubits, circuit.depth, syn, log, *_digests(circuit, checks))


def _fault_check(F: FaultOperator, pre: BackpropagatedSet) -> None:
    if F.num_qubits != pre.num_qubits or F.depth != pre.depth:
        raise DimensionError("fault operator does not match the precomputed circuit")


def syndrome_abc(F: FaultOperator, pre: BackpropagatedSet) -> int:
    """Syndrome bitmask by XOR-folding incidence entries over the support of ``F``."""
    _fault_check(F, pre)
    table = pre.table
    s = 0
    for flat, code in F.terms.items():
        e = table[flat]
        if e is not None:
            s ^= e[code]
    return s


def logical_abc(F: FaultOperator, pre: BackpropagatedSet) -> int:
    """Logical-flip bitmask by direct commutators with the backpropagated logical rows."""
    _fault_check(F, pre)
    out = 0
    for k, op in enumerate(pre.logical_ops):
        if F.commutator(op):
            out |= 1 << k
    return out


def _apply_rows(masks: Sequence[int], f: int) -> int:
    out = 0
    for k, m in enumerate(masks):
        if (m & f).bit_count() & 1:
            out |= 1 << k
    return out


def syndrome_naive(f: int, checks: CheckSet) -> int:
    """``M_s f^T`` over GF(2); ``f`` is an outcome-flip bitmask."""
    if f >> checks.num_outcomes:
        raise DimensionError("flip vector longer than the number of outcomes")
    return _apply_rows(checks.syndrome_masks, f)


def logical_naive(f: int, checks: CheckSet) -> int:
    if f >> checks.num_outcomes:
        raise DimensionError("flip vector longer than the number of outcomes")
    return _apply_rows(checks.logical_masks, f)


def derive_checks(circuit: CliffordCircuit, shots: int | None = None, seed: int = 0) -> CheckSet:
    """Check rows spanning every parity that is constant across noiseless runs.

    Samples ``shots`` runs of the tableau simulator (relabelled so the code is
    linear) and returns the canonical kernel basis of their span.
    """
    n_m = circuit.num_measurements
    if shots is None:
        shots = n_m + 64
    if shots < n_m + 64:
        raise ValueError(f"need at least n_m + 64 = {n_m + 64} shots")
    samples = sample_outcomes(circuit, shots, seed)
    return CheckSet.from_masks(n_m, gf2.kernel(samples, n_m))
