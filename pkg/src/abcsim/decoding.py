"""Decoders mapping a syndrome to a logical correction.

Syndromes and corrections are int bitmasks (bit k = row k + 1).
"""

from __future__ import annotations

import itertools
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

from .circuit import CliffordCircuit, FaultOperator
from .errors import CircuitParseError, DimensionError, ResourceLimitError
from .noise import NoiseSpec, enumerate_locations, location_options
from .spacetime import BackpropagatedSet, CheckSet, logical_abc, syndrome_abc

LOOKUP_MAGIC = b"ABCLUT01"
DEFAULT_CAP = 2_000_000


class Decoder(Protocol):
    num_checks: int
    num_logicals: int

    def decode(self, syndrome: int) -> int: ...


def _check_syndrome(decoder, syndrome: int) -> None:
    if syndrome < 0 or syndrome >> decoder.num_checks:
        raise DimensionError(f"syndrome does not fit in {decoder.num_checks} bits")


@dataclass(frozen=True)
class TrivialDecoder:
    """Never corrects anything."""

    num_checks: int
    num_logicals: int

    def decode(self, syndrome: int) -> int:
        _check_syndrome(self, syndrome)
        return 0


@dataclass(frozen=True)
class LookupDecoder:
    """Table from syndrome to the logical flips of the most likely fault producing it.

    Syndromes absent from the table decode to zero.
    """

    num_checks: int
    num_logicals: int
    table: dict[int, int] = field(compare=True)

    def decode(self, syndrome: int) -> int:
        _check_syndrome(self, syndrome)
        return self.table.get(syndrome, 0)

    def __len__(self) -> int:
        return len(self.table)

    def to_bytes(self) -> bytes:
        sb = max(1, (self.num_checks + 7) // 8)
        lb = max(1, (self.num_logicals + 7) // 8)
        parts = [LOOKUP_MAGIC, struct.pack("<IIQ", self.num_checks, self.num_logicals, len(self.table))]
        for s in sorted(self.table):
            parts.append(s.to_bytes(sb, "little"))
            parts.append(self.table[s].to_bytes(lb, "little"))
        return b"".join(parts)

    @classmethod
    def from_bytes(cls, data: bytes) -> LookupDecoder:
        if data[:8] != LOOKUP_MAGIC:
            raise CircuitParseError("not a lookup-table file (bad magic or version)")
        n_s, n_l, count = struct.unpack_from("<IIQ", data, 8)
        sb = max(1, (n_s + 7) // 8)
        lb = max(1, (n_l + 7) // 8)
        pos = 8 + struct.calcsize("<IIQ")
        if len(data) != pos + count * (sb + lb):
            raise CircuitParseError("truncated lookup-table file")
        table = {}
        for _ in range(count):
            s = int.from_bytes(data[pos:pos + sb], "little")
            pos += sb
            table[s] = int.from_bytes(data[pos:pos + lb], "little")
            pos += lb
        return cls(n_s, n_l, table)

    def save(self, path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path) -> LookupDecoder:
        return cls.from_bytes(Path(path).read_bytes())


def _lex_key(flips: int, n_l: int) -> tuple[int, ...]:
    return tuple((flips >> k) & 1 for k in range(n_l))


def build_lookup(circuit: CliffordCircuit, checks: CheckSet, pre: BackpropagatedSet,
                 spec: NoiseSpec, w_max: int, cap: int = DEFAULT_CAP) -> LookupDecoder:
    """Enumerate all fault combinations of at most ``w_max`` locations.

    Each syndrome maps to the logical flips of its most probable combination
    (compared in log space); ties go to the lexicographically smallest flips.
    """
    n_s, n_l = checks.num_checks, checks.num_logicals
    locs = [loc for loc in enumerate_locations(circuit, spec) if loc.probability > 0]
    elementary = []  # per location: (log-odds weight, [(syndrome, flips), ...])
    for loc in locs:
        opts = location_options(circuit, loc)
        p = loc.probability
        if p >= 1.0:
            weight = math.inf
        else:
            weight = math.log(p / len(opts)) - math.log1p(-p)
        effects = []
        for terms in opts:
            F = FaultOperator(circuit.num_qubits, circuit.depth, terms)
            effects.append((syndrome_abc(F, pre), logical_abc(F, pre)))
        elementary.append((weight, effects))

    total = 0
    for w in range(0, w_max + 1):
        for combo in itertools.combinations(range(len(elementary)), w):
            total += math.prod(len(elementary[i][1]) for i in combo)
            if total > cap:
                raise ResourceLimitError(
                    f"lookup enumeration exceeds {cap} fault combinations (w_max={w_max})")

    best: dict[int, tuple[float, tuple[int, ...], int]] = {}

    def offer(s: int, f: int, score: float) -> None:
        cur = best.get(s)
        key = _lex_key(f, n_l)
        if cur is None or score > cur[0] or (score == cur[0] and key < cur[1]):
            best[s] = (score, key, f)

    offer(0, 0, 0.0)
    for w in range(1, w_max + 1):
        for combo in itertools.combinations(range(len(elementary)), w):
            score = math.fsum(elementary[i][0] for i in combo)
            for picks in itertools.product(*(elementary[i][1] for i in combo)):
                s = f = 0
                for ds, df in picks:
                    s ^= ds
                    f ^= df
                offer(s, f, score)
    return LookupDecoder(n_s, n_l, {s: v[2] for s, v in best.items()})


def is_failure(correction: int, truth: int) -> bool:
    return correction != truth
