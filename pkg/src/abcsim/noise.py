"""Circuit-level Pauli noise: fault locations and seeded sampling.

Randomness for shot ``s`` comes from a Philox stream keyed by ``(seed, s)``;
location ``i`` always consumes draws ``i`` (occurrence) and ``L + i`` (which
Pauli) of that stream, so a shot's fault operator does not depend on which
worker samples it or in what order.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from functools import cached_property
from typing import Iterator

import numpy as np

from .circuit import CliffordCircuit, FaultOperator, Gate, Measurement

GATE = "gate"
MEASUREMENT_FLIP = "measurement-flip"
IDLE = "idle"

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class NoiseSpec:
    p_gate: float = 0.0
    p_meas: float = 0.0
    p_idle: float = 0.0
    seed: int = 0

    def __post_init__(self):
        for name in ("p_gate", "p_meas", "p_idle"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name}={p} is not a probability")

    @classmethod
    def parse(cls, text: str, seed: int = 0) -> NoiseSpec:
        """Parse ``p_gate=1e-3,p_meas=1e-3,p_idle=0``; a bare ``p=..`` sets all three."""
        values: dict[str, float] = {}
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            key, sep, val = part.partition("=")
            key = key.strip()
            if not sep:
                raise ValueError(f"expected key=value, got {part!r}")
            if key == "p":
                for k in ("p_gate", "p_meas", "p_idle"):
                    values[k] = float(val)
            elif key in ("p_gate", "p_meas", "p_idle"):
                values[key] = float(val)
            elif key == "seed":
                seed = int(val)
            else:
                raise ValueError(f"unknown noise parameter {key!r}")
        return cls(seed=seed, **values)

    @classmethod
    def from_dict(cls, d: dict) -> NoiseSpec:
        unknown = set(d) - {"p_gate", "p_meas", "p_idle", "seed"}
        if unknown:
            raise ValueError(f"unknown noise parameters {sorted(unknown)}")
        return cls(**d)

    def to_dict(self) -> dict:
        return asdict(self)

    def with_seed(self, seed: int) -> NoiseSpec:
        return NoiseSpec(self.p_gate, self.p_meas, self.p_idle, seed)


@dataclass(frozen=True)
class FaultLocation:
    """A place where a fault may occur.

    ``slice_index`` is the slice the fault acts on (slot ``slice_index + 0.5``);
    measurement flips act on ``slice_index`` and ``slice_index + 1``.
    ``qubits`` are 0-based.
    """

    slice_index: int
    qubits: tuple[int, ...]
    kind: str
    probability: float
    outcome_index: int | None = None

    @property
    def slot(self) -> float:
        return self.slice_index + 0.5


def canonical_flip_pauli(observable) -> tuple[int, int]:
    """``(qubit, code)`` of the single-qubit Pauli used to represent an outcome flip.

    On the lowest support qubit: X if the observable acts there as Z or Y, else Z.
    """
    q = observable.support()[0]
    has_z = (observable.z_bits >> q) & 1
    return q, (1 if has_z else 2)


def enumerate_locations(circuit: CliffordCircuit, spec: NoiseSpec) -> list[FaultLocation]:
    """Gate faults, then measurement flips and idles, in level order."""
    out: list[FaultLocation] = []
    n = circuit.num_qubits
    for lv, level in enumerate(circuit.levels, start=1):
        busy = 0
        for op in level:
            if isinstance(op, Gate):
                out.append(FaultLocation(lv, op.support, GATE, spec.p_gate))
                for q in op.support:
                    busy |= 1 << q
            elif isinstance(op, Measurement):
                q, _ = canonical_flip_pauli(op.observable)
                out.append(FaultLocation(lv - 1, (q,), MEASUREMENT_FLIP, spec.p_meas, op.index))
                busy |= op.observable.support_mask
        if spec.p_idle > 0:
            for q in range(n):
                if not (busy >> q) & 1:
                    out.append(FaultLocation(lv, (q,), IDLE, spec.p_idle))
    return out


def location_options(circuit: CliffordCircuit, loc: FaultLocation) -> list[dict[int, int]]:
    """Equally likely elementary faults at ``loc`` as ``{flat_index: code}`` maps."""
    n = circuit.num_qubits
    if loc.kind == MEASUREMENT_FLIP:
        obs, _ = circuit.measurement_meta(loc.outcome_index)
        q, code = canonical_flip_pauli(obs)
        return [{loc.slice_index * n + q: code, (loc.slice_index + 1) * n + q: code}]
    w = len(loc.qubits)
    base = loc.slice_index * n
    opts = []
    for c in range(1, 4 ** w):
        terms = {}
        for k, q in enumerate(loc.qubits):
            code = (c >> (2 * k)) & 3
            if code:
                terms[base + q] = code
        opts.append(terms)
    return opts


class FaultSampler:
    """Samples fault operators for one (circuit, noise spec) pair."""

    def __init__(self, circuit: CliffordCircuit, spec: NoiseSpec):
        self.circuit = circuit
        self.spec = spec
        self.locations = enumerate_locations(circuit, spec)
        self.options = [location_options(circuit, loc) for loc in self.locations]
        self._probs = np.array([loc.probability for loc in self.locations], dtype=float)
        self._counts = np.array([len(o) for o in self.options], dtype=float)
        self._seed = spec.seed & _MASK64

    @cached_property
    def active(self) -> bool:
        return bool(np.any(self._probs > 0))

    def rng(self, shot: int) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(key=np.array([self._seed, shot & _MASK64], dtype=np.uint64)))

    def sample_terms(self, shot: int) -> dict[int, int]:
        L = len(self.locations)
        if not L or not self.active:
            return {}
        u = self.rng(shot).random(2 * L)
        hits = np.flatnonzero(u[:L] < self._probs)
        terms: dict[int, int] = {}
        if not hits.size:
            return terms
        choice = (u[L + hits] * self._counts[hits]).astype(np.int64)
        opts = self.options
        for i, c in zip(hits.tolist(), choice.tolist()):
            for k, code in opts[i][c].items():
                v = terms.get(k, 0) ^ code
                if v:
                    terms[k] = v
                else:
                    del terms[k]
        return terms

    def sample(self, shot: int) -> FaultOperator:
        c = self.circuit
        return FaultOperator(c.num_qubits, c.depth, self.sample_terms(shot))

    def __iter__(self) -> Iterator[FaultOperator]:
        shot = 0
        while True:
            yield self.sample(shot)
            shot += 1


def sample(circuit: CliffordCircuit, spec: NoiseSpec, shot: int) -> FaultOperator:
    """One fault operator for ``shot`` (the counter that keys the random stream)."""
    return FaultSampler(circuit, spec).sample(shot)
