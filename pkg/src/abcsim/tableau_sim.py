"""Stabilizer-tableau simulation of noiseless circuits (check-derivation oracle).

The register starts maximally mixed, realised as half of ``n`` Bell pairs
with ``n`` untouched reference qubits. Phase-free gate tableaux are realised by
the Clifford whose basis images carry a + sign; this differs from the named
gate by a Pauli, which only shifts outcomes by a constant vector and leaves
the set of deterministic parities unchanged.

Paulis are ``(x, z, r)`` with int bitsets and ``r`` the exponent of ``i`` in
``i^r X^x Z^z``.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .circuit import CliffordCircuit, Gate, Measurement

Pauli = tuple[int, int, int]


def _mul(a: Pauli, b: Pauli) -> Pauli:
    # X^x1 Z^z1 X^x2 Z^z2 = (-1)^{z1.x2} X^(x1^x2) Z^(z1^z2)
    return (a[0] ^ b[0], a[1] ^ b[1], (a[2] + b[2] + 2 * (a[1] & b[0]).bit_count()) & 3)


def _anticommutes(a: Pauli, b: Pauli) -> bool:
    return bool(((a[0] & b[1]) ^ (a[1] & b[0])).bit_count() & 1)


def _hermitian(x: int, z: int) -> Pauli:
    return (x, z, (x & z).bit_count() & 3)


class StabilizerState:
    """Aaronson-Gottesman tableau on ``2n`` qubits (n register + n reference)."""

    def __init__(self, n: int):
        self.n = n
        N = 2 * n
        destab: list[Pauli] = []
        stab: list[Pauli] = []
        for q in range(n):
            stab.append(_hermitian((1 << q) | (1 << (q + n)), 0))
            destab.append(_hermitian(0, 1 << q))
        for q in range(n):
            stab.append(_hermitian(0, (1 << q) | (1 << (q + n))))
            destab.append(_hermitian(1 << (q + n), 0))
        self.rows: list[Pauli] = destab + stab
        self.N = N

    def apply_gate(self, gate: Gate) -> None:
        sup = gate.support
        w = len(sup)
        imgs = []
        for img in gate.tableau.images:
            gx = gz = 0
            for k, q in enumerate(sup):
                gx |= ((img.x_bits >> k) & 1) << q
                gz |= ((img.z_bits >> k) & 1) << q
            imgs.append(_hermitian(gx, gz))
        mask = 0
        for q in sup:
            mask |= 1 << q
        for i, row in enumerate(self.rows):
            x, z, r = row
            if not ((x | z) & mask):
                continue
            acc: Pauli = (x & ~mask, z & ~mask, r)
            for k, q in enumerate(sup):
                if (x >> q) & 1:
                    acc = _mul(acc, imgs[k])
                if (z >> q) & 1:
                    acc = _mul(acc, imgs[w + k])
            self.rows[i] = acc

    def measure(self, x: int, z: int, choose: Callable[[], int]) -> int:
        """Measure the Hermitian Pauli with bitsets ``(x, z)``; ``choose`` gives random bits."""
        N = self.N
        P = _hermitian(x, z)
        rows = self.rows
        p = None
        for i in range(N, 2 * N):
            if _anticommutes(rows[i], P):
                p = i
                break
        if p is not None:
            prow = rows[p]
            for i in range(2 * N):
                if i != p and _anticommutes(rows[i], P):
                    rows[i] = _mul(rows[i], prow)
            rows[p - N] = prow
            outcome = choose() & 1
            rows[p] = (x, z, (P[2] + 2 * outcome) & 3)
            return outcome
        acc: Pauli = (0, 0, 0)
        for i in range(N):
            if _anticommutes(rows[i], P):
                acc = _mul(acc, rows[i + N])
        return ((acc[2] - P[2]) & 3) >> 1


def run_circuit(circuit: CliffordCircuit, choose: Callable[[], int]) -> int:
    """One noiseless run; returns the outcome bitmask (bit j-1 = outcome j)."""
    state = StabilizerState(circuit.num_qubits)
    out = 0
    for level in circuit.levels:
        for op in level:
            if isinstance(op, Gate):
                state.apply_gate(op)
        for op in level:
            if isinstance(op, Measurement):
                obs = op.observable
                if state.measure(obs.x_bits, obs.z_bits, choose):
                    out |= 1 << (op.index - 1)
    return out


def reference_outcomes(circuit: CliffordCircuit) -> int:
    """Outcomes with every random measurement forced to 0."""
    return run_circuit(circuit, lambda: 0)


def sample_outcomes(circuit: CliffordCircuit, shots: int, seed: int, relabel: bool = True) -> list[int]:
    """Noiseless outcome bitmasks.

    With ``relabel`` the reference run is XORed out, so the samples lie in a
    linear code whose checks all have zero parity.
    """
    rng = np.random.default_rng(seed)
    ref = reference_outcomes(circuit) if relabel else 0
    out = []
    for _ in range(shots):
        bits = rng.integers(0, 2, size=max(1, circuit.num_measurements), dtype=np.int64)
        it = iter(bits.tolist())
        out.append(run_circuit(circuit, lambda: next(it)) ^ ref)
    return out
