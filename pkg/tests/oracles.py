"""Independent reference implementations used to cross-check the package.

Propagation here uses dense 2n x 2n GF(2) matrices built straight from the
gate tableau images, with inverses from the symplectic identity
M^-1 = Omega M^T Omega. The physical oracle injects Paulis into the
stabilizer-tableau simulator; only parities that are deterministic without
faults carry information about the flips.
"""

from __future__ import annotations

import numpy as np

from abcsim.circuit import CliffordCircuit, FaultOperator, Gate, Measurement
from abcsim.tableau_sim import StabilizerState, reference_outcomes


def level_matrix(circuit: CliffordCircuit, level: int) -> np.ndarray:
    """Symplectic matrix of 1-based ``level``; columns are images of X_1..X_n, Z_1..Z_n."""
    n = circuit.num_qubits
    M = np.eye(2 * n, dtype=np.uint8)
    for op in circuit.levels[level - 1]:
        if not isinstance(op, Gate):
            continue
        w = len(op.support)
        for k, q in enumerate(op.support):
            for col, img in ((q, op.tableau.images[k]), (n + q, op.tableau.images[w + k])):
                M[:, col] = 0
                for kk, qq in enumerate(op.support):
                    M[qq, col] = (img.x_bits >> kk) & 1
                    M[n + qq, col] = (img.z_bits >> kk) & 1
    return M


def omega(n: int) -> np.ndarray:
    I = np.eye(n, dtype=np.uint8)
    Z = np.zeros((n, n), dtype=np.uint8)
    return np.block([[Z, I], [I, Z]])


def inverse(M: np.ndarray) -> np.ndarray:
    n = M.shape[0] // 2
    W = omega(n)
    return (W @ M.T @ W) % 2


def to_dense(F: FaultOperator) -> np.ndarray:
    n = F.num_qubits
    out = np.zeros((F.depth + 1, 2 * n), dtype=np.uint8)
    for k, code in F.terms.items():
        i, q = divmod(k, n)
        out[i, q] = code & 1
        out[i, n + q] = code >> 1
    return out


def from_dense(arr: np.ndarray) -> FaultOperator:
    T, two_n = arr.shape
    n = two_n // 2
    terms = {}
    for i in range(T):
        for q in range(n):
            c = int(arr[i, q]) | (int(arr[i, n + q]) << 1)
            if c:
                terms[i * n + q] = c
    return FaultOperator(n, T - 1, terms)


def symp(a: np.ndarray, b: np.ndarray) -> int:
    n = a.shape[-1] // 2
    return int((np.sum(a[..., :n] * b[..., n:]) + np.sum(a[..., n:] * b[..., :n])) % 2)


def cumulant(circuit: CliffordCircuit, F: FaultOperator) -> np.ndarray:
    f = to_dense(F)
    out = np.zeros_like(f)
    out[0] = f[0]
    for i in range(1, circuit.depth + 1):
        out[i] = (level_matrix(circuit, i) @ out[i - 1] + f[i]) % 2
    return out


def back_cumulant(circuit: CliffordCircuit, G: FaultOperator) -> np.ndarray:
    g = to_dense(G)
    d = circuit.depth
    out = np.zeros_like(g)
    out[d] = g[d]
    for i in range(d - 1, -1, -1):
        out[i] = (inverse(level_matrix(circuit, i + 1)) @ out[i + 1] + g[i]) % 2
    return out


def _obs_vector(obs) -> np.ndarray:
    n = obs.num_qubits
    v = np.zeros(2 * n, dtype=np.uint8)
    for q in range(n):
        v[q] = (obs.x_bits >> q) & 1
        v[n + q] = (obs.z_bits >> q) & 1
    return v


def flips(circuit: CliffordCircuit, F: FaultOperator) -> int:
    """Outcome flips from the dense cumulant."""
    cum = cumulant(circuit, F)
    f = 0
    for m, lv in circuit.measurements:
        if symp(cum[lv - 1], _obs_vector(m.observable)):
            f |= 1 << (m.index - 1)
    return f


def _apply_pauli(state: StabilizerState, x: int, z: int) -> None:
    # Conjugating the state by a Pauli negates every generator it anticommutes with.
    rows = state.rows
    for i, (rx, rz, r) in enumerate(rows):
        if ((rx & z) ^ (rz & x)).bit_count() & 1:
            rows[i] = (rx, rz, (r + 2) & 3)


def faulty_run(circuit: CliffordCircuit, F: FaultOperator, rng: np.random.Generator) -> int:
    """Outcome bitmask of one run with ``F`` injected, relabelled by the noiseless reference run."""
    slices = F.slices()
    state = StabilizerState(circuit.num_qubits)
    out = 0

    def inject(i):
        if i in slices:
            _apply_pauli(state, *slices[i])

    inject(0)
    for lv, level in enumerate(circuit.levels, start=1):
        for op in level:
            if isinstance(op, Gate):
                state.apply_gate(op)
        for op in level:
            if isinstance(op, Measurement):
                o = op.observable
                if state.measure(o.x_bits, o.z_bits, lambda: int(rng.integers(2))):
                    out |= 1 << (op.index - 1)
        inject(lv)
    return out ^ reference_outcomes(circuit)
