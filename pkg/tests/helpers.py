"""Random circuit and check-set generators shared by the test modules."""

import numpy as np

from abcsim.families import random_circuit
from abcsim.spacetime import CheckSet


def make_random_circuits(count, seed, max_qubits=8, max_depth=10):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = int(rng.integers(1, max_qubits + 1))
        depth = int(rng.integers(1, max_depth + 1))
        c = random_circuit(rng, n, depth)
        if c.num_measurements:
            out.append(c)
    return out


def random_checks(rng, circuit, rows=4, logicals=1):
    """Arbitrary nonzero rows over the outcomes (not necessarily deterministic parities)."""
    n_m = circuit.num_measurements
    syn = [int(rng.integers(1, 1 << n_m)) for _ in range(rows)]
    log = [int(rng.integers(0, 1 << n_m)) for _ in range(logicals)]
    return CheckSet.from_masks(n_m, syn, log)
