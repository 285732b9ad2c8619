import numpy as np
import pytest

import oracles
from helpers import make_random_circuits
from abcsim.circuit import FaultOperator
from abcsim.errors import DimensionError
from abcsim.families import random_fault
from abcsim.gf2 import mask_to_indices
from abcsim.pauli import parity
from abcsim.propagation import (
    back_cumulant,
    cumulant,
    cumulant_stream,
    effect,
    effect_on_measurements,
    residual_error,
)
from abcsim.spacetime import derive_checks

CIRCUITS = make_random_circuits(12, seed=5)


@pytest.mark.parametrize("method", ["gates", "dense"])
@pytest.mark.parametrize("idx", range(len(CIRCUITS)))
def test_cumulants_match_dense_matrix_oracle(idx, method):
    c = CIRCUITS[idx]
    rng = np.random.default_rng(idx)
    for _ in range(5):
        F = random_fault(rng, c, 0.2)
        assert cumulant(c, F, method).as_fault_operator() == oracles.from_dense(oracles.cumulant(c, F))
        assert back_cumulant(c, F, method).as_fault_operator() == oracles.from_dense(oracles.back_cumulant(c, F))


@pytest.mark.parametrize("idx", range(len(CIRCUITS)))
def test_flips_match_stabilizer_simulation(idx):
    c = CIRCUITS[idx]
    rng = np.random.default_rng(100 + idx)
    checks = derive_checks(c, seed=idx).syndrome_masks
    for _ in range(5):
        F = random_fault(rng, c, 0.15)
        f = effect_on_measurements(c, F)
        assert f == oracles.flips(c, F)
        run = oracles.faulty_run(c, F, rng)
        for u in checks:
            assert parity(run & u) == parity(f & u)


def test_fixture_fault_flips_six_and_eight(rep5, rep5_fault):
    eff = effect(rep5.circuit, rep5_fault)
    assert mask_to_indices(eff.flips) == [6, 8]
    vec = eff.flip_vector(12)
    assert vec == tuple(1 if j in (6, 8) else 0 for j in range(1, 13))
    # Both Z pairs cancel by the end of the circuit.
    assert eff.residual.is_identity()


def test_stream_yields_one_slice_per_slot(rep5, rep5_fault):
    slices = list(cumulant_stream(rep5.circuit, rep5_fault))
    assert len(slices) == rep5.circuit.depth + 1
    assert slices[-1] == residual_error(rep5.circuit, rep5_fault)


def test_z_on_ancilla_flips_both_later_x_measurements(rep5):
    # Z on ancilla 4 right before level 4 anticommutes with X4 there and at level 9.
    c = rep5.circuit
    F = FaultOperator.for_circuit(c, {3 * 5 + 3: 2})
    assert mask_to_indices(effect_on_measurements(c, F)) == [6, 11]


def test_dimension_mismatch(rep5):
    with pytest.raises(DimensionError):
        cumulant(rep5.circuit, FaultOperator(5, 3, {}))
    with pytest.raises(ValueError):
        cumulant(rep5.circuit, FaultOperator(5, 9, {}), method="bogus")


def test_adjoint_identity_small(rng):
    for c in CIRCUITS:
        for _ in range(20):
            F = random_fault(rng, c, 0.2)
            G = random_fault(rng, c, 0.2)
            assert cumulant(c, F).as_fault_operator().commutator(G) == \
                F.commutator(back_cumulant(c, G).as_fault_operator())
