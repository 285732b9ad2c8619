"""Acceptance gate: one test per criterion, each reporting a PASS/FAIL line.

Lines are printed as the tests run and again in the terminal summary.
"""

import json
import math
import time
from dataclasses import replace

import numpy as np
import pytest

import oracles
from helpers import make_random_circuits, random_checks
from abcsim import gf2
from abcsim.cli import main as cli_main
from abcsim.decoding import build_lookup, is_failure
from abcsim.engine import RunConfig, benchmark, iter_shots, run, run_abc, run_naive
from abcsim.circuit import FaultOperator
from abcsim.families import data_path, random_fault, repetition_memory
from abcsim.noise import NoiseSpec, enumerate_locations, location_options
from abcsim.propagation import back_cumulant, cumulant, effect_on_measurements
from abcsim.spacetime import (
    back_propagated_row,
    derive_checks,
    logical_abc,
    logical_naive,
    precompute,
    syndrome_abc,
    syndrome_naive,
)
from abcsim.tableau_sim import sample_outcomes

RESULTS: dict[int, str] = {}


@pytest.fixture
def verdict(capsys):
    def report(num: int, title: str, ok: bool, detail: str) -> None:
        line = f"criterion {num} [{title}]: {'PASS' if ok else 'FAIL'} ({detail})"
        RESULTS[num] = line
        with capsys.disabled():
            print("\n" + line)
        assert ok, line
    return report


def random_pool(count, seed):
    return make_random_circuits(count, seed=seed, max_qubits=8, max_depth=10)


def test_criterion_1_adjoint_identity(verdict):
    circuits = random_pool(20, seed=1001)
    rng = np.random.default_rng(1)
    pairs = 10_000
    per = pairs // len(circuits)
    mismatches = oracle_mismatches = 0
    t0 = time.perf_counter()
    for ci, c in enumerate(circuits):
        for k in range(per):
            F = random_fault(rng, c, float(rng.uniform(0.05, 0.3)))
            G = random_fault(rng, c, float(rng.uniform(0.05, 0.3)))
            fwd = cumulant(c, F).as_fault_operator()
            bwd = back_cumulant(c, G).as_fault_operator()
            if fwd.commutator(G) != F.commutator(bwd):
                mismatches += 1
            if k < 10:
                # Spot-check both cumulants against the dense matrix oracle.
                if fwd != oracles.from_dense(oracles.cumulant(c, F)) or \
                        bwd != oracles.from_dense(oracles.back_cumulant(c, G)):
                    oracle_mismatches += 1
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and oracle_mismatches == 0 and elapsed < 60
    verdict(1, "adjoint identity", ok,
            f"{per * len(circuits)} pairs on {len(circuits)} circuits, {mismatches} mismatches, "
            f"{oracle_mismatches} oracle mismatches, {elapsed:.1f}s")


def test_criterion_2_commutator_oracle(verdict):
    circuits = random_pool(20, seed=2002)
    rng = np.random.default_rng(2)
    total = 10_000
    per = total // len(circuits)
    checked = mismatches = 0
    for c in circuits:
        rows = list(random_checks(rng, c, rows=6, logicals=0).syndrome_masks)
        rows += list(derive_checks(c, seed=3).syndrome_masks)
        back = [back_propagated_row(c, u) for u in rows]
        for _ in range(per):
            F = random_fault(rng, c, float(rng.uniform(0.05, 0.3)))
            f = effect_on_measurements(c, F)
            for u, op in zip(rows, back):
                checked += 1
                if ((f & u).bit_count() & 1) != F.commutator(op):
                    mismatches += 1
    verdict(2, "commutator oracle", mismatches == 0,
            f"{per * len(circuits)} faults, {checked} row checks, {mismatches} mismatches")


def test_criterion_3_golden_fixture(verdict, rep5, rep5_fault):
    c = rep5.circuit
    f = effect_on_measurements(c, rep5_fault)
    pre = precompute(c, rep5.checks)
    s_naive = gf2.bits(syndrome_naive(f, rep5.checks), 4)
    s_abc = gf2.bits(syndrome_abc(rep5_fault, pre), 4)
    l_naive = gf2.bits(logical_naive(f, rep5.checks), 1)
    l_abc = gf2.bits(logical_abc(rep5_fault, pre), 1)
    flips = gf2.mask_to_indices(f)
    ok = (flips == [6, 8] and s_naive == s_abc == (1, 0, 1, 0) and l_naive == l_abc == (1,))
    verdict(3, "golden fixture", ok,
            f"flips={flips}, s_naive={s_naive}, s_abc={s_abc}, logical={l_naive}/{l_abc}")


def _equivalence(c, checks, noise, shots, seed):
    pre = precompute(c, checks)
    dec = build_lookup(c, checks, pre, noise, 1)
    cfg = RunConfig(c, checks, noise, dec, shots, seed, "abc", 1, pre)
    a = list(iter_shots(cfg))
    b = list(iter_shots(replace(cfg, engine="naive")))
    same_stream = [(r.syndrome, r.logical, r.failure) for r in a] == \
        [(r.syndrome, r.logical, r.failure) for r in b]
    return same_stream and run_abc(cfg) == run_naive(cfg), sum(r.failure for r in a)


def test_criterion_4_engine_equivalence(verdict, rep5):
    shots = 10_000
    noise = NoiseSpec(0.02, 0.02, 0.01)
    results = [_equivalence(rep5.circuit, rep5.checks, noise, shots, seed=4)]
    rng = np.random.default_rng(4)
    for k, c in enumerate(random_pool(20, seed=4004)):
        checks = derive_checks(c, seed=k)
        if not checks.num_checks:
            checks = random_checks(rng, c, rows=2, logicals=0)
        logical = [int(rng.integers(1, 1 << c.num_measurements))]
        checks = checks.with_logicals([gf2.mask_to_indices(m) for m in logical])
        results.append(_equivalence(c, checks, noise, shots, seed=100 + k))
    bad = sum(not ok for ok, _ in results)
    fails = sum(n for _, n in results)
    verdict(4, "engine equivalence", bad == 0,
            f"{len(results)} circuits x {shots} shots, {bad} divergent, {fails} failures seen")


def test_criterion_5_check_derivation(verdict, rep5):
    derived = derive_checks(rep5.circuit)
    fixture_ok = gf2.row_space_equal(derived.syndrome_masks, rep5.checks.syndrome_masks, 12)
    circuits = []
    pool = iter(random_pool(200, seed=5005))
    while len(circuits) < 20:
        c = next(pool)
        d = derive_checks(c, seed=5)
        if d.num_checks:
            circuits.append((c, d))
    violations = 0
    for k, (c, d) in enumerate(circuits):
        for o in sample_outcomes(c, 1000, seed=50_000 + k):
            for u in d.syndrome_masks:
                violations += (o & u).bit_count() & 1
    ok = fixture_ok and violations == 0
    verdict(5, "check derivation", ok,
            f"fixture row space equal={fixture_ok}, 20 circuits x 1000 fresh runs, "
            f"{violations} nonzero parities")


def test_criterion_6_ldpc_scaling(verdict):
    t0 = time.perf_counter()
    rows = benchmark(rounds=(3, 333), distance=3, faults_per_shot=8, shots=3000, seed=6,
                     repeats=15, naive_shots=200)
    elapsed = time.perf_counter() - t0
    by = {(r.depth, r.engine): r.per_shot_seconds for r in rows}
    abc_ratio = by[(1000, "abc")] / by[(10, "abc")]
    naive_ratio = by[(1000, "naive")] / by[(10, "naive")]
    ok = abc_ratio < 2.0 and naive_ratio >= 10.0 and elapsed < 300
    verdict(6, "LDPC scaling", ok,
            f"abc x{abc_ratio:.2f} (<2), naive x{naive_ratio:.1f} (>=10) from depth 10 to 1000, "
            f"{elapsed:.1f}s")


def test_criterion_7_decoder_sanity(verdict):
    rm = repetition_memory(3, 3)
    c = rm.circuit
    pre = precompute(c, rm.checks)
    spec = NoiseSpec(0.01, 0.01, 0.01)
    dec = build_lookup(c, rm.checks, pre, spec, w_max=1)
    faults = wrong = 0
    for loc in enumerate_locations(c, spec):
        for terms in location_options(c, loc):
            F = FaultOperator(c.num_qubits, c.depth, terms)
            faults += 1
            wrong += is_failure(dec.decode(syndrome_abc(F, pre)), logical_abc(F, pre))

    def rate(p):
        noise = NoiseSpec(p, p, p)
        d = build_lookup(c, rm.checks, pre, noise, w_max=1)
        return run(RunConfig(c, rm.checks, noise, d, 100_000, 7, "abc", 1, pre))

    lo, hi = rate(1e-2), rate(5e-2)
    sigma = math.sqrt(lo.stderr ** 2 + hi.stderr ** 2)
    gap = (hi.rate - lo.rate) / sigma if sigma else math.inf
    ok = wrong == 0 and gap > 3
    verdict(7, "decoder sanity", ok,
            f"{faults} weight-1 faults, {wrong} miscorrected; rate {lo.rate:.5f} at p=1e-2 vs "
            f"{hi.rate:.5f} at p=5e-2 ({gap:.1f} sigma)")


def test_criterion_8_determinism(verdict, tmp_path, capsys):
    files = {}
    for kind in ("circuit", "checks", "logical"):
        dst = tmp_path / f"rep5.{kind}"
        dst.write_text(data_path(f"rep5.{kind}").read_text())
        files[kind] = str(dst)
    base = ["simulate", "--circuit", files["circuit"], "--checks", files["checks"],
            "--logical", files["logical"], "--noise", "p=0.02", "--decoder", "lookup",
            "--shots", "4000", "--seed", "8"]

    def simulate(*extra):
        out = tmp_path / "out.json"
        code = cli_main(base + list(extra) + ["--out", str(out)])
        text = out.read_text()
        d = json.loads(text)
        d.pop("timings")
        return code, d

    runs = [simulate() for _ in range(2)]
    shards = [simulate("--shards", str(k)) for k in (1, 4, 16)]
    pre_a, pre_b = tmp_path / "a.pre", tmp_path / "b.pre"
    cli_main(["precompute", "--circuit", files["circuit"], "--checks", files["checks"],
              "--logical", files["logical"], "--out", str(pre_a)])
    cli_main(["precompute", "--circuit", files["circuit"], "--checks", files["checks"],
              "--logical", files["logical"], "--out", str(pre_b)])
    capsys.readouterr()
    codes_ok = all(code == 0 for code, _ in runs + shards)
    same_runs = runs[0][1] == runs[1][1]
    same_shards = all(d == shards[0][1] for _, d in shards)
    same_pre = pre_a.read_bytes() == pre_b.read_bytes()
    ok = codes_ok and same_runs and same_shards and same_pre
    verdict(8, "determinism", ok,
            f"repeat identical={same_runs}, shards 1/4/16 identical={same_shards}, "
            f"artifact identical={same_pre}, n_fail={runs[0][1]['n_fail']}")
