import io
import json
import time
from dataclasses import replace

import numpy as np
import pytest

from helpers import make_random_circuits
from abcsim.circuit import CliffordCircuit, Measurement
from abcsim.decoding import build_lookup
from abcsim.engine import (
    BENCH_COLUMNS,
    RateEstimate,
    RunConfig,
    benchmark,
    evaluate_fault,
    iter_shots,
    results_dict,
    run,
    run_abc,
    run_naive,
    wilson_interval,
    write_bench_csv,
)
from abcsim.errors import DimensionError, StaleArtifactError
from abcsim.families import repetition_memory
from abcsim.noise import NoiseSpec
from abcsim.pauli import PauliOperator
from abcsim.spacetime import CheckSet, derive_checks, precompute, precompute_periodic


def test_zero_noise_gives_zero_rate(rep5):
    cfg = RunConfig(rep5.circuit, rep5.checks, NoiseSpec(), n_samples=200)
    for est in (run_naive(cfg), run_abc(cfg)):
        assert est.n_fail == 0 and est.rate == 0.0
        assert est.wilson_ci_95[0] == 0.0 < est.wilson_ci_95[1]


def test_certain_flip_gives_rate_one():
    c = CliffordCircuit.from_ops(1, [[Measurement(PauliOperator.single(1, 0, "Z"))]])
    checks = CheckSet(1, (), ((1,),))
    cfg = RunConfig(c, checks, NoiseSpec(0.0, 1.0, 0.0), n_samples=50)
    assert run_naive(cfg).rate == 1.0
    assert run_abc(cfg).rate == 1.0


def test_injected_fixture_fault(rep5, rep5_fault):
    for engine in ("naive", "abc"):
        cfg = RunConfig(rep5.circuit, rep5.checks, NoiseSpec(), engine=engine)
        r = evaluate_fault(cfg, rep5_fault)
        assert (r.syndrome, r.logical) == (0b0101, 1)
        # The trivial decoder never corrects, so the logical flip is a failure.
        assert r.correction == 0 and r.failure


@pytest.mark.parametrize("idx", range(6))
def test_per_shot_equivalence_random_circuits(idx):
    c = make_random_circuits(6, seed=77)[idx]
    checks = derive_checks(c, seed=idx)
    if not checks.num_checks:
        checks = CheckSet.from_masks(c.num_measurements, [1], [])
    checks = checks.with_logicals([(1,)])
    cfg = RunConfig(c, checks, NoiseSpec(0.05, 0.05, 0.05), n_samples=300, seed=idx)
    assert list(iter_shots(cfg)) == list(iter_shots(replace(cfg, engine="naive")))
    assert run_naive(cfg) == run_abc(cfg)


def test_shard_invariance(rep5):
    pre = precompute(rep5.circuit, rep5.checks)
    noise = NoiseSpec(0.02, 0.02, 0.0)
    dec = build_lookup(rep5.circuit, rep5.checks, pre, noise, 1)
    cfg = RunConfig(rep5.circuit, rep5.checks, noise, dec, n_samples=997, seed=3, precomputed=pre)
    base = run(cfg)
    for k in (4, 16, 1000):
        assert run(replace(cfg, shards=k)) == base
    assert run(replace(cfg, shards=4, workers=2)) == base
    ranges = replace(cfg, shards=16).shard_ranges()
    assert [i for r in ranges for i in r] == list(range(997))


def test_config_validation(rep5):
    with pytest.raises(ValueError):
        RunConfig(rep5.circuit, rep5.checks, NoiseSpec(), n_samples=0)
    with pytest.raises(ValueError):
        RunConfig(rep5.circuit, rep5.checks, NoiseSpec(), engine="fast")
    with pytest.raises(DimensionError):
        RunConfig(rep5.circuit, CheckSet(3, ((1,),)), NoiseSpec())


def test_stale_artifact_rejected(rep5):
    rm = repetition_memory(3, 2)
    other = precompute(rm.circuit, rm.checks)
    cfg = RunConfig(rep5.circuit, rep5.checks, NoiseSpec(0.01), precomputed=other)
    with pytest.raises(StaleArtifactError):
        run_abc(cfg)
    edited = precompute(rep5.circuit, rep5.checks.with_logicals([(9,)]))
    with pytest.raises(StaleArtifactError):
        run_abc(replace(cfg, precomputed=edited))


def test_rate_estimate_interval():
    est = RateEstimate.from_counts(7, 100)
    lo, hi = est.wilson_ci_95
    assert lo < est.rate < hi
    assert wilson_interval(0, 10)[0] == 0.0
    assert wilson_interval(10, 10)[1] == pytest.approx(1.0)
    # Hand-checked Wilson bounds for 7/100.
    assert (lo, hi) == pytest.approx((0.03433, 0.13745), abs=1e-4)


def test_results_dict_keys(rep5):
    cfg = RunConfig(rep5.circuit, rep5.checks, NoiseSpec(0.01), n_samples=10, seed=5)
    d = results_dict(cfg, run(cfg))
    assert list(d) == ["engine", "circuit_digest", "checks_digest", "noise", "seed", "n_samples",
                       "n_fail", "rate", "wilson_ci_95", "timings"]
    assert set(d["timings"]) == {"sample", "syndrome", "decode", "total"}
    assert d["noise"]["seed"] == 5
    json.dumps(d)


def test_estimator_spread_is_binomial():
    rm = repetition_memory(3, 2)
    noise = NoiseSpec(0.02, 0.02, 0.0)
    cfg = RunConfig(rm.circuit, rm.checks, noise, n_samples=1000)
    rates = np.array([run(replace(cfg, seed=s)).rate for s in range(16)])
    p = rates.mean()
    sigma = np.sqrt(p * (1 - p) / cfg.n_samples)
    assert np.all(np.abs(rates - p) < 4 * sigma)
    assert 0.2 < rates.var(ddof=1) / sigma ** 2 < 3.0


def test_benchmark_report_shape():
    rows = benchmark(rounds=(2, 5), shots=20, repeats=1)
    assert len(rows) == 4
    assert [(r.rounds, r.engine) for r in rows] == [(2, "naive"), (2, "abc"), (5, "naive"), (5, "abc")]
    assert rows[1].max_incidence >= 1
    buf = io.StringIO()
    write_bench_csv(rows, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == ",".join(BENCH_COLUMNS)
    assert len(lines) == 5


def test_periodic_precompute_is_faster_at_100_repetitions():
    rm = repetition_memory(3, 101)
    assert rm.circuit.periodicity.repetitions == 100

    def best(fn):
        times = []
        for _ in range(3):
            t0 = time.perf_counter()
            fn(rm.circuit, rm.checks)
            times.append(time.perf_counter() - t0)
        return min(times)

    assert best(precompute_periodic) < best(precompute)
