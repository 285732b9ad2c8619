"""Monte-Carlo failure-rate estimation with the propagation and ABC pipelines.

Both engines draw the same fault operator for a given (seed, shot) pair, so
their per-shot syndromes, logical flips and verdicts can be compared one to
one. Shots ``0..n_samples-1`` are split into contiguous shards; the estimate
does not depend on the shard count.
"""

from __future__ import annotations

import csv
import gc
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterator, Sequence

import numpy as np
from scipy.stats import binomtest

from .circuit import CliffordCircuit, FaultOperator
from .decoding import Decoder, TrivialDecoder, is_failure
from .errors import DimensionError, StaleArtifactError
from .noise import FaultSampler, NoiseSpec, enumerate_locations, location_options
from .propagation import effect_on_measurements
from .spacetime import (BackpropagatedSet, CheckSet, logical_abc, logical_naive, precompute,
                        precompute_periodic, syndrome_abc, syndrome_naive)

ENGINES = ("naive", "abc")
TIMING_KEYS = ("sample", "syndrome", "decode", "total")


@dataclass(frozen=True)
class RunConfig:
    circuit: CliffordCircuit
    checks: CheckSet
    noise: NoiseSpec
    decoder: Decoder | None = None
    n_samples: int = 1000
    seed: int = 0
    engine: str = "abc"
    shards: int = 1
    precomputed: BackpropagatedSet | None = None
    workers: int = 1

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples must be at least 1")
        if self.shards < 1:
            raise ValueError("shard count must be at least 1")
        if self.engine not in ENGINES:
            raise ValueError(f"engine must be one of {ENGINES}, got {self.engine!r}")
        if self.checks.num_outcomes != self.circuit.num_measurements:
            raise DimensionError(
                f"checks cover {self.checks.num_outcomes} outcomes, "
                f"circuit has {self.circuit.num_measurements}")
        dec = self.resolved_decoder()
        if dec.num_checks != self.checks.num_checks or dec.num_logicals != self.checks.num_logicals:
            raise DimensionError("decoder dimensions do not match the check set")

    def resolved_decoder(self) -> Decoder:
        if self.decoder is None:
            return TrivialDecoder(self.checks.num_checks, self.checks.num_logicals)
        return self.decoder

    def shard_ranges(self) -> list[range]:
        n, k = self.n_samples, self.shards
        return [range(i * n // k, (i + 1) * n // k) for i in range(k)]


@dataclass(frozen=True)
class ShotResult:
    shot: int
    syndrome: int
    logical: int
    correction: int
    failure: bool


def wilson_interval(n_fail: int, n_samples: int) -> tuple[float, float]:
    ci = binomtest(n_fail, n_samples).proportion_ci(confidence_level=0.95, method="wilson")
    return float(ci.low), float(ci.high)


@dataclass(frozen=True)
class RateEstimate:
    n_fail: int
    n_samples: int
    rate: float
    wilson_ci_95: tuple[float, float]
    timings: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_counts(cls, n_fail: int, n_samples: int, timings: dict | None = None) -> RateEstimate:
        return cls(n_fail, n_samples, n_fail / n_samples, wilson_interval(n_fail, n_samples),
                   dict(timings or {}))

    @property
    def stderr(self) -> float:
        p = self.rate
        return float(np.sqrt(p * (1 - p) / self.n_samples))


def ensure_precomputed(config: RunConfig) -> BackpropagatedSet:
    """Return the config's artifact after checking its digests, computing one if absent."""
    from .io import checks_digest, circuit_digest

    pre = config.precomputed
    if pre is None:
        return precompute(config.circuit, config.checks)
    if pre.circuit_digest != circuit_digest(config.circuit):
        raise StaleArtifactError("precompute artifact was built for a different circuit")
    if pre.checks_digest != checks_digest(config.checks):
        raise StaleArtifactError("precompute artifact was built for different checks")
    return pre


class _Timer:
    def __init__(self):
        self.totals = dict.fromkeys(TIMING_KEYS, 0.0)


def _shots(config: RunConfig, shots: Sequence[int] | range, pre: BackpropagatedSet | None,
           timer: _Timer) -> Iterator[ShotResult]:
    circuit, checks = config.circuit, config.checks
    sampler = FaultSampler(circuit, config.noise.with_seed(config.seed))
    decoder = config.resolved_decoder()
    tm = timer.totals
    clock = time.perf_counter
    naive = config.engine == "naive"
    for shot in shots:
        t0 = clock()
        F = sampler.sample(shot)
        t1 = clock()
        if naive:
            f = effect_on_measurements(circuit, F)
            s = syndrome_naive(f, checks)
            fbar = logical_naive(f, checks)
        else:
            s = syndrome_abc(F, pre)
            fbar = logical_abc(F, pre)
        t2 = clock()
        corr = decoder.decode(s)
        t3 = clock()
        tm["sample"] += t1 - t0
        tm["syndrome"] += t2 - t1
        tm["decode"] += t3 - t2
        tm["total"] += t3 - t0
        yield ShotResult(shot, s, fbar, corr, is_failure(corr, fbar))


def evaluate_fault(config: RunConfig, F: FaultOperator, shot: int = -1,
                   pre: BackpropagatedSet | None = None) -> ShotResult:
    """Syndrome, logical flips and verdict for a given fault operator."""
    if config.engine == "naive":
        f = effect_on_measurements(config.circuit, F)
        s, fbar = syndrome_naive(f, config.checks), logical_naive(f, config.checks)
    else:
        pre = pre or ensure_precomputed(config)
        s, fbar = syndrome_abc(F, pre), logical_abc(F, pre)
    corr = config.resolved_decoder().decode(s)
    return ShotResult(shot, s, fbar, corr, is_failure(corr, fbar))


def iter_shots(config: RunConfig, shots: Sequence[int] | range | None = None) -> Iterator[ShotResult]:
    """Per-shot results in shot order (all shots of the config by default)."""
    pre = ensure_precomputed(config) if config.engine == "abc" else None
    if shots is None:
        shots = range(config.n_samples)
    yield from _shots(config, shots, pre, _Timer())


def _run_shard(config: RunConfig, pre: BackpropagatedSet | None, shots: range) -> tuple[int, dict]:
    timer = _Timer()
    n_fail = sum(r.failure for r in _shots(config, shots, pre, timer))
    return n_fail, timer.totals


def run(config: RunConfig) -> RateEstimate:
    pre = ensure_precomputed(config) if config.engine == "abc" else None
    ranges = config.shard_ranges()
    if config.workers > 1 and len(ranges) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            parts = list(pool.map(_run_shard, [config] * len(ranges), [pre] * len(ranges), ranges))
    else:
        parts = [_run_shard(config, pre, r) for r in ranges]
    n_fail = sum(p[0] for p in parts)
    timings = {k: sum(p[1][k] for p in parts) for k in TIMING_KEYS}
    return RateEstimate.from_counts(n_fail, config.n_samples, timings)


def run_naive(config: RunConfig) -> RateEstimate:
    return run(replace(config, engine="naive"))


def run_abc(config: RunConfig) -> RateEstimate:
    return run(replace(config, engine="abc"))


def results_dict(config: RunConfig, est: RateEstimate) -> dict:
    from .io import checks_digest, circuit_digest

    noise = config.noise.with_seed(config.seed).to_dict()
    return {
        "engine": config.engine,
        "circuit_digest": circuit_digest(config.circuit),
        "checks_digest": checks_digest(config.checks),
        "noise": noise,
        "seed": config.seed,
        "n_samples": est.n_samples,
        "n_fail": est.n_fail,
        "rate": est.rate,
        "wilson_ci_95": list(est.wilson_ci_95),
        "timings": {k: est.timings.get(k, 0.0) for k in TIMING_KEYS},
    }


# ---------------------------------------------------------------- benchmark

BENCH_COLUMNS = ("family", "distance", "rounds", "depth", "engine", "faults_per_shot", "shots",
                 "per_shot_seconds", "precompute_seconds", "precompute_periodic_seconds",
                 "max_incidence")


@dataclass(frozen=True)
class BenchRow:
    family: str
    distance: int
    rounds: int
    depth: int
    engine: str
    faults_per_shot: int
    shots: int
    per_shot_seconds: float
    precompute_seconds: float | None = None
    precompute_periodic_seconds: float | None = None
    max_incidence: int | None = None

    def as_row(self) -> list:
        return ["" if getattr(self, c) is None else getattr(self, c) for c in BENCH_COLUMNS]


class FaultInjector:
    """Products of a fixed number of elementary faults at distinct, uniformly chosen locations."""

    def __init__(self, circuit: CliffordCircuit, spec: NoiseSpec | None = None):
        self.circuit = circuit
        spec = spec or NoiseSpec(1.0, 1.0, 0.0)
        self.options = [location_options(circuit, loc) for loc in enumerate_locations(circuit, spec)]

    def __call__(self, rng: np.random.Generator, count: int) -> FaultOperator:
        c = self.circuit
        picked = rng.choice(len(self.options), size=min(count, len(self.options)), replace=False)
        F = FaultOperator.identity(c)
        for i in sorted(picked.tolist()):
            opts = self.options[i]
            F = F * FaultOperator(c.num_qubits, c.depth, opts[int(rng.integers(len(opts)))])
        return F


def inject_faults(rng: np.random.Generator, circuit: CliffordCircuit, count: int,
                  spec: NoiseSpec | None = None) -> FaultOperator:
    return FaultInjector(circuit, spec)(rng, count)


def _mean_time(fn, faults) -> float:
    t0 = time.perf_counter()
    for F in faults:
        fn(F)
    return (time.perf_counter() - t0) / len(faults)


def _best_of(t0_best: float, fn, faults) -> float:
    return min(t0_best, _mean_time(fn, faults))


def benchmark(rounds: Sequence[int] = (3, 33, 333), distance: int = 3, faults_per_shot: int = 8,
              shots: int = 200, seed: int = 0, repeats: int = 3,
              naive_shots: int | None = None) -> list[BenchRow]:
    """Per-shot syndrome cost of both engines on repetition-code memories.

    The same injected fault operators (``faults_per_shot`` elementary faults
    each) feed both engines. The naive figure covers propagation, the
    outcome-flip vector and the check-matrix product; the ABC figure covers
    the incidence lookup only. All sizes are built first, then timed in
    ``repeats`` interleaved rounds with the garbage collector paused, one
    engine after the other; each figure is the best round.
    """
    from .families import repetition_memory

    cases = []
    for R in rounds:
        rm = repetition_memory(distance, R)
        c, checks = rm.circuit, rm.checks
        t0 = time.perf_counter()
        pre = precompute(c, checks)
        t_direct = time.perf_counter() - t0
        t_periodic = None
        if c.periodicity is not None:
            t0 = time.perf_counter()
            precompute_periodic(c, checks)
            t_periodic = time.perf_counter() - t0

        # Faults are built after the precompute garbage is gone, as in a fresh run.
        gc.collect()
        rng = np.random.default_rng([seed, R])
        inject = FaultInjector(c)
        faults = [inject(rng, faults_per_shot) for _ in range(shots)]
        nf = faults[:naive_shots] if naive_shots else faults
        cases.append((R, c, checks, pre, faults, nf, t_direct, t_periodic))

    timed = {
        "abc": lambda c, checks, pre: (lambda F: syndrome_abc(F, pre)),
        "naive": lambda c, checks, pre: (lambda F: syndrome_naive(effect_on_measurements(c, F), checks)),
    }
    best = {(R, e): float("inf") for R in rounds for e in ENGINES}
    enabled = gc.isenabled()
    try:
        # One engine at a time so the naive path's allocations do not pollute
        # the ABC timings; sizes are interleaved within each phase.
        for engine in ("abc", "naive"):
            gc.collect()
            gc.disable()
            for _ in range(repeats):
                for R, c, checks, pre, faults, nf, *_ in cases:
                    fn = timed[engine](c, checks, pre)
                    best[R, engine] = _best_of(best[R, engine], fn, faults if engine == "abc" else nf)
            gc.enable()
    finally:
        if enabled:
            gc.enable()
        else:
            gc.disable()

    rows = []
    for R, c, checks, pre, faults, nf, t_direct, t_periodic in cases:
        common = dict(family="repetition", distance=distance, rounds=R, depth=c.depth,
                      faults_per_shot=faults_per_shot)
        rows.append(BenchRow(engine="naive", shots=len(nf), per_shot_seconds=best[R, "naive"], **common))
        rows.append(BenchRow(engine="abc", shots=len(faults), per_shot_seconds=best[R, "abc"],
                             precompute_seconds=t_direct, precompute_periodic_seconds=t_periodic,
                             max_incidence=pre.max_incidence(), **common))
    return rows


def write_bench_csv(rows: Sequence[BenchRow], stream) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(BENCH_COLUMNS)
    for r in rows:
        w.writerow(r.as_row())
