"""Command-line interface: ``abcsim {simulate,precompute,derive-checks,bench,validate}``.

Machine-readable output goes to standard output or ``--out``; the resolved
configuration and diagnostics go to standard error.

Exit codes: 0 success, 2 parse error, 3 validation error, 4 stale artifact.
"""

from __future__ import annotations

import argparse
import io as _stringio
import json
import sys
from pathlib import Path

from .circuit import check_valid, validate
from .decoding import TrivialDecoder, build_lookup
from .engine import RunConfig, benchmark, ensure_precomputed, results_dict, run, write_bench_csv
from .errors import CircuitParseError, DimensionError, StaleArtifactError, ValidationError
from .io import (checks_digest, circuit_digest, dump_json, format_check_rows, format_precompute,
                 load_checks, load_circuit, load_precompute)
from .noise import NoiseSpec
from .spacetime import derive_checks, precompute, precompute_periodic

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_STALE = 4


def _echo(cmd: str, config: dict) -> None:
    print(f"abcsim {cmd}: " + json.dumps(config, sort_keys=True), file=sys.stderr)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _load_inputs(args):
    circuit = load_circuit(args.circuit)
    check_valid(circuit)
    checks = None
    if getattr(args, "checks", None):
        checks = load_checks(args.checks, args.logical, circuit.num_measurements)
    return circuit, checks


def cmd_simulate(args) -> int:
    circuit, checks = _load_inputs(args)
    noise = NoiseSpec.parse(args.noise, seed=args.seed)
    pre = load_precompute(args.precompute) if args.precompute else None
    config = RunConfig(circuit, checks, noise, None, args.shots, args.seed, args.engine,
                       args.shards, pre, args.workers)
    if args.engine == "abc" or args.decoder == "lookup":
        pre = ensure_precomputed(config)
    if args.decoder == "lookup":
        decoder = build_lookup(circuit, checks, pre, noise, args.lookup_wmax)
    else:
        decoder = TrivialDecoder(checks.num_checks, checks.num_logicals)
    config = RunConfig(circuit, checks, noise, decoder, args.shots, args.seed, args.engine,
                       args.shards, pre if args.engine == "abc" else None, args.workers)
    _echo("simulate", {
        "circuit": str(args.circuit), "checks": str(args.checks), "logical": args.logical and str(args.logical),
        "circuit_digest": circuit_digest(circuit), "checks_digest": checks_digest(checks),
        "noise": noise.to_dict(), "decoder": args.decoder, "lookup_wmax": args.lookup_wmax,
        "shots": args.shots, "seed": args.seed, "engine": args.engine, "shards": args.shards,
        "workers": args.workers, "precompute": args.precompute, "out": args.out,
    })
    est = run(config)
    _emit(dump_json(results_dict(config, est)), args.out)
    return EXIT_OK


def cmd_precompute(args) -> int:
    circuit, checks = _load_inputs(args)
    _echo("precompute", {"circuit": str(args.circuit), "checks": str(args.checks),
                         "logical": args.logical and str(args.logical), "periodic": args.periodic,
                         "out": args.out})
    if args.periodic:
        pre = precompute_periodic(circuit, checks)
    else:
        pre = precompute(circuit, checks)
    _emit(format_precompute(pre), args.out)
    return EXIT_OK


def cmd_derive_checks(args) -> int:
    circuit = load_circuit(args.circuit)
    check_valid(circuit)
    shots = args.shots if args.shots is not None else circuit.num_measurements + 64
    _echo("derive-checks", {"circuit": str(args.circuit), "shots": shots, "seed": args.seed,
                            "out": args.out})
    checks = derive_checks(circuit, shots=shots, seed=args.seed)
    _emit(format_check_rows(checks.syndrome_rows), args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    rounds = [int(r) for r in args.rounds.split(",") if r.strip()]
    _echo("bench", {"rounds": rounds, "distance": args.distance, "faults": args.faults,
                    "shots": args.shots, "seed": args.seed, "out": args.out})
    rows = benchmark(rounds, args.distance, args.faults, args.shots, args.seed)
    buf = _stringio.StringIO()
    write_bench_csv(rows, buf)
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_validate(args) -> int:
    circuit = load_circuit(args.circuit)
    issues = validate(circuit)
    if args.checks:
        load_checks(args.checks, args.logical, circuit.num_measurements)
    for issue in issues:
        print(f"{args.circuit}: {issue}", file=sys.stderr)
    if issues:
        return EXIT_VALIDATION
    print(f"{args.circuit}: ok ({circuit.num_qubits} qubits, depth {circuit.depth}, "
          f"{circuit.num_measurements} outcomes)", file=sys.stderr)
    return EXIT_OK


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="abcsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def inputs(p, checks_required=True):
        p.add_argument("--circuit", required=True, help="circuit file")
        p.add_argument("--checks", required=checks_required, help="check-matrix file (one row per line)")
        p.add_argument("--logical", default=None, help="logical-row file")

    p = sub.add_parser("simulate", help="estimate the logical failure rate")
    inputs(p)
    p.add_argument("--noise", default="p=0.001", help="e.g. p_gate=1e-3,p_meas=1e-3,p_idle=0")
    p.add_argument("--decoder", choices=("trivial", "lookup"), default="trivial")
    p.add_argument("--lookup-wmax", type=int, default=1)
    p.add_argument("--shots", type=_positive, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--engine", choices=("naive", "abc"), default="abc")
    p.add_argument("--shards", type=_positive, default=1)
    p.add_argument("--workers", type=_positive, default=1)
    p.add_argument("--precompute", default=None, help="precompute artifact (abc engine)")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("precompute", help="write the backpropagated-check artifact")
    inputs(p)
    p.add_argument("--periodic", action="store_true", help="use the circuit's declared periodicity")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_precompute)

    p = sub.add_parser("derive-checks", help="derive check rows from noiseless simulation")
    p.add_argument("--circuit", required=True)
    p.add_argument("--shots", type=_positive, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_derive_checks)

    p = sub.add_parser("bench", help="time both engines on repetition-code memories")
    p.add_argument("--rounds", default="3,33,333", help="comma-separated round counts")
    p.add_argument("--distance", type=int, default=3)
    p.add_argument("--faults", type=int, default=8, help="injected faults per shot")
    p.add_argument("--shots", type=_positive, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("validate", help="check a circuit (and optional check files)")
    inputs(p, checks_required=False)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CircuitParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except StaleArtifactError as exc:
        print(f"stale artifact: {exc}", file=sys.stderr)
        return EXIT_STALE
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        for issue in exc.issues:
            print(f"  {issue}", file=sys.stderr)
        return EXIT_VALIDATION
    except (DimensionError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
