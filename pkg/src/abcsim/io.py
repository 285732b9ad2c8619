"""Text formats: circuits, check matrices, precompute artifacts, digests.

Circuit format (UTF-8, one instruction per line, ``#`` starts a comment)::

    QUBITS 5
    BOUNDARY_CHECKS 1 2          # optional, only with a REPEAT block
    MPP Z1 Z2 X4                 # one measurement per product
    CZ 1 4
    TICK                         # ends a level
    REPEAT 10 {                  # the enclosed levels form the periodic body
    ...
    }
    TABLEAU 1 01 10 ON 3         # custom gate: 2w rows of 2w bits, then ON qubits

Qubits are 1-based. ``TICK`` always ends a level, so two consecutive ticks
give an idle level. ``REPEAT``, ``}`` and the end of the file end the current
level only if it holds an operation.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Sequence

from .circuit import (
    CliffordCircuit,
    FaultOperator,
    Gate,
    Measurement,
    Periodicity,
    format_pauli_product,
    parse_pauli_product,
)
from .errors import CircuitParseError, ValidationError
from .pauli import GATE_ARITY, NAMED_GATES, CliffordTableau
from .spacetime import BackpropagatedSet, CheckSet

PRECOMPUTE_MAGIC = "ABCSIM-PRECOMPUTE"
PRECOMPUTE_VERSION = 1
RESULTS_VERSION = 1


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_circuit(text: str, path: str | None = None) -> CliffordCircuit:
    n = None
    boundary: tuple[int, ...] = ()
    prefix: list[list] = []
    body: list[list] | None = None
    suffix: list[list] = []
    repeat = None
    state = "prefix"
    current: list = []

    def target():
        return {"prefix": prefix, "body": body, "suffix": suffix}[state]

    def close():
        # Only nonempty levels are closed implicitly.
        nonlocal current
        if current:
            target().append(current)
        current = []

    def qubit(tok: str, lineno: int) -> int:
        if not tok.isdigit():
            raise CircuitParseError(f"bad qubit {tok!r}", lineno, path)
        q = int(tok)
        if not 1 <= q <= n:
            raise CircuitParseError(f"qubit {q} outside 1..{n}", lineno, path)
        return q - 1

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        toks = line.split()
        head = toks[0].upper()
        if head == "QUBITS":
            if n is not None or len(toks) != 2 or not toks[1].isdigit() or int(toks[1]) < 1:
                raise CircuitParseError("expected a single 'QUBITS n' header with n >= 1", lineno, path)
            n = int(toks[1])
            continue
        if n is None:
            raise CircuitParseError("missing QUBITS header before first instruction", lineno, path)
        if head == "TICK":
            if len(toks) != 1:
                raise CircuitParseError("TICK takes no arguments", lineno, path)
            target().append(current)
            current = []
        elif head == "BOUNDARY_CHECKS":
            if not all(t.isdigit() and int(t) >= 1 for t in toks[1:]):
                raise CircuitParseError("BOUNDARY_CHECKS expects 1-based row numbers", lineno, path)
            boundary = tuple(sorted(set(boundary) | {int(t) for t in toks[1:]}))
        elif head == "REPEAT":
            if state != "prefix":
                raise CircuitParseError("only one REPEAT block is supported", lineno, path)
            if len(toks) != 3 or toks[2] != "{" or not toks[1].isdigit() or int(toks[1]) < 1:
                raise CircuitParseError("expected 'REPEAT T {' with T >= 1", lineno, path)
            close()
            repeat = int(toks[1])
            body = []
            state = "body"
        elif head == "}":
            if state != "body" or len(toks) != 1:
                raise CircuitParseError("unexpected '}'", lineno, path)
            close()
            if not body:
                raise CircuitParseError("empty REPEAT block", lineno, path)
            state = "suffix"
        elif head == "MPP":
            if len(toks) < 2:
                raise CircuitParseError("MPP needs at least one Pauli product", lineno, path)
            for tok in toks[1:]:
                try:
                    obs = parse_pauli_product(tok, n)
                except ValueError as exc:
                    raise CircuitParseError(str(exc), lineno, path) from None
                current.append(Measurement(obs))
        elif head == "TABLEAU":
            try:
                w = int(toks[1])
                on = toks.index("ON")
            except (IndexError, ValueError):
                raise CircuitParseError("expected 'TABLEAU w <rows> ON q1..qw'", lineno, path) from None
            rows = toks[2:on]
            qs = toks[on + 1:]
            if len(rows) != 2 * w or len(qs) != w:
                raise CircuitParseError(f"TABLEAU {w} needs {2 * w} rows and {w} qubits", lineno, path)
            try:
                tab = CliffordTableau.from_rows(rows)
            except ValidationError as exc:
                raise CircuitParseError(str(exc), lineno, path) from None
            current.append(Gate(tab, tuple(qubit(t, lineno) for t in qs)))
        elif head in NAMED_GATES:
            w = GATE_ARITY[head]
            args = toks[1:]
            if not args or len(args) % w:
                raise CircuitParseError(f"{head} takes a multiple of {w} qubit arguments", lineno, path)
            for k in range(0, len(args), w):
                current.append(Gate.named(head, *(qubit(t, lineno) for t in args[k:k + w])))
        else:
            raise CircuitParseError(f"unknown instruction {toks[0]!r}", lineno, path)
    if n is None:
        raise CircuitParseError("missing QUBITS header", None, path)
    if state == "body":
        raise CircuitParseError("unterminated REPEAT block", None, path)
    close()
    periodicity = None
    levels = list(prefix)
    if body is not None:
        periodicity = Periodicity(len(prefix), len(body), repeat, boundary)
        for _ in range(repeat):
            levels.extend(body)
        levels.extend(suffix)
    elif boundary:
        raise CircuitParseError("BOUNDARY_CHECKS requires a REPEAT block", None, path)
    return CliffordCircuit.from_ops(n, levels, periodicity)


def _format_op(op) -> str:
    if isinstance(op, Measurement):
        return f"MPP {format_pauli_product(op.observable)}"
    qs = " ".join(str(q + 1) for q in op.support)
    if op.name is not None and NAMED_GATES.get(op.name) == op.tableau:
        return f"{op.name} {qs}"
    return f"TABLEAU {op.tableau.arity} {' '.join(op.tableau.rows())} ON {qs}"


def _format_levels(levels) -> list[str]:
    out = []
    for k, level in enumerate(levels):
        if k:
            out.append("TICK")
        out.extend(_format_op(op) for op in level)
    if levels and not levels[-1]:
        out.append("TICK")
    return out


def format_circuit(circuit: CliffordCircuit) -> str:
    """Normalized serialization; ``parse_circuit`` of it returns an equal circuit."""
    lines = [f"QUBITS {circuit.num_qubits}"]
    per = circuit.periodicity
    if per is None:
        lines += _format_levels(circuit.levels)
    else:
        if per.boundary_checks:
            lines.append("BOUNDARY_CHECKS " + " ".join(map(str, per.boundary_checks)))
        start = per.prefix
        end = per.prefix + per.period * per.repetitions
        lines += _format_levels(circuit.levels[:start])
        lines.append(f"REPEAT {per.repetitions} {{")
        lines += _format_levels(circuit.levels[start:start + per.period])
        lines.append("}")
        lines += _format_levels(circuit.levels[end:])
    return "\n".join(lines) + "\n"


def parse_check_rows(text: str, num_outcomes: int, path: str | None = None,
                     allow_empty_rows: bool = False) -> tuple[tuple[int, ...], ...]:
    """One row per line, space-separated 1-based outcome indices.

    A line holding only ``-`` is an empty row (useful for logical rows).
    """
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        if line == "-":
            if not allow_empty_rows:
                raise CircuitParseError("empty row not allowed here", lineno, path)
            rows.append(())
            continue
        try:
            idx = [int(t) for t in line.split()]
        except ValueError:
            raise CircuitParseError(f"non-integer entry in {line!r}", lineno, path) from None
        for j in idx:
            if not 1 <= j <= num_outcomes:
                raise CircuitParseError(f"outcome {j} outside 1..{num_outcomes}", lineno, path)
        mask = 0
        for j in idx:
            mask ^= 1 << (j - 1)
        rows.append(tuple(j for j in range(1, num_outcomes + 1) if (mask >> (j - 1)) & 1))
    return tuple(rows)


def format_check_rows(rows: Sequence[Sequence[int]]) -> str:
    return "".join((" ".join(map(str, r)) if r else "-") + "\n" for r in rows)


def load_checks(checks_path, logical_path, num_outcomes: int) -> CheckSet:
    checks_path = Path(checks_path)
    syn = parse_check_rows(_read(checks_path), num_outcomes, str(checks_path))
    log = ()
    if logical_path is not None:
        logical_path = Path(logical_path)
        log = parse_check_rows(_read(logical_path), num_outcomes, str(logical_path), allow_empty_rows=True)
    return CheckSet(num_outcomes, syn, log)


def _read(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CircuitParseError(f"cannot read file: {exc.strerror}", None, str(path)) from None


def load_circuit(path) -> CliffordCircuit:
    path = Path(path)
    return parse_circuit(_read(path), str(path))


def _sha256(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def circuit_digest(circuit: CliffordCircuit) -> str:
    return _sha256(format_circuit(circuit))


def checks_digest(checks: CheckSet) -> str:
    text = (f"outcomes {checks.num_outcomes}\nchecks\n" + format_check_rows(checks.syndrome_rows)
            + "logicals\n" + format_check_rows(checks.logical_rows))
    return _sha256(text)


def _format_op_terms(op: FaultOperator) -> str:
    return " ".join(f"{k}:{c & 1}:{c >> 1}" for k, c in sorted(op.terms.items()))


def format_precompute(pre: BackpropagatedSet) -> str:
    lines = [
        f"{PRECOMPUTE_MAGIC} {PRECOMPUTE_VERSION}",
        f"circuit_digest {pre.circuit_digest}",
        f"checks_digest {pre.checks_digest}",
        f"num_qubits {pre.num_qubits}",
        f"depth {pre.depth}",
        f"checks {pre.num_checks}",
        f"logicals {pre.num_logicals}",
    ]
    lines += [("S " + _format_op_terms(op)).rstrip() for op in pre.syndrome_ops]
    lines += [("L " + _format_op_terms(op)).rstrip() for op in pre.logical_ops]
    return "\n".join(lines) + "\n"


def parse_precompute(text: str, path: str | None = None) -> BackpropagatedSet:
    lines = text.splitlines()
    header = {}
    try:
        magic, version = lines[0].split()
    except (IndexError, ValueError):
        raise CircuitParseError("not a precompute artifact", 1, path) from None
    if magic != PRECOMPUTE_MAGIC:
        raise CircuitParseError("not a precompute artifact", 1, path)
    if int(version) != PRECOMPUTE_VERSION:
        raise CircuitParseError(f"unsupported artifact version {version}", 1, path)
    for lineno in range(2, 8):
        try:
            key, value = lines[lineno - 1].split(" ", 1) if " " in lines[lineno - 1] else (lines[lineno - 1], "")
        except IndexError:
            raise CircuitParseError("truncated header", lineno, path) from None
        header[key] = value
    try:
        n = int(header["num_qubits"])
        depth = int(header["depth"])
        n_s = int(header["checks"])
        n_l = int(header["logicals"])
    except (KeyError, ValueError):
        raise CircuitParseError("malformed header", None, path) from None
    syn, log = [], []
    for lineno, line in enumerate(lines[7:], start=8):
        if not line.strip():
            continue
        toks = line.split()
        kind = toks[0]
        terms = {}
        for tok in toks[1:]:
            try:
                k, xb, zb = (int(v) for v in tok.split(":"))
            except ValueError:
                raise CircuitParseError(f"bad entry {tok!r}", lineno, path) from None
            terms[k] = xb | (zb << 1)
        op = FaultOperator(n, depth, terms)
        if kind == "S":
            syn.append(op)
        elif kind == "L":
            log.append(op)
        else:
            raise CircuitParseError(f"unknown row kind {kind!r}", lineno, path)
    if len(syn) != n_s or len(log) != n_l:
        raise CircuitParseError("row count does not match header", None, path)
    return BackpropagatedSet.build(n, depth, syn, log, header["circuit_digest"], header["checks_digest"])


def save_precompute(pre: BackpropagatedSet, path) -> None:
    Path(path).write_text(format_precompute(pre), encoding="utf-8")


def load_precompute(path) -> BackpropagatedSet:
    path = Path(path)
    return parse_precompute(_read(path), str(path))


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"
