"""``cugsim`` command line: run, decompose, example, bench.

Exit codes: 0 success, 1 usage, 2 parse or validation failure, 3 resource guard.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import bundled
from .bench import BUILDERS, FAMILIES, MAX_DIM, check_budget, run_bench, write_records
from .circuit import apply_circuit, compile_circuit
from .cug import decomposition_terms, format_decomposition
from .errors import CircuitFileError, CugSimError, ResourceGuardError
from .fileformat import CircuitFile, parse_circuit, parse_cug_spec
from .state import DEFAULT_LIST_TOL, StateVector, list_states, measure_all

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_GUARD = 3

DUAL_PATH_TOL = 1e-12


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 by default; 2 is reserved for invalid input here
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


class DualPathMismatch(CugSimError):
    pass


def _load_json(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CircuitFileError(f"cannot read {path}: {exc.strerror or exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CircuitFileError(f"parse error: {exc}") from None
    if not isinstance(data, dict):
        raise CircuitFileError("a circuit file must be a JSON object")
    return data


def _guard_profile(data: dict, force: bool) -> None:
    levels = data.get("profile")
    if isinstance(levels, list) and levels and all(isinstance(x, int) and x > 0 for x in levels):
        check_budget(math.prod(levels), force)


def _run(cf: CircuitFile, dual_path: bool) -> tuple[StateVector, float | None]:
    out = apply_circuit(cf.circuit, cf.input_state)
    if not dual_path:
        return out, None
    dense = compile_circuit(cf.circuit) @ cf.input_state.amplitudes
    deviation = float(np.max(np.abs(dense - out.amplitudes)))
    if deviation > DUAL_PATH_TOL:
        raise DualPathMismatch(
            f"matrix-free and compiled results differ by {deviation:.3e} (limit {DUAL_PATH_TOL:g})"
        )
    return out, deviation


def _state_record(state: StateVector, tol: float) -> list[dict]:
    return [
        {"digits": list(d), "re": a.real + 0.0, "im": a.imag + 0.0} for d, a in state.nonzero(tol)
    ]


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _emit_run(cf: CircuitFile, state: StateVector, args, extra: dict | None = None, extra_lines=()) -> None:
    measured = None
    if args.measure:
        outcome = measure_all(state, np.random.default_rng(args.seed))
        measured = {"digits": list(outcome.digits), "probability": outcome.probability}
    if args.format == "json":
        record = {
            "name": cf.name,
            "profile": list(cf.profile.levels),
            "tolerance": args.tol,
            "amplitudes": _state_record(state, args.tol),
        }
        if measured is not None:
            record["measurement"] = {"seed": args.seed, **measured}
        record.update(extra or {})
        print(_dump(record))
        return
    listing = list_states(state, args.tol, args.precision)
    if listing:
        print(listing)
    for line in extra_lines:
        print(line)
    if measured is not None:
        digits = "".join(str(x) for x in measured["digits"])
        print(f"measured |{digits}⟩ with probability {measured['probability']:.6g} (seed {args.seed})")


def cmd_run(args) -> int:
    data = _load_json(args.path)
    _guard_profile(data, args.force_large)
    cf = parse_circuit(data, True if args.paper_indexing else None)
    state, deviation = _run(cf, args.dual_path)
    extra = {"dual_path_max_deviation": deviation} if deviation is not None else None
    lines = [f"dual-path max deviation {deviation:.3e}"] if deviation is not None else []
    _emit_run(cf, state, args, extra, lines)
    return EXIT_OK


def _matrix_lines(label: str, m) -> list[str]:
    lines = [f"{label} ({m.n_rows}x{m.n_cols}, {m.nnz} nonzero):"]
    for (r, c), v in sorted(m.entries().items()):
        lines.append(f"  [{r},{c}] {v.real + 0.0:.12g}{v.imag + 0.0:+.12g}i")
    return lines


def cmd_decompose(args) -> int:
    if (args.path is None) == (args.spec is None):
        raise UsageError("decompose: give exactly one of PATH or --spec")
    if args.spec is not None:
        try:
            source = json.loads(args.spec)
        except json.JSONDecodeError as exc:
            raise CircuitFileError(f"parse error in --spec: {exc}") from None
        if not isinstance(source, dict):
            raise CircuitFileError("--spec must be a JSON object")
    else:
        source = _load_json(args.path)
    _guard_profile(source, args.force_large)
    spec = parse_cug_spec(source, True if args.paper_indexing else None)
    print(format_decomposition(spec, unicode=not args.ascii))
    if args.matrices:
        ident, active, inactive = decomposition_terms(spec)
        for label, m in (("identity", ident), ("active", active), ("inactive", inactive)):
            print("\n".join(_matrix_lines(label, m)))
    return EXIT_OK


def _example_extras(name: str, state: StateVector) -> tuple[dict, list[str]]:
    if name == "shor15":
        values = bundled.output_register_values(state)
        p = bundled.period_from_values(values)
        factors = bundled.shor_factors(bundled.SHOR_C, bundled.SHOR_N, p, len(bundled.SHOR_OUTPUT_WIRES))
        lines = [
            f"output register values {values}",
            f"period p = {p}",
            f"factors of {bundled.SHOR_N}: {' '.join(map(str, factors))}",
        ]
        return {"output_values": values, "period": p, "factors": list(factors)}, lines
    if name == "cycle16":
        terms = bundled.split_wires(state, 4, DEFAULT_LIST_TOL)
        lines = [f"node {node} coin {coin} amplitude {abs(a):.6g}" for node, coin, a in terms]
        return {"split": [{"node": node, "coin": coin} for node, coin, _ in terms]}, lines
    n_terms = len(state.nonzero(DEFAULT_LIST_TOL))
    total = float(np.sum(state.probabilities()))
    return {"terms": n_terms}, [f"{n_terms} nonzero terms, total probability {total:.12g}"]


def cmd_example(args) -> int:
    cf = bundled.load_example(args.name)
    state, deviation = _run(cf, args.dual_path)
    extra, lines = _example_extras(args.name, state)
    if deviation is not None:
        extra["dual_path_max_deviation"] = deviation
        lines.append(f"dual-path max deviation {deviation:.3e}")
    _emit_run(cf, state, args, extra, lines)
    return EXIT_OK


def _csv_list(text: str, allowed: Sequence[str], what: str) -> list[str]:
    items = [x.strip() for x in text.split(",") if x.strip()]
    bad = [x for x in items if x not in allowed]
    if bad or not items:
        raise UsageError(f"bench: unknown {what} {bad or text!r}; choose from {', '.join(allowed)}")
    return items


def cmd_bench(args) -> int:
    if args.n_min > args.n_max:
        raise UsageError("bench: --n-min exceeds --n-max")
    families = _csv_list(args.families, FAMILIES, "family")
    builders = _csv_list(args.builders, tuple(BUILDERS), "builder")
    records = run_bench(
        range(args.n_min, args.n_max + 1),
        families=families,
        builders=builders,
        repeats=args.repeats,
        seed=args.seed,
        n_conditionals=args.conditionals,
        force=args.force_large,
        warmup=args.warmup,
    )
    if args.output:
        with open(args.output, "w", newline="") as fh:
            write_records(records, fh, args.delimiter)
    else:
        write_records(records, sys.stdout, args.delimiter)
    return EXIT_OK


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=float, default=DEFAULT_LIST_TOL, help="hide amplitudes with magnitude <= TOL")
    p.add_argument("--precision", type=int, default=6, help="significant digits in the text listing")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--dual-path", action="store_true", help="also compile the circuit and compare")
    p.add_argument("--measure", action="store_true", help="sample one full-register measurement")
    p.add_argument("--seed", type=int, default=0, help="seed for --measure")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cugsim", description="Controlled-unitary circuit simulator.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="apply a circuit file to its input state")
    p.add_argument("path")
    _add_run_flags(p)
    p.add_argument("--paper-indexing", action="store_true", help="read wires and conditional states 1-based")
    p.add_argument("--force-large", action="store_true", help=f"allow registers above dimension {MAX_DIM}")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("decompose", help="show the three-term form of one controlled gate")
    p.add_argument("path", nargs="?")
    p.add_argument("--spec", help="inline JSON gate description")
    p.add_argument("--matrices", action="store_true", help="also list the entries of each term")
    p.add_argument("--ascii", action="store_true", help="plain ASCII symbols")
    p.add_argument("--paper-indexing", action="store_true")
    p.add_argument("--force-large", action="store_true")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("example", help="run a bundled example circuit")
    p.add_argument("name", choices=bundled.EXAMPLES)
    _add_run_flags(p)
    p.set_defaults(func=cmd_example)

    p = sub.add_parser("bench", help="time the irreducible and naive builders")
    p.add_argument("--n-min", type=int, default=3)
    p.add_argument("--n-max", type=int, default=12)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--warmup", type=int, default=1)
    p.add_argument("--seed", type=int, default=0, help="seed for the random-cug family")
    p.add_argument("--families", default="cnot,toffoli", help=f"comma list from {','.join(FAMILIES)}")
    p.add_argument("--builders", default="irreducible,naive", help=f"comma list from {','.join(BUILDERS)}")
    p.add_argument("--conditionals", type=int, default=2, help="conditional count for random-cug")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--output", help="write the table here instead of stdout")
    p.add_argument("--force-large", action="store_true")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except ResourceGuardError as exc:
        print(f"cugsim: resource guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (CugSimError, ValueError, IndexError) as exc:
        print(f"cugsim: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
