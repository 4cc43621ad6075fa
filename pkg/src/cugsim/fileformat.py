"""JSON circuit files.

A file holds ``profile`` (level per wire), optional ``input`` (basis digits or
``"uniform"``, default all zeros), optional ``indexing`` (``"zero"`` or
``"paper"``) and ``elements``, a list of records applied in order::

    {"kind": "gate",   "start": 0, "op": {"name": "H"}}
    {"kind": "cug",    "conditionals": [[2, 1]], "ublocks": [{"start": 4, "op": {"name": "NOT"}}]}
    {"kind": "cug",    "controls": [0], "anticontrols": [2], "ublocks": [...]}
    {"kind": "swap",   "wires": [0, 3]}
    {"kind": "rotate", "direction": "R", "wires": [0, 2]}
    {"kind": "step",   "direction": "increment", "wires": [0, 3]}

An ``op`` is a registry gate ``{"name", "params", "levels"}``, an inline
matrix ``{"matrix": [[[re, im], ...], ...]}`` or a composite
``{"step": "increment" | "decrement" | "plus" | "minus", "wires": k}``.
Angles may be numbers or strings such as ``"pi/2"`` or ``"-3*pi/4"``.

In ``paper`` indexing every wire index is 1-based and a conditional
``[wire, s]`` requires level ``s - 1``; ``controls``/``anticontrols`` still
mean levels 1 and 0.
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from . import gates
from .circuit import Circuit, SpanGate, WireRotation, WireSwap, generalized_step, step_gate, validate_element
from .cug import Conditional, CugSpec, UBlock
from .errors import CircuitFileError, CugSimError
from .register import RegisterProfile
from .state import StateVector, basis_state, equal_superposition
from .tensor import SparseMatrix

ELEMENT_KINDS = ("cug", "gate", "swap", "rotate", "step")
_ELEMENT_KEYS = {
    "cug": {"kind", "conditionals", "controls", "anticontrols", "ublocks", "label"},
    "gate": {"kind", "start", "op", "label"},
    "swap": {"kind", "wires", "label"},
    "rotate": {"kind", "direction", "wires", "label"},
    "step": {"kind", "direction", "wires", "label"},
}
_FILE_KEYS = {"name", "description", "profile", "indexing", "input", "elements"}

_ANGLE = re.compile(
    r"^\s*(?P<sign>[+-])?\s*(?:(?P<coef>\d+(?:\.\d*)?|\.\d+)\s*\*?\s*)?pi\s*(?:/\s*(?P<den>\d+(?:\.\d*)?))?\s*$"
)


@dataclass(frozen=True)
class CircuitFile:
    name: str
    circuit: Circuit
    input_state: StateVector
    indexing: str

    @property
    def profile(self) -> RegisterProfile:
        return self.circuit.profile


def parse_angle(x) -> float:
    if isinstance(x, bool):
        raise ValueError(f"invalid angle {x!r}")
    if isinstance(x, (int, float)):
        return float(x)
    if isinstance(x, str):
        try:
            return float(x)
        except ValueError:
            pass
        m = _ANGLE.match(x)
        if m:
            val = math.pi * float(m["coef"] or 1) / float(m["den"] or 1)
            return -val if m["sign"] == "-" else val
    raise ValueError(f"invalid angle {x!r}")


def _int(x, what: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ValueError(f"{what} must be an integer, got {x!r}")
    return x


class _Reader:
    def __init__(self, profile: RegisterProfile, paper: bool):
        self.profile = profile
        self.paper = paper

    def wire(self, x, what="wire") -> int:
        w = _int(x, what)
        if self.paper:
            if w < 1:
                raise ValueError(f"{what} {w} is not a valid 1-based index")
            w -= 1
        self.profile.check_wire(w)
        return w

    def cond_state(self, x) -> int:
        s = _int(x, "conditional state")
        if self.paper:
            if s < 1:
                raise ValueError(f"conditional state {s} is not a valid 1-based level")
            s -= 1
        return s

    def wire_range(self, rec) -> tuple[int, int]:
        wires = rec.get("wires")
        if not isinstance(wires, list) or len(wires) != 2:
            raise ValueError("'wires' must be a [first, last] pair")
        first, last = self.wire(wires[0]), self.wire(wires[1])
        if first > last:
            raise ValueError(f"wire range {wires} is empty")
        return first, last

    def op(self, op, start: int) -> SparseMatrix:
        if not isinstance(op, dict):
            raise ValueError("'op' must be an object")
        if "matrix" in op:
            return _matrix_literal(op["matrix"])
        if "step" in op:
            k = _int(op.get("wires"), "step width")
            if k < 1 or start + k > self.profile.n_wires:
                raise ValueError(f"step of width {k} at wire {start} runs past the register")
            direction = op["step"]
            if direction in ("increment", "decrement"):
                if any(lv != 2 for lv in self.profile.levels[start:start + k]):
                    raise ValueError("increment/decrement steps need qubit wires; use plus/minus for qudits")
                return step_gate(k, direction)
            return generalized_step(self.profile.sub(start, start + k), direction)
        if "name" in op:
            name = str(op["name"]).upper()
            params = [parse_angle(p) for p in op.get("params", [])]
            levels = op.get("levels", self.profile[start])
            if name in ("QFTPLUS", "QFTMINUS") and "index_origin" in op:
                return gates.qft_gate(1 if name == "QFTPLUS" else -1, levels, op["index_origin"])
            if name in ("H", "NOT", "PHASE"):
                levels = None
            return gates.gate_from_name(name, params, levels)
        raise ValueError("'op' needs one of 'name', 'matrix' or 'step'")

    def element(self, rec: dict):
        kind = rec.get("kind")
        unknown = set(rec) - _ELEMENT_KEYS[kind]
        if unknown:
            raise ValueError(f"unknown field(s) {sorted(unknown)}")
        if kind == "gate":
            start = self.wire(rec.get("start"), "start")
            return SpanGate(self.op(rec.get("op"), start), start)
        if kind == "cug":
            conds = []
            for pair in rec.get("conditionals", []):
                if not isinstance(pair, list) or len(pair) != 2:
                    raise ValueError(f"conditional {pair!r} must be a [wire, state] pair")
                conds.append(Conditional(self.wire(pair[0]), self.cond_state(pair[1])))
            conds += [Conditional(self.wire(w), 1) for w in rec.get("controls", [])]
            conds += [Conditional(self.wire(w), 0) for w in rec.get("anticontrols", [])]
            blocks = []
            for b in rec.get("ublocks", []):
                if not isinstance(b, dict):
                    raise ValueError("each U-block must be an object with 'start' and 'op'")
                start = self.wire(b.get("start"), "U-block start")
                blocks.append(UBlock(start, self.op(b.get("op"), start)))
            return CugSpec(self.profile, tuple(conds), tuple(blocks))
        if kind == "swap":
            wires = rec.get("wires")
            if not isinstance(wires, list) or len(wires) != 2:
                raise ValueError("'wires' must be a pair")
            return WireSwap(self.wire(wires[0]), self.wire(wires[1]))
        if kind == "rotate":
            first, last = self.wire_range(rec)
            return WireRotation(rec.get("direction"), first, last)
        if kind == "step":
            first, last = self.wire_range(rec)
            op = {"step": rec.get("direction"), "wires": last - first + 1}
            return SpanGate(self.op(op, first), first)
        raise AssertionError(kind)


def _matrix_literal(rows) -> SparseMatrix:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ValueError("'matrix' must be a non-empty list of rows")
    out = []
    for row in rows:
        vals = []
        for x in row:
            if isinstance(x, list) and len(x) == 2:
                vals.append(complex(float(x[0]), float(x[1])))
            elif isinstance(x, (int, float)) and not isinstance(x, bool):
                vals.append(complex(x))
            else:
                raise ValueError(f"matrix entry {x!r} must be a number or an [re, im] pair")
        out.append(vals)
    if len({len(r) for r in out}) != 1:
        raise ValueError("matrix rows have different lengths")
    return SparseMatrix.from_dense(np.array(out))


def _profile(data) -> RegisterProfile:
    levels = data.get("profile")
    if not isinstance(levels, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in levels):
        raise CircuitFileError("'profile' must be a list of integer level counts")
    try:
        return RegisterProfile(tuple(levels))
    except CugSimError as exc:
        raise CircuitFileError(f"invalid profile: {exc}") from None


def _indexing(data, paper_indexing: bool | None) -> bool:
    if paper_indexing is not None:
        return paper_indexing
    mode = data.get("indexing", "zero")
    if mode not in ("zero", "paper"):
        raise CircuitFileError(f"'indexing' must be 'zero' or 'paper', got {mode!r}")
    return mode == "paper"


def _as_data(source) -> dict:
    if isinstance(source, dict):
        return source
    if isinstance(source, str) and source.lstrip()[:1] in ("{", "["):
        text = source
    else:
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise CircuitFileError(f"cannot read {source}: {exc.strerror or exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CircuitFileError(f"parse error: {exc}") from None
    if not isinstance(data, dict):
        raise CircuitFileError("a circuit file must be a JSON object")
    return data


def parse_circuit(source, paper_indexing: bool | None = None) -> CircuitFile:
    """Read and validate a circuit from a path, JSON text or an already-decoded dict.

    ``paper_indexing`` overrides the file's own ``indexing`` field.
    """
    data = _as_data(source)
    unknown = set(data) - _FILE_KEYS
    if unknown:
        raise CircuitFileError(f"unknown top-level field(s) {sorted(unknown)}")
    profile = _profile(data)
    paper = _indexing(data, paper_indexing)
    reader = _Reader(profile, paper)

    records = data.get("elements", [])
    if not isinstance(records, list):
        raise CircuitFileError("'elements' must be a list")
    elements = []
    for k, rec in enumerate(records):
        kind = rec.get("kind") if isinstance(rec, dict) else None
        if kind not in ELEMENT_KINDS:
            raise CircuitFileError(f"unknown element kind {kind!r}; expected one of {', '.join(ELEMENT_KINDS)}", k)
        try:
            el = reader.element(rec)
            validate_element(el, profile)
        except (CugSimError, ValueError, IndexError, TypeError, KeyError) as exc:
            reason = f"{type(exc).__name__}: {exc}" if isinstance(exc, CugSimError) else str(exc)
            raise CircuitFileError(reason, k, kind) from exc
        elements.append(el)

    raw_input = data.get("input", [0] * profile.n_wires)
    try:
        if raw_input == "uniform":
            state = equal_superposition(profile)
        else:
            state = basis_state(profile, raw_input)
    except (CugSimError, TypeError) as exc:
        raise CircuitFileError(f"invalid input: {exc}") from None

    return CircuitFile(
        name=str(data.get("name", "")),
        circuit=Circuit(profile, tuple(elements)),
        input_state=state,
        indexing="paper" if paper else "zero",
    )


def parse_cug_spec(source, paper_indexing: bool | None = None) -> CugSpec:
    """Read a single controlled gate.

    Accepts either ``{"profile", "conditionals" | "controls" | "anticontrols",
    "ublocks"}`` or a circuit file whose only element is a ``cug``.
    """
    data = _as_data(source)
    if "elements" in data:
        cf = parse_circuit(data, paper_indexing)
        cugs = [el for el in cf.circuit.elements if isinstance(el, CugSpec)]
        if len(cf.circuit.elements) != 1 or len(cugs) != 1:
            raise CircuitFileError("expected exactly one 'cug' element")
        return cugs[0]
    profile = _profile(data)
    reader = _Reader(profile, _indexing(data, paper_indexing))
    rec = {k: v for k, v in data.items() if k not in ("profile", "indexing", "name", "description")}
    rec["kind"] = "cug"
    try:
        return reader.element(rec)
    except (CugSimError, ValueError, IndexError, TypeError, KeyError) as exc:
        raise CircuitFileError(f"{type(exc).__name__}: {exc}", 0, "cug") from exc
