"""Timing of the irreducible and naive controlled-gate builders.

Families (all on ``n`` qubits, NOT on the last wire):

* ``cnot``: one control on wire 0;
* ``toffoli``: controls on wires 0 and 1;
* ``random-cug``: ``n_conditionals`` conditionals on random distinct wires with
  random required states and a random 2x2 unitary target.
"""
from __future__ import annotations

import csv
import gc
import statistics
import time
from dataclasses import astuple, dataclass, fields
from typing import Callable, Iterable, Sequence, TextIO

import numpy as np

from .cug import CugSpec, build_cug, build_cug_naive
from .errors import InvalidArgumentError, ResourceGuardError
from .gates import not_gate
from .register import RegisterProfile
from .tensor import SparseMatrix

MAX_DIM = 2**22
FAMILIES = ("cnot", "toffoli", "random-cug")
BUILDERS: dict[str, Callable[[CugSpec], SparseMatrix]] = {
    "irreducible": build_cug,
    "naive": build_cug_naive,
}


@dataclass(frozen=True)
class BenchRecord:
    family: str
    n_wires: int
    n_conditionals: int
    builder: str
    repeats: int
    median_seconds: float


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def cnot_spec(n: int) -> CugSpec:
    return CugSpec(RegisterProfile.qubits(n), ((0, 1),), ((n - 1, not_gate()),))


def toffoli_spec(n: int) -> CugSpec:
    return CugSpec(RegisterProfile.qubits(n), ((0, 1), (1, 1)), ((n - 1, not_gate()),))


def random_cug_spec(n: int, n_conditionals: int, rng: np.random.Generator) -> CugSpec:
    if not 0 <= n_conditionals <= n - 1:
        raise InvalidArgumentError(f"{n_conditionals} conditionals do not fit on {n} wires with a target")
    wires = sorted(int(w) for w in rng.choice(n - 1, size=n_conditionals, replace=False))
    conds = tuple((w, int(rng.integers(2))) for w in wires)
    u = SparseMatrix.from_dense(random_unitary(2, rng))
    return CugSpec(RegisterProfile.qubits(n), conds, ((n - 1, u),))


MIN_WIRES = {"cnot": 2, "toffoli": 3, "random-cug": 2}


def family_spec(family: str, n: int, n_conditionals: int = 2, rng: np.random.Generator | None = None) -> CugSpec:
    if family in MIN_WIRES and n < MIN_WIRES[family]:
        raise InvalidArgumentError(f"{family} needs at least {MIN_WIRES[family]} wires, got {n}")
    if family == "cnot":
        return cnot_spec(n)
    if family == "toffoli":
        return toffoli_spec(n)
    if family == "random-cug":
        if rng is None:
            raise InvalidArgumentError("random-cug needs a random generator")
        return random_cug_spec(n, n_conditionals, rng)
    raise InvalidArgumentError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")


def check_budget(dim: int, force: bool = False) -> None:
    if dim > MAX_DIM and not force:
        raise ResourceGuardError(f"dimension {dim} exceeds the {MAX_DIM} budget; override with --force-large (force=True)")


def _timed(fn: Callable[[], object]) -> float:
    t0 = time.perf_counter()
    fn()
    return time.perf_counter() - t0


def median_time(fn: Callable[[], object], repeats: int, warmup: int = 1) -> float:
    if repeats < 1:
        raise InvalidArgumentError("repeats must be at least 1")
    for _ in range(warmup):
        fn()
    gc_was_enabled = gc.isenabled()
    gc.disable()
    try:
        times = [_timed(fn) for _ in range(repeats)]
    finally:
        if gc_was_enabled:
            gc.enable()
    return statistics.median(times)


def run_bench(
    n_values: Iterable[int],
    families: Sequence[str] = ("cnot", "toffoli"),
    builders: Sequence[str] = ("irreducible", "naive"),
    repeats: int = 5,
    seed: int = 0,
    n_conditionals: int = 2,
    force: bool = False,
    warmup: int = 1,
) -> list[BenchRecord]:
    """Median build time of every (family, n, builder) configuration.

    Repeats are taken round-robin over the configurations so that slow drift
    in machine load affects every configuration alike.
    """
    n_values = list(n_values)
    if repeats < 1:
        raise InvalidArgumentError("repeats must be at least 1")
    for n in n_values:
        for family in families:
            if family not in MIN_WIRES:
                raise InvalidArgumentError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
            if n < MIN_WIRES[family]:
                raise InvalidArgumentError(f"{family} needs at least {MIN_WIRES[family]} wires, got n = {n}")
        check_budget(2**n, force)
    for b in builders:
        if b not in BUILDERS:
            raise InvalidArgumentError(f"unknown builder {b!r}; choose from {', '.join(BUILDERS)}")
    rng = np.random.default_rng(seed)
    configs = []
    for family in families:
        for n in n_values:
            spec = family_spec(family, n, n_conditionals, rng)
            for b in builders:
                configs.append((family, n, spec, b))

    def job(spec, b):
        build = BUILDERS[b]
        return lambda: build(spec)

    jobs = [job(spec, b) for _, _, spec, b in configs]
    for fn in jobs:
        for _ in range(warmup):
            fn()
    times: list[list[float]] = [[] for _ in jobs]
    gc_was_enabled = gc.isenabled()
    gc.disable()
    try:
        for _ in range(repeats):
            for k, fn in enumerate(jobs):
                times[k].append(_timed(fn))
    finally:
        if gc_was_enabled:
            gc.enable()
    return [
        BenchRecord(family, n, len(spec.conditionals), b, repeats, statistics.median(t))
        for (family, n, spec, b), t in zip(configs, times)
    ]


def write_records(records: Iterable[BenchRecord], fh: TextIO, delimiter: str = ",") -> None:
    w = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
    w.writerow([f.name for f in fields(BenchRecord)])
    for r in records:
        row = list(astuple(r))
        row[-1] = f"{r.median_seconds:.9f}"
        w.writerow(row)
