"""Bundled example circuits and their domain post-processing."""
from __future__ import annotations

from importlib import resources
from math import gcd
from typing import Sequence

from .errors import InvalidArgumentError
from .fileformat import CircuitFile, parse_circuit
from .state import StateVector, register_marginal

EXAMPLES = ("shor15", "cycle16", "graph27")

SHOR_N = 15
SHOR_C = 7
SHOR_OUTPUT_WIRES = (0, 1, 2)


def example_text(name: str) -> str:
    if name not in EXAMPLES:
        raise InvalidArgumentError(f"unknown example {name!r}; choose from {', '.join(EXAMPLES)}")
    return resources.files("cugsim").joinpath("data", f"{name}.json").read_text()


def load_example(name: str) -> CircuitFile:
    return parse_circuit(example_text(name))


def output_register_values(state: StateVector, wires: Sequence[int] = SHOR_OUTPUT_WIRES, tol: float = 1e-10) -> list[int]:
    """Integers observable on the output register, bits read with the last wire most significant."""
    dist = register_marginal(state, list(wires)[::-1])
    values = []
    for digits, p in dist.items():
        if p > tol:
            v = 0
            for d in digits:
                v = v * 2 + d
            values.append(v)
    return sorted(values)


def period_from_values(values: Sequence[int]) -> int:
    """Spacing of the observed outcomes (gcd of the nonzero values)."""
    p = 0
    for v in values:
        p = gcd(p, v)
    if p == 0:
        raise InvalidArgumentError("only the zero outcome was observed; no period can be read off")
    return p


def shor_factors(c: int, n: int, period: int, n_output: int) -> tuple[int, ...]:
    """Nontrivial factors ``gcd(c^(2^(n_output-1)/period) +/- 1, n)``."""
    half = 2 ** (n_output - 1)
    if half % period:
        raise InvalidArgumentError(f"period {period} does not divide {half}")
    a = pow(c, half // period, n)
    found = {gcd(a - 1, n), gcd(a + 1, n)}
    return tuple(sorted(f for f in found if 1 < f < n))


def split_wires(state: StateVector, split: int, tol: float = 1e-12) -> list[tuple[str, str, complex]]:
    """Nonzero terms as ``(digits of wires < split, digits of the rest, amplitude)``."""
    out = []
    for digits, amp in state.nonzero(tol):
        out.append(("".join(map(str, digits[:split])), "".join(map(str, digits[split:])), amp))
    return out
