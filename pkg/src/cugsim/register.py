"""Register profiles: the ordered per-wire level counts of a qudit register.

Basis indices are big-endian mixed radix: wire 0 is the most significant
digit, so the ket ``|d0 d1 ... d(n-1)>`` is printed with wire 0 leftmost.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidDimensionError, InvalidStateError, SpanError, WireIndexError


@dataclass(frozen=True)
class RegisterProfile:
    levels: tuple[int, ...]

    def __post_init__(self):
        levels = tuple(int(x) for x in self.levels)
        if not levels:
            raise InvalidDimensionError("a register needs at least one wire")
        for w, (raw, lv) in enumerate(zip(self.levels, levels)):
            if raw != lv or lv < 2:
                raise InvalidDimensionError(f"wire {w} has invalid level count {raw!r}; need an integer >= 2")
        object.__setattr__(self, "levels", levels)

    @classmethod
    def qubits(cls, n: int) -> "RegisterProfile":
        return cls((2,) * n)

    @property
    def n_wires(self) -> int:
        return len(self.levels)

    @property
    def dim(self) -> int:
        return prod(self.levels)

    def __len__(self):
        return len(self.levels)

    def __getitem__(self, wire):
        return self.levels[wire]

    def check_wire(self, wire: int) -> int:
        if int(wire) != wire or not 0 <= wire < self.n_wires:
            raise WireIndexError(f"wire {wire!r} out of range for a {self.n_wires}-wire register")
        return int(wire)

    def sub(self, start: int, stop: int) -> "RegisterProfile":
        """Profile of wires ``start .. stop-1``."""
        return RegisterProfile(self.levels[start:stop])

    def dim_of(self, start: int, stop: int) -> int:
        return prod(self.levels[start:stop])

    def span_length(self, start: int, dim: int) -> int:
        """Number of consecutive wires from ``start`` whose level product is ``dim``."""
        self.check_wire(start)
        acc = 1
        for k, lv in enumerate(self.levels[start:], start=1):
            acc *= lv
            if acc == dim:
                return k
            if acc > dim:
                break
        raise SpanError(
            f"dimension {dim} does not match the level product of any run of wires starting at wire {start} "
            f"(levels {self.levels[start:]})"
        )

    def index(self, digits: Sequence[int]) -> int:
        digits = list(digits)
        if len(digits) != self.n_wires:
            raise InvalidStateError(f"expected {self.n_wires} digits, got {len(digits)}")
        idx = 0
        for w, (d, lv) in enumerate(zip(digits, self.levels)):
            if int(d) != d or not 0 <= d < lv:
                raise InvalidStateError(f"digit {d!r} out of range for wire {w} with {lv} levels")
            idx = idx * lv + int(d)
        return idx

    def digits(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self.dim:
            raise InvalidStateError(f"basis index {index} out of range for dimension {self.dim}")
        return tuple(int(x) for x in np.unravel_index(index, self.levels))

    def all_digits(self) -> np.ndarray:
        """``(dim, n_wires)`` array of the digits of every basis index, in index order."""
        return np.stack(np.unravel_index(np.arange(self.dim), self.levels), axis=1)

    def ket(self, index: int) -> str:
        digits = self.digits(index)
        sep = "," if max(self.levels) > 10 else ""
        return "|" + sep.join(str(d) for d in digits) + "⟩"


def as_profile(levels: RegisterProfile | Iterable[int]) -> RegisterProfile:
    if isinstance(levels, RegisterProfile):
        return levels
    return RegisterProfile(tuple(levels))
