"""Register-level composition of gates.

A :class:`Circuit` is an ordered list of elements applied first to last.
:func:`compile_circuit` multiplies their full-register matrices right to left
(the last element ends up leftmost); :func:`apply_circuit` runs the same
elements one at a time on a state vector without forming that product.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import singledispatch
from typing import Sequence, Union

import numpy as np
import scipy.sparse as sp

from . import gates
from .cug import Conditional, CugSpec, UBlock, build_cug, build_cug_span
from .errors import InvalidArgumentError, LevelMismatchError, ShapeError, SpecError
from .register import RegisterProfile, as_profile
from .state import StateVector
from .tensor import DTYPE, SparseMatrix, apply_local, identity, kron_all, mat_mul


@dataclass(frozen=True)
class SpanGate:
    """``matrix`` on the consecutive wires starting at ``start``, identity elsewhere."""

    matrix: SparseMatrix
    start: int

    def __post_init__(self):
        if not isinstance(self.matrix, SparseMatrix):
            object.__setattr__(self, "matrix", SparseMatrix.from_dense(self.matrix))


@dataclass(frozen=True)
class WireSwap:
    i: int
    j: int


@dataclass(frozen=True)
class WireRotation:
    """Cyclic rotation of wires ``first..last`` (inclusive).

    ``"R"`` moves the digit on ``last`` to ``first`` and shifts the rest up
    one wire; ``"L"`` is its inverse.
    """

    direction: str
    first: int
    last: int


Element = Union[CugSpec, SpanGate, WireSwap, WireRotation]


# -- full-register matrices ------------------------------------------------

def embed(profile, m: SparseMatrix, start_wire: int) -> SparseMatrix:
    """``I_left (x) m (x) I_right`` over the whole register."""
    profile = as_profile(profile)
    if m.n_rows != m.n_cols:
        raise ShapeError(f"only square matrices can be embedded, got {m.shape}")
    length = profile.span_length(start_wire, m.n_rows)
    left = profile.dim_of(0, start_wire)
    right = profile.dim_of(start_wire + length, profile.n_wires)
    factors = ([identity(left)] if left > 1 else []) + [m] + ([identity(right)] if right > 1 else [])
    return kron_all(factors)


def _digit_permutation(profile: RegisterProfile, order: Sequence[int]) -> SparseMatrix:
    """Permutation sending digits ``d`` to digits ``d[order]``."""
    digits = profile.all_digits()
    targets = np.ravel_multi_index(tuple(digits[:, list(order)].T), profile.levels)
    m = sp.csr_matrix(
        (np.ones(profile.dim, dtype=DTYPE), (targets, np.arange(profile.dim))),
        shape=(profile.dim, profile.dim),
    )
    m.sort_indices()
    return SparseMatrix(m)


def swap_wires(profile, i: int, j: int) -> SparseMatrix:
    profile = as_profile(profile)
    i, j = profile.check_wire(i), profile.check_wire(j)
    if profile[i] != profile[j]:
        raise LevelMismatchError(f"cannot swap wire {i} ({profile[i]} levels) with wire {j} ({profile[j]} levels)")
    order = list(range(profile.n_wires))
    order[i], order[j] = order[j], order[i]
    return _digit_permutation(profile, order)


def _rotation_swaps(direction: str, first: int, last: int) -> list[tuple[int, int]]:
    """Swap ladder of the rotation, in the order the swaps are applied."""
    ladder = [(w, last) for w in range(first, last)]
    if direction == "R":
        return ladder
    if direction == "L":
        return ladder[::-1]
    raise InvalidArgumentError(f"rotation direction must be 'R' or 'L', got {direction!r}")


def _check_rotation(profile: RegisterProfile, direction: str, first: int, last: int) -> None:
    first, last = profile.check_wire(first), profile.check_wire(last)
    if first > last:
        raise InvalidArgumentError(f"rotation range {first}..{last} is empty")
    _rotation_swaps(direction, first, last)
    levels = set(profile.levels[first:last + 1])
    if len(levels) > 1:
        raise LevelMismatchError(f"wires {first}..{last} mix level counts {sorted(levels)}")


def rotate_wires(profile, direction: str, wires: tuple[int, int]) -> SparseMatrix:
    """Rotation of the inclusive wire range ``wires`` as a product of swaps."""
    profile = as_profile(profile)
    first, last = wires
    _check_rotation(profile, direction, first, last)
    out = identity(profile.dim)
    for i, j in _rotation_swaps(direction, first, last):
        out = mat_mul(swap_wires(profile, i, j), out)
    return out


# -- composite permutations ------------------------------------------------

_STEP_DIRECTIONS = {"increment": 1, "decrement": 0}


def step_gate(n_wires: int, direction: str = "increment") -> SparseMatrix:
    """Qubit increment/decrement as a cascade of multi-controlled NOTs.

    For target wire ``t = 0 .. n-2`` (most significant first) a NOT fires when
    every wire below ``t`` is 1 (increment) or 0 (decrement); a final
    unconditional NOT flips the last wire. Under big-endian indexing this
    maps ``|k>`` to ``|k +/- 1 mod 2^n>``.
    """
    if int(n_wires) != n_wires or n_wires < 1:
        raise InvalidArgumentError(f"step_gate needs at least one wire, got {n_wires!r}")
    if direction not in _STEP_DIRECTIONS:
        raise InvalidArgumentError(f"direction must be 'increment' or 'decrement', got {direction!r}")
    control = _STEP_DIRECTIONS[direction]
    profile = RegisterProfile.qubits(n_wires)
    x = gates.not_gate()
    out = identity(profile.dim)
    for target in range(n_wires - 1):
        conds = [Conditional(w, control) for w in range(target + 1, n_wires)]
        m, start, _ = build_cug_span(conds, [UBlock(target, x)], profile)
        out = mat_mul(embed(profile, m, start), out)
    return mat_mul(embed(profile, x, n_wires - 1), out)


_GEN_DIRECTIONS = {"plus": 1, "minus": -1}


def generalized_step(profile, direction: str = "plus") -> SparseMatrix:
    """Qudit cascade of controlled cyclic shifts.

    For target wire ``t = 0 .. n-2`` apply ``r_shift(+1)`` (``"plus"``) or
    ``r_shift(-1)`` (``"minus"``) on ``t`` when every wire below ``t`` holds its
    top level (plus) or level 0 (minus); then shift the last wire
    unconditionally. On an all-qubit profile this equals :func:`step_gate`.
    """
    profile = as_profile(profile)
    if direction not in _GEN_DIRECTIONS:
        raise InvalidArgumentError(f"direction must be 'plus' or 'minus', got {direction!r}")
    sign = _GEN_DIRECTIONS[direction]
    n = profile.n_wires
    out = identity(profile.dim)
    for target in range(n - 1):
        conds = [
            Conditional(w, profile[w] - 1 if sign == 1 else 0) for w in range(target + 1, n)
        ]
        shift = gates.r_shift(sign, profile[target])
        m, start, _ = build_cug_span(conds, [UBlock(target, shift)], profile)
        out = mat_mul(embed(profile, m, start), out)
    return mat_mul(embed(profile, gates.r_shift(sign, profile[n - 1]), n - 1), out)


# -- per-element dispatch --------------------------------------------------

@singledispatch
def validate_element(el, profile: RegisterProfile) -> None:
    raise InvalidArgumentError(f"unsupported circuit element {type(el).__name__}")


@validate_element.register
def _(el: CugSpec, profile):
    if el.profile != profile:
        raise SpecError(f"gate profile {el.profile.levels} differs from circuit profile {profile.levels}")


@validate_element.register
def _(el: SpanGate, profile):
    if el.matrix.n_rows != el.matrix.n_cols:
        raise ShapeError(f"span gate matrix must be square, got {el.matrix.shape}")
    profile.span_length(el.start, el.matrix.n_rows)


@validate_element.register
def _(el: WireSwap, profile):
    i, j = profile.check_wire(el.i), profile.check_wire(el.j)
    if profile[i] != profile[j]:
        raise LevelMismatchError(f"cannot swap wire {i} ({profile[i]} levels) with wire {j} ({profile[j]} levels)")


@validate_element.register
def _(el: WireRotation, profile):
    _check_rotation(profile, el.direction, el.first, el.last)


@singledispatch
def element_matrix(el, profile: RegisterProfile) -> SparseMatrix:
    raise InvalidArgumentError(f"unsupported circuit element {type(el).__name__}")


@element_matrix.register
def _(el: CugSpec, profile):
    return build_cug(el)


@element_matrix.register
def _(el: SpanGate, profile):
    return embed(profile, el.matrix, el.start)


@element_matrix.register
def _(el: WireSwap, profile):
    return swap_wires(profile, el.i, el.j)


@element_matrix.register
def _(el: WireRotation, profile):
    return rotate_wires(profile, el.direction, (el.first, el.last))


@singledispatch
def apply_element(el, profile: RegisterProfile, v: np.ndarray) -> np.ndarray:
    raise InvalidArgumentError(f"unsupported circuit element {type(el).__name__}")


@apply_element.register
def _(el: CugSpec, profile, v):
    sub, first, last = el.restricted()
    m = build_cug(sub)
    return apply_local(m, v, profile.dim_of(0, first), profile.dim_of(last + 1, profile.n_wires))


@apply_element.register
def _(el: SpanGate, profile, v):
    stop = el.start + profile.span_length(el.start, el.matrix.n_rows)
    return apply_local(el.matrix, v, profile.dim_of(0, el.start), profile.dim_of(stop, profile.n_wires))


@apply_element.register
def _(el: WireSwap, profile, v):
    t = v.reshape(profile.levels)
    return np.ascontiguousarray(np.swapaxes(t, el.i, el.j)).reshape(-1)


@apply_element.register
def _(el: WireRotation, profile, v):
    t = v.reshape(profile.levels)
    if el.direction == "R":
        t = np.moveaxis(t, el.last, el.first)
    else:
        t = np.moveaxis(t, el.first, el.last)
    return np.ascontiguousarray(t).reshape(-1)


# -- circuits --------------------------------------------------------------

@dataclass(frozen=True)
class Circuit:
    profile: RegisterProfile
    elements: tuple = ()

    def __post_init__(self):
        profile = as_profile(self.profile)
        elements = tuple(self.elements)
        for k, el in enumerate(elements):
            try:
                validate_element(el, profile)
            except (ValueError, IndexError) as exc:
                raise type(exc)(f"element {k}: {exc}") from exc
        object.__setattr__(self, "profile", profile)
        object.__setattr__(self, "elements", elements)

    def __len__(self):
        return len(self.elements)

    def compile(self) -> SparseMatrix:
        return compile_circuit(self)

    def apply(self, v: StateVector) -> StateVector:
        return apply_circuit(self, v)


def compile_circuit(c: Circuit) -> SparseMatrix:
    """``M_last @ ... @ M_first``; the empty circuit is the identity."""
    out = identity(c.profile.dim)
    for el in c.elements:
        out = mat_mul(element_matrix(el, c.profile), out)
    return out


def apply_vector(c: Circuit, v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=DTYPE)
    if v.shape != (c.profile.dim,):
        raise ShapeError(f"vector of shape {v.shape} does not match register dimension {c.profile.dim}")
    for el in c.elements:
        v = apply_element(el, c.profile, v)
    return v


def apply_circuit(c: Circuit, v: StateVector) -> StateVector:
    """Run ``c`` on ``v`` element by element."""
    if v.profile != c.profile:
        raise ShapeError(f"state profile {v.profile.levels} differs from circuit profile {c.profile.levels}")
    return StateVector(c.profile, apply_vector(c, v.amplitudes))
