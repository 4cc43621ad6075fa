"""Controlled unitary gates over mixed-level qudit registers.

A gate applies its U-blocks iff every conditional wire holds its required
basis level, and acts as the identity otherwise. Two builders are provided:

* :func:`build_cug` uses the irreducible form
  ``I_D + K_active - K_inactive``, where ``K_active`` is the Kronecker product
  of the matching projectors, the U-blocks and identities on free wires, and
  ``K_inactive`` is the same product with every U-block replaced by an
  identity. It always costs two full-size additions.
* :func:`build_cug_naive` sums one Kronecker term per assignment of
  projectors to the conditional wires (``prod(levels of conditional wires)``
  terms). It serves as the reference for :func:`build_cug` and as the
  baseline in benchmarks.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import gates
from .errors import InvalidConditionalError, NotUnitaryError, SpecError
from .register import RegisterProfile, as_profile
from .tensor import SparseMatrix, add_scaled, identity, kron_all, unitarity_check

DEFAULT_UNITARY_TOL = 1e-10


@dataclass(frozen=True)
class Conditional:
    """Require ``wire`` to hold the 0-based level ``state``."""

    wire: int
    state: int


@dataclass(frozen=True)
class UBlock:
    """Unitary ``matrix`` on the consecutive wires starting at ``start``."""

    start: int
    matrix: SparseMatrix

    def __post_init__(self):
        if not isinstance(self.matrix, SparseMatrix):
            object.__setattr__(self, "matrix", SparseMatrix.from_dense(self.matrix))
        if self.matrix.n_rows != self.matrix.n_cols:
            raise SpecError(f"U-block at wire {self.start} is not square: {self.matrix.shape}")


def _as_conditional(c) -> Conditional:
    return c if isinstance(c, Conditional) else Conditional(*c)


def _as_ublock(u) -> UBlock:
    return u if isinstance(u, UBlock) else UBlock(*u)


@dataclass(frozen=True)
class CugSpec:
    """Conditionals and U-blocks of one controlled unitary gate on ``profile``.

    ``conditionals`` accepts :class:`Conditional` or ``(wire, state)`` pairs;
    ``ublocks`` accepts :class:`UBlock` or ``(start, matrix)`` pairs.
    """

    profile: RegisterProfile
    conditionals: tuple[Conditional, ...] = ()
    ublocks: tuple[UBlock, ...] = ()
    spans: tuple[tuple[int, int], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        profile = as_profile(self.profile)
        conds = tuple(_as_conditional(c) for c in self.conditionals)
        blocks = tuple(_as_ublock(u) for u in self.ublocks)
        object.__setattr__(self, "profile", profile)
        object.__setattr__(self, "conditionals", conds)
        object.__setattr__(self, "ublocks", blocks)

        if not blocks:
            raise SpecError("a controlled gate needs at least one U-block")
        owner: dict[int, str] = {}
        for c in conds:
            try:
                profile.check_wire(c.wire)
            except IndexError as exc:
                raise SpecError(f"conditional {c}: {exc}") from None
            if int(c.state) != c.state or not 0 <= c.state < profile[c.wire]:
                raise InvalidConditionalError(
                    f"conditional on wire {c.wire} requires state {c.state!r}, "
                    f"but the wire has {profile[c.wire]} levels"
                )
            if c.wire in owner:
                raise SpecError(f"wire {c.wire} carries more than one conditional")
            owner[c.wire] = "conditional"

        spans = []
        for k, u in enumerate(blocks):
            try:
                profile.check_wire(u.start)
            except IndexError as exc:
                raise SpecError(f"U-block {k}: {exc}") from None
            length = profile.span_length(u.start, u.matrix.n_rows)
            span = (u.start, u.start + length)
            for w in range(*span):
                if w in owner:
                    raise SpecError(f"U-block {k} on wires {span[0]}..{span[1] - 1} overlaps the {owner[w]} on wire {w}")
                owner[w] = f"U-block {k}"
            spans.append(span)
        object.__setattr__(self, "spans", tuple(spans))

    @property
    def dim(self) -> int:
        return self.profile.dim

    def referenced_range(self) -> tuple[int, int]:
        """Smallest ``(first, last)`` wire range (inclusive) touched by the gate."""
        wires = [c.wire for c in self.conditionals]
        for start, stop in self.spans:
            wires += [start, stop - 1]
        return min(wires), max(wires)

    def restricted(self) -> tuple["CugSpec", int, int]:
        """The same gate on the sub-profile of :meth:`referenced_range`."""
        first, last = self.referenced_range()
        sub = CugSpec(
            self.profile.sub(first, last + 1),
            tuple(Conditional(c.wire - first, c.state) for c in self.conditionals),
            tuple(UBlock(u.start - first, u.matrix) for u in self.ublocks),
        )
        return sub, first, last

    def is_active(self, digits: Sequence[int]) -> bool:
        return all(digits[c.wire] == c.state for c in self.conditionals)


@dataclass(frozen=True)
class CugStats:
    """Work done by one :func:`build_cug` call."""

    full_additions: int
    kron_factors: tuple[int, ...]
    dim: int


class DecompositionTerms(NamedTuple):
    identity: SparseMatrix
    active: SparseMatrix
    inactive: SparseMatrix


def _validate_unitaries(spec: CugSpec, tol: float) -> None:
    for k, u in enumerate(spec.ublocks):
        if not unitarity_check(u.matrix, tol):
            raise NotUnitaryError(f"U-block {k} at wire {u.start} is not unitary within {tol:g}")


def _factor_lists(spec: CugSpec) -> tuple[list[SparseMatrix], list[SparseMatrix]]:
    """Kronecker factors of the active and inactive terms, runs of free wires merged."""
    profile = spec.profile
    cond = {c.wire: c.state for c in spec.conditionals}
    block_at = {start: (k, stop) for k, (start, stop) in enumerate(spec.spans)}
    active, inactive = [], []
    free_dim = 1

    def flush():
        nonlocal free_dim
        if free_dim > 1:
            eye = identity(free_dim)
            active.append(eye)
            inactive.append(eye)
        free_dim = 1

    w = 0
    while w < profile.n_wires:
        if w in block_at:
            flush()
            k, stop = block_at[w]
            u = spec.ublocks[k].matrix
            active.append(u)
            inactive.append(identity(u.n_rows))
            w = stop
        elif w in cond:
            flush()
            p = gates.projector(cond[w], profile[w])
            active.append(p)
            inactive.append(p)
            w += 1
        else:
            free_dim *= profile[w]
            w += 1
    flush()
    return active, inactive


def _shared_krons(active: list[SparseMatrix], inactive: list[SparseMatrix]) -> tuple[SparseMatrix, SparseMatrix]:
    """Both Kronecker terms, with the factors they share outside the U-blocks multiplied once."""
    lo = 0
    while active[lo] is inactive[lo]:
        lo += 1
    hi = len(active)
    while active[hi - 1] is inactive[hi - 1]:
        hi -= 1
    left = [kron_all(active[:lo])] if lo else []
    right = [kron_all(active[hi:])] if hi < len(active) else []
    return kron_all(left + active[lo:hi] + right), kron_all(left + inactive[lo:hi] + right)


def decomposition_terms(spec: CugSpec, unitary_tol: float = DEFAULT_UNITARY_TOL) -> DecompositionTerms:
    """``(I_D, K_active, K_inactive)`` with ``gate = I_D + K_active - K_inactive``."""
    _validate_unitaries(spec, unitary_tol)
    active, inactive = _factor_lists(spec)
    return DecompositionTerms(identity(spec.dim), *_shared_krons(active, inactive))


def build_cug(spec: CugSpec, unitary_tol: float = DEFAULT_UNITARY_TOL, return_stats: bool = False):
    """Matrix of the gate via the irreducible two-addition form.

    With ``return_stats=True`` returns ``(matrix, CugStats)``.
    """
    _validate_unitaries(spec, unitary_tol)
    active, inactive = _factor_lists(spec)
    k_active, k_inactive = _shared_krons(active, inactive)
    additions = 0
    out = add_scaled(identity(spec.dim), k_active, 1)
    additions += 1
    out = add_scaled(out, k_inactive, -1)
    additions += 1
    if return_stats:
        return out, CugStats(additions, (len(active), len(inactive)), spec.dim)
    return out


def naive_terms(spec: CugSpec) -> Iterable[list[SparseMatrix]]:
    """Kronecker factor lists of every projector assignment, one per term."""
    profile = spec.profile
    cond_wires = [c.wire for c in spec.conditionals]
    required = tuple(c.state for c in spec.conditionals)
    block_at = {start: (k, stop) for k, (start, stop) in enumerate(spec.spans)}
    for assignment in itertools.product(*(range(profile[w]) for w in cond_wires)):
        chosen = dict(zip(cond_wires, assignment))
        carries_u = assignment == required
        factors = []
        w = 0
        while w < profile.n_wires:
            if w in block_at:
                k, stop = block_at[w]
                u = spec.ublocks[k].matrix
                factors.append(u if carries_u else identity(u.n_rows))
                w = stop
            else:
                if w in chosen:
                    factors.append(gates.projector(chosen[w], profile[w]))
                else:
                    factors.append(identity(profile[w]))
                w += 1
        yield factors


def build_cug_naive(spec: CugSpec, unitary_tol: float = DEFAULT_UNITARY_TOL) -> SparseMatrix:
    """Matrix of the gate as the sum over all projector assignments."""
    _validate_unitaries(spec, unitary_tol)
    total = None
    for factors in naive_terms(spec):
        term = kron_all(factors)
        total = term if total is None else add_scaled(total, term, 1)
    return total


def naive_term_count(spec: CugSpec) -> int:
    return int(np.prod([spec.profile[c.wire] for c in spec.conditionals], dtype=np.int64))


def build_cug_span(conditionals, ublocks, profile, unitary_tol: float = DEFAULT_UNITARY_TOL):
    """Gate matrix over only the wires it references.

    Wire indices refer to the full ``profile``. Returns
    ``(matrix, span_start, span_end)`` with ``span_end`` inclusive; embed the
    matrix at ``span_start`` to recover :func:`build_cug` on the full register.
    """
    spec = CugSpec(as_profile(profile), tuple(conditionals), tuple(ublocks))
    sub, first, last = spec.restricted()
    return build_cug(sub, unitary_tol), first, last


# -- symbolic rendering ----------------------------------------------------

_SUB = str.maketrans("0123456789,", "₀₁₂₃₄₅₆₇₈₉,")


def _sub(x) -> str:
    return str(x).translate(_SUB)


def decomposition_symbols(spec: CugSpec, unicode: bool = True) -> tuple[str, list[str], list[str]]:
    """Per-wire factor labels of the identity, active and inactive terms.

    All-qubit registers use ``P0``/``P1``; otherwise projectors are labelled
    ``P_{a,b}`` with 1-based ``a`` (``P_{a,b}`` selects ``|a-1>`` of a
    ``b``-level wire). U-blocks spanning several wires get one label.
    """
    sub = _sub if unicode else (lambda x: str(x))
    profile = spec.profile
    qubits = all(lv == 2 for lv in profile.levels)
    cond = {c.wire: c.state for c in spec.conditionals}
    block_at = {start: (k, stop) for k, (start, stop) in enumerate(spec.spans)}
    many = len(spec.ublocks) > 1
    active, inactive = [], []
    w = 0
    while w < profile.n_wires:
        if w in block_at:
            k, stop = block_at[w]
            active.append("U" + (sub(k + 1) if many else ""))
            inactive.append("I" + sub(spec.ublocks[k].matrix.n_rows))
            w = stop
            continue
        if w in cond:
            if qubits:
                label = "P" + sub(cond[w])
            else:
                label = "P" + sub(f"{cond[w] + 1},{profile[w]}")
            active.append(label)
            inactive.append(label)
        else:
            active.append("I" + sub(profile[w]))
            inactive.append("I" + sub(profile[w]))
        w += 1
    return "I" + sub(spec.dim), active, inactive


def format_decomposition(spec: CugSpec, unicode: bool = True) -> str:
    ident, active, inactive = decomposition_symbols(spec, unicode)
    if unicode:
        return f"{ident} + {'⊗'.join(active)} − {'⊗'.join(inactive)}"
    return f"{ident} + {' (x) '.join(active)} - {' (x) '.join(inactive)}"
