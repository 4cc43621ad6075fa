"""Elementary gate matrices.

Labels are 0-based: ``projector(a, d)`` selects ``|a>``. Where a formula is
naturally stated over 1-based row/column labels (the cyclic shifts), the
construction below follows that formula and documents the resulting action
on 0-based kets.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .errors import InvalidArgumentError, InvalidConditionalError, InvalidDimensionError
from .tensor import DTYPE, SparseMatrix, identity

_SQRT1_2 = 1 / np.sqrt(2)


def _levels(d: int, name: str = "levels") -> int:
    if int(d) != d or d < 1:
        raise InvalidDimensionError(f"{name} must be a positive integer, got {d!r}")
    return int(d)


def _sign(sign: int) -> int:
    if sign not in (1, -1):
        raise InvalidArgumentError(f"sign must be +1 or -1, got {sign!r}")
    return int(sign)


def _permutation(targets: np.ndarray) -> SparseMatrix:
    """Permutation matrix sending basis column ``k`` to row ``targets[k]``."""
    d = len(targets)
    m = sp.csr_matrix((np.ones(d, dtype=DTYPE), (targets, np.arange(d))), shape=(d, d))
    m.sort_indices()
    return SparseMatrix(m)


def projector(state: int, levels: int) -> SparseMatrix:
    """Projector onto ``|state>`` of a ``levels``-level qudit."""
    levels = _levels(levels)
    if int(state) != state or not 0 <= state < levels:
        raise InvalidConditionalError(f"state {state!r} out of range for a {levels}-level qudit")
    s = int(state)
    indptr = np.zeros(levels + 1, dtype=np.int32)
    indptr[s + 1:] = 1
    m = sp.csr_matrix((np.ones(1, dtype=DTYPE), np.array([s], dtype=np.int32), indptr), shape=(levels, levels))
    return SparseMatrix(m)


def hadamard() -> SparseMatrix:
    return SparseMatrix.from_dense([[_SQRT1_2, _SQRT1_2], [_SQRT1_2, -_SQRT1_2]])


def not_gate() -> SparseMatrix:
    return _permutation(np.array([1, 0]))


def phase_qubit(theta: float) -> SparseMatrix:
    """``diag(1, e^{i theta})``."""
    return phase_qudit([0.0, theta])


def phase_qudit(thetas: Sequence[float]) -> SparseMatrix:
    thetas = np.asarray(thetas, dtype=float)
    if thetas.ndim != 1 or thetas.size == 0:
        raise InvalidArgumentError("phase_qudit needs a non-empty list of angles")
    if not np.all(np.isfinite(thetas)):
        raise InvalidArgumentError("phase angles must be finite")
    return SparseMatrix.from_scipy(sp.diags(np.exp(1j * thetas), format="csr"))


def qft_gate(sign: int, levels: int, index_origin: int = 0) -> SparseMatrix:
    """Fourier matrix ``(1/sqrt(d)) exp(sign * 2 pi i a b / d)``.

    ``index_origin`` selects whether ``a, b`` run over ``0..d-1`` (the usual
    discrete Fourier transform, default) or over ``1..d``. The two differ by
    diagonal phases and a global phase.
    """
    sign = _sign(sign)
    levels = _levels(levels)
    if index_origin not in (0, 1):
        raise InvalidArgumentError(f"index_origin must be 0 or 1, got {index_origin!r}")
    a = np.arange(levels) + index_origin
    # reduce a*b mod d before exponentiating to keep the phases exact
    exponent = np.outer(a, a) % levels
    m = np.exp(sign * 2j * np.pi * exponent / levels) / np.sqrt(levels)
    return SparseMatrix.from_dense(m)


def grover_g(n: int) -> SparseMatrix:
    """``(G_n)_{ij} = 2/n - delta_ij``."""
    n = _levels(n, "n")
    return SparseMatrix.from_dense(np.full((n, n), 2.0 / n) - np.eye(n))


def r_shift(sign: int, levels: int) -> SparseMatrix:
    """Cyclic shift on one qudit.

    With 1-based labels, ``sign=+1`` is ``delta_{(i mod d)+1, j}`` and
    ``sign=-1`` is ``delta_{i, (j mod d)+1}``. On 0-based kets this means
    ``r_shift(+1)|k> = |k-1 mod d>`` and ``r_shift(-1)|k> = |k+1 mod d>``.
    """
    sign = _sign(sign)
    levels = _levels(levels)
    k = np.arange(levels)
    return _permutation((k - sign) % levels)


def swap_gate(levels: int) -> SparseMatrix:
    """Exchange two adjacent ``levels``-level qudits (a ``levels**2`` square matrix)."""
    d = _levels(levels)
    k = np.arange(d * d)
    hi, lo = divmod(k, d)
    return _permutation(lo * d + hi)


def identity_gate(levels: int) -> SparseMatrix:
    return identity(_levels(levels))


# name -> (constructor, parameter handling); used by the circuit file reader
GATE_NAMES = ("H", "NOT", "PHASE", "PHASEG", "QFTPLUS", "QFTMINUS", "G", "RPLUS", "RMINUS", "SWAP", "IDENTITY")


def gate_from_name(name: str, params: Sequence[float] = (), levels: int | None = None) -> SparseMatrix:
    """Build a registry gate.

    ``levels`` is the per-gate level count (ignored by the fixed qubit gates;
    for ``G`` it is the matrix dimension). ``PHASEG`` takes its dimension from
    ``len(params)``.
    """
    key = name.upper()
    params = list(params)

    def need_params(count):
        if len(params) != count:
            raise InvalidArgumentError(f"{key} takes {count} parameter(s), got {len(params)}")

    def need_levels():
        if levels is None:
            raise InvalidArgumentError(f"{key} needs a level count")
        return levels

    if key == "H":
        need_params(0)
        return hadamard()
    if key == "NOT":
        need_params(0)
        return not_gate()
    if key == "PHASE":
        need_params(1)
        return phase_qubit(params[0])
    if key == "PHASEG":
        if levels is not None and len(params) != levels:
            raise InvalidArgumentError(f"PHASEG on a {levels}-level qudit takes {levels} angles, got {len(params)}")
        return phase_qudit(params)
    if key in ("QFTPLUS", "QFTMINUS"):
        need_params(0)
        return qft_gate(1 if key == "QFTPLUS" else -1, need_levels())
    if key == "G":
        need_params(0)
        return grover_g(need_levels())
    if key in ("RPLUS", "RMINUS"):
        need_params(0)
        return r_shift(1 if key == "RPLUS" else -1, need_levels())
    if key == "SWAP":
        need_params(0)
        return swap_gate(need_levels())
    if key == "IDENTITY":
        need_params(0)
        return identity_gate(need_levels())
    raise InvalidArgumentError(f"unknown gate {name!r}; known gates: {', '.join(GATE_NAMES)}")
