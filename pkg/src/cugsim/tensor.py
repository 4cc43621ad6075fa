"""Sparse complex matrix algebra.

Every gate, projector and circuit matrix in the package is a
:class:`SparseMatrix`. Storage is CSR (scipy) kept in canonical form: sorted
indices, no duplicate coordinates and no stored exact zeros. Values are
treated as immutable; all operations return new matrices.
"""
from __future__ import annotations

import math
from functools import reduce
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import InvalidArgumentError, InvalidDimensionError, ShapeError

DTYPE = np.complex128
_DENSE_CUTOFF = 64


def _canonical(m: sp.spmatrix) -> sp.csr_matrix:
    m = sp.csr_matrix(m, dtype=DTYPE)
    if not m.has_canonical_format:
        m.sum_duplicates()
    m.eliminate_zeros()
    return m


class SparseMatrix:
    """Complex matrix holding only its nonzero entries.

    Construct with :meth:`from_dense`, :meth:`from_entries` or
    :meth:`from_scipy`; the bare constructor trusts its argument to already
    be canonical CSR and is meant for internal use.
    """

    __slots__ = ("_csr",)
    __array_priority__ = 20  # make ndarray @ SparseMatrix defer to us

    def __init__(self, csr: sp.csr_matrix):
        self._csr = csr

    # -- construction -----------------------------------------------------
    @classmethod
    def from_scipy(cls, m) -> "SparseMatrix":
        m = _canonical(sp.csr_matrix(m, dtype=DTYPE, copy=True))
        if m.nnz and not np.all(np.isfinite(m.data)):
            raise InvalidArgumentError("matrix entries must be finite")
        return cls(m)

    @classmethod
    def from_dense(cls, a) -> "SparseMatrix":
        a = np.asarray(a, dtype=DTYPE)
        if a.ndim != 2 or 0 in a.shape:
            raise InvalidDimensionError(f"expected a non-empty 2-D array, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise InvalidArgumentError("matrix entries must be finite")
        return cls(_canonical(sp.csr_matrix(a)))

    @classmethod
    def from_entries(cls, shape: tuple[int, int], entries: Mapping[tuple[int, int], complex]) -> "SparseMatrix":
        n_rows, n_cols = shape
        if n_rows < 1 or n_cols < 1:
            raise InvalidDimensionError(f"shape must be positive, got {shape}")
        rows, cols, vals = [], [], []
        for (r, c), v in entries.items():
            if not (0 <= r < n_rows and 0 <= c < n_cols):
                raise InvalidArgumentError(f"entry ({r}, {c}) outside shape {shape}")
            rows.append(r)
            cols.append(c)
            vals.append(v)
        vals = np.asarray(vals, dtype=DTYPE)
        if not np.all(np.isfinite(vals)):
            raise InvalidArgumentError("matrix entries must be finite")
        coo = sp.coo_matrix((vals, (rows, cols)), shape=shape, dtype=DTYPE)
        return cls(_canonical(coo))

    # -- inspection -------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self._csr.shape

    @property
    def n_rows(self) -> int:
        return self._csr.shape[0]

    @property
    def n_cols(self) -> int:
        return self._csr.shape[1]

    @property
    def nnz(self) -> int:
        return self._csr.nnz

    def entries(self) -> dict[tuple[int, int], complex]:
        coo = self._csr.tocoo()
        return {(int(r), int(c)): complex(v) for r, c, v in zip(coo.row, coo.col, coo.data)}

    def toarray(self) -> np.ndarray:
        return self._csr.toarray()

    def to_scipy(self) -> sp.csr_matrix:
        return self._csr.copy()

    def dagger(self) -> "SparseMatrix":
        return SparseMatrix(_canonical(self._csr.conj().T))

    def trace(self) -> complex:
        return complex(self._csr.diagonal().sum())

    def allclose(self, other, atol: float = 1e-12) -> bool:
        other_csr = other._csr if isinstance(other, SparseMatrix) else sp.csr_matrix(np.asarray(other, dtype=DTYPE))
        if other_csr.shape != self.shape:
            return False
        diff = self._csr - other_csr
        return diff.nnz == 0 or float(np.max(np.abs(diff.data))) <= atol

    # -- operators --------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return add_scaled(self, other, 1)

    def __sub__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return add_scaled(self, other, -1)

    def __neg__(self):
        return SparseMatrix(-self._csr)

    def __mul__(self, alpha):
        if isinstance(alpha, SparseMatrix):
            return NotImplemented
        return SparseMatrix(_canonical(self._csr * complex(alpha)))

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, SparseMatrix):
            return mat_mul(self, other)
        other = np.asarray(other)
        if other.ndim == 1:
            return mat_vec(self, other)
        return NotImplemented

    def __repr__(self):
        return f"SparseMatrix(shape={self.shape}, nnz={self.nnz})"


def _check_dim(dim: int) -> int:
    if int(dim) != dim or dim < 1:
        raise InvalidDimensionError(f"dimension must be a positive integer, got {dim!r}")
    return int(dim)


def identity(dim: int) -> SparseMatrix:
    dim = _check_dim(dim)
    return SparseMatrix(sp.identity(dim, dtype=DTYPE, format="csr"))


def zeros(n_rows: int, n_cols: int | None = None) -> SparseMatrix:
    n_rows = _check_dim(n_rows)
    n_cols = n_rows if n_cols is None else _check_dim(n_cols)
    return SparseMatrix(sp.csr_matrix((n_rows, n_cols), dtype=DTYPE))


def _kron_csr(a, b, itype):
    """CSR arrays of ``kron(a, b)`` for canonical CSR operands.

    Output rows are ``(i, k)`` pairs; inside a row the entries run over the
    entries of ``a``'s row ``i`` then ``b``'s row ``k``, which is already
    ascending in column, so the result is canonical without sorting.
    """
    a_ptr, a_idx, a_val, (m, n) = a
    b_ptr, b_idx, b_val, (p, q) = b
    la = np.diff(a_ptr)
    lb = np.diff(b_ptr)
    sizes = np.multiply.outer(la, lb).ravel()
    indptr = np.zeros(m * p + 1, dtype=itype)
    np.cumsum(sizes, out=indptr[1:])
    shape = (m * p, n * q)
    total = int(indptr[-1])
    if total == 0:
        return indptr, np.zeros(0, dtype=itype), np.zeros(0, dtype=DTYPE), shape
    if la.max() == 1:
        # one entry per row of a: plain outer order is already row-major
        indices = np.add.outer(a_idx.astype(itype) * itype(q), b_idx.astype(itype, copy=False)).ravel()
        return indptr, indices, np.multiply.outer(a_val, b_val).ravel(), shape
    block = np.repeat(np.arange(m * p, dtype=itype), sizes)
    offset = np.arange(total, dtype=itype) - indptr[block]
    i, k = np.divmod(block, itype(p))
    da, db = np.divmod(offset, lb[k].astype(itype))
    ea = a_ptr[i] + da
    eb = b_ptr[k] + db
    indices = a_idx[ea].astype(itype) * itype(q) + b_idx[eb]
    return indptr, indices, a_val[ea] * b_val[eb], shape


def kron_all(factors: Sequence[SparseMatrix]) -> SparseMatrix:
    """Kronecker product of ``factors`` in order; the first factor is the most significant."""
    factors = list(factors)
    if not factors:
        raise InvalidArgumentError("kron_all needs at least one factor")
    if len(factors) == 1:
        return factors[0]
    size = max(math.prod(f.n_rows for f in factors), math.prod(f.n_cols for f in factors))
    bound = max(size, math.prod(f.nnz for f in factors))
    itype = np.int32 if bound < 2**31 - 1 else np.int64
    parts = [(f._csr.indptr.astype(itype), f._csr.indices, f._csr.data, f.shape) for f in factors]
    # fold from the right so the single factor is the left operand
    indptr, indices, data, shape = reduce(lambda acc, f: _kron_csr(f, acc, itype), reversed(parts))
    out = sp.csr_matrix((data, indices, indptr), shape=shape, copy=False)
    out.has_sorted_indices = True
    out.has_canonical_format = True
    smallest = math.prod(float(np.min(np.abs(f._csr.data))) if f.nnz else 1.0 for f in factors)
    if smallest < 1e-290 and np.any(data == 0):  # only underflowed products can vanish
        out.eliminate_zeros()
    return SparseMatrix(out)


def add_scaled(a: SparseMatrix, b: SparseMatrix, alpha: complex = 1) -> SparseMatrix:
    """Return ``a + alpha * b``; entries that cancel exactly are dropped."""
    if a.shape != b.shape:
        raise ShapeError(f"cannot add {a.shape} and {b.shape}")
    if alpha == 1:
        out = a._csr + b._csr
    elif alpha == -1:
        out = a._csr - b._csr
    else:
        out = a._csr + b._csr * complex(alpha)
    # scipy's binop already omits zero results, so the sum stays canonical
    return SparseMatrix(out)


def mat_mul(a: SparseMatrix, b: SparseMatrix) -> SparseMatrix:
    if a.n_cols != b.n_rows:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    return SparseMatrix(_canonical(a._csr @ b._csr))


def mat_mul_chain(matrices: Iterable[SparseMatrix]) -> SparseMatrix:
    """Product of ``matrices`` taken left to right (the last one acts first)."""
    return reduce(mat_mul, matrices)


def mat_vec(m: SparseMatrix, v) -> np.ndarray:
    v = np.asarray(v, dtype=DTYPE)
    if v.ndim != 1:
        raise ShapeError(f"expected a 1-D vector, got shape {v.shape}")
    if m.n_cols != v.shape[0]:
        raise ShapeError(f"cannot apply {m.shape} matrix to vector of length {v.shape[0]}")
    return np.asarray(m._csr @ v, dtype=DTYPE)


def apply_local(m: SparseMatrix, v: np.ndarray, left: int, right: int) -> np.ndarray:
    """Apply ``I_left (x) m (x) I_right`` to ``v`` without building the full matrix."""
    dim = m.n_rows
    if m.n_cols != dim:
        raise ShapeError(f"local operator must be square, got {m.shape}")
    if left * dim * right != v.shape[0]:
        raise ShapeError(f"vector of length {v.shape[0]} does not factor as {left}*{dim}*{right}")
    t = v.reshape(left, dim, right).transpose(1, 0, 2).reshape(dim, left * right)
    t = np.asarray(m._csr @ t)
    return t.reshape(dim, left, right).transpose(1, 0, 2).reshape(-1)


def unitarity_check(m: SparseMatrix, tol: float = 1e-12) -> bool:
    """True iff every entry of ``m^dagger m - I`` has magnitude at most ``tol``."""
    if m.n_rows != m.n_cols:
        raise ShapeError(f"unitarity is defined for square matrices, got {m.shape}")
    if m.n_rows <= _DENSE_CUTOFF:
        a = m._csr.toarray()
        dev = a.conj().T @ a - np.eye(m.n_rows)
        return float(np.max(np.abs(dev))) <= tol
    gram = m._csr.conj().T @ m._csr
    dev = gram - sp.identity(m.n_rows, dtype=DTYPE, format="csr")
    if dev.nnz == 0:
        return True
    return float(np.max(np.abs(dev.data))) <= tol
