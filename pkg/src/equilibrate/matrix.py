"""Sparse matrices, diagonal scalings, and the matrix-free operator type.

`SparseMatrix` is a CSR-backed explicit matrix used by the exact algorithms,
structure checks, and diagnostics. `LinearOperator` is the product-only view
of a matrix: the stochastic algorithms accept nothing else, so they cannot
read elements even by accident.
"""

from dataclasses import dataclass

import numpy as np

from equilibrate import _kernels
from equilibrate.errors import DimensionMismatch


def _freeze(a):
    a.setflags(write=False)
    return a


class SparseMatrix:
    """Immutable sparse matrix in canonical CSR form.

    Construction accepts entries in any order; duplicate (row, col) pairs are
    summed (Matrix Market convention) and explicitly zero values are dropped.
    Stored arrays are row-major sorted with unique keys, int64 indices, and
    float64 values, shared read-only.
    """

    __slots__ = ("nrows", "ncols", "indptr", "indices", "data", "rows")

    def __init__(self, nrows, ncols, entries=()):
        entries = list(entries)
        rows = np.array([e[0] for e in entries], dtype=np.int64)
        cols = np.array([e[1] for e in entries], dtype=np.int64)
        vals = np.array([e[2] for e in entries], dtype=np.float64)
        self._build(nrows, ncols, rows, cols, vals)

    @classmethod
    def from_coo(cls, nrows, ncols, rows, cols, vals):
        """Build from parallel coordinate arrays (duplicates summed)."""
        m = cls.__new__(cls)
        m._build(
            nrows,
            ncols,
            np.asarray(rows, dtype=np.int64).ravel(),
            np.asarray(cols, dtype=np.int64).ravel(),
            np.asarray(vals, dtype=np.float64).ravel(),
        )
        return m

    @classmethod
    def from_dense(cls, array):
        array = np.asarray(array, dtype=np.float64)
        if array.ndim != 2:
            raise DimensionMismatch("dense input must be 2-D")
        rows, cols = np.nonzero(array)
        return cls.from_coo(array.shape[0], array.shape[1], rows, cols, array[rows, cols])

    def _build(self, nrows, ncols, rows, cols, vals):
        if nrows <= 0 or ncols <= 0:
            raise DimensionMismatch("matrix dimensions must be positive")
        if not (rows.size == cols.size == vals.size):
            raise DimensionMismatch("coordinate arrays must have equal length")
        if rows.size:
            if rows.min() < 0 or rows.max() >= nrows:
                raise DimensionMismatch("row index out of range")
            if cols.min() < 0 or cols.max() >= ncols:
                raise DimensionMismatch("column index out of range")
            key = rows * np.int64(ncols) + cols
            order = np.argsort(key, kind="stable")
            key = key[order]
            vals = vals[order]
            uniq, start = np.unique(key, return_index=True)
            sums = np.add.reduceat(vals, start)
            keep = sums != 0.0
            uniq, sums = uniq[keep], sums[keep]
            rows = uniq // ncols
            cols = uniq % ncols
            vals = sums
        self.nrows = int(nrows)
        self.ncols = int(ncols)
        self.rows = _freeze(np.ascontiguousarray(rows, dtype=np.int64))
        self.indices = _freeze(np.ascontiguousarray(cols, dtype=np.int64))
        self.data = _freeze(np.ascontiguousarray(vals, dtype=np.float64))
        counts = np.bincount(self.rows, minlength=self.nrows)
        indptr = np.zeros(self.nrows + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        self.indptr = _freeze(indptr)

    @property
    def nnz(self):
        return self.data.size

    @property
    def entries(self):
        """Entries as a row-major list of (row, col, value) triplets."""
        return list(zip(self.rows.tolist(), self.indices.tolist(), self.data.tolist()))

    def matvec(self, x):
        x = np.ascontiguousarray(x, dtype=np.float64)
        if x.shape != (self.ncols,):
            raise DimensionMismatch(f"expected vector of length {self.ncols}")
        return _kernels.matvec(self, x)

    def rmatvec(self, x):
        x = np.ascontiguousarray(x, dtype=np.float64)
        if x.shape != (self.nrows,):
            raise DimensionMismatch(f"expected vector of length {self.nrows}")
        return _kernels.rmatvec(self, x)

    def to_dense(self):
        out = np.zeros((self.nrows, self.ncols))
        out[self.rows, self.indices] = self.data
        return out

    def diagonal(self):
        """Main diagonal as a dense vector (zeros where no entry is stored)."""
        out = np.zeros(min(self.nrows, self.ncols))
        on_diag = self.rows == self.indices
        out[self.rows[on_diag]] = self.data[on_diag]
        return out

    def transpose(self):
        return SparseMatrix.from_coo(self.ncols, self.nrows, self.indices, self.rows, self.data)

    def is_square(self):
        return self.nrows == self.ncols

    def is_symmetric(self):
        """Exact symmetry of both pattern and values."""
        if self.nrows != self.ncols:
            return False
        t = self.transpose()
        return (
            np.array_equal(self.rows, t.rows)
            and np.array_equal(self.indices, t.indices)
            and np.array_equal(self.data, t.data)
        )

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (
            self.nrows == other.nrows
            and self.ncols == other.ncols
            and np.array_equal(self.rows, other.rows)
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.data, other.data)
        )

    __hash__ = None

    def __repr__(self):
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={self.nnz})"


@dataclass(frozen=True)
class DiagonalScaling:
    """Left/right positive diagonal scaling vectors (equal for symmetric use)."""

    left: np.ndarray
    right: np.ndarray

    def __post_init__(self):
        left = _freeze(np.ascontiguousarray(self.left, dtype=np.float64))
        right = _freeze(np.ascontiguousarray(self.right, dtype=np.float64))
        for name, v in (("left", left), ("right", right)):
            if v.ndim != 1:
                raise DimensionMismatch(f"{name} scaling must be a vector")
            if not np.all(np.isfinite(v)) or np.any(v <= 0.0):
                raise ValueError(f"{name} scaling must be strictly positive and finite")
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)

    @classmethod
    def symmetric(cls, x):
        x = np.ascontiguousarray(x, dtype=np.float64)
        return cls(x, x)

    @classmethod
    def identity(cls, nrows, ncols=None):
        return cls(np.ones(nrows), np.ones(nrows if ncols is None else ncols))


class LinearOperator:
    """A matrix exposed only through y = A x and y = A^T x.

    `apply` and `apply_transpose` wrap the supplied callables with shape
    checks; the callables themselves must be deterministic and, for the
    adjoint pair to be consistent, satisfy u.(A v) == (A^T u).v up to
    roundoff. Instances hold no element data and are safe to share across
    threads as long as the callables are.
    """

    __slots__ = ("nrows", "ncols", "_apply", "_apply_transpose")

    def __init__(self, nrows, ncols, apply, apply_transpose):
        if nrows <= 0 or ncols <= 0:
            raise DimensionMismatch("operator dimensions must be positive")
        self.nrows = int(nrows)
        self.ncols = int(ncols)
        self._apply = apply
        self._apply_transpose = apply_transpose

    def apply(self, x):
        x = np.ascontiguousarray(x, dtype=np.float64)
        if x.shape != (self.ncols,):
            raise DimensionMismatch(f"expected vector of length {self.ncols}")
        y = np.asarray(self._apply(x), dtype=np.float64)
        if y.shape != (self.nrows,):
            raise DimensionMismatch("apply callback returned a wrong-sized vector")
        return y

    def apply_transpose(self, x):
        x = np.ascontiguousarray(x, dtype=np.float64)
        if x.shape != (self.nrows,):
            raise DimensionMismatch(f"expected vector of length {self.nrows}")
        y = np.asarray(self._apply_transpose(x), dtype=np.float64)
        if y.shape != (self.ncols,):
            raise DimensionMismatch("apply_transpose callback returned a wrong-sized vector")
        return y

    def __repr__(self):
        return f"LinearOperator({self.nrows}x{self.ncols})"


def from_sparse(m):
    """Product-only operator backed by an explicit sparse matrix."""
    return LinearOperator(m.nrows, m.ncols, m.matvec, m.rmatvec)


def elementwise_square(m):
    """Entrywise square, preserving the sparsity pattern."""
    squared = m.data * m.data
    out = SparseMatrix.__new__(SparseMatrix)
    out.nrows, out.ncols = m.nrows, m.ncols
    out.indptr, out.rows, out.indices = m.indptr, m.rows, m.indices
    out.data = _freeze(squared)
    if not squared.all():  # squaring underflowed somewhere; re-canonicalize
        return SparseMatrix.from_coo(m.nrows, m.ncols, m.rows, m.indices, squared)
    return out


def scale(m, s):
    """Diagonally scaled copy: entry (i, j) becomes left[i] * m[i, j] * right[j]."""
    if s.left.shape != (m.nrows,) or s.right.shape != (m.ncols,):
        raise DimensionMismatch("scaling vectors do not conform to the matrix")
    # Group the two diagonal factors so a symmetric scaling of a symmetric
    # matrix stays bitwise symmetric: v * (l_i * r_j) mirrors exactly,
    # (v * l_i) * r_j does not.
    data = m.data * (s.left[m.rows] * s.right[m.indices])
    if not data.all():  # positive factors can still underflow to zero
        return SparseMatrix.from_coo(m.nrows, m.ncols, m.rows, m.indices, data)
    out = SparseMatrix.__new__(SparseMatrix)
    out.nrows, out.ncols = m.nrows, m.ncols
    out.indptr, out.rows, out.indices = m.indptr, m.rows, m.indices
    out.data = _freeze(data)
    return out
