"""Element-access equilibration baselines.

The alternating row/column scaling iteration drives a nonnegative square
matrix toward doubly stochastic form; the symmetric variant iterates a single
vector whose benign even/odd oscillation is resolved by pairing adjacent
iterates under a geometric mean. On top of these sit 2-norm equilibration of
signed matrices, Jacobi scaling, and one-pass infinity-norm scaling.
"""

from dataclasses import dataclass, field

import numpy as np

from equilibrate.errors import DimensionMismatch, ZeroRowOrColumn
from equilibrate.matrix import DiagonalScaling, SparseMatrix, elementwise_square, scale


@dataclass(frozen=True)
class ExactOptions:
    """Stopping rule: max deviation of scaled row/column sums from 1."""

    tol: float = 1e-10
    max_iters: int = 10000

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")


@dataclass
class ConvergenceHistory:
    """Per-iteration (iteration, max row-sum deviation, max column-sum deviation)."""

    records: list = field(default_factory=list)
    converged: bool = False

    @property
    def iterations(self):
        return len(self.records)


def _require_square(m):
    if m.nrows != m.ncols:
        raise DimensionMismatch("equilibration requires a square matrix")


def _check_nonnegative(b):
    if b.data.size and b.data.min() < 0.0:
        raise ValueError("this iteration requires a nonnegative matrix")


def _usable(dev, *vectors):
    return np.isfinite(dev) and all(
        np.all(np.isfinite(v)) and np.all(v > 0.0) for v in vectors
    )


def sinkhorn_knopp(b, opts=None, c0=None, on_iteration=None):
    """Alternate reciprocal row/column scaling of a nonnegative square matrix.

    Returns (DiagonalScaling, ConvergenceHistory); on convergence the scaled
    matrix R B C has all row and column sums within opts.tol of 1. If the
    budget runs out (which includes patterns whose scaling vectors diverge),
    the best iterate seen is returned with history.converged False rather
    than raising.
    """
    opts = opts or ExactOptions()
    _require_square(b)
    _check_nonnegative(b)
    n = b.nrows
    c = np.ones(n) if c0 is None else np.ascontiguousarray(c0, dtype=np.float64)
    if c.shape != (n,) or np.any(c <= 0):
        raise ValueError("starting vector must be positive of matching size")

    t = b.matvec(c)
    if np.any(t == 0.0):
        raise ZeroRowOrColumn("matrix has a zero row")
    history = ConvergenceHistory()
    best = None
    best_dev = np.inf
    for k in range(1, opts.max_iters + 1):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            r = 1.0 / t
            u = b.rmatvec(r)
            if k == 1 and np.any(u == 0.0):
                raise ZeroRowOrColumn("matrix has a zero column")
            c = 1.0 / u
            t = b.matvec(c)  # reused by the next iteration
            row_dev = float(np.max(np.abs(r * t - 1.0)))
            col_dev = float(np.max(np.abs(c * u - 1.0)))
        history.records.append((k, row_dev, col_dev))
        dev = max(row_dev, col_dev)
        if dev < best_dev and _usable(dev, r, c):
            best, best_dev = (r.copy(), c.copy()), dev
        if on_iteration is not None:
            on_iteration(k, r, c)
        if dev < opts.tol:
            history.converged = True
            break
    if best is None:
        raise ZeroRowOrColumn("scaling vectors degenerated before any usable iterate")
    return DiagonalScaling(best[0], best[1]), history


def sym_sk_step(b, y):
    """One reciprocal step of the symmetric iteration: y -> 1 / (B y)."""
    t = b.matvec(y)
    if np.any(t == 0.0):
        raise ZeroRowOrColumn("matrix has a zero row")
    return 1.0 / t


def sym_sinkhorn_knopp(b, opts=None, y0=None, on_iteration=None):
    """Symmetric scaling of a symmetric nonnegative matrix.

    Only the reciprocal iterate y is advanced; each convergence check (and
    the returned vector) pairs adjacent iterates as x = sqrt(y_new * y_old),
    which cancels the even/odd oscillation of y. On convergence X B X has
    row sums within opts.tol of 1.
    """
    opts = opts or ExactOptions()
    _require_square(b)
    _check_nonnegative(b)
    if not b.is_symmetric():
        raise DimensionMismatch("symmetric iteration requires a symmetric matrix")
    n = b.nrows
    y = np.ones(n) if y0 is None else np.ascontiguousarray(y0, dtype=np.float64)
    if y.shape != (n,) or np.any(y <= 0):
        raise ValueError("starting vector must be positive of matching size")

    history = ConvergenceHistory()
    best = None
    best_dev = np.inf
    for k in range(1, opts.max_iters + 1):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            y_new = sym_sk_step(b, y)
            x = np.sqrt(y_new * y)
            dev = float(np.max(np.abs(x * b.matvec(x) - 1.0)))
        history.records.append((k, dev, dev))
        if dev < best_dev and _usable(dev, x):
            best, best_dev = x, dev
        if on_iteration is not None:
            on_iteration(k, x)
        if dev < opts.tol:
            history.converged = True
            break
        y = y_new
    if best is None:
        raise ZeroRowOrColumn("scaling vector degenerated before any usable iterate")
    return best, history


def equilibrate_2norm(a, opts=None, symmetric=None):
    """Scale a signed square matrix to unit row and column 2-norms.

    Runs the 1-norm iteration on the elementwise square and returns the
    square roots of its scaling, so the scaled signed matrix has unit row
    and column 2-norms. ``symmetric`` forces the dispatch; by default the
    symmetric single-vector iteration is used whenever the input is
    symmetric.
    """
    _require_square(a)
    if symmetric is None:
        symmetric = a.is_symmetric()
    b = elementwise_square(a)
    if symmetric:
        x, _ = sym_sinkhorn_knopp(b, opts)
        return DiagonalScaling.symmetric(np.sqrt(x))
    s, _ = sinkhorn_knopp(b, opts)
    return DiagonalScaling(np.sqrt(s.left), np.sqrt(s.right))


def jacobi_scale(a):
    """Symmetric scaling to unit-magnitude diagonal.

    The factor at index i is 1/sqrt(|a_ii|); a zero diagonal element gets
    factor exactly 1, so it stays zero in the scaled matrix.
    """
    _require_square(a)
    if not a.is_symmetric():
        raise DimensionMismatch("Jacobi scaling requires a symmetric matrix")
    diag = a.diagonal()
    safe = np.where(diag != 0.0, np.abs(diag), 1.0)
    scaling = DiagonalScaling.symmetric(1.0 / np.sqrt(safe))
    return scaling, scale(a, scaling)


def inf_norm_scale(a):
    """One-pass infinity-norm scaling: rows to unit max-abs, then columns.

    After the row pass every entry is at most 1 in magnitude, so the column
    pass cannot push any row maximum above 1: a single sweep equilibrates
    both sides in the infinity norm.
    """
    absdata = np.abs(a.data)
    row_max = np.zeros(a.nrows)
    np.maximum.at(row_max, a.rows, absdata)
    if np.any(row_max == 0.0):
        raise ZeroRowOrColumn("matrix has a zero row")
    left = 1.0 / row_max
    col_max = np.zeros(a.ncols)
    np.maximum.at(col_max, a.indices, left[a.rows] * absdata)
    if np.any(col_max == 0.0):
        raise ZeroRowOrColumn("matrix has a zero column")
    return DiagonalScaling(left, 1.0 / col_max)
