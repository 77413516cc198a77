"""Kernel backend selection.

The compiled Cython core is preferred; a vectorized numpy fallback is used
when the extension is missing or EQUILIBRATE_PURE_PYTHON is set. Both expose
matvec/rmatvec with identical numerical results (same accumulation order is
not guaranteed, but both are plain float64 sums over the same terms).
"""

import os

import numpy as np

from equilibrate._kernels import _fallback

try:
    from equilibrate._kernels import _core
except ImportError:  # extension not built
    _core = None

_use_compiled = _core is not None and not os.environ.get("EQUILIBRATE_PURE_PYTHON")

BACKEND = "compiled" if _use_compiled else "fallback"


def matvec(m, x):
    """y = M @ x for a SparseMatrix m and a float64 vector x."""
    out = np.empty(m.nrows)
    if _use_compiled:
        _core.csr_matvec(m.indptr, m.indices, m.data, x, out)
    else:
        _fallback.csr_matvec(m.rows, m.indices, m.data, x, out)
    return out


def rmatvec(m, x):
    """y = M.T @ x for a SparseMatrix m and a float64 vector x."""
    out = np.empty(m.ncols)
    if _use_compiled:
        _core.csr_rmatvec(m.indptr, m.indices, m.data, x, out)
    else:
        _fallback.csr_rmatvec(m.rows, m.indices, m.data, x, out)
    return out
