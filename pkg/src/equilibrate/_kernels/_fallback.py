"""Pure-numpy CSR product kernels, used when the compiled core is unavailable.

Same call signatures as the compiled module plus the COO row array, which
lets the products run as vectorized gather/scatter instead of a Python loop.
"""

import numpy as np


def csr_matvec(rows, indices, data, x, out):
    out[:] = np.bincount(rows, weights=data * x[indices], minlength=out.shape[0])


def csr_rmatvec(rows, indices, data, x, out):
    out[:] = np.bincount(indices, weights=data * x[rows], minlength=out.shape[0])
