# cython: language_level=3
"""Compiled CSR matrix-vector kernels.

These are the hot loops: every stochastic equilibration iteration is one or
two of these products. Index arrays are int64, values float64, all C-contiguous.
"""

from libc.stdint cimport int64_t


def csr_matvec(const int64_t[::1] indptr, const int64_t[::1] indices, const double[::1] data,
               const double[::1] x, double[::1] out):
    """out[i] = sum_j A[i, j] * x[j] for CSR-stored A."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t i, k
    cdef double acc
    for i in range(n):
        acc = 0.0
        for k in range(indptr[i], indptr[i + 1]):
            acc += data[k] * x[indices[k]]
        out[i] = acc


def csr_rmatvec(const int64_t[::1] indptr, const int64_t[::1] indices, const double[::1] data,
                const double[::1] x, double[::1] out):
    """out[j] = sum_i A[i, j] * x[i]: transpose product, scattering by column."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t i, k
    cdef double xi
    out[:] = 0.0
    for i in range(n):
        xi = x[i]
        if xi == 0.0:
            continue
        for k in range(indptr[i], indptr[i + 1]):
            out[indices[k]] += data[k] * xi
