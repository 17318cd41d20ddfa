# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled scan kernel: float64 row-wise dot products over a float32 matrix."""

import numpy as np

cimport numpy as cnp


def dot_scores(const cnp.float32_t[:, ::1] matrix, const cnp.float64_t[::1] query):
    """Dot product of every float32 row against a float64 query, in float64.

    Four independent accumulators break the add latency chain; the summation
    order is fixed, so results are deterministic for a given build. They may
    differ from the fallback backend in the last few ulps, which both the
    ranking logic and the test tolerances absorb.
    """
    cdef Py_ssize_t n = matrix.shape[0]
    cdef Py_ssize_t d = matrix.shape[1]
    if query.shape[0] != d:
        raise ValueError(
            f"shape mismatch: matrix ({n}, {d}), query ({query.shape[0]},)"
        )
    out = np.empty(n, dtype=np.float64)
    cdef cnp.float64_t[::1] out_view = out
    cdef Py_ssize_t i, j
    cdef Py_ssize_t d4 = d - (d % 4)
    cdef double a0, a1, a2, a3
    with nogil:
        for i in range(n):
            a0 = 0.0
            a1 = 0.0
            a2 = 0.0
            a3 = 0.0
            for j in range(0, d4, 4):
                a0 = a0 + (<double> matrix[i, j]) * query[j]
                a1 = a1 + (<double> matrix[i, j + 1]) * query[j + 1]
                a2 = a2 + (<double> matrix[i, j + 2]) * query[j + 2]
                a3 = a3 + (<double> matrix[i, j + 3]) * query[j + 3]
            for j in range(d4, d):
                a0 = a0 + (<double> matrix[i, j]) * query[j]
            out_view[i] = (a0 + a1) + (a2 + a3)
    return out
