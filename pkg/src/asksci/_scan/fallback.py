"""Numpy fallback for the scan kernel.

einsum with an explicit float64 accumulator keeps the scores deterministic
(single-threaded, fixed summation scheme) without materializing an upcast
copy of the matrix.
"""

import numpy as np


def dot_scores(matrix: np.ndarray, query: np.ndarray) -> np.ndarray:
    """Dot product of every float32 row against a float64 query, in float64."""
    if matrix.ndim != 2 or query.ndim != 1 or matrix.shape[1] != query.shape[0]:
        raise ValueError(f"shape mismatch: matrix {matrix.shape}, query {query.shape}")
    return np.einsum("ij,j->i", matrix, query, dtype=np.float64)
