"""Times the retrieval hot loop: compiled kernel vs numpy fallback.

The kernel computes float64 dot products of one query against every
stored float32 row. Run from the repository root:

    python3 benchmarks/bench_scan.py [--dim 256] [--repeats 200]
"""

import argparse
import statistics
import time

import numpy as np

from asksci._scan import BACKEND, dot_scores, fallback


def time_one(fn, matrix, query, repeats: int) -> float:
    """Median wall time in microseconds over `repeats` calls."""
    fn(matrix, query)  # warm up caches and any lazy setup
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(matrix, query)
        samples.append((time.perf_counter() - t0) * 1e6)
    return statistics.median(samples)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dim", type=int, default=256)
    parser.add_argument("--repeats", type=int, default=200)
    args = parser.parse_args()

    if BACKEND != "compiled":
        print("note: compiled kernel unavailable, both columns use the fallback")
    rng = np.random.default_rng(7)

    print(f"backend in use: {BACKEND}   dim={args.dim}   repeats={args.repeats}")
    print(f"{'rows':>8}  {'compiled µs':>12}  {'numpy µs':>12}  {'speedup':>8}  {'max |diff|':>10}")
    for rows in (1_000, 10_000, 100_000, 500_000):
        matrix = rng.standard_normal((rows, args.dim))
        matrix /= np.linalg.norm(matrix, axis=1, keepdims=True)
        matrix = matrix.astype(np.float32)
        query = rng.standard_normal(args.dim)
        query /= np.linalg.norm(query)

        compiled_us = time_one(dot_scores, matrix, query, args.repeats)
        numpy_us = time_one(fallback.dot_scores, matrix, query, args.repeats)
        diff = float(
            np.max(np.abs(dot_scores(matrix, query) - fallback.dot_scores(matrix, query)))
        )
        print(
            f"{rows:>8}  {compiled_us:>12.1f}  {numpy_us:>12.1f}"
            f"  {numpy_us / compiled_us:>7.2f}x  {diff:>10.2e}"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
