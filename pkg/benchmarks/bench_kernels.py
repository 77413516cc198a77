"""Compare the compiled product kernels against the numpy fallback.

The stochastic scaling methods spend nearly all their time in sparse
matrix-vector products, so the kernel backend decides end-to-end speed.
This script times both backends on the same matrices, first the raw
products and then a full stochastic run, and prints the speedups.

Usage:
    python3 benchmarks/bench_kernels.py [--sizes 2000,8000,20000]
                                        [--repeats 50] [--nmv 128]
"""

import argparse
import time

import numpy as np

import equilibrate._kernels as kernels
from equilibrate.corpus import CorpusSpec, generate
from equilibrate.matrix import from_sparse
from equilibrate.stochastic import ProbeSource, ssbin


def best_of(fn, repeats):
    """Smallest wall time over repeats, in seconds."""
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def with_backend(compiled, fn):
    saved = kernels._use_compiled
    kernels._use_compiled = compiled
    try:
        return fn()
    finally:
        kernels._use_compiled = saved


def bench_matrix(n, repeats, nmv):
    spec = CorpusSpec(
        "nonsymmetric_general",
        n=n,
        density=min(0.3, 10.0 / n),
        seed=n,
        scale_spread=1.0,
    )
    m = generate(spec)
    x = np.random.default_rng(0).standard_normal(n)

    times = {}
    for label, compiled in (("compiled", True), ("fallback", False)):
        times[label, "matvec"] = with_backend(
            compiled, lambda: best_of(lambda: kernels.matvec(m, x), repeats)
        )
        times[label, "rmatvec"] = with_backend(
            compiled, lambda: best_of(lambda: kernels.rmatvec(m, x), repeats)
        )
        op = from_sparse(m)
        times[label, "ssbin"] = with_backend(
            compiled,
            lambda: best_of(lambda: ssbin(op, nmv, ProbeSource(0)), max(1, repeats // 10)),
        )

    print(f"n = {n}, nnz = {m.nnz}")
    for kind in ("matvec", "rmatvec", "ssbin"):
        compiled_t = times["compiled", kind]
        fallback_t = times["fallback", kind]
        print(
            f"  {kind:<8} compiled {compiled_t * 1e3:9.3f} ms   "
            f"fallback {fallback_t * 1e3:9.3f} ms   "
            f"speedup {fallback_t / compiled_t:5.2f}x"
        )
    return times


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--sizes",
        default="2000,8000,20000",
        help="comma-separated matrix sizes (default 2000,8000,20000)",
    )
    parser.add_argument(
        "--repeats", type=int, default=50, help="timing repeats per kernel (default 50)"
    )
    parser.add_argument(
        "--nmv", type=int, default=128, help="sweeps for the end-to-end run (default 128)"
    )
    args = parser.parse_args()

    if kernels._core is None:
        print("compiled extension not available; nothing to compare")
        return

    print(f"default backend: {kernels.BACKEND}")
    for size in (int(s) for s in args.sizes.split(",")):
        bench_matrix(size, args.repeats, args.nmv)


if __name__ == "__main__":
    main()
