"""Benchmark the compiled block-value kernel against the numpy fallback.

The kernel is the hot inner loop of the summing-norm estimator: one call
evaluates the nested norm of a masked operator-value grid.  At desk-scale
dimensions the numpy route is dominated by per-call overhead, which is what
the fused C loops remove.

Run:  python benchmarks/bench_kernels.py
The end-to-end section re-executes this script in a subprocess per backend
(the backend is fixed at import time).
"""

import math
import os
import subprocess
import sys
import time

import numpy as np

from blocknorm.kernels import compiled_available, reference

try:
    from blocknorm.kernels import _fastkern
except ImportError:
    _fastkern = None

STRONG, SUP = reference.STRONG, reference.SUP


def bench(fn, *args, repeats=2000):
    fn(*args)  # warm up
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn(*args)
    return (time.perf_counter() - t0) / repeats


def compiled_call_2(tensor, s1, s2, mask, kinds, qs, f_p):
    return _fastkern.block_value_2(tensor, s1, s2, mask, kinds[0], qs[0],
                                   kinds[1], qs[1],
                                   1.0 if math.isinf(f_p) else f_p,
                                   math.isinf(f_p))


def compiled_call_3(tensor, s1, s2, s3, mask, kinds, qs, f_p):
    return _fastkern.block_value_3(tensor, s1, s2, s3, mask, kinds[0], qs[0],
                                   kinds[1], qs[1], kinds[2], qs[2],
                                   1.0 if math.isinf(f_p) else f_p,
                                   math.isinf(f_p))


def case_2(rng, k=24, m=4, mf=3):
    tensor = rng.standard_normal((m, m, mf))
    s1 = rng.standard_normal((k, m))
    s2 = rng.standard_normal((k, m))
    mask = (rng.random((k, k)) < 0.6).astype(np.uint8)
    mask[0, 0] = 1
    return tensor, s1, s2, mask


def case_3(rng, k=10, m=3, mf=2):
    tensor = rng.standard_normal((m, m, m, mf))
    mats = [rng.standard_normal((k, m)) for _ in range(3)]
    mask = (rng.random((k, k, k)) < 0.6).astype(np.uint8)
    mask[0, 0, 0] = 1
    return tensor, mats, mask


def time_estimator():
    """One representative summing-norm estimation; prints seconds."""
    from blocknorm import (FiniteLpSpace, Strong, make_block, summing_norm)
    from blocknorm._sampling import random_operator
    from blocknorm.kernels import BACKEND

    doms = (FiniteLpSpace(4, 1), FiniteLpSpace(4, "inf"))
    T = random_operator(doms, FiniteLpSpace(3, 2), seed=42)
    block = make_block("full", (6, 6))
    summing_norm(T, block, (Strong(1), Strong(1)), [Strong(2), Strong(2)],
                 truncation=4, budget=8, seed=0)  # warm up
    t0 = time.perf_counter()
    est = summing_norm(T, block, (Strong(1), Strong(1)),
                       [Strong(2), Strong(2)], truncation=4, budget=16,
                       seed=0)
    dt = time.perf_counter() - t0
    print(f"estimator[{BACKEND}]: {dt:.3f}s (value {est.value:.6f})")


def bench_end_to_end():
    print("\nend-to-end summing-norm estimation:")
    sys.stdout.flush()
    backends = ["python"] + (["compiled"] if compiled_available() else [])
    for backend in backends:
        env = dict(os.environ, BLOCKNORM_BACKEND=backend)
        subprocess.run([sys.executable, __file__, "--estimator"], env=env,
                       check=True)


def main():
    if "--estimator" in sys.argv:
        time_estimator()
        return
    rng = np.random.default_rng(7)
    print(f"compiled kernels available: {compiled_available()}")
    rows = []

    tensor, s1, s2, mask = case_2(rng)
    kinds, qs, f_p = (STRONG, STRONG), (2.0, 1.0), 2.0
    t_py = bench(reference.block_value_dense, tensor, [s1, s2], mask, kinds,
                 qs, f_p)
    ref = reference.block_value_dense(tensor, [s1, s2], mask, kinds, qs, f_p)
    if _fastkern is not None:
        t_c = bench(compiled_call_2, tensor, s1, s2, mask, kinds, qs, f_p)
        val = compiled_call_2(tensor, s1, s2, mask, kinds, qs, f_p)
        assert abs(val - ref) <= 1e-10 * max(1.0, abs(ref)), (val, ref)
    else:
        t_c = None
    rows.append(("n=2, k=24, m=4, strong(2)/strong(1)", t_py, t_c))

    tensor, mats, mask = case_3(rng)
    kinds, qs, f_p = (STRONG, SUP, STRONG), (1.0, 1.0, 2.0), math.inf
    t_py = bench(reference.block_value_dense, tensor, mats, mask, kinds, qs,
                 f_p, repeats=500)
    ref = reference.block_value_dense(tensor, mats, mask, kinds, qs, f_p)
    if _fastkern is not None:
        t_c = bench(compiled_call_3, tensor, *mats, mask, kinds, qs, f_p,
                    repeats=500)
        val = compiled_call_3(tensor, *mats, mask, kinds, qs, f_p)
        assert abs(val - ref) <= 1e-10 * max(1.0, abs(ref)), (val, ref)
    else:
        t_c = None
    rows.append(("n=3, k=10, m=3, strong(1)/sup/strong(2)", t_py, t_c))

    print(f"{'case':45s} {'numpy':>12s} {'compiled':>12s} {'speedup':>9s}")
    for name, t_py, t_c in rows:
        if t_c is None:
            print(f"{name:45s} {t_py * 1e6:10.1f}us {'-':>12s} {'-':>9s}")
        else:
            print(f"{name:45s} {t_py * 1e6:10.1f}us {t_c * 1e6:10.1f}us "
                  f"{t_py / t_c:8.1f}x")
    bench_end_to_end()


if __name__ == "__main__":
    main()
