"""Benchmark the compiled kernels against the fallback path.

Runs each hot kernel on a fixed instance with both builds and prints a small
table. The fallback side is what CQLAB_NO_NUMBA=1 selects: vectorized NumPy
for the matching scan and the bound evaluators, interpreted DFS for the
alternating-structure searches.

Usage: python benchmarks/bench_kernels.py [--quick]
"""
import argparse
import time

import numpy as np

from cqlab import _kernels as K
from cqlab.alternating import build_even_k
from cqlab.labeled_graphs import make_construction, TWO_LABEL


def timed(fn, *args, repeat=3):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--quick", action="store_true", help="smaller instances")
    args = ap.parse_args()

    if not K.HAVE_NUMBA:
        print("numba build unavailable (CQLAB_NO_NUMBA set or numba missing);")
        print("timing the fallback path only.\n")

    n = 12 if args.quick else 14
    lab = make_construction(TWO_LABEL, n).matrix0()
    size = n // 2

    k, x = (6, 30) if args.quick else (6, 60)
    g = build_even_k(k, x)
    indptr, indices = g.csr()
    nv = g.num_vertices

    alphas = np.arange(3.2, 1.0, -1e-3)
    dge = (1.0, 0.25, 0.93)

    rows = []

    if K.HAVE_NUMBA:
        # trigger compilation outside the timed region
        K._min_critical_njit(lab, n, size)
        K._max_blue_njit(indptr, indices, nv)
        K._has_cycle_njit(indptr, indices, nv)
        K._f1_batch_njit(alphas[:4], *dge, 1e-12, 0)

        t, r1 = timed(K._min_critical_njit, lab, n, size)
        rows.append((f"matching scan K_{n} (perfect)", "numba", t, int(r1[0])))
        t, r2 = timed(K._min_critical_numpy, lab, n, size)
        rows.append((f"matching scan K_{n} (perfect)", "numpy", t, int(r2[0])))
        assert int(r1[0]) == int(r2[0])

        t, r1 = timed(K._max_blue_njit, indptr, indices, nv)
        rows.append((f"alternating path DFS k={k} x={x}", "numba", t, int(r1)))
        t, r2 = timed(K._max_blue_core, indptr, indices, nv, repeat=1)
        rows.append((f"alternating path DFS k={k} x={x}", "interpreted", t, int(r2)))
        assert int(r1) == int(r2)

        t, r1 = timed(K._has_cycle_njit, indptr, indices, nv)
        rows.append((f"alternating cycle DFS k={k} x={x}", "numba", t, int(r1)))
        t, r2 = timed(K._has_cycle_core, indptr, indices, nv, repeat=1)
        rows.append((f"alternating cycle DFS k={k} x={x}", "interpreted", t, int(r2)))

        t, r1 = timed(K._f1_batch_njit, alphas, *dge, 1e-12, 0)
        rows.append((f"dense F1 over {len(alphas)} alphas", "numba", t, None))
        t, r2 = timed(K._f1_batch_numpy, alphas, *dge, 1e-12, False)
        rows.append((f"dense F1 over {len(alphas)} alphas", "numpy", t, None))
        finite = np.isfinite(r1[0])
        assert np.allclose(r1[0][finite], r2[0][finite], atol=1e-9)
    else:
        t, r = timed(K._min_critical_numpy, lab, n, size)
        rows.append((f"matching scan K_{n} (perfect)", "numpy", t, int(r[0])))
        t, r = timed(K._max_blue_core, indptr, indices, nv, repeat=1)
        rows.append((f"alternating path DFS k={k} x={x}", "interpreted", t, int(r)))
        t, r = timed(K._f1_batch_numpy, alphas, *dge, 1e-12, False)
        rows.append((f"dense F1 over {len(alphas)} alphas", "numpy", t, None))

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'build':<11}  {'seconds':>9}  result")
    for label, build, t, result in rows:
        res = "" if result is None else str(result)
        print(f"{label:<{width}}  {build:<11}  {t:>9.4f}  {res}")


if __name__ == "__main__":
    main()
