"""Benchmark the compiled RHS kernels against the numpy fallback.

Usage: python benchmarks/bench_rhs.py [--repeats N]

Both backends are imported directly, so the comparison runs in one process
regardless of which backend the package selected at import.
"""

import argparse
import time

import numpy as np

from rkctl._kernels import numpy_impl

try:
    from rkctl._kernels import _compiled
except ImportError:
    _compiled = None

from rkctl.dgsem import build_problem


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_advection_2d(backend, elements, degree, repeats):
    prob = build_problem("advection2d_curved", elements=elements, degree=degree)
    op = prob.rhs
    u = prob.u0.copy()
    out = np.empty_like(u)
    args = (u, op._at1, op._at2, op._bxi, op._beta, op._jinv, op._weak,
            op._winv0, op._winv1, op._right, op._top, out)
    calls = max(1, 2_000_000 // u.size)
    def run():
        for _ in range(calls):
            backend.advection_rhs_2d(*args)
    return best_of(run, repeats) / calls


def bench_euler_1d(backend, elements, degree, repeats):
    prob = build_problem("euler1d", elements=elements, degree=degree)
    op = prob.rhs
    u = prob.u0.copy()
    out = np.empty_like(u)
    args = (u, op.gamma, op._weak, op._winv0, op._winv1, op._jinv, op._right, out)
    calls = max(1, 1_000_000 // u.size)
    def run():
        for _ in range(calls):
            backend.euler_rhs_1d(*args)
    return best_of(run, repeats) / calls


def bench_fv_2d(backend, elements, degree, repeats):
    prob = build_problem("blended_advection", elements=elements, degree=degree,
                         alpha=1.0)
    fv = prob.rhs.fv
    u = prob.u0.copy()
    out = np.empty_like(u)
    args = (u, fv._s1, fv._s2, fv._weights, fv._jconst, fv._left, fv._right,
            fv._bottom, fv._top, out)
    calls = max(1, 2_000_000 // u.size)
    def run():
        for _ in range(calls):
            backend.fv_rhs_2d(*args)
    return best_of(run, repeats) / calls


CASES = [
    ("advection2d warped 8x8 p3", bench_advection_2d, (8, 8), 3),
    ("advection2d warped 16x16 p3", bench_advection_2d, (16, 16), 3),
    ("advection2d warped 32x32 p4", bench_advection_2d, (32, 32), 4),
    ("fv subcell 8x8 p3", bench_fv_2d, (8, 8), 3),
    ("fv subcell 32x32 p4", bench_fv_2d, (32, 32), 4),
    ("euler1d 64 p3", bench_euler_1d, 64, 3),
    ("euler1d 512 p4", bench_euler_1d, 512, 4),
]


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    if _compiled is None:
        print("compiled backend not available; showing numpy timings only")
    header = f"{'case':34s} {'numpy':>12s} {'compiled':>12s} {'speedup':>8s}"
    print(header)
    print("-" * len(header))
    for name, fn, elements, degree in CASES:
        t_np = fn(numpy_impl, elements, degree, args.repeats)
        if _compiled is not None:
            t_cy = fn(_compiled, elements, degree, args.repeats)
            print(f"{name:34s} {t_np * 1e6:10.2f}us {t_cy * 1e6:10.2f}us "
                  f"{t_np / t_cy:7.2f}x")
        else:
            print(f"{name:34s} {t_np * 1e6:10.2f}us {'-':>12s} {'-':>8s}")


if __name__ == "__main__":
    main()
