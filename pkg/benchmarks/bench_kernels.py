"""Compare the compiled message-passing kernels against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--sizes 500,1000,2000,4000] [--repeats 5]
"""
import argparse
import time

import numpy as np

from insbank import _kernels_py

try:
    from insbank import _kernels as _kernels_c
except ImportError:
    _kernels_c = None


def timeit(fn, args, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="500,1000,2000,4000")
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    if _kernels_c is None:
        print("compiled kernels unavailable; benchmarking numpy fallback only")

    header = f"{'n':>6} {'kernel':>16} {'numpy (ms)':>12}"
    if _kernels_c is not None:
        header += f" {'compiled (ms)':>14} {'speedup':>8}"
    print(header)

    rng = np.random.default_rng(0)
    for n in sizes:
        S = np.ascontiguousarray(rng.normal(size=(n, n)))
        A = np.ascontiguousarray(rng.normal(size=(n, n)))
        R = np.ascontiguousarray(rng.normal(size=(n, n)))
        cases = [
            ("responsibility", (S, A), "responsibility_step"),
            ("availability", (R,), "availability_step"),
            ("blend", (0.3, S, 0.5, A, 0.2, R), "blend"),
        ]
        for label, call_args, fn_name in cases:
            t_py = timeit(getattr(_kernels_py, fn_name), call_args, args.repeats)
            row = f"{n:>6} {label:>16} {t_py * 1e3:>12.2f}"
            if _kernels_c is not None:
                t_c = timeit(getattr(_kernels_c, fn_name), call_args, args.repeats)
                row += f" {t_c * 1e3:>14.2f} {t_py / t_c:>7.1f}x"
            print(row)


if __name__ == "__main__":
    main()
