"""Time the numba kernels against their pure-numpy counterparts.

    python benchmarks/bench_kernels.py [--repeat 3]

Each kernel is called once untimed so numba compilation is excluded.
"""
import argparse
import time

import numpy as np

from widegaps import _kernels
from widegaps.core import Dataset
from widegaps.transforms import centered_gram


def best_time(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def pseudo(n, seed=0):
    rng = np.random.default_rng(seed)
    return Dataset.from_condensed(rng.uniform(0.1, 1.0, n * (n - 1) // 2))


def enumeration_cases():
    for n, k in [(10, 3), (12, 3), (12, 4)]:
        d2 = np.ascontiguousarray(pseudo(n).d2)
        yield (
            f"enumerate n={n} k={k}",
            lambda f=_kernels.enumerate_optimum_numba, d2=d2, k=k: f(d2, k, 1e-9, 64),
            lambda f=_kernels.enumerate_optimum_numpy, d2=d2, k=k: f(d2, k, 1e-9, 64),
        )


def refine_cases():
    for n, k in [(200, 4), (1000, 8)]:
        d2 = np.ascontiguousarray(pseudo(n).d2)
        labels0 = (np.arange(n) % k).astype(np.int64)

        def run(kernel, d2=d2, labels0=labels0, k=k):
            labels = labels0.copy()
            sizes = np.bincount(labels, minlength=k).astype(np.int64)
            R = np.ascontiguousarray(np.stack([d2[:, labels == c].sum(axis=1) for c in range(k)], axis=1))
            T = np.array([R[labels == c, c].sum() for c in range(k)])
            for _ in range(3):
                kernel(d2, labels, sizes, R, T, 1e-12)

        yield (
            f"refine 3 sweeps n={n} k={k}",
            lambda run=run: run(_kernels.refine_sweep_numba),
            lambda run=run: run(_kernels.refine_sweep_numpy),
        )


def jacobi_cases():
    for n in (30, 80):
        B = np.ascontiguousarray(centered_gram(pseudo(n)))
        yield (
            f"jacobi n={n}",
            lambda B=B: _kernels.jacobi_eigenvalues_numba(B.copy(), 1e-12, 100),
            lambda B=B: _kernels.jacobi_eigenvalues_numpy(B.copy(), 1e-12, 100),
        )


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"{'kernel':<28}{'numba s':>12}{'numpy s':>12}{'speedup':>10}")
    for cases in (enumeration_cases(), refine_cases(), jacobi_cases()):
        for name, fast, slow in cases:
            a = best_time(fast, args.repeat)
            b = best_time(slow, args.repeat)
            print(f"{name:<28}{a:>12.4f}{b:>12.4f}{b / a:>9.1f}x")


if __name__ == "__main__":
    main()
