"""Benchmark: compiled kernels vs the numpy reference implementation.

Usage:  python3 benchmarks/bench_kernels.py [--repeat N]

Times the hot loops on representative workloads and prints a table.  The
compiled backend wins where per-step Python/numpy dispatch dominates
(small-grid time stepping, pointwise special functions); the batched
linearized evolution stays numpy because it is BLAS-bound.
"""
import argparse
import time

import numpy as np

from breatherlab import dynamics
from breatherlab._kernels import pure

try:
    from breatherlab._kernels import _speedups
except ImportError:
    _speedups = None


def timeit(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_field(backend, grid_n=128, n_steps=10_000):
    synth, ana, wn, _ = dynamics._transforms(grid_n, dynamics.DIRICHLET)
    omega = np.sqrt(wn * wn)
    x = dynamics.grid_points(grid_n, dynamics.DIRICHLET)
    phi = 0.8 * np.sin(x) + 0.1 * np.sin(2 * x)
    pi = 0.05 * np.sin(x)
    return lambda: backend.field_evolve(phi, pi, n_steps, 1e-3, 0.1, synth, ana, omega)


def bench_polaron(backend, grid_n=128, n_steps=5_000):
    synth, ana, wn, _ = dynamics._transforms(grid_n, dynamics.PERIODIC)
    om_f = np.sqrt(wn * wn)
    om_d = np.sqrt(wn * wn + 1.0)
    x = dynamics.grid_points(grid_n, dynamics.PERIODIC)
    phi = 0.4 * np.sin(x)
    pi = 0.1 * np.sin(x)
    psi = 0.05 * np.exp(-((x - np.pi) ** 2)) * np.exp(2j * x)
    psi_t = -1j * psi
    return lambda: backend.polaron_evolve(
        phi, pi, psi, psi_t, n_steps, 1e-3, 0.1, 3.0, synth, ana, om_f, om_d
    )


def bench_jacobi(backend, n_points=500_000):
    u = np.linspace(-25.0, 25.0, n_points)
    return lambda: backend.jacobi_cn_sn_dn(u, 0.7)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3, help="timing repeats (best-of)")
    args = parser.parse_args()

    cases = [
        ("field_evolve  (grid 128, 1e4 steps)", bench_field),
        ("polaron_evolve (grid 128, 5e3 steps)", bench_polaron),
        ("jacobi batch  (5e5 points, k=0.7)", bench_jacobi),
    ]
    print(f"{'kernel':<40} {'pure [s]':>10} {'compiled [s]':>13} {'speedup':>9}")
    for label, make in cases:
        t_pure = timeit(make(pure), args.repeat)
        if _speedups is None:
            print(f"{label:<40} {t_pure:>10.3f} {'n/a':>13} {'n/a':>9}")
            continue
        t_fast = timeit(make(_speedups), args.repeat)
        print(f"{label:<40} {t_pure:>10.3f} {t_fast:>13.3f} {t_pure / t_fast:>8.1f}x")
    if _speedups is None:
        print("\ncompiled backend not built; run `python3 setup.py build_ext --inplace`")


if __name__ == "__main__":
    main()
