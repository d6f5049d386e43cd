#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Times the three exponential-integrator weight kernels and the Picard
convolution scan on sizes spanning toy systems to large spectral states.
Run after `pip install -e .[fast]`:

    python benchmarks/bench_kernels.py

The same comparison can be forced end to end by running the test suite or
CLI under IMPNS_KERNELS=numpy vs IMPNS_KERNELS=numba.
"""

import time

import numpy as np

from impns import kernels


def timeit(fn, *args, repeat=7):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_weights(sizes=(1_000, 100_000, 1_000_000)):
    print("\nweight kernels (best of 7, seconds)")
    print(f"{'kernel':<8} {'n':>10} {'numpy':>12} {'numba':>12} {'speedup':>9}")
    rng = np.random.default_rng(0)
    pairs = [
        ("decay", kernels.decay_weights_numpy, getattr(kernels, "decay_weights_numba", None)),
        ("phi1", kernels.phi1_weights_numpy, getattr(kernels, "phi1_weights_numba", None)),
        ("phi2", kernels.phi2_weights_numpy, getattr(kernels, "phi2_weights_numba", None)),
    ]
    for n in sizes:
        lam = rng.uniform(1e-10, 50.0, n)
        for name, np_fn, nb_fn in pairs:
            t_np = timeit(np_fn, lam, 0.01)
            if nb_fn is None:
                print(f"{name:<8} {n:>10} {t_np:>12.3e} {'n/a':>12} {'n/a':>9}")
                continue
            nb_fn(lam, 0.01)  # JIT warm-up outside the timing
            t_nb = timeit(nb_fn, lam, 0.01)
            print(f"{name:<8} {n:>10} {t_np:>12.3e} {t_nb:>12.3e} "
                  f"{t_np / t_nb:>8.1f}x")


def bench_scan(cases=((4096, 2), (4096, 64), (2048, 1024))):
    print("\nconvolution scan (best of 7, seconds)")
    print(f"{'grid':>12} {'numpy':>12} {'numba':>12} {'speedup':>9}")
    rng = np.random.default_rng(1)
    nb_fn = getattr(kernels, "convolution_scan_numba", None)
    for n, d in cases:
        dec = rng.uniform(0.5, 1.0, (n, d))
        w1 = rng.uniform(0.0, 0.01, (n, d))
        w2 = rng.uniform(0.0, 0.005, (n, d))
        ga = rng.standard_normal((n, d))
        gb = rng.standard_normal((n, d))
        t_np = timeit(kernels.convolution_scan_numpy, dec, w1, w2, ga, gb)
        label = f"{n}x{d}"
        if nb_fn is None:
            print(f"{label:>12} {t_np:>12.3e} {'n/a':>12} {'n/a':>9}")
            continue
        nb_fn(dec, w1, w2, ga, gb)
        t_nb = timeit(nb_fn, dec, w1, w2, ga, gb)
        print(f"{label:>12} {t_np:>12.3e} {t_nb:>12.3e} {t_np / t_nb:>8.1f}x")


def main():
    print(f"active backend: {kernels.backend_name()}")
    if kernels.backend_name() == "numpy":
        print("numba unavailable or disabled; numba columns will read n/a")
    bench_weights()
    bench_scan()


if __name__ == "__main__":
    main()
