#!/usr/bin/env python3
"""
Timing comparison of the numba kernels against the pure-numpy fallback.

Run:  python3 benchmarks/bench_kernels.py [--repeats N]

The same functions are selected at import time by POISSWELL_KERNELS; here
both variants are called explicitly so one process covers both paths.
"""

import argparse
import time

import numpy as np

from poisswell import kernels


def bench(fn, args, repeats):
    fn(*args)  # warm-up (numba compiles here)
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=7)
    args = parser.parse_args()

    if not hasattr(kernels, "spinor_density_numba"):
        print("numba backend unavailable; nothing to compare")
        return

    rng = np.random.default_rng(0)
    print(f"{'kernel':<24}{'shape':<16}{'numpy':>12}{'numba':>12}{'speedup':>10}")
    for shape in [(256,), (256, 256), (48, 48, 48)]:
        psi = rng.standard_normal((2, *shape)) + 1j * rng.standard_normal((2, *shape))
        W = rng.standard_normal(shape)
        B = rng.standard_normal((3, *shape))
        cases = [
            ("spinor_density", kernels.spinor_density_numpy, kernels.spinor_density_numba, (psi,)),
            ("spin_density", kernels.spin_density_numpy, kernels.spin_density_numba, (psi,)),
            (
                "phase_sigma_rotate",
                kernels.phase_sigma_rotate_numpy,
                kernels.phase_sigma_rotate_numba,
                (psi, W, B, 0.01),
            ),
        ]
        for name, f_np, f_nb, fargs in cases:
            t_np = bench(f_np, fargs, args.repeats)
            t_nb = bench(f_nb, fargs, args.repeats)
            label = "x".join(str(n) for n in shape)
            print(
                f"{name:<24}{label:<16}{t_np * 1e3:>10.3f}ms{t_nb * 1e3:>10.3f}ms"
                f"{t_np / t_nb:>9.2f}x"
            )


if __name__ == "__main__":
    main()
