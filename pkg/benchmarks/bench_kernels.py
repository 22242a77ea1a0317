"""Timing comparison of the numba kernels against the pure-numpy fallback.

Run:  python3 benchmarks/bench_kernels.py [--size 200000] [--repeats 5]

The numpy path is also what HYPINEQ_DISABLE_NUMBA=1 selects at import time;
here both are called directly so one process can time the pair.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from hypineq._kernels import (
    HAVE_NUMBA,
    numba_backend,
    numpy_backend,
    sinh_ratio_power_coeffs,
)
from hypineq.constants import sphere_area, truncation_index


def _time(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--size", type=int, default=200_000)
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--n", type=int, default=4)
    args = ap.parse_args()

    n = args.n
    rng = np.random.default_rng(7)
    rho = rng.uniform(1e-3, 30.0, args.size)
    t = rng.uniform(1e-6, 1e9, args.size)
    x = rng.uniform(0.0, 50.0, args.size)

    coeffs = sinh_ratio_power_coeffs(n - 1)
    nsig = sphere_area(n)
    j0 = truncation_index(n, 3.0)

    cases = {
        "sinh_power_integral": (
            lambda: numpy_backend["sinh_power_integral"](n - 1, rho, coeffs),
            lambda out: numba_backend["sinh_power_integral"](n - 1, rho, coeffs, out),
        ),
        "volume_inverse": (
            lambda: numpy_backend["volume_inverse"](n, t, nsig, coeffs, 1e-12),
            lambda out: numba_backend["volume_inverse"](n, t, nsig, coeffs, 1e-12, out),
        ),
        "truncated_exp": (
            lambda: numpy_backend["truncated_exp"](x, j0),
            lambda out: numba_backend["truncated_exp"](x, j0, out),
        ),
    }

    print(f"size={args.size}  n={n}  numba available: {HAVE_NUMBA}")
    header = f"{'kernel':24s} {'numpy [ms]':>12s} {'numba [ms]':>12s} {'speedup':>9s} {'max rel diff':>13s}"
    print(header)
    print("-" * len(header))
    for name, (np_fn, nb_fn) in cases.items():
        ref = np_fn()
        t_np = _time(np_fn, args.repeats)
        if numba_backend is None:
            print(f"{name:24s} {1e3 * t_np:12.2f} {'n/a':>12s} {'n/a':>9s} {'n/a':>13s}")
            continue
        out = np.empty_like(ref)
        nb_fn(out)  # compile before timing
        t_nb = _time(lambda: nb_fn(out), args.repeats)
        scale = np.maximum(np.abs(ref), 1e-300)
        rel = float(np.max(np.abs(out - ref) / scale))
        print(
            f"{name:24s} {1e3 * t_np:12.2f} {1e3 * t_nb:12.2f} {t_np / t_nb:9.2f} {rel:13.2e}"
        )


if __name__ == "__main__":
    main()
