"""Time each hot kernel in its compiled and pure-numpy form.

    python benchmarks/bench_kernels.py [--repeat 5]

Prints one line per kernel with the best wall time of each backend, the
speed-up and the largest relative difference between the two results.
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from levy_smile import kernels


def cases(rng):
    n = 2 ** 16
    dens = rng.standard_normal(n) / (1.0 + np.arange(n))
    x = 0.2 * rng.standard_normal(2 ** 20)
    counts = rng.poisson(2.0, 2 ** 18)
    values = rng.standard_normal(int(counts.sum()))
    side = rng.random(2 ** 20)
    size = rng.standard_exponential(2 ** 20)
    pay = kernels.NUMPY_KERNELS["cos_payoff_coefficients"](n, -1.7, 2.0, 0.1, 2.0, 100.0,
                                                              110.0, 1.0)
    return {
        "cos_payoff_coefficients": (n, -1.7, 2.0, 0.1, 2.0, 100.0, 110.0, 1.0),
        "cos_series_sum": (dens, pay, 8, 36.04),
        "payoff_moments": (x, kernels.PAYOFF_CALL, 100.0, 110.0),
        "segment_sums": (counts, values),
        "kou_jumps": (side, size, 0.5, 10.0, 5.0),
        "log_g_integral": (476.55, 476.5502, 2e-4),
    }


def max_rel_diff(a, b):
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    scale = np.maximum(np.abs(a), np.abs(b))
    scale[scale == 0] = 1.0
    return float(np.max(np.abs(a - b) / scale))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if kernels.NUMBA_KERNELS is None:
        raise SystemExit("numba backend unavailable (unset LEVY_SMILE_DISABLE_NUMBA)")
    rng = np.random.default_rng(0)
    print(f"{'kernel':26s} {'numpy [ms]':>11s} {'numba [ms]':>11s} {'speed-up':>9s} {'max rel diff':>13s}")
    for name, call_args in cases(rng).items():
        fast, slow = kernels.NUMBA_KERNELS[name], kernels.NUMPY_KERNELS[name]
        ref, got = slow(*call_args), fast(*call_args)  # also compiles
        number = 1 if name != "log_g_integral" else 1000
        t_np = min(timeit.repeat(lambda: slow(*call_args), number=number, repeat=args.repeat)) / number
        t_nb = min(timeit.repeat(lambda: fast(*call_args), number=number, repeat=args.repeat)) / number
        print(f"{name:26s} {1e3 * t_np:11.4f} {1e3 * t_nb:11.4f} {t_np / t_nb:9.1f} "
              f"{max_rel_diff(ref, got):13.2e}")


if __name__ == "__main__":
    main()
