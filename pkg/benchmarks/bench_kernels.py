"""Time the compiled kernels against the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from holobias import _backend
from holobias.sampling import uniform_chunk


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    y = np.linspace(0.1, 1e3, 200_000)
    s = np.sqrt(np.arange(2, 42, dtype=float))
    a = 1.0 / (1.0 + s)
    phi = np.linspace(0, 3, s.size)
    u = uniform_chunk(0, 0, 1 << 16, 3)
    M = np.array([[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 0], [0, 1, 1]], dtype=np.int64)
    a5 = np.array([0.5, 0.3, 0.2, 0.1, 0.05])
    xi = np.linspace(0, 200, 20_000)
    w = np.full_like(xi, xi[1] - xi[0])
    x = np.linspace(-1.3, 1.3, 201)
    vals = np.random.default_rng(0).normal(size=1 << 20)
    return {
        "cos_sum (2e5 y x 40 terms)": lambda k: k.cos_sum(y, s, a, phi, 0.0),
        "torus_values (65536 x 5)": lambda k: k.torus_values(u, M, a5, np.zeros(5), 0.0),
        "histogram (2^20 values)": lambda k: k.histogram(vals, -5.0, 5.0, 200),
        "bessel_cos_integral (2e4 nodes x 201 x)": lambda k: k.bessel_cos_integral(xi, w, a5, x, 0.0),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    py = _backend.get("python")
    try:
        cy = _backend.get("cython")
    except ImportError:
        cy = None
        print("compiled core not built; timing the numpy fallback only")
    print(f"{'kernel':42s} {'python [s]':>11s} {'cython [s]':>11s} {'speedup':>8s}")
    for name, fn in cases().items():
        tp = best_of(lambda: fn(py), args.repeat)
        if cy is None:
            print(f"{name:42s} {tp:11.4f}")
            continue
        tc = best_of(lambda: fn(cy), args.repeat)
        print(f"{name:42s} {tp:11.4f} {tc:11.4f} {tp / tc:7.1f}x")


if __name__ == "__main__":
    main()
