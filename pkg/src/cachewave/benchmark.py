"""Micro-benchmark comparing the pure-Python and compiled kernel backends.

Run as ``python -m cachewave.benchmark``.  Times the two hot paths — the
adaptive quadrature entry point (one call per outage factor) and the
vectorized Monte Carlo trial counters — on every backend importable in
this environment, and prints the per-kernel speedup of the compiled
extension over the NumPy/pure-Python fallback.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from ._backend import available_backends, get_backend
from .channel import gain_stream, sample_gains

# Representative factor-integration workloads: (family, a, b, lam, p, share, thr).
_QUAD_CASES = (
    (0, 0.0, 0.17182818284590451, 1.0, 10.0, 0.5, 1.7182818284590451),
    (1, 0.0, 0.63890560989306504, 1.0, 10.0, 0.5, 7.3890560989306504),
    (2, 0.26945280494653252, 0.63890560989306504, 0.1, 10.0, 0.5, 7.3890560989306504),
    (3, 0.093656365691809046, 0.34365636569180905, 1.0, 10.0, 0.5, 3.4365636569180905),
)


def _time(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def run(size: int, repeats: int) -> list[tuple[str, dict[str, float]]]:
    rng = gain_stream(1234)
    gl = sample_gains(1.0, size, rng)
    gh = sample_gains(1.0, size, rng)

    timings: list[tuple[str, dict[str, float]]] = []

    def add(name: str, make_fn) -> None:
        per_backend = {}
        for bname in available_backends():
            kernels = get_backend(bname)
            per_backend[bname] = _time(make_fn(kernels), repeats)
        timings.append((name, per_backend))

    def quad_fn(kernels):
        def body():
            for case in _QUAD_CASES:
                for _ in range(64):
                    kernels.integrate_factor(case[0], case[1], case[2], 1e-9,
                                             case[3], case[4], case[5], case[6])
        return body

    add("integrate_factor x256", quad_fn)
    add("count_ge", lambda k: lambda: k.count_ge(gl, 0.17))
    add("count_mrc", lambda k: lambda: k.count_mrc(gl, gh, 5.0, 5.0, 10.0, 1.72))
    add("count_sinr_ge", lambda k: lambda: k.count_sinr_ge(gh, 5.0, 5.0, 1.72))
    add("count_sum_ge", lambda k: lambda: k.count_sum_ge(gl, gh, 0.5, 0.34))
    add("count_joint_sic", lambda k: lambda: k.count_joint_sic(gl, gh, 10.0, 5.0, 7.39))
    add("count_joint_inoise", lambda k: lambda: k.count_joint_inoise(gl, gh, 10.0, 5.0, 5.0, 7.39))
    add("count_m1_cache", lambda k: lambda: k.count_m1_cache(gl, gh, 5.0, 5.0, 10.0, 1.72, 5.0, 7.39))
    add("count_m3_cache", lambda k: lambda: k.count_m3_cache(gl, gh, 5.0, 5.0, 10.0, 1.72, 0.17, 0.34))
    add("count_m4_cache", lambda k: lambda: k.count_m4_cache(gl, gh, 0.17, 5.0, 5.0, 1.72))
    return timings


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--size", type=int, default=1_000_000,
                        help="gain-array length for the count kernels")
    parser.add_argument("--repeats", type=int, default=5,
                        help="repetitions per timing (best of N)")
    args = parser.parse_args(argv)

    backends = available_backends()
    print(f"backends available: {', '.join(backends)}")
    print(f"array size {args.size}, best of {args.repeats}\n")
    header = f"{'kernel':<24}" + "".join(f"{b:>14}" for b in backends)
    if len(backends) > 1:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for name, per_backend in run(args.size, args.repeats):
        line = f"{name:<24}"
        for b in backends:
            line += f"{per_backend[b] * 1e3:>12.3f}ms"
        if len(backends) > 1 and "cython" in per_backend and "python" in per_backend:
            line += f"{per_backend['python'] / per_backend['cython']:>9.1f}x"
        print(line)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
