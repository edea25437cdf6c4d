"""Benchmark the compiled kernels against the pure-Python fallback.

Run with::

    python3 benchmarks/bench_kernels.py [--repeat 7]

Prints best-of-N wall times per kernel and the speedup of the compiled
extension (when built).
"""

import argparse
import time

import numpy as np

from pitspec import kernels


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_cases(rng):
    y1k = rng.standard_normal(1_000)
    y5k = rng.standard_normal(5_000)
    eps = rng.standard_normal(1_600)
    x, yv = rng.random(2_000), rng.random(2_000)
    args = (0.01, 0.2, 0.1, 0.1, 0.8)

    def loglik_many(mod):
        def run():
            for _ in range(200):
                mod.garch_loglik(y1k, *args, 1, 0, 0.0)

        return run

    return [
        ("garch_filter n=5000", lambda m: (lambda: m.garch_filter(y5k, *args))),
        ("garch_loglik n=1000 x200", lambda m: loglik_many(m)),
        ("garch_simulate n=1600", lambda m: (lambda: m.garch_simulate(eps, *args))),
        ("cvm_pair_sum n=2000", lambda m: (lambda: m.cvm_pair_sum(x, yv))),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=7)
    opts = parser.parse_args()

    names = kernels.available_backends()
    mods = {name: kernels.get_backend(name) for name in names}
    rng = np.random.default_rng(0)
    cases = bench_cases(rng)

    header = f"{'kernel':<28}" + "".join(f"{n:>14}" for n in names)
    if len(names) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for label, make in cases:
        times = {}
        for name in names:
            times[name] = best_of(make(mods[name]), opts.repeat)
        row = f"{label:<28}" + "".join(
            f"{times[n] * 1e3:>12.3f}ms" for n in names
        )
        if len(names) == 2:
            row += f"{times['python'] / times['compiled']:>9.1f}x"
        print(row)
    print(f"\nactive backend: {kernels.BACKEND}")


if __name__ == "__main__":
    main()
