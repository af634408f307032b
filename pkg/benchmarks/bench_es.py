"""Benchmark the dense gain-table backends (compiled Gray-code kernel vs
batched numpy fallback) used by the exhaustive search.

    python3 benchmarks/bench_es.py --sizes 8,10,12,14 --repeats 5
"""

import argparse
import time

import numpy as np

import risbound._es as es
from risbound import ScenarioSpec, generate_scenario


def time_table(theta, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        gains = es.gain_table(theta)
        best = min(best, time.perf_counter() - t0)
    return best, gains


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="8,10,12,14",
                        help="comma-separated element counts")
    parser.add_argument("--repeats", type=int, default=5,
                        help="timing repetitions (best of)")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]

    kernel = es._kernel
    if kernel is None:
        print("compiled kernel not available; timing the numpy path only")
    print(f"active backend: {es.backend_name()}")
    print(f"{'n_s':>4} {'configs':>9} {'compiled':>12} {'numpy':>12} "
          f"{'speedup':>8} {'max |dev|':>10}")
    for n_s in sizes:
        theta = generate_scenario(
            ScenarioSpec(n_s=n_s, seed=args.seed, direct_path="random")
        )
        rows = [f"{n_s:>4} {1 << n_s:>9}"]
        t_compiled = g_compiled = None
        if kernel is not None:
            t_compiled, g_compiled = time_table(theta, args.repeats)
            rows.append(f"{1e3 * t_compiled:>10.3f}ms")
        else:
            rows.append(f"{'-':>12}")
        es._kernel = None
        try:
            t_numpy, g_numpy = time_table(theta, args.repeats)
        finally:
            es._kernel = kernel
        rows.append(f"{1e3 * t_numpy:>10.3f}ms")
        if t_compiled is not None:
            dev = float(np.max(np.abs(g_compiled - g_numpy)))
            rows.append(f"{t_numpy / t_compiled:>7.1f}x {dev:>10.2e}")
        print(" ".join(rows))


if __name__ == "__main__":
    main()
