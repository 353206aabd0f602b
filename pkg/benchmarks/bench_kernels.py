"""Compare the compiled and numpy kernel backends.

    python benchmarks/bench_kernels.py [--draws 10000000] [--repeat 3]

Reports the best-of-N wall time per call and checks that both backends agree.
"""

import argparse
import time

import numpy as np

from bqss import _accel
from bqss import qstate as qs


def best_time(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - start)
    return min(times), out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--draws", type=int, default=10_000_000)
    parser.add_argument("--evals", type=int, default=20_000, help="cost evaluations per timing")
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    if "compiled" not in _accel.BACKENDS:
        print("compiled extension not built; only the numpy backend is available")
    cdf = np.cumsum([0.1, 0.2, 0.3, 0.4])
    states = qs.random_pair_states(np.random.Generator(np.random.Philox(0)), 32)
    gamma = np.array([0.3, 1.1, 2.0, 4.2])

    rows, results = [], {}
    for name, mod in _accel.BACKENDS.items():
        t_count, counts = best_time(
            lambda: mod.count_outcomes(np.random.Generator(np.random.Philox(1)), cdf, args.draws), args.repeat)
        t_cost, cost = best_time(lambda: [mod.unmix_cost(states, gamma) for _ in range(args.evals)][-1],
                                 args.repeat)
        results[name] = (counts, cost)
        rows.append((name, 1e9 * t_count / args.draws, 1e6 * t_cost / args.evals))

    print(f"{'backend':<10}{'sampling ns/draw':>18}{'cost us/eval (32 states)':>28}")
    for name, ns, us in rows:
        print(f"{name:<10}{ns:>18.2f}{us:>28.2f}")
    if len(results) == 2:
        (ca, fa), (cb, fb) = results["compiled"], results["python"]
        same = np.array_equal(ca, cb) and abs(fa - fb) <= 1e-13 * max(abs(fa), 1e-300)
        by_name = {r[0]: r[1:] for r in rows}
        fast, slow = by_name["compiled"], by_name["python"]
        print(f"speed-up: sampling x{slow[0] / fast[0]:.1f}, cost x{slow[1] / fast[1]:.1f}; "
              f"outputs {'identical' if same else 'DIFFER'}")


if __name__ == "__main__":
    main()
