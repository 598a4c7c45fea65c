"""Compare the numba and numpy kernel backends.

    python benchmarks/bench_kernels.py [--repeat 5]

Each row times one kernel on random events for a growing number of
coordinates; both backends get the same inputs and the outputs are checked
for equality before timing.
"""

import argparse
import time

import numpy as np

from bkrlab import kernels
from bkrlab.sampling import bernoulli_event
from bkrlab.space import SpaceShape


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--max-d", type=int, default=12)
    args = ap.parse_args()

    backends = kernels.available_backends()
    if "numba" not in backends:
        print("numba is not installed; only the numpy backend can be timed")
    rng = np.random.default_rng(0)
    names = sorted(backends)
    print(f"{'kernel':<16}{'d':>3}" + "".join(f"{n + ' ms':>12}" for n in names) + f"{'speedup':>9}")

    for d in range(4, args.max_d + 1, 2):
        shape = SpaceShape((2,) * d)
        sizes = np.array(shape.sizes, dtype=np.int64)
        a = bernoulli_event(shape, rng, 0.9).bits
        b = bernoulli_event(shape, rng, 0.9).bits
        c = bernoulli_event(shape, rng, 0.9).bits
        cases = {}
        for name, mod in backends.items():
            ta, tb, tc = (mod.cylinder_table(x, sizes) for x in (a, b, c))
            stack = np.stack([ta, tb, tc])
            cases[name] = {
                "cylinder_table": lambda mod=mod: mod.cylinder_table(a, sizes),
                "bkr2_tables": lambda mod=mod, ta=ta, tb=tb: mod.bkr2_tables(ta, tb),
                "bkr_r_tables(3)": lambda mod=mod, stack=stack: mod.bkr_r_tables(stack),
            }
        for kernel in cases[names[0]]:
            outs = [cases[n][kernel]() for n in names]   # also compiles
            assert all(np.array_equal(outs[0], o) for o in outs[1:]), kernel
            times = [best_of(cases[n][kernel], args.repeat) for n in names]
            # numpy time over numba time
            ratio = times[-1] / times[0] if len(times) > 1 else 1.0
            print(f"{kernel:<16}{d:>3}" + "".join(f"{t * 1e3:>12.3f}" for t in times) + f"{ratio:>8.1f}x")


if __name__ == "__main__":
    main()
