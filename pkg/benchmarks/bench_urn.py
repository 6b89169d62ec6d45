#!/usr/bin/env python3
"""Time the numba urn kernel against the numpy fallback.

Usage: python benchmarks/bench_urn.py [--trials 1000000] [--repeat 5]
"""

import argparse
import time

from stratvar import SimConfig, build_scenario, estimate
from stratvar._accel import has_numba
from stratvar.kernels import stream_key, urn_counts

URNS = [
    ("N=10 n=4 without", 4, 10, 4, False),
    ("N=30 n=17 without", 11, 30, 17, False),
    ("N=30 n=17 with", 11, 30, 17, True),
]


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    backends = ["numpy"] + (["numba"] if has_numba else [])
    key = stream_key(2024, 0)
    # warm up (numba compile / cache load)
    for b in backends:
        urn_counts(key, 1, 4, 2, False, 0, 10, backend=b)

    print(f"{'case':<22}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for name, red, total, n, replace in URNS:
        t = {b: best_of(lambda: urn_counts(key, red, total, n, replace, 0, args.trials, backend=b), args.repeat)
             for b in backends}
        same = len({urn_counts(key, red, total, n, replace, 0, 1000, backend=b).tobytes() for b in backends}) == 1
        speed = f"{t['numpy'] / t['numba']:.1f}x" if "numba" in t else "-"
        print(f"{name:<22}" + "".join(f"{t[b] * 1e3:>10.1f}ms" for b in backends) + f"{speed:>10}"
              + ("" if same else "  MISMATCH"))

    sc = build_scenario((3, 4, 5), (1, 2, 2), (2, 2, 3))
    cfg = SimConfig(sc, "strat-without", args.trials, 7)
    t = {b: best_of(lambda: estimate(cfg, backend=b), max(1, args.repeat // 2)) for b in backends}
    print(f"{'estimate m=3':<22}" + "".join(f"{t[b] * 1e3:>10.1f}ms" for b in backends))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
