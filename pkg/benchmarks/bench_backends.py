"""Compare the compiled and pure-numpy simulation kernels.

    python benchmarks/bench_backends.py [--rounds N] [--repeat K]

Reports the best wall time per configuration, rounds per second, and
whether both backends produced the same outcome counts. The compiled
kernel releases the GIL, so worker threads scale up to the CPU count.
"""

from __future__ import annotations

import argparse
import math
import os
import time

from bellgeom import ModelContext, available_backends, make_family, simulate


def best_time(fn, repeat: int) -> tuple[float, object]:
    best, out = math.inf, None
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - start)
    return best, out


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rounds", type=int, default=10**6)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--theta", type=float, default=math.pi / 3)
    args = ap.parse_args(argv)

    backends = available_backends()
    print(f"backends: {', '.join(backends)}; rounds = {args.rounds}; cpus = {os.cpu_count()}")
    print(f"{'family':<12}{'backend':<9}{'workers':>8}{'seconds':>10}{'Mrounds/s':>11}")
    for spec in ("cosine", "power:1/3"):
        ctx = ModelContext(make_family(spec), args.theta)
        counts = {}
        for backend in backends:
            for workers in (1, 2, 4):
                secs, summary = best_time(
                    lambda: simulate(ctx, args.rounds, 0, workers=workers, backend=backend), args.repeat
                )
                counts.setdefault(backend, summary.counts)
                rate = args.rounds / secs / 1e6
                print(f"{spec:<12}{backend:<9}{workers:>8}{secs:>10.4f}{rate:>11.2f}")
        if len(counts) > 1:
            same = len({tuple(c.values()) for c in counts.values()}) == 1
            print(f"{spec:<12}counts identical across backends: {same}")


if __name__ == "__main__":
    main()
