"""Benchmark the compiled kernel against the pure-Python twin.

Runs the same scripted matches on every available backend, checks that
their outputs agree, and reports throughput. Usage:

    python3 benchmarks/bench_backends.py [--rounds N] [--replications K]
"""

import argparse
import statistics
import time

from rpslab.analysis import replication_seed
from rpslab.backend import available_backends, run_bot_match
from rpslab.ensemble import EnsembleConfig
from rpslab.opponents import parse_strategy

CASES = (
    ("orders 1..5, F=5, uniform", EnsembleConfig(), "uniform"),
    ("orders 1..5, F=5, mimic", EnsembleConfig(), "mimic"),
    ("orders 1..10, F=10, uniform",
     EnsembleConfig(orders=tuple(range(1, 11)), focus_length=10), "uniform"),
)


def run_case(config, kind, rounds, replications, backend_name):
    """Times the case; returns (seconds, checksum over all replications)."""
    checksum = 0
    start = time.perf_counter()
    for i in range(replications):
        arrays = run_bot_match(config, kind, rounds,
                               seed=replication_seed(0, i),
                               backend_name=backend_name)
        checksum = (checksum * 1315423911 + arrays.total_score()) % (1 << 61)
    return time.perf_counter() - start, checksum


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rounds", type=int, default=300)
    ap.add_argument("--replications", type=int, default=50)
    ap.add_argument("--repeats", type=int, default=3,
                    help="timing repeats per case; the median is reported")
    args = ap.parse_args()

    backends = available_backends()
    print(f"backends: {', '.join(backends)}")
    if len(backends) < 2:
        print("note: compiled extension not importable, timing pure python only")

    width = max(len(name) for name, _, _ in CASES)
    for name, config, spec in CASES:
        kind = parse_strategy(spec)
        rows = {}
        sums = set()
        for backend_name in backends:
            times = []
            for _ in range(args.repeats):
                seconds, checksum = run_case(config, kind, args.rounds,
                                             args.replications, backend_name)
                times.append(seconds)
            sums.add(checksum)
            best = statistics.median(times)
            per_round = best / (args.rounds * args.replications)
            rows[backend_name] = best
            print(f"{name:<{width}}  {backend_name:>8}: "
                  f"{best:8.3f}s  ({per_round * 1e6:9.2f} us/round)")
        if len(sums) != 1:
            print(f"{name:<{width}}  MISMATCH: backends disagree")
            return 1
        if "compiled" in rows and "python" in rows:
            print(f"{name:<{width}}  speedup: "
                  f"{rows['python'] / rows['compiled']:.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
