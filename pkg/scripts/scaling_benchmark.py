"""Timing sweep: constant-time estimators vs brute-force baselines.

Sweeps the workload size and reports, per n: initialization time of the
closed-form accumulator (IGC) and pattern tables (ILC), per-curve estimate
time (GC, LC), and the naive baselines (NGC, NLC). The per-curve columns
should stay flat while the naive columns grow linearly.
"""

import argparse
import time

import numpy as np

from bmcurve.curve import standard_curve
from bmcurve.global_cost import global_cost_closed, init_global
from bmcurve.local_cost import build_pattern_tables, local_cost_from_tables
from bmcurve.oracle import naive_global_cost, naive_section_count
from bmcurve.workload import gen_dataset, gen_queries


def median_time(fn, repeats):
    fn()
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return float(np.median(times))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--d", type=int, default=2)
    ap.add_argument("--l", type=int, default=10)
    ap.add_argument("--max-exp", type=int, default=10, help="largest n = 2^max-exp")
    ap.add_argument("--edge", type=int, default=32, help="query edge length")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    spec = standard_curve("zc", args.d, args.l)
    source = gen_dataset("uni", 4096, args.d, args.l, args.seed)
    header = ("n", "IGC_ms", "ILC_ms", "GC_us", "LC_us", "NGC_ms", "NLC_ms")
    print(("{:>8}" * len(header)).format(*header))
    for exp in range(args.max_exp + 1):
        n = 1 << exp
        wl = gen_queries(source, n, edges=(args.edge,) * args.d, seed=exp)
        acc = init_global(wl)
        tables = build_pattern_tables(wl)
        reps = 3 if n >= 256 else 5
        row = (
            n,
            median_time(lambda: init_global(wl), 5) * 1e3,
            median_time(lambda: build_pattern_tables(wl), 3) * 1e3,
            median_time(lambda: global_cost_closed(spec, acc), 25) * 1e6,
            median_time(lambda: local_cost_from_tables(spec, tables), 25) * 1e6,
            median_time(lambda: naive_global_cost(spec, wl), reps) * 1e3,
            median_time(lambda: naive_section_count(spec, wl), reps) * 1e3,
        )
        print("{:>8}".format(row[0]) + "".join(f"{v:>8.3f}" for v in row[1:]))


if __name__ == "__main__":
    main()
