"""End-to-end experiment: learn a curve for a skewed workload, then replay
the workload through the block-access simulator against ZC, LC, and Hilbert.
"""

import argparse
import time

from bmcurve.curve import render_bmc, standard_curve
from bmcurve.global_cost import init_global
from bmcurve.learner import LearnerConfig, learn_bmc
from bmcurve.local_cost import build_pattern_tables, combined_cost
from bmcurve.simulator import HILBERT, compare_curves
from bmcurve.workload import gen_dataset, gen_queries


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n-points", type=int, default=100_000)
    ap.add_argument("--n-queries", type=int, default=500)
    ap.add_argument("--l", type=int, default=10)
    ap.add_argument("--area", type=int, default=1024)
    ap.add_argument("--aspect", default="16:1")
    ap.add_argument("--block-size", type=int, default=128)
    ap.add_argument("--mode", choices=["per-section", "full-range"],
                    default="full-range")
    ap.add_argument("--episodes", type=int, default=20)
    ap.add_argument("--steps", type=int, default=25)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    d = 2
    rx, ry = (int(x) for x in args.aspect.split(":"))
    ds = gen_dataset("skew", args.n_points, d, args.l, args.seed)
    wl = gen_queries(ds, args.n_queries, area=args.area, aspect=(rx, ry),
                     seed=args.seed + 1)
    acc = init_global(wl)
    tables = build_pattern_tables(wl)

    zc = standard_curve("zc", d, args.l)
    lc = standard_curve("lc", d, args.l)
    config = LearnerConfig(episodes=args.episodes, steps_per_episode=args.steps,
                           batch_size=32, hidden_sizes=(64, 64), seed=args.seed)
    t0 = time.perf_counter()
    result = learn_bmc(zc, tables, acc, config)
    learned = result.best_spec
    print(f"learned {render_bmc(learned)} in {time.perf_counter() - t0:.1f}s "
          f"(cost ratio vs ZC: {result.best_cost / result.initial_cost:.3f})")

    curves = {"learned": learned, "ZC": zc, "LC": lc, "HC": HILBERT}
    for name, spec in (("ZC", zc), ("LC", lc), ("learned", learned)):
        print(f"{name:>8}: combined cost {combined_cost(spec, acc, tables)}")
    reports = compare_curves(ds, wl, curves, args.block_size, args.mode)
    print(f"\nmean block accesses ({args.mode}, B={args.block_size}):")
    for name, rep in sorted(reports.items(), key=lambda kv: kv[1].mean_blocks):
        print(f"{name:>8}: {rep.mean_blocks:8.2f} blocks, "
              f"precision {rep.mean_precision:.3f}")


if __name__ == "__main__":
    main()
