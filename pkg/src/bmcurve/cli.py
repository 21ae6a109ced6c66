"""Command-line front-end wiring the library into reproducible batch runs.

Exit codes: 0 success, 2 validation error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from statistics import median

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import __version__
from .curve import BmcSpec, CurveError, parse_bmc, render_bmc, standard_curve
from .global_cost import GlobalCostAccumulator, global_cost_closed, init_global
from .learner import LearnerConfig, LearnerError, learn_bmc
from .local_cost import (
    build_pattern_tables,
    local_cost_from_tables,
    tables_from_dict,
    tables_to_dict,
)
from .oracle import naive_global_cost, naive_section_count
from .simulator import HILBERT, compare_curves
from .workload import (
    WorkloadError,
    gen_dataset,
    gen_queries,
    load_dataset,
    load_queries,
    save_dataset,
    save_queries,
)

EXIT_VALIDATION = 2
EXIT_IO = 3

SNAPSHOT_VERSION = 1


def _echo_config(args: argparse.Namespace) -> None:
    cfg = {k: v for k, v in vars(args).items() if k != "func"}
    print("config:", json.dumps(cfg, default=str, sort_keys=True))


def _resolve_curve(text: str, d: int, l: int) -> BmcSpec:
    name = text.strip().lower()
    if name in ("zc", "lc"):
        return standard_curve(name, d, l)
    if name == "hc":
        raise CurveError("hilbert ordering is only available in `simulate`")
    return parse_bmc(text, d, l)


def _parse_curve_args(args) -> list[tuple[str, BmcSpec]]:
    names = []
    if args.curves:
        names.extend(s.strip() for s in args.curves.split(","))
    if getattr(args, "curves_file", None):
        with open(args.curves_file) as f:
            names.extend(line.strip() for line in f if line.strip())
    if not names:
        raise WorkloadError("no curves given")
    return [(name, _resolve_curve(name, args.d, args.l)) for name in names]


def _write_rows(rows: list[dict], path, fmt: str) -> None:
    out = open(path, "w", newline="") if path else sys.stdout
    try:
        if fmt == "json":
            json.dump(rows, out, indent=2)
            out.write("\n")
        else:
            w = csv.DictWriter(out, fieldnames=list(rows[0].keys()))
            w.writeheader()
            w.writerows(rows)
    finally:
        if path:
            out.close()


def cmd_gen(args) -> int:
    _echo_config(args)
    if args.what == "data":
        ds = gen_dataset(args.kind, args.n, args.d, args.l, args.seed)
        save_dataset(ds, args.out)
        print(f"wrote {ds.n} points (d={ds.d}, l={ds.l}) to {args.out}")
    else:
        source = load_dataset(args.data, args.d, args.l)
        edges = None
        area = aspect = None
        if args.edge:
            edges = [int(e) for e in args.edge.split(",")]
            if len(edges) == 1:
                edges = edges * args.d
        elif args.area and args.aspect:
            rx, ry = (int(x) for x in args.aspect.split(":"))
            area, aspect = args.area, (rx, ry)
        else:
            raise WorkloadError("need --edge or both --area and --aspect")
        wl = gen_queries(source, args.n, edges=edges, area=area, aspect=aspect,
                         seed=args.seed)
        save_queries(wl, args.out)
        print(f"wrote {wl.n} queries (d={wl.d}, l={wl.l}) to {args.out}")
    return 0


def _timed(fn, repeats: int = 5) -> tuple[float, object]:
    """Median wall-clock seconds over ``repeats`` runs, plus the result."""
    times = []
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return median(times), result


def cmd_estimate(args) -> int:
    _echo_config(args)
    workload = load_queries(args.queries, args.d, args.l)
    curves = _parse_curve_args(args)
    want_global = args.do_global or not args.do_local
    want_local = args.do_local or not args.do_global

    acc = tables = None
    if args.tables:
        with open(args.tables) as f:
            snap = json.load(f)
        acc, tables = _snapshot_load(snap, args.d, args.l)
    else:
        if want_global:
            acc = init_global(workload)
        if want_local:
            tables = build_pattern_tables(workload)

    rows = []
    for name, spec in curves:
        row = {"curve": name}
        if want_global:
            t, gc = _timed(lambda: global_cost_closed(spec, acc), args.repeats)
            row["global_cost"] = gc
            row["global_time_s"] = t
        if want_local:
            t, lc = _timed(lambda: local_cost_from_tables(spec, tables), args.repeats)
            row["local_cost"] = lc
            row["local_time_s"] = t
        if want_global and want_local:
            row["combined_cost"] = row["global_cost"] * row["local_cost"]
        if args.naive:
            if want_global:
                t, ngc = _timed(lambda: naive_global_cost(spec, workload),
                                args.repeats)
                if ngc != row["global_cost"]:
                    raise WorkloadError(
                        f"naive global {ngc} != closed form {row['global_cost']}"
                    )
                row["naive_global_time_s"] = t
            if want_local:
                t, nlc = _timed(lambda: naive_section_count(spec, workload),
                                args.repeats)
                if nlc != row["local_cost"]:
                    raise WorkloadError(
                        f"naive local {nlc} != table lookup {row['local_cost']}"
                    )
                row["naive_local_time_s"] = t
        rows.append(row)
    _write_rows(rows, args.out, args.format)
    return 0


def _snapshot_dump(acc: GlobalCostAccumulator, tables) -> dict:
    return {
        "version": SNAPSHOT_VERSION,
        "accumulator": {"a": acc.a.tolist(), "n": acc.n},
        "pattern_tables": tables_to_dict(tables),
    }


def _snapshot_load(snap: dict, d: int, l: int):
    if snap.get("version") != SNAPSHOT_VERSION:
        raise WorkloadError(f"unsupported snapshot version {snap.get('version')}")
    tables = tables_from_dict(snap["pattern_tables"])
    if (tables.d, tables.l) != (d, l):
        raise WorkloadError(
            f"snapshot geometry ({tables.d}, {tables.l}) != requested ({d}, {l})"
        )
    acc = GlobalCostAccumulator(d, l, snap["accumulator"]["a"],
                                snap["accumulator"]["n"])
    return acc, tables


def cmd_tables(args) -> int:
    _echo_config(args)
    if args.what == "build":
        workload = load_queries(args.queries, args.d, args.l)
        acc = init_global(workload)
        tables = build_pattern_tables(workload)
        with open(args.out, "w") as f:
            json.dump(_snapshot_dump(acc, tables), f)
        print(f"wrote snapshot for {workload.n} queries to {args.out}")
    else:
        with open(args.tables) as f:
            snap = json.load(f)
        t = snap["pattern_tables"]
        nonzero = sum(
            sum(1 for v in _flatten(tbl) if v) for tbl in t["tables"]
        )
        print(json.dumps({
            "version": snap["version"],
            "d": t["d"],
            "l": t["l"],
            "queries": t["n"],
            "total_cells": t["v_total"],
            "nonzero_table_cells": nonzero,
        }, indent=2))
    return 0


def _flatten(nested):
    if isinstance(nested, list):
        for item in nested:
            yield from _flatten(item)
    else:
        yield nested


def _load_learner_config(path, seed) -> LearnerConfig:
    if path is None:
        cfg = {}
    elif str(path).endswith(".toml"):
        with open(path, "rb") as f:
            cfg = tomllib.load(f)
    else:
        with open(path) as f:
            cfg = json.load(f)
    if "hidden_sizes" in cfg:
        cfg["hidden_sizes"] = tuple(cfg["hidden_sizes"])
    if seed is not None:
        cfg["seed"] = seed
    return LearnerConfig(**cfg)


def cmd_learn(args) -> int:
    _echo_config(args)
    workload = load_queries(args.queries, args.d, args.l)
    config = _load_learner_config(args.config, args.seed)
    sigma1 = _resolve_curve(args.initial, args.d, args.l)
    acc = init_global(workload)
    tables = build_pattern_tables(workload)
    result = learn_bmc(sigma1, tables, acc, config)
    print(f"initial curve {render_bmc(sigma1)} cost {result.initial_cost}")
    print(
        f"learned curve {render_bmc(result.best_spec)} cost {result.best_cost} "
        f"(ratio {result.best_cost / result.initial_cost:.4f})"
    )
    with open(args.out, "w") as f:
        f.write(render_bmc(result.best_spec) + "\n")
    if args.trace:
        with open(args.trace, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["step", "episode", "epsilon", "action", "cost", "ratio",
                        "loss"])
            for rec in result.history:
                w.writerow([rec.step, rec.episode, f"{rec.epsilon:.6f}",
                            rec.action, rec.cost, f"{rec.ratio:.8f}",
                            f"{rec.loss:.8g}"])
    return 0


def cmd_simulate(args) -> int:
    _echo_config(args)
    dataset = load_dataset(args.data, args.d, args.l)
    workload = load_queries(args.queries, args.d, args.l)
    curves = {}
    for name in (s.strip() for s in args.curves.split(",")):
        if name.lower() == "hc":
            curves[name] = HILBERT
        else:
            curves[name] = _resolve_curve(name, args.d, args.l)
    reports = compare_curves(dataset, workload, curves, args.block_size, args.mode)
    rows = []
    for name, rep in reports.items():
        for qid, (blocks, size, prec) in enumerate(
            zip(rep.blocks, rep.result_sizes, rep.precisions)
        ):
            rows.append({"curve": name, "query_id": qid, "blocks": blocks,
                         "result_size": size, "precision": prec})
    _write_rows(rows, args.out, args.format)
    summary = {
        name: {
            "mean_blocks": rep.mean_blocks,
            "median_blocks": rep.median_blocks,
            "mean_precision": rep.mean_precision,
        }
        for name, rep in reports.items()
    }
    if args.summary:
        with open(args.summary, "w") as f:
            json.dump(summary, f, indent=2)
    print(json.dumps(summary, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bmcurve",
                                description="bit-merging curve toolkit")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def add_geometry(sp):
        sp.add_argument("--d", type=int, default=2, help="dimension count")
        sp.add_argument("--l", type=int, default=10, help="bits per dimension")

    g = sub.add_parser("gen", help="generate synthetic data or queries")
    gsub = g.add_subparsers(dest="what", required=True)
    gd = gsub.add_parser("data")
    add_geometry(gd)
    gd.add_argument("--kind", choices=["uni", "skew"], default="uni")
    gd.add_argument("--n", type=int, required=True)
    gd.add_argument("--seed", type=int, default=0)
    gd.add_argument("--out", required=True)
    gd.set_defaults(func=cmd_gen)
    gq = gsub.add_parser("queries")
    add_geometry(gq)
    gq.add_argument("--data", required=True, help="source dataset CSV")
    gq.add_argument("--n", type=int, required=True)
    gq.add_argument("--edge", help="per-dimension edge lengths, comma separated")
    gq.add_argument("--area", type=int, help="query area (d=2, with --aspect)")
    gq.add_argument("--aspect", help="x:y side ratio, e.g. 16:1")
    gq.add_argument("--seed", type=int, default=0)
    gq.add_argument("--out", required=True)
    gq.set_defaults(func=cmd_gen)

    e = sub.add_parser("estimate", help="cost estimation for curves")
    add_geometry(e)
    e.add_argument("--queries", required=True)
    e.add_argument("--curves", help="comma-separated curve strings or ZC/LC")
    e.add_argument("--curves-file")
    e.add_argument("--tables", help="snapshot from `tables build`")
    e.add_argument("--global", dest="do_global", action="store_true")
    e.add_argument("--local", dest="do_local", action="store_true")
    e.add_argument("--naive", action="store_true",
                   help="also run the brute-force baselines and cross-check")
    e.add_argument("--repeats", type=int, default=5)
    e.add_argument("--format", choices=["csv", "json"], default="csv")
    e.add_argument("--out")
    e.set_defaults(func=cmd_estimate)

    t = sub.add_parser("tables", help="build or inspect workload snapshots")
    tsub = t.add_subparsers(dest="what", required=True)
    tb = tsub.add_parser("build")
    add_geometry(tb)
    tb.add_argument("--queries", required=True)
    tb.add_argument("--out", required=True)
    tb.set_defaults(func=cmd_tables)
    ti = tsub.add_parser("info")
    ti.add_argument("--tables", required=True)
    ti.set_defaults(func=cmd_tables)

    le = sub.add_parser("learn", help="search for a query-efficient curve")
    add_geometry(le)
    le.add_argument("--queries", required=True)
    le.add_argument("--config", help="learner config TOML or JSON")
    le.add_argument("--initial", default="zc")
    le.add_argument("--seed", type=int)
    le.add_argument("--out", required=True, help="output curve string file")
    le.add_argument("--trace", help="training trace CSV")
    le.set_defaults(func=cmd_learn)

    s = sub.add_parser("simulate", help="block-access simulation")
    add_geometry(s)
    s.add_argument("--data", required=True)
    s.add_argument("--queries", required=True)
    s.add_argument("--curves", required=True,
                   help="comma-separated curve strings, ZC, LC, or HC")
    s.add_argument("--block-size", type=int, default=128)
    s.add_argument("--mode", choices=["per-section", "full-range"],
                   default="per-section")
    s.add_argument("--format", choices=["csv", "json"], default="csv")
    s.add_argument("--out")
    s.add_argument("--summary", help="aggregate JSON output path")
    s.set_defaults(func=cmd_simulate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CurveError, WorkloadError, LearnerError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
