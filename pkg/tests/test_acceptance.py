"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py``. The timing criteria (4, 5)
measure relative shapes, not absolute numbers, so they are hardware-tolerant.
"""

import time
from contextlib import contextmanager

import numpy as np
import pytest

from bmcurve.curve import BmcSpec, parse_bmc, render_bmc, standard_curve
from bmcurve.global_cost import global_cost_closed, init_global
from bmcurve.learner import (
    LearnerConfig,
    QNetwork,
    apply_swap,
    learn_bmc,
    reward,
)
from bmcurve.local_cost import (
    build_pattern_tables,
    count_drop,
    count_rise,
    edges_via_tables,
    local_cost_from_tables,
)
from bmcurve.oracle import (
    all_bmcs,
    enumerate_sections,
    exhaustive_best_bmc,
    naive_edge_count,
    naive_global_cost,
    naive_section_count,
)
from bmcurve.simulator import build_index, compare_curves, linear_scan, run_query
from bmcurve.workload import (
    RangeQuery,
    Workload,
    cell_count,
    gen_dataset,
    gen_queries,
)


@contextmanager
def criterion(num: int, name: str, capfd):
    def line(verdict):
        # suspend capture so the verdict shows up in normal runs
        with capfd.disabled():
            print(f"ACCEPTANCE {num} ({name}): {verdict}", flush=True)

    try:
        yield
    except BaseException:
        line("FAIL")
        raise
    line("PASS")


def _median_time(fn, repeats: int) -> float:
    fn()  # warm-up
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return float(np.median(times))


def _random_query(rng, d, l):
    limit = 1 << l
    lo = [int(x) for x in rng.integers(0, limit, size=d)]
    hi = [int(rng.integers(a, limit)) for a in lo]
    return RangeQuery(tuple(lo), tuple(hi))


def test_criterion_1_worked_example(capfd):
    with criterion(1, "worked-example fidelity", capfd):
        t0 = time.perf_counter()
        q = RangeQuery((0, 2), (4, 3))
        spec = parse_bmc("XYXYXY", 2, 3)
        assert [count_rise(0, 4, k) for k in (1, 2, 3)] == [2, 1, 1]
        assert count_drop(2, 3, 1) == 1
        assert count_drop(0, 4, 0) == 5
        wl = Workload(2, 3, (q,))
        tables = build_pattern_tables(wl)
        assert edges_via_tables(spec, tables) == 7
        assert local_cost_from_tables(spec, tables) == 3
        assert cell_count(q) == 10
        assert time.perf_counter() - t0 < 1.0


@pytest.fixture(scope="module")
def exhaustive_instances():
    rng = np.random.default_rng(20)
    wl = Workload(2, 3, tuple(_random_query(rng, 2, 3) for _ in range(200)))
    d3 = []
    for _ in range(500):
        l = int(rng.integers(1, 4))
        slots = [b for b in range(3) for _ in range(l)]
        rng.shuffle(slots)
        d3.append((BmcSpec(3, l, tuple(slots)), _random_query(rng, 3, l)))
    return wl, d3


def test_criterion_2_oracle_equivalence(exhaustive_instances, capfd):
    with criterion(2, "oracle equivalence", capfd):
        t0 = time.perf_counter()
        wl, d3 = exhaustive_instances
        acc = init_global(wl)
        tables = build_pattern_tables(wl)
        for spec in all_bmcs(2, 3):
            assert local_cost_from_tables(spec, tables) == naive_section_count(
                spec, wl
            )
            assert global_cost_closed(spec, acc) == naive_global_cost(spec, wl)
        for spec, q in d3:
            single = Workload(3, spec.l, (q,))
            t1 = build_pattern_tables(single)
            a1 = init_global(single)
            assert local_cost_from_tables(spec, t1) == len(
                enumerate_sections(spec, q)
            )
            assert global_cost_closed(spec, a1) == naive_global_cost(spec, single)
        assert time.perf_counter() - t0 < 60.0


def test_criterion_3_identity(exhaustive_instances, capfd):
    with criterion(3, "edges + sections = cells", capfd):
        wl, d3 = exhaustive_instances
        for spec in all_bmcs(2, 3):
            for q in wl.queries:
                assert naive_edge_count(spec, q) + len(
                    enumerate_sections(spec, q)
                ) == cell_count(q)
        for spec, q in d3:
            assert naive_edge_count(spec, q) + len(
                enumerate_sections(spec, q)
            ) == cell_count(q)


@pytest.fixture(scope="module")
def timing_sweep():
    d, l = 2, 10
    spec = standard_curve("zc", d, l)
    source = gen_dataset("uni", 4096, d, l, seed=0)
    data = {}
    for exp in range(11):
        n = 1 << exp
        wl = gen_queries(source, n, edges=(32, 32), seed=exp)
        acc = init_global(wl)
        tables = build_pattern_tables(wl)
        naive_reps = 3 if n >= 256 else 5
        data[n] = {
            "igc": _median_time(lambda: init_global(wl), 5),
            "ilc": _median_time(lambda: build_pattern_tables(wl), 3),
            "gc": _median_time(lambda: global_cost_closed(spec, acc), 25),
            "lc": _median_time(lambda: local_cost_from_tables(spec, tables), 25),
            "ngc": _median_time(lambda: naive_global_cost(spec, wl), naive_reps),
            "nlc": _median_time(lambda: naive_section_count(spec, wl), naive_reps),
        }
    return data


def test_criterion_4_constant_time_scaling(timing_sweep, capfd):
    with criterion(4, "constant-time scaling", capfd):
        t0 = time.perf_counter()
        gc = [timing_sweep[n]["gc"] for n in sorted(timing_sweep)]
        lc = [timing_sweep[n]["lc"] for n in sorted(timing_sweep)]
        assert max(gc) / min(gc) < 3.0
        assert max(lc) / min(lc) < 3.0
        assert timing_sweep[1024]["ngc"] / timing_sweep[1]["ngc"] >= 100.0
        assert timing_sweep[1024]["nlc"] / timing_sweep[1]["nlc"] >= 100.0
        assert timing_sweep[1024]["nlc"] / timing_sweep[1024]["lc"] >= 100.0
        assert time.perf_counter() - t0 < 600.0


def test_criterion_5_init_cheaper_than_naive(timing_sweep, capfd):
    with criterion(5, "initialization cheaper than one naive pass", capfd):
        for n in sorted(timing_sweep):
            if n < 2:
                continue
            assert timing_sweep[n]["igc"] <= timing_sweep[n]["ngc"], f"IGC at n={n}"
            assert timing_sweep[n]["ilc"] <= timing_sweep[n]["nlc"], f"ILC at n={n}"


def test_criterion_6_learner_optimality(capfd):
    with criterion(6, "learner optimality at toy scale", capfd):
        ds = gen_dataset("skew", 400, 2, 3, seed=17)
        wl = gen_queries(ds, 30, edges=(6, 1), seed=18)
        _, opt_cost = exhaustive_best_bmc(wl)
        acc = init_global(wl)
        tables = build_pattern_tables(wl)
        sigma1 = standard_curve("zc", 2, 3)
        hits = 0
        for seed in range(10):
            config = LearnerConfig(
                episodes=50, steps_per_episode=30, batch_size=32,
                hidden_sizes=(32, 32), seed=seed,
            )
            t0 = time.perf_counter()
            res = learn_bmc(sigma1, tables, acc, config)
            assert time.perf_counter() - t0 < 60.0
            if res.best_cost <= 1.1 * opt_cost:
                hits += 1
        assert hits >= 9, f"only {hits}/10 seeds within 10% of the optimum"


def test_criterion_7_reward_arithmetic(capfd):
    with criterion(7, "reward arithmetic and swap sequence", capfd):
        assert abs(reward(175, 90, 175) - 85 / 175) < 1e-12
        assert abs(reward(90, 48, 175) - 42 / 175) < 1e-12
        s = parse_bmc("YXXYYX", 2, 3)
        s = apply_swap(s, 3)
        assert render_bmc(s) == "YXYXYX"
        s = apply_swap(s, 1)
        assert render_bmc(s) == "YXYXXY"


def test_criterion_8_end_to_end_ordering(capfd):
    with criterion(8, "end-to-end query-cost ordering", capfd):
        t0 = time.perf_counter()
        d, l, block = 2, 10, 128
        ds = gen_dataset("skew", 100_000, d, l, seed=42)
        wl = gen_queries(ds, 2000, area=1024, aspect=(16, 1), seed=7)
        acc = init_global(wl)
        tables = build_pattern_tables(wl)
        zc = standard_curve("zc", d, l)
        lc = standard_curve("lc", d, l)
        config = LearnerConfig(
            episodes=12, steps_per_episode=25, batch_size=32,
            hidden_sizes=(64, 64), seed=0,
        )
        learned = learn_bmc(zc, tables, acc, config).best_spec
        curves = {"learned": learned, "ZC": zc, "LC": lc}
        for mode in ("per-section", "full-range"):
            reports = compare_curves(ds, wl, curves, block, mode)
            if mode == "full-range":
                # the combined cost models the span a full-range scan reads,
                # so the block-count ordering is checked in that mode
                assert reports["learned"].mean_blocks <= reports["ZC"].mean_blocks
                assert reports["learned"].mean_blocks <= reports["LC"].mean_blocks
        index = build_index(ds, learned, block)
        for q in wl.queries:
            expected = sorted(map(tuple, linear_scan(ds, q).tolist()))
            for mode in ("per-section", "full-range"):
                res, _, _ = run_query(index, q, mode)
                assert sorted(map(tuple, res.tolist())) == expected
        assert time.perf_counter() - t0 < 300.0


def test_criterion_9_gradient_check(capfd):
    with criterion(9, "gradient vs finite differences", capfd):
        rng = np.random.default_rng(11)
        for _ in range(10):
            in_dim = int(rng.integers(3, 10))
            out_dim = int(rng.integers(2, 6))
            hidden = tuple(
                int(rng.integers(3, 9)) for _ in range(int(rng.integers(1, 3)))
            )
            net = QNetwork(in_dim, out_dim, hidden, rng)
            for b in net.biases:
                b += rng.normal(0.0, 0.1, size=b.shape)
            # keep pre-activations away from the ReLU kink, where the
            # two-sided difference quotient is not the subgradient
            while True:
                states = rng.normal(size=(5, in_dim))
                h = states
                kink = False
                for w, b in zip(net.weights[:-1], net.biases[:-1]):
                    z = h @ w + b
                    kink = kink or np.abs(z).min() < 1e-4
                    h = np.maximum(z, 0.0)
                if not kink:
                    break
            actions = rng.integers(0, out_dim, size=5)
            targets = rng.normal(size=5)
            _, grads = net.loss_and_grads(states, actions, targets)
            eps = 1e-6
            for p, g in zip(net.params, grads):
                fd = np.zeros_like(p)
                it = np.nditer(p, flags=["multi_index"])
                while not it.finished:
                    idx = it.multi_index
                    orig = p[idx]
                    p[idx] = orig + eps
                    hi = net.loss(states, actions, targets)
                    p[idx] = orig - eps
                    lo = net.loss(states, actions, targets)
                    p[idx] = orig
                    fd[idx] = (hi - lo) / (2 * eps)
                    it.iternext()
                denom = max(np.abs(fd).max(), np.abs(g).max(), 1e-8)
                assert np.abs(g - fd).max() / denom < 1e-4
