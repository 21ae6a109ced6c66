import numpy as np
import pytest

from bmcurve.curve import curve_value, parse_bmc, render_bmc
from bmcurve.oracle import (
    BudgetError,
    all_bmcs,
    bmc_count,
    enumerate_sections,
    exhaustive_best_bmc,
    naive_edge_count,
    naive_global_cost,
)
from bmcurve.workload import RangeQuery, Workload, cell_count

XYXYXY = parse_bmc("XYXYXY", 2, 3)
WORKED_QUERY = RangeQuery((0, 2), (4, 3))


def test_naive_global_sums_queries():
    wl = Workload(2, 3, (WORKED_QUERY, RangeQuery((0, 0), (7, 7))))
    expected = (
        curve_value(XYXYXY, (4, 3)) - curve_value(XYXYXY, (0, 2)) + 1 + 64
    )
    assert naive_global_cost(XYXYXY, wl) == expected
    assert naive_global_cost(XYXYXY, Workload(2, 3, ())) == 0


def test_sections_worked_example():
    secs = enumerate_sections(XYXYXY, WORKED_QUERY)
    assert len(secs) == 3


def test_sections_full_grid_and_single_cell():
    assert enumerate_sections(XYXYXY, RangeQuery((0, 0), (7, 7))) == [(0, 63)]
    p = (3, 5)
    v = curve_value(XYXYXY, p)
    assert enumerate_sections(XYXYXY, RangeQuery(p, p)) == [(v, v)]


def test_sections_partition_cell_values():
    q = RangeQuery((1, 2), (6, 5))
    secs = enumerate_sections(XYXYXY, q)
    covered = [v for a, b in secs for v in range(a, b + 1)]
    expected = sorted(
        curve_value(XYXYXY, (x, y))
        for x in range(q.lo[0], q.hi[0] + 1)
        for y in range(q.lo[1], q.hi[1] + 1)
    )
    assert covered == expected
    # disjoint with gaps of at least one value between intervals
    for (a1, b1), (a2, b2) in zip(secs, secs[1:]):
        assert b1 + 1 < a2


def test_edge_count_examples():
    assert naive_edge_count(XYXYXY, WORKED_QUERY) == 7
    p = (2, 2)
    assert naive_edge_count(XYXYXY, RangeQuery(p, p)) == 0


def test_edges_plus_sections_equals_cells():
    rng = np.random.default_rng(3)
    for spec in all_bmcs(2, 3):
        lo = rng.integers(0, 8, size=2)
        hi = [int(rng.integers(a, 8)) for a in lo]
        q = RangeQuery((int(lo[0]), int(lo[1])), tuple(hi))
        assert naive_edge_count(spec, q) + len(
            enumerate_sections(spec, q)
        ) == cell_count(q)


def test_directed_edge_bit_shape():
    # every counted edge (v, v+1) flips a 0 to 1 with all lower bits 1 -> 0
    q = RangeQuery((1, 1), (6, 6))
    secs = enumerate_sections(XYXYXY, q)
    edges = [v for a, b in secs for v in range(a, b)]
    assert edges  # the query is large enough to contain edges
    for v in edges:
        w = v + 1
        k = (v ^ w).bit_length() - 1
        assert (v >> k) & 1 == 0 and (w >> k) & 1 == 1
        assert v & ((1 << k) - 1) == (1 << k) - 1
        assert w & ((1 << k) - 1) == 0
        assert v >> (k + 1) == w >> (k + 1)


def test_budget_enforced():
    spec = parse_bmc("XY" * 10, 2, 10)
    with pytest.raises(BudgetError):
        enumerate_sections(spec, RangeQuery((0, 0), (1023, 1023)), budget=1000)


def test_bmc_counts():
    assert bmc_count(1, 3) == 1
    assert bmc_count(2, 1) == 2
    assert bmc_count(2, 3) == 20
    assert sum(1 for _ in all_bmcs(2, 3)) == 20
    assert len({s.slots for s in all_bmcs(3, 2)}) == bmc_count(3, 2)


def test_exhaustive_best_single_dimension():
    wl = Workload(1, 3, (RangeQuery((1,), (5,)),))
    best, cost = exhaustive_best_bmc(wl)
    assert render_bmc(best) == "XXX"


def test_exhaustive_best_d2_l1():
    # a query wide in x and flat in y favors x varying fastest (YX)
    wl = Workload(2, 1, (RangeQuery((0, 0), (1, 0)),))
    best, cost = exhaustive_best_bmc(wl)
    assert render_bmc(best) == "YX"


def test_exhaustive_budget():
    wl = Workload(2, 3, (RangeQuery((0, 0), (1, 1)),))
    with pytest.raises(BudgetError):
        exhaustive_best_bmc(wl, budget=10)


def test_exhaustive_best_is_argmin():
    from bmcurve.global_cost import init_global
    from bmcurve.local_cost import build_pattern_tables, combined_cost

    rng = np.random.default_rng(8)
    queries = []
    for _ in range(15):
        lo = rng.integers(0, 8, size=2)
        hi = [int(rng.integers(a, 8)) for a in lo]
        queries.append(RangeQuery((int(lo[0]), int(lo[1])), tuple(hi)))
    wl = Workload(2, 3, tuple(queries))
    best, cost = exhaustive_best_bmc(wl)
    acc = init_global(wl)
    tables = build_pattern_tables(wl)
    costs = [combined_cost(s, acc, tables) for s in all_bmcs(2, 3)]
    assert cost == min(costs)
    assert combined_cost(best, acc, tables) == cost
