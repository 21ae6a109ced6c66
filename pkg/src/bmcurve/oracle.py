"""Brute-force reference implementations.

These traverse every cell of a query, so they are slow on purpose: they serve
as ground truth for the closed-form estimators and as the naive baselines in
the efficiency benchmarks.
"""

from __future__ import annotations

import math

import numpy as np

from .curve import BmcSpec, curve_value_array
from .global_cost import global_cost_naive
from .local_cost import combined_cost
from .workload import RangeQuery, Workload, cell_count

DEFAULT_CELL_BUDGET = 1 << 22


class BudgetError(RuntimeError):
    """Enumeration would exceed the configured cell budget."""


def naive_global_cost(spec: BmcSpec, workload: Workload) -> int:
    """Sum of per-query corner-value spans, one query at a time."""
    return sum(global_cost_naive(spec, q) for q in workload.queries)


def query_cells(q: RangeQuery) -> np.ndarray:
    """All grid cells inside the query box as an (V, d) array."""
    axes = [np.arange(a, b + 1, dtype=np.int64) for a, b in zip(q.lo, q.hi)]
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def enumerate_sections(
    spec: BmcSpec, q: RangeQuery, budget: int = DEFAULT_CELL_BUDGET
) -> list[tuple[int, int]]:
    """Sorted disjoint curve-value intervals covering exactly the query's cells."""
    v = cell_count(q)
    if v > budget:
        raise BudgetError(f"query holds {v} cells, budget is {budget}")
    values = np.sort(curve_value_array(spec, query_cells(q)).astype(np.int64))
    breaks = np.flatnonzero(np.diff(values) > 1)
    starts = np.concatenate(([0], breaks + 1))
    ends = np.concatenate((breaks, [len(values) - 1]))
    return [(int(values[s]), int(values[e])) for s, e in zip(starts, ends)]


def naive_section_count(
    spec: BmcSpec, workload: Workload, budget: int = DEFAULT_CELL_BUDGET
) -> int:
    return sum(len(enumerate_sections(spec, q, budget)) for q in workload.queries)


def naive_edge_count(
    spec: BmcSpec, q: RangeQuery, budget: int = DEFAULT_CELL_BUDGET
) -> int:
    """Count of value pairs (v, v+1) with both cells inside the query."""
    return cell_count(q) - len(enumerate_sections(spec, q, budget))


def all_bmcs(d: int, l: int):
    """Yield every valid curve for (d, l), slots in lexicographic order.

    Distinct permutations of the slot multiset, generated recursively.
    """

    def rec(remaining, prefix):
        if not any(remaining):
            yield tuple(prefix)
            return
        for dim in range(d):
            if remaining[dim]:
                remaining[dim] -= 1
                prefix.append(dim)
                yield from rec(remaining, prefix)
                prefix.pop()
                remaining[dim] += 1

    for slots in rec([l] * d, []):
        yield BmcSpec(d, l, slots)


def bmc_count(d: int, l: int) -> int:
    return math.factorial(d * l) // math.factorial(l) ** d


def exhaustive_best_bmc(
    workload: Workload, budget: int = 10**6
) -> tuple[BmcSpec, int]:
    """Score every curve with the exact cost model and return the argmin.

    Ties break toward the lexicographically smallest slot sequence, which is
    the enumeration order.
    """
    from .global_cost import init_global
    from .local_cost import build_pattern_tables

    d, l = workload.d, workload.l
    m = bmc_count(d, l)
    if m > budget:
        raise BudgetError(f"{m} candidate curves exceed budget {budget}")
    acc = init_global(workload)
    tables = build_pattern_tables(workload)
    best_spec, best_cost = None, None
    for spec in all_bmcs(d, l):
        c = combined_cost(spec, acc, tables)
        if best_cost is None or c < best_cost:
            best_spec, best_cost = spec, c
    return best_spec, best_cost
