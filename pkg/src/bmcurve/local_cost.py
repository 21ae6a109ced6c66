"""Local cost: the number of contiguous curve runs (sections) inside queries.

Sections are counted indirectly: cells minus directed edges, where a directed
edge is a consecutive curve-value pair with both cells inside the query. Each
edge decomposes into a rise in one dimension (bit k flips 0->1, the k-1 bits
below it 1->0) and a drop in every other dimension (its lowest bits 1->0).
Rise and drop occurrences per dimension depend only on the query interval,
so their products can be accumulated into curve-independent tables; a curve
then determines which table cell applies to each rise, giving O(d * l) edge
counting per curve.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .curve import BmcSpec
from .global_cost import CostError, GlobalCostAccumulator, global_cost_closed
from .workload import Workload, cell_count


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def count_rise(lo: int, hi: int, k: int) -> int:
    """Occurrences in [lo, hi] of the value pair (a*2^k + 2^(k-1) - 1, a*2^k + 2^(k-1))."""
    step = 1 << k
    half = 1 << (k - 1)
    v = (hi - half) // step - _ceil_div(lo - (half - 1), step) + 1
    return max(v, 0)


def count_drop(lo: int, hi: int, k: int) -> int:
    """Occurrences in [lo, hi] of the value pair (a*2^k + 2^k - 1, a*2^k).

    k=0 degenerates to the interval length: no bits drop in this dimension.
    """
    step = 1 << k
    v = (hi + 1) // step - _ceil_div(lo, step)
    return max(v, 0)


@dataclass(frozen=True)
class PatternTableSet:
    """Curve-independent workload summary for edge counting.

    ``tables[b]`` has shape (l,) + (l+1,) * (d-1): axis 0 is the rise
    exponent minus one for dimension ``b``, the remaining axes are drop
    exponents of the other dimensions in ascending dimension order. A cell
    accumulates, over all queries, rise count times the product of drop
    counts. ``v_total`` is the total cell count of the workload.
    """

    d: int
    l: int
    tables: tuple[np.ndarray, ...]
    v_total: int
    n: int

    def __post_init__(self):
        shape = (self.l,) + (self.l + 1,) * (self.d - 1)
        if len(self.tables) != self.d:
            raise CostError(f"expected {self.d} tables, got {len(self.tables)}")
        fixed = []
        for t in self.tables:
            t = np.asarray(t, dtype=np.int64)
            if t.shape != shape:
                raise CostError(f"table shape {t.shape} != {shape}")
            t.setflags(write=False)
            fixed.append(t)
        object.__setattr__(self, "tables", tuple(fixed))


def build_pattern_tables(workload: Workload) -> PatternTableSet:
    """One pass over the queries; O(n * d * l * (l+1)^(d-1)) build."""
    d, l = workload.d, workload.l
    shape = (l,) + (l + 1,) * (d - 1)
    tables = [np.zeros(shape, dtype=np.int64) for _ in range(d)]
    v_total = 0
    for q in workload.queries:
        v_total += cell_count(q)
        rises = [
            np.array([count_rise(q.lo[b], q.hi[b], k) for k in range(1, l + 1)])
            for b in range(d)
        ]
        drops = [
            np.array([count_drop(q.lo[b], q.hi[b], k) for k in range(l + 1)])
            for b in range(d)
        ]
        for b in range(d):
            others = [drops[o] for o in range(d) if o != b]
            tables[b] += reduce(np.multiply.outer, [rises[b]] + others)
    return PatternTableSet(d, l, tuple(tables), v_total, workload.n)


def drop_vector_for(spec: BmcSpec, b: int, i: int) -> tuple[int, ...]:
    """Drop exponents forced on the other dimensions by a rise of bit ``i`` in ``b``.

    Entry for dimension ``o`` is the number of ``o``-slots ranked strictly
    below the rising bit: those are exactly the bits that flip 1->0 together
    with the rise. Ordered by ascending dimension index, skipping ``b``.
    """
    rank = spec.rank(b, i - 1)
    out = []
    for o in range(spec.d):
        if o == b:
            continue
        out.append(sum(1 for r in spec.ranks[o] if r < rank))
    return tuple(out)


def edges_via_tables(spec: BmcSpec, tables: PatternTableSet) -> int:
    """Total directed-edge count for the workload under ``spec``; O(d * l) lookups."""
    if (spec.d, spec.l) != (tables.d, tables.l):
        raise CostError(
            f"curve geometry ({spec.d}, {spec.l}) != tables ({tables.d}, {tables.l})"
        )
    total = 0
    for b in range(spec.d):
        t = tables.tables[b]
        for i in range(1, spec.l + 1):
            idx = (i - 1,) + drop_vector_for(spec, b, i)
            total += int(t[idx])
    return total


def local_cost_from_tables(spec: BmcSpec, tables: PatternTableSet) -> int:
    """Total section count: cells minus edges."""
    sections = tables.v_total - edges_via_tables(spec, tables)
    if sections < tables.n:
        raise CostError(
            f"section count {sections} below query count {tables.n}; "
            "tables and curve disagree"
        )
    return sections


def combined_cost(
    spec: BmcSpec, acc: GlobalCostAccumulator, tables: PatternTableSet
) -> int:
    """Workload score: global span times section count."""
    return global_cost_closed(spec, acc) * local_cost_from_tables(spec, tables)


def tables_to_dict(tables: PatternTableSet) -> dict:
    return {
        "d": tables.d,
        "l": tables.l,
        "n": tables.n,
        "v_total": tables.v_total,
        "tables": [t.tolist() for t in tables.tables],
    }


def tables_from_dict(obj: dict) -> PatternTableSet:
    return PatternTableSet(
        obj["d"],
        obj["l"],
        tuple(np.array(t, dtype=np.int64) for t in obj["tables"]),
        obj["v_total"],
        obj["n"],
    )
