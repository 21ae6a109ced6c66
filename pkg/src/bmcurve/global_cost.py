"""Global cost: the curve-value span a query touches.

Per query this is F(hi) - F(lo) + 1. Summed over a workload it splits into a
curve-independent per-bit difference matrix and curve-dependent rank weights,
so after one pass over the queries every candidate curve is scored in
O(d * l) time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curve import BmcSpec, curve_value
from .workload import RangeQuery, Workload


class CostError(ValueError):
    """Geometry mismatch between a curve and a precomputed summary."""


@dataclass(frozen=True)
class GlobalCostAccumulator:
    """Workload summary for closed-form global cost.

    ``a[j, k]`` sums, over all queries, the difference between bit ``k`` of
    the upper and lower corner in dimension ``j``. Entries are signed and
    bounded by the query count ``n``.
    """

    d: int
    l: int
    a: np.ndarray
    n: int

    def __post_init__(self):
        arr = np.asarray(self.a, dtype=np.int64)
        if arr.shape != (self.d, self.l):
            raise CostError(f"accumulator shape {arr.shape} != ({self.d}, {self.l})")
        arr.setflags(write=False)
        object.__setattr__(self, "a", arr)


def global_cost_naive(spec: BmcSpec, q: RangeQuery) -> int:
    """Per-query global cost from the two corner curve values."""
    return curve_value(spec, q.hi) - curve_value(spec, q.lo) + 1


def init_global(workload: Workload) -> GlobalCostAccumulator:
    """One pass over the queries; the result is reusable across all curves."""
    d, l = workload.d, workload.l
    if workload.n == 0:
        return GlobalCostAccumulator(d, l, np.zeros((d, l), dtype=np.int64), 0)
    if workload.n < 64:
        rows = [[0] * l for _ in range(d)]
        for q in workload.queries:
            for j in range(d):
                lo_j, hi_j = q.lo[j], q.hi[j]
                row = rows[j]
                for k in range(l):
                    row[k] += ((hi_j >> k) & 1) - ((lo_j >> k) & 1)
        return GlobalCostAccumulator(d, l, np.array(rows, dtype=np.int64),
                                     workload.n)
    lo = np.array([q.lo for q in workload.queries], dtype=np.int64)
    hi = np.array([q.hi for q in workload.queries], dtype=np.int64)
    ks = np.arange(l, dtype=np.int64)
    # bits[q, j, k] = bit k of corner coordinate in dimension j
    hi_bits = (hi[:, :, None] >> ks) & 1
    lo_bits = (lo[:, :, None] >> ks) & 1
    a = (hi_bits - lo_bits).sum(axis=0)
    return GlobalCostAccumulator(d, l, a, workload.n)


def global_cost_closed(spec: BmcSpec, acc: GlobalCostAccumulator) -> int:
    """Total workload global cost in O(d * l), independent of the query count."""
    if (spec.d, spec.l) != (acc.d, acc.l):
        raise CostError(
            f"curve geometry ({spec.d}, {spec.l}) != accumulator ({acc.d}, {acc.l})"
        )
    if acc.n == 0:
        return 0
    total = 0
    for j in range(spec.d):
        for k in range(spec.l):
            total += int(acc.a[j, k]) << spec.rank(j, k)
    return total + acc.n
