"""Block-access simulator: sort a dataset by a curve, pack fixed-size blocks,
and replay a workload counting how many blocks each query touches.

This stands in for the leaf level of a one-dimensional index: inner-node
accesses are the same for every ordering, so leaf block counts are the
signal that separates curves.
"""

from __future__ import annotations

from dataclasses import dataclass
from statistics import mean, median

import numpy as np

from .curve import BmcSpec, curve_value, curve_value_array
from .oracle import DEFAULT_CELL_BUDGET, BudgetError, query_cells
from .workload import Dataset, RangeQuery, Workload, cell_count

HILBERT = "hilbert"

DEFAULT_BLOCK_SIZE = 128


class SimulatorError(ValueError):
    pass


def hilbert_index(coords, l: int) -> int:
    """Hilbert curve value of one grid cell; supports d in {2, 3}."""
    d = len(coords)
    if d not in (2, 3):
        raise SimulatorError(f"hilbert ordering supports d in {{2, 3}}, got {d}")
    x = list(coords)
    # Convert axes to transpose form (Gray-code undo plus rotations).
    m = 1 << (l - 1)
    q = m
    while q > 1:
        p = q - 1
        for i in range(d):
            if x[i] & q:
                x[0] ^= p
            else:
                t = (x[0] ^ x[i]) & p
                x[0] ^= t
                x[i] ^= t
        q >>= 1
    for i in range(1, d):
        x[i] ^= x[i - 1]
    t = 0
    q = m
    while q > 1:
        if x[d - 1] & q:
            t ^= q - 1
        q >>= 1
    for i in range(d):
        x[i] ^= t
    # Interleave the transpose bits, x[0] most significant.
    value = 0
    for bit in range(l - 1, -1, -1):
        for i in range(d):
            value = (value << 1) | ((x[i] >> bit) & 1)
    return value


def hilbert_order(dataset_or_points, l: int | None = None) -> np.ndarray:
    """Hilbert curve values for a dataset or an (N, d) coordinate array."""
    if isinstance(dataset_or_points, Dataset):
        pts, l = dataset_or_points.points, dataset_or_points.l
    else:
        pts = np.asarray(dataset_or_points)
        if l is None:
            raise SimulatorError("bit length required for a raw point array")
    return np.array([hilbert_index(tuple(int(c) for c in p), l) for p in pts],
                    dtype=np.int64)


def _order_keys(order, points: np.ndarray, l: int) -> np.ndarray:
    if isinstance(order, BmcSpec):
        return curve_value_array(order, points).astype(np.int64)
    if order == HILBERT:
        return hilbert_order(points, l)
    raise SimulatorError(f"unknown ordering {order!r}")


@dataclass(frozen=True)
class OrderedIndex:
    """Points sorted by curve value and packed into blocks of ``block_size``."""

    order: object
    d: int
    l: int
    block_size: int
    points: np.ndarray
    keys: np.ndarray
    block_lo: np.ndarray
    block_hi: np.ndarray

    @property
    def n_blocks(self) -> int:
        return len(self.block_lo)


def build_index(dataset: Dataset, order, block_size: int = DEFAULT_BLOCK_SIZE) -> OrderedIndex:
    """Sort by curve value (stable on the original point order) and pack blocks."""
    if block_size < 1:
        raise SimulatorError(f"block size must be >= 1, got {block_size}")
    keys = _order_keys(order, dataset.points, dataset.l)
    perm = np.argsort(keys, kind="stable")
    skeys = keys[perm]
    spoints = dataset.points[perm]
    starts = np.arange(0, len(skeys), block_size)
    ends = np.minimum(starts + block_size, len(skeys)) - 1
    return OrderedIndex(
        order=order,
        d=dataset.d,
        l=dataset.l,
        block_size=block_size,
        points=spoints,
        keys=skeys,
        block_lo=skeys[starts],
        block_hi=skeys[ends],
    )


def query_sections(order, q: RangeQuery, l: int,
                   budget: int = DEFAULT_CELL_BUDGET) -> list[tuple[int, int]]:
    """Contiguous curve-value runs covering the query under any ordering."""
    v = cell_count(q)
    if v > budget:
        raise BudgetError(f"query holds {v} cells, budget is {budget}")
    cells = query_cells(q)
    values = np.sort(_order_keys(order, cells, l))
    breaks = np.flatnonzero(np.diff(values) > 1)
    starts = np.concatenate(([0], breaks + 1))
    ends = np.concatenate((breaks, [len(values) - 1]))
    return [(int(values[s]), int(values[e])) for s, e in zip(starts, ends)]


def _blocks_for_range(index: OrderedIndex, vlo: int, vhi: int) -> tuple[int, int]:
    """Half-open block range holding stored keys in [vlo, vhi]."""
    i0 = int(np.searchsorted(index.keys, vlo, side="left"))
    i1 = int(np.searchsorted(index.keys, vhi, side="right"))
    if i0 == i1:
        return 0, 0  # no stored value in the range
    return i0 // index.block_size, (i1 - 1) // index.block_size + 1


def _in_query(points: np.ndarray, q: RangeQuery) -> np.ndarray:
    lo = np.array(q.lo)
    hi = np.array(q.hi)
    return np.all((points >= lo) & (points <= hi), axis=1)


def run_query(index: OrderedIndex, q: RangeQuery, mode: str = "per-section"):
    """Execute one range query; returns (results, blocks_accessed, precision).

    "full-range" scans every block overlapping the corner-value span;
    "per-section" scans only blocks overlapping some section. Both filter
    false positives, so the result set is mode- and curve-independent.
    """
    if mode == "full-range":
        if isinstance(index.order, BmcSpec):
            # Monotone ordering: the corner values bound the query.
            vlo = curve_value(index.order, q.lo)
            vhi = curve_value(index.order, q.hi)
        else:
            secs = query_sections(index.order, q, index.l)
            vlo, vhi = secs[0][0], secs[-1][1]
        ranges = [(vlo, vhi)]
    elif mode == "per-section":
        ranges = query_sections(index.order, q, index.l)
    else:
        raise SimulatorError(f"unknown query mode {mode!r}")

    accessed = set()
    for vlo, vhi in ranges:
        first, last = _blocks_for_range(index, vlo, vhi)
        accessed.update(range(first, last))
    retrieved = 0
    results = []
    for b in sorted(accessed):
        s = b * index.block_size
        e = min(s + index.block_size, len(index.points))
        pts = index.points[s:e]
        retrieved += len(pts)
        hit = _in_query(pts, q)
        if hit.any():
            results.append(pts[hit])
    res = np.concatenate(results) if results else np.empty((0, index.d), dtype=np.int64)
    precision = len(res) / retrieved if retrieved else 1.0
    return res, len(accessed), precision


def linear_scan(dataset: Dataset, q: RangeQuery) -> np.ndarray:
    return dataset.points[_in_query(dataset.points, q)]


@dataclass
class SimReport:
    curve: str
    blocks: list[int]
    result_sizes: list[int]
    precisions: list[float]

    @property
    def mean_blocks(self) -> float:
        return mean(self.blocks) if self.blocks else 0.0

    @property
    def median_blocks(self) -> float:
        return median(self.blocks) if self.blocks else 0.0

    @property
    def mean_precision(self) -> float:
        return mean(self.precisions) if self.precisions else 1.0


def _result_signature(res: np.ndarray) -> bytes:
    return np.sort(res.view([("", res.dtype)] * res.shape[1]), axis=0).tobytes()


def compare_curves(
    dataset: Dataset,
    workload: Workload,
    curves: dict,
    block_size: int = DEFAULT_BLOCK_SIZE,
    mode: str = "per-section",
) -> dict[str, SimReport]:
    """Run the workload under each ordering; result sets must agree exactly."""
    reports = {}
    signatures = None
    for name, order in curves.items():
        index = build_index(dataset, order, block_size)
        report = SimReport(name, [], [], [])
        sigs = []
        for q in workload.queries:
            res, blocks, precision = run_query(index, q, mode)
            report.blocks.append(blocks)
            report.result_sizes.append(len(res))
            report.precisions.append(precision)
            sigs.append(_result_signature(np.ascontiguousarray(res)))
        if signatures is None:
            signatures = sigs
        elif sigs != signatures:
            raise SimulatorError(f"result sets under {name!r} differ across curves")
        reports[name] = report
    return reports
