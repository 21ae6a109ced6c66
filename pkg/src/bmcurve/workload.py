"""Range queries, datasets, and synthetic workload generation."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

SKEW_CLUSTERS = 5


class WorkloadError(ValueError):
    """Invalid query, dataset, or generator parameters."""


@dataclass(frozen=True)
class RangeQuery:
    """Closed per-dimension integer intervals [lo[i], hi[i]] on the grid."""

    lo: tuple[int, ...]
    hi: tuple[int, ...]

    def __post_init__(self):
        if len(self.lo) != len(self.hi):
            raise WorkloadError("lo and hi must have the same dimensionality")
        for a, b in zip(self.lo, self.hi):
            if a > b:
                raise WorkloadError(f"empty interval [{a}, {b}]")
            if a < 0:
                raise WorkloadError(f"negative coordinate {a}")

    @property
    def d(self) -> int:
        return len(self.lo)


@dataclass(frozen=True)
class Workload:
    """A set of range queries sharing one grid geometry."""

    d: int
    l: int
    queries: tuple[RangeQuery, ...]

    def __post_init__(self):
        limit = 1 << self.l
        for q in self.queries:
            if q.d != self.d:
                raise WorkloadError(f"query dimensionality {q.d} != {self.d}")
            if any(x >= limit for x in q.hi):
                raise WorkloadError(f"query {q} outside the 2^{self.l} grid")

    @property
    def n(self) -> int:
        return len(self.queries)


@dataclass(frozen=True)
class Dataset:
    """Grid points stored as an (N, d) integer array."""

    d: int
    l: int
    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.int64)
        if pts.ndim != 2 or pts.shape[1] != self.d:
            raise WorkloadError(f"points must be (N, {self.d}), got {pts.shape}")
        if pts.size and (pts.min() < 0 or pts.max() >= (1 << self.l)):
            raise WorkloadError("points outside the grid")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]


def cell_count(q: RangeQuery) -> int:
    """Number of grid cells inside the query box."""
    v = 1
    for a, b in zip(q.lo, q.hi):
        v *= b - a + 1
    return v


def gen_dataset(kind: str, n: int, d: int, l: int, seed: int) -> Dataset:
    """Generate a synthetic dataset: "uni" (uniform) or "skew" (clustered)."""
    if n < 1:
        raise WorkloadError(f"need n >= 1, got {n}")
    rng = np.random.default_rng(seed)
    limit = 1 << l
    kind = kind.lower()
    if kind == "uni":
        pts = rng.integers(0, limit, size=(n, d))
    elif kind == "skew":
        # Gaussian clusters with centers in the middle half of the domain
        # (keeps the spread strictly below uniform); out-of-range draws are
        # redrawn from their cluster so the marginal stays clustered.
        centers = rng.uniform(limit / 4, 3 * limit / 4, size=(SKEW_CLUSTERS, d))
        std = limit / 64.0
        labels = rng.integers(0, SKEW_CLUSTERS, size=n)
        raw = rng.normal(centers[labels], std)
        bad = np.any((raw < 0) | (raw >= limit), axis=1)
        while bad.any():
            raw[bad] = rng.normal(centers[labels[bad]], std)
            bad = np.any((raw < 0) | (raw >= limit), axis=1)
        pts = np.floor(raw).astype(np.int64)
    else:
        raise WorkloadError(f"unknown dataset kind {kind!r}")
    return Dataset(d, l, pts)


def _aspect_edges(area: int, aspect: tuple[int, int], l: int) -> tuple[int, int]:
    """Edge lengths of a 2-d box with the given area and x:y side ratio."""
    rx, ry = aspect
    ex = int(round(math.sqrt(area * rx / ry)))
    ey = int(round(math.sqrt(area * ry / rx)))
    ex = max(1, min(ex, 1 << l))
    ey = max(1, min(ey, 1 << l))
    return ex, ey


def gen_queries(
    source: Dataset,
    n: int,
    edges=None,
    area: int | None = None,
    aspect: tuple[int, int] | None = None,
    seed: int = 0,
) -> Workload:
    """Generate queries centered on points sampled from ``source``.

    Either ``edges`` (per-dimension lengths) or ``area`` with ``aspect``
    (d=2 only) fixes the box shape. Boxes are clamped to stay on the grid.
    """
    d, l = source.d, source.l
    limit = 1 << l
    if edges is None:
        if area is None or aspect is None:
            raise WorkloadError("need either edges or (area, aspect)")
        if d != 2:
            raise WorkloadError("aspect-ratio queries require d=2")
        edges = _aspect_edges(area, aspect, l)
    edges = tuple(int(e) for e in edges)
    if len(edges) != d:
        raise WorkloadError(f"need {d} edge lengths, got {len(edges)}")
    for e in edges:
        if not 1 <= e <= limit:
            raise WorkloadError(f"edge {e} outside [1, {limit}]")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, source.n, size=n)
    centers = source.points[idx]
    queries = []
    for c in centers:
        lo, hi = [], []
        for i, e in enumerate(edges):
            a = int(c[i]) - e // 2
            a = min(max(a, 0), limit - e)
            lo.append(a)
            hi.append(a + e - 1)
        queries.append(RangeQuery(tuple(lo), tuple(hi)))
    return Workload(d, l, tuple(queries))


def load_points(path, d: int, l: int, bounds) -> tuple[Dataset, int]:
    """Quantize a CSV of raw d-dimensional points onto the grid.

    ``bounds`` is a sequence of (min, max) per dimension. Rows with missing
    or non-numeric fields are dropped; returns (dataset, dropped_count).
    """
    if len(bounds) != d:
        raise WorkloadError(f"need {d} bound pairs, got {len(bounds)}")
    for mn, mx in bounds:
        if not mx > mn:
            raise WorkloadError(f"zero-width bounds ({mn}, {mx})")
    scale = (1 << l) - 1
    rows, dropped = [], 0
    with open(path, newline="") as f:
        for rec in csv.reader(f):
            if len(rec) < d:
                dropped += 1
                continue
            try:
                vals = [float(rec[i]) for i in range(d)]
            except ValueError:
                dropped += 1
                continue
            if any(math.isnan(v) for v in vals):
                dropped += 1
                continue
            cell = []
            for v, (mn, mx) in zip(vals, bounds):
                c = math.floor((v - mn) / (mx - mn) * scale)
                cell.append(min(max(c, 0), scale))
            rows.append(cell)
    if not rows:
        raise WorkloadError(f"no usable rows in {path}")
    return Dataset(d, l, np.array(rows, dtype=np.int64)), dropped


def save_dataset(dataset: Dataset, path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        for row in dataset.points:
            w.writerow([int(x) for x in row])


def load_dataset(path, d: int, l: int) -> Dataset:
    with open(path, newline="") as f:
        pts = [[int(x) for x in rec[:d]] for rec in csv.reader(f) if rec]
    return Dataset(d, l, np.array(pts, dtype=np.int64))


def save_queries(workload: Workload, path) -> None:
    with open(path, "w") as f:
        json.dump(
            [{"lo": list(q.lo), "hi": list(q.hi)} for q in workload.queries], f
        )


def load_queries(path, d: int, l: int) -> Workload:
    with open(path) as f:
        items = json.load(f)
    queries = tuple(
        RangeQuery(tuple(it["lo"]), tuple(it["hi"])) for it in items
    )
    return Workload(d, l, queries)
