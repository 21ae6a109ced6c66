"""Bit-merging curves: orderings of dimension-tagged bit slots.

A curve over a ``d``-dimensional grid with ``l`` bits per dimension is an
arrangement of the ``d * l`` coordinate bits into a single value. Within a
dimension the bit order is fixed (bit ``j`` always ranks below bit ``j+1``),
so a curve is fully described by which dimension owns each rank.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

AXIS_CHARS = "XYZ"

MAX_TOTAL_BITS = 64


class CurveError(ValueError):
    """Invalid curve description or out-of-range input."""


@dataclass(frozen=True)
class BmcSpec:
    """A bit-merging curve.

    ``slots[r]`` is the dimension that owns rank ``r``, with rank 0 the least
    significant bit of the curve value. Each dimension owns exactly ``l``
    ranks, and its ``j``-th occurrence (counting up from rank 0) carries
    bit ``j`` of that dimension's coordinate.
    """

    d: int
    l: int
    slots: tuple[int, ...]
    ranks: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.d < 1 or self.l < 1:
            raise CurveError(f"need d >= 1 and l >= 1, got d={self.d}, l={self.l}")
        if self.d * self.l > MAX_TOTAL_BITS:
            raise CurveError(
                f"d*l = {self.d * self.l} exceeds the {MAX_TOTAL_BITS}-bit cap"
            )
        if len(self.slots) != self.d * self.l:
            raise CurveError(
                f"expected {self.d * self.l} slots, got {len(self.slots)}"
            )
        counts = [0] * self.d
        ranks = [[] for _ in range(self.d)]
        for r, dim in enumerate(self.slots):
            if not 0 <= dim < self.d:
                raise CurveError(f"slot rank {r}: dimension {dim} out of range")
            counts[dim] += 1
            ranks[dim].append(r)
        for dim, c in enumerate(counts):
            if c != self.l:
                raise CurveError(
                    f"dimension {dim} appears {c} times, expected {self.l}"
                )
        object.__setattr__(self, "ranks", tuple(tuple(r) for r in ranks))

    @property
    def total_bits(self) -> int:
        return self.d * self.l

    def rank(self, dim: int, bit: int) -> int:
        """Rank of bit ``bit`` (0-indexed) of dimension ``dim`` in the merged value."""
        return self.ranks[dim][bit]

    def to_json(self) -> str:
        return json.dumps(
            {"d": self.d, "l": self.l, "slots": list(reversed(self.slots))}
        )

    @classmethod
    def from_json(cls, text: str) -> "BmcSpec":
        obj = json.loads(text)
        return cls(obj["d"], obj["l"], tuple(reversed(obj["slots"])))


def parse_bmc(text: str, d: int, l: int) -> BmcSpec:
    """Parse a curve string, leftmost token most significant.

    For d <= 3 the tokens are the characters X/Y/Z (dimensions 0/1/2); for
    d > 3 they are "d<k>" tokens separated by dots, e.g. "d0.d3.d1...".
    """
    text = text.strip()
    if d <= 3:
        dims_msb = []
        for ch in text:
            idx = AXIS_CHARS.find(ch.upper())
            if idx < 0 or idx >= d:
                raise CurveError(f"unknown token {ch!r} for d={d}")
            dims_msb.append(idx)
    else:
        dims_msb = []
        for tok in text.split("."):
            if not tok.startswith("d"):
                raise CurveError(f"unknown token {tok!r} for d={d}")
            try:
                idx = int(tok[1:])
            except ValueError:
                raise CurveError(f"unknown token {tok!r} for d={d}") from None
            if not 0 <= idx < d:
                raise CurveError(f"dimension {idx} out of range for d={d}")
            dims_msb.append(idx)
    if len(dims_msb) != d * l:
        raise CurveError(
            f"curve string has {len(dims_msb)} slots, expected {d * l}"
        )
    return BmcSpec(d, l, tuple(reversed(dims_msb)))


def render_bmc(spec: BmcSpec) -> str:
    """Inverse of parse_bmc: emit the curve string, most significant first."""
    dims_msb = list(reversed(spec.slots))
    if spec.d <= 3:
        return "".join(AXIS_CHARS[i] for i in dims_msb)
    return ".".join(f"d{i}" for i in dims_msb)


def standard_curve(kind: str, d: int, l: int, lead: int = 0) -> BmcSpec:
    """Canonical curves: "zc" (perfect interleave) or "lc" (lexicographic).

    ``lead`` selects the most-significant dimension; the remaining dimensions
    follow in ascending index order.
    """
    if not 0 <= lead < d:
        raise CurveError(f"lead dimension {lead} out of range for d={d}")
    order = [lead] + [i for i in range(d) if i != lead]
    kind = kind.lower()
    if kind == "zc":
        dims_msb = order * l
    elif kind == "lc":
        dims_msb = [dim for dim in order for _ in range(l)]
    else:
        raise CurveError(f"unknown standard curve kind {kind!r}")
    return BmcSpec(d, l, tuple(reversed(dims_msb)))


def _check_point(spec: BmcSpec, coords) -> None:
    if len(coords) != spec.d:
        raise CurveError(f"point has {len(coords)} coordinates, expected {spec.d}")
    limit = 1 << spec.l
    for x in coords:
        if not 0 <= x < limit:
            raise CurveError(f"coordinate {x} outside grid [0, {limit})")


def curve_value(spec: BmcSpec, coords) -> int:
    """Merge the coordinate bits of a grid cell into the curve value."""
    _check_point(spec, coords)
    seen = [0] * spec.d
    v = 0
    for r, dim in enumerate(spec.slots):
        j = seen[dim]
        seen[dim] = j + 1
        v |= ((coords[dim] >> j) & 1) << r
    return v


def curve_decode(spec: BmcSpec, value: int) -> tuple[int, ...]:
    """Inverse of curve_value: split a curve value back into grid coordinates."""
    if not 0 <= value < (1 << spec.total_bits):
        raise CurveError(f"curve value {value} outside [0, 2^{spec.total_bits})")
    coords = [0] * spec.d
    seen = [0] * spec.d
    for r, dim in enumerate(spec.slots):
        j = seen[dim]
        seen[dim] = j + 1
        coords[dim] |= ((value >> r) & 1) << j
    return tuple(coords)


def curve_value_array(spec: BmcSpec, coords: np.ndarray) -> np.ndarray:
    """Vectorized curve_value over an (n, d) integer coordinate array."""
    coords = np.asarray(coords, dtype=np.uint64)
    v = np.zeros(coords.shape[0], dtype=np.uint64)
    seen = [0] * spec.d
    for r, dim in enumerate(spec.slots):
        j = seen[dim]
        seen[dim] = j + 1
        v |= ((coords[:, dim] >> np.uint64(j)) & np.uint64(1)) << np.uint64(r)
    return v
