"""Maximal cylinders and the BKR (disjoint occurrence) products.

For A in S^d and a coordinate set K, ``[A]_K`` is the set of points w such
that every point agreeing with w on K lies in A: the largest subset of A
that is free in the coordinates outside K. Then

    A □ B        = union over K of [A]_K ∩ [B]_{K^c}
    ⊠(A_1..A_r)  = union over pairwise disjoint J_1..J_r of ∩_i [A_i]_{J_i}

The fast paths here build the table of all 2^d maximal cylinders with a
lattice walk and combine tables with the kernels in ``bkrlab.kernels``.
Definitional oracles live in ``bkrlab.oracle``.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from . import kernels
from .config import BKRInputError, ResourceLimitError, limits
from .space import Event, SpaceShape, _check_mask, project_base
from .trees import BracketTree, check_tree


def _check_table_budget(shape: SpaceShape, count: int = 1) -> None:
    need = count * (1 << shape.d) * shape.n_points
    if need > limits.max_table_bytes:
        raise ResourceLimitError(
            f"{count} cylinder table(s) for shape ({shape}) need {need} bytes, "
            f"max_table_bytes={limits.max_table_bytes}")


def _same_shape(events: Sequence[Event]) -> SpaceShape:
    if not events:
        raise BKRInputError("need at least one event")
    shape = events[0].shape
    for e in events[1:]:
        if e.shape != shape:
            raise BKRInputError(f"shape mismatch: {shape} vs {e.shape}")
    return shape


def all_over_coordinate(a: Event, i: int) -> Event:
    """Points w such that every value in coordinate i keeps w inside A."""
    shape = a.shape
    if not 0 <= i < shape.d:
        raise BKRInputError(f"coordinate {i} out of range for d={shape.d}")
    return Event(shape, kernels.all_over_axis(a.bits, shape.strides[i], shape.sizes[i]))


def cylinder_closure(a: Event, mask: int, order: Sequence[int] | None = None) -> Event:
    """[A]_K, by folding `all_over_coordinate` over the coordinates outside K.

    `order` fixes the fold order (any order gives the same set); by default
    coordinates are processed in increasing index.
    """
    shape = a.shape
    _check_mask(shape, mask)
    free = [i for i in range(shape.d) if not mask >> i & 1]
    if order is not None:
        if sorted(order) != free:
            raise BKRInputError(f"order {list(order)} is not a permutation of {free}")
        free = list(order)
    out = a
    for i in free:
        out = all_over_coordinate(out, i)
    return out


class CylinderTable:
    """All 2^d maximal cylinders [A]_K of one event, indexed by mask K."""

    def __init__(self, source: Event, rows: np.ndarray):
        self.source = source
        self.shape = source.shape
        self.rows = rows
        rows.flags.writeable = False

    def __getitem__(self, mask: int) -> Event:
        _check_mask(self.shape, mask)
        return Event(self.shape, self.rows[mask])

    def __len__(self):
        return self.rows.shape[0]

    def base(self, mask: int) -> Event:
        """The cylinder base [[A]]_K over the sub-shape of K."""
        return project_base(self[mask], mask)

    def entries(self) -> dict[int, Event]:
        return {k: self[k] for k in range(len(self))}


def cylinder_table(a: Event) -> CylinderTable:
    _check_table_budget(a.shape)
    return CylinderTable(a, kernels.cylinder_table(a.bits, a.shape.sizes))


def bkr2(a: Event, b: Event) -> Event:
    shape = _same_shape([a, b])
    _check_table_budget(shape, 2)
    ta = kernels.cylinder_table(a.bits, shape.sizes)
    tb = ta if b is a else kernels.cylinder_table(b.bits, shape.sizes)
    return Event(shape, kernels.bkr2_tables(ta, tb))


def bkr_r(events: Sequence[Event]) -> Event:
    """The simultaneous r-fold product; r = 1 gives back the single event."""
    shape = _same_shape(list(events))
    r = len(events)
    _check_table_budget(shape, r + 2)
    n = shape.n_points
    tables = np.empty((r, 1 << shape.d, n), dtype=bool)
    cache: dict[int, np.ndarray] = {}
    for i, e in enumerate(events):
        key = id(e)
        if key not in cache:
            cache[key] = kernels.cylinder_table(e.bits, shape.sizes)
        tables[i] = cache[key]
    return Event(shape, kernels.bkr_r_tables(tables))


def chained_product(tree: BracketTree, events: Sequence[Event],
                    product: Callable[[Event, Event], Event] = bkr2) -> Event:
    """Fold a binary product along `tree`; leaves are 0-based event indices."""
    if not isinstance(tree, tuple):
        raise BKRInputError("a chained product needs at least two factors")
    check_tree(tree, len(events))
    _same_shape(list(events))

    def walk(node):
        if isinstance(node, tuple):
            return product(walk(node[0]), walk(node[1]))
        return events[node]

    return walk(tree)
