"""Definitional reference implementations.

Everything here works on Python sets of point tuples and enumerates thin
cylinders directly, sharing no code with the table kernels. Slow by design;
use only for cross-checks on small shapes.
"""

from __future__ import annotations

import itertools
from typing import Sequence

from .config import BKRInputError
from .space import Event, SpaceShape


def _pointset(a: Event) -> set[tuple[int, ...]]:
    return set(a.points())


def thin_cylinder(shape: SpaceShape, mask: int, w: Sequence[int]):
    """Cyl(K, w): all points agreeing with w on the coordinates in K."""
    ranges = [(w[i],) if mask >> i & 1 else range(s) for i, s in enumerate(shape.sizes)]
    return itertools.product(*ranges)


def cylinder_closure_naive(a: Event, mask: int) -> Event:
    shape = a.shape
    pts = _pointset(a)
    keep = [w for w in pts if all(v in pts for v in thin_cylinder(shape, mask, w))]
    return Event.from_points(shape, keep)


def closure_family(a: Event) -> list[set]:
    """[A]_K as point sets for every mask K, from the definition."""
    shape = a.shape
    pts = _pointset(a)
    out = []
    for mask in range(1 << shape.d):
        out.append({w for w in pts if all(v in pts for v in thin_cylinder(shape, mask, w))})
    return out


def _check(events):
    shape = events[0].shape
    for e in events:
        if e.shape != shape:
            raise BKRInputError(f"shape mismatch: {shape} vs {e.shape}")
    return shape


def bkr2_naive(a: Event, b: Event) -> Event:
    """Union over K of [A]_K ∩ [B]_{K^c}, straight from the definition."""
    shape = _check([a, b])
    return bkr2_from_closures(shape, closure_family(a), closure_family(b))


def bkr2_from_closures(shape: SpaceShape, ca: list[set], cb: list[set]) -> Event:
    full = (1 << shape.d) - 1
    out = set()
    for k in range(full + 1):
        out |= ca[k] & cb[full ^ k]
    return Event.from_points(shape, out)


def bkr2_disjoint_naive(a: Event, b: Event) -> Event:
    """Union over disjoint pairs (J, K) of [A]_J ∩ [B]_K."""
    shape = _check([a, b])
    ca, cb = closure_family(a), closure_family(b)
    out = set()
    for j in range(1 << shape.d):
        for k in range(1 << shape.d):
            if j & k == 0:
                out |= ca[j] & cb[k]
    return Event.from_points(shape, out)


def bkr2_pointwise_naive(a: Event, b: Event) -> Event:
    """Points w with some K such that Cyl(K,w) ⊆ A and Cyl(K^c,w) ⊆ B."""
    shape = _check([a, b])
    pa, pb = _pointset(a), _pointset(b)
    full = (1 << shape.d) - 1
    out = []
    for w in shape.points():
        for k in range(full + 1):
            if (all(v in pa for v in thin_cylinder(shape, k, w))
                    and all(v in pb for v in thin_cylinder(shape, full ^ k, w))):
                out.append(w)
                break
    return Event.from_points(shape, out)


def bkr_r_naive(events: Sequence[Event]) -> Event:
    """Union over all labelings c: [d] -> {0..r} of ∩_i [A_i]_{c^-1(i)}."""
    events = list(events)
    if not events:
        raise BKRInputError("need at least one event")
    shape = _check(events)
    r, d = len(events), shape.d
    closures = [closure_family(e) for e in events]
    out: set = set()
    for labels in itertools.product(range(r + 1), repeat=d):
        masks = [0] * r
        for coord, lab in enumerate(labels):
            if lab:
                masks[lab - 1] |= 1 << coord
        term = closures[0][masks[0]]
        for i in range(1, r):
            term = term & closures[i][masks[i]]
        out |= term
    return Event.from_points(shape, out)


def chained_product_naive(tree, events: Sequence[Event]) -> Event:
    if not isinstance(tree, tuple):
        raise BKRInputError("a chained product needs at least two factors")

    def walk(node):
        if isinstance(node, tuple):
            return bkr2_naive(walk(node[0]), walk(node[1]))
        return events[node]

    return walk(tree)
