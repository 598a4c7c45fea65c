"""Finite product spaces S_1 x ... x S_d and dense events over them.

Points are indexed in mixed radix with coordinate 0 as the least
significant digit::

    rank(w) = w[0] + w[1]*s[0] + w[2]*s[0]*s[1] + ...

Coordinate sets (the K, J of the BKR definitions) are plain ``int`` bit
masks: bit ``i`` set means coordinate ``i`` belongs to the set.
"""

from __future__ import annotations

import hashlib
import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .config import BKRInputError, ResourceLimitError, limits


@dataclass(frozen=True)
class SpaceShape:
    sizes: tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        object.__setattr__(self, "sizes", sizes)
        if any(s < 1 for s in sizes):
            raise BKRInputError(f"alphabet sizes must be >= 1, got {sizes}")
        if len(sizes) > limits.max_dims:
            raise ResourceLimitError(
                f"d={len(sizes)} exceeds max_dims={limits.max_dims}")
        if math.prod(sizes) > limits.max_points:
            raise ResourceLimitError(
                f"N={math.prod(sizes)} exceeds max_points={limits.max_points}")

    @classmethod
    def parse(cls, text: str) -> "SpaceShape":
        """Parse ``"2,2,3"`` or ``"2^6"`` (repeat) or a mix ``"2^3,3"``."""
        sizes: list[int] = []
        try:
            for part in text.replace(" ", "").split(","):
                if not part:
                    continue
                if "^" in part:
                    base, rep = part.split("^")
                    sizes.extend([int(base)] * int(rep))
                else:
                    sizes.append(int(part))
        except ValueError:
            raise BKRInputError(f"cannot parse shape {text!r}") from None
        return cls(tuple(sizes))

    @property
    def d(self) -> int:
        return len(self.sizes)

    @property
    def n_points(self) -> int:
        return math.prod(self.sizes)

    @property
    def strides(self) -> tuple[int, ...]:
        out, acc = [], 1
        for s in self.sizes:
            out.append(acc)
            acc *= s
        return tuple(out)

    @property
    def full_mask(self) -> int:
        return (1 << self.d) - 1

    def sub(self, mask: int) -> "SpaceShape":
        """Shape of the coordinates in `mask`, order preserved."""
        return SpaceShape(tuple(s for i, s in enumerate(self.sizes) if mask >> i & 1))

    def rank(self, point: Sequence[int]) -> int:
        return rank(self, point)

    def unrank(self, index: int) -> tuple[int, ...]:
        return unrank(self, index)

    def points(self) -> Iterator[tuple[int, ...]]:
        """All points in rank order."""
        for rev in itertools.product(*(range(s) for s in reversed(self.sizes))):
            yield tuple(reversed(rev))

    def __str__(self):
        return ",".join(map(str, self.sizes))


def rank(shape: SpaceShape, point: Sequence[int]) -> int:
    if len(point) != shape.d:
        raise BKRInputError(f"point {tuple(point)} has wrong length for d={shape.d}")
    idx = 0
    for w, s, st in zip(point, shape.sizes, shape.strides):
        if not 0 <= w < s:
            raise BKRInputError(f"coordinate value {w} out of range [0, {s})")
        idx += int(w) * st
    return idx


def unrank(shape: SpaceShape, index: int) -> tuple[int, ...]:
    if not 0 <= index < shape.n_points:
        raise BKRInputError(f"index {index} out of range for N={shape.n_points}")
    out = []
    for s in shape.sizes:
        index, w = divmod(index, s)
        out.append(w)
    return tuple(out)


def coords_to_mask(coords: Iterable[int]) -> int:
    mask = 0
    for c in coords:
        mask |= 1 << c
    return mask


def mask_to_coords(mask: int) -> tuple[int, ...]:
    return tuple(i for i in range(mask.bit_length()) if mask >> i & 1)


def _check_mask(shape: SpaceShape, mask: int) -> None:
    if mask < 0 or mask >> shape.d:
        raise BKRInputError(f"coordinate mask {mask:#b} not inside [d] for d={shape.d}")


class Event:
    """A subset of a product space stored as a read-only dense bool array.

    ``bits[rank(w)]`` is True iff ``w`` belongs to the event.
    """

    __slots__ = ("shape", "bits", "_hash")

    def __init__(self, shape: SpaceShape, bits):
        arr = np.array(bits, dtype=bool).reshape(-1)
        if arr.size != shape.n_points:
            raise BKRInputError(
                f"bit array of length {arr.size} does not match N={shape.n_points}")
        arr.flags.writeable = False
        self.shape = shape
        self.bits = arr
        self._hash = None

    @classmethod
    def empty(cls, shape: SpaceShape) -> "Event":
        return cls(shape, np.zeros(shape.n_points, dtype=bool))

    @classmethod
    def full(cls, shape: SpaceShape) -> "Event":
        return cls(shape, np.ones(shape.n_points, dtype=bool))

    @classmethod
    def from_points(cls, shape: SpaceShape, points: Iterable[Sequence[int]]) -> "Event":
        bits = np.zeros(shape.n_points, dtype=bool)
        for p in points:
            bits[rank(shape, p)] = True
        return cls(shape, bits)

    def points(self) -> list[tuple[int, ...]]:
        return [unrank(self.shape, int(i)) for i in np.flatnonzero(self.bits)]

    def tensor(self) -> np.ndarray:
        """View as an ndarray whose axis ``d-1-i`` is coordinate ``i``."""
        return self.bits.reshape(tuple(reversed(self.shape.sizes)))

    def _same(self, other: "Event") -> None:
        if not isinstance(other, Event):
            raise TypeError(f"expected Event, got {type(other).__name__}")
        if other.shape != self.shape:
            raise BKRInputError(f"shape mismatch: {self.shape} vs {other.shape}")

    def __or__(self, other):
        self._same(other)
        return Event(self.shape, self.bits | other.bits)

    def __and__(self, other):
        self._same(other)
        return Event(self.shape, self.bits & other.bits)

    def __sub__(self, other):
        self._same(other)
        return Event(self.shape, self.bits & ~other.bits)

    def __xor__(self, other):
        self._same(other)
        return Event(self.shape, self.bits ^ other.bits)

    def __invert__(self):
        return Event(self.shape, ~self.bits)

    def __le__(self, other):
        self._same(other)
        return not np.any(self.bits & ~other.bits)

    def __ge__(self, other):
        return other <= self

    def __len__(self):
        return int(np.count_nonzero(self.bits))

    def __bool__(self):
        return bool(self.bits.any())

    def __contains__(self, point):
        return bool(self.bits[rank(self.shape, point)])

    def __eq__(self, other):
        if not isinstance(other, Event):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.shape, self.bits.tobytes()))
        return self._hash

    def is_full(self) -> bool:
        return bool(self.bits.all())

    def packed(self) -> bytes:
        """Bits packed LSB-first into ceil(N/8) bytes, zero padded."""
        return np.packbits(self.bits, bitorder="little").tobytes()

    @classmethod
    def from_packed(cls, shape: SpaceShape, data: bytes) -> "Event":
        n = shape.n_points
        if len(data) != (n + 7) // 8:
            raise BKRInputError(f"expected {(n + 7) // 8} bytes, got {len(data)}")
        raw = np.frombuffer(data, dtype=np.uint8)
        bits = np.unpackbits(raw, bitorder="little")
        if bits[n:].any():
            raise BKRInputError("nonzero padding bits")
        return cls(shape, bits[:n].astype(bool))

    def digest(self) -> str:
        """sha256 over shape and packed bits; stable across runs."""
        h = hashlib.sha256()
        h.update(",".join(map(str, self.shape.sizes)).encode())
        h.update(b"|")
        h.update(self.packed())
        return h.hexdigest()

    def __repr__(self):
        if self.shape.n_points <= 16 and max(self.shape.sizes, default=1) <= 10:
            body = ",".join("".join(map(str, p)) for p in self.points())
            return f"Event(({self.shape}), {{{body}}})"
        return f"Event(({self.shape}), |A|={len(self)})"


# -- set algebra under the names used throughout the docs -------------------

def union(a: Event, b: Event) -> Event:
    return a | b


def intersect(a: Event, b: Event) -> Event:
    return a & b


def complement(a: Event) -> Event:
    return ~a


def is_subset(a: Event, b: Event) -> bool:
    return a <= b


def cardinality(a: Event) -> int:
    return len(a)


def equals(a: Event, b: Event) -> bool:
    a._same(b)
    return a == b


# -- patterns ----------------------------------------------------------------

def cylinder_from_pattern(shape: SpaceShape, pattern: str) -> Event:
    """Event for one pattern string; '*' leaves a coordinate free."""
    if len(pattern) != shape.d:
        raise BKRInputError(f"pattern {pattern!r} has length {len(pattern)}, expected {shape.d}")
    t = np.ones(tuple(reversed(shape.sizes)), dtype=bool)
    for i, ch in enumerate(pattern):
        if ch == "*":
            continue
        if not ch.isdigit() or int(ch) >= shape.sizes[i]:
            raise BKRInputError(f"invalid symbol {ch!r} at position {i} of {pattern!r}")
        axis = shape.d - 1 - i
        keep = np.zeros(shape.sizes[i], dtype=bool)
        keep[int(ch)] = True
        t &= keep.reshape([-1 if ax == axis else 1 for ax in range(shape.d)])
    return Event(shape, t.reshape(-1))


def event_from_patterns(shape: SpaceShape, patterns: Iterable[str]) -> Event:
    bits = np.zeros(shape.n_points, dtype=bool)
    for pat in patterns:
        bits |= cylinder_from_pattern(shape, pat).bits
    return Event(shape, bits)


# -- projection / extension --------------------------------------------------

def project_base(a: Event, mask: int) -> Event:
    """{ w restricted to K : w in A } over the sub-shape of K."""
    shape = a.shape
    _check_mask(shape, mask)
    drop = tuple(shape.d - 1 - i for i in range(shape.d) if not mask >> i & 1)
    sub = a.tensor().any(axis=drop) if drop else a.tensor()
    return Event(shape.sub(mask), np.asarray(sub).reshape(-1))


def extend_base(c: Event, mask: int, full_shape: SpaceShape) -> Event:
    """The cylinder { w : w restricted to K lies in C }."""
    _check_mask(full_shape, mask)
    if c.shape != full_shape.sub(mask):
        raise BKRInputError(
            f"base shape {c.shape} does not match coordinates {mask_to_coords(mask)} of {full_shape}")
    d = full_shape.d
    # axis layout: axis d-1-i holds coordinate i
    expanded = [full_shape.sizes[d - 1 - ax] if mask >> (d - 1 - ax) & 1 else 1
                for ax in range(d)]
    t = c.bits.reshape(expanded)
    t = np.broadcast_to(t, tuple(reversed(full_shape.sizes)))
    return Event(full_shape, t.reshape(-1))
