"""Exact product probability measures and the BKR inequality checks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .bkr import bkr2, bkr_r
from .config import BKRInputError
from .space import Event, SpaceShape


@dataclass(frozen=True)
class ProductMeasure:
    shape: SpaceShape
    weights: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        ws = tuple(tuple(Fraction(w) for w in row) for row in self.weights)
        object.__setattr__(self, "weights", ws)
        if len(ws) != self.shape.d:
            raise BKRInputError(f"{len(ws)} weight vectors for d={self.shape.d}")
        for i, (row, s) in enumerate(zip(ws, self.shape.sizes)):
            if len(row) != s:
                raise BKRInputError(f"coordinate {i}: {len(row)} weights for alphabet size {s}")
            if any(w < 0 for w in row):
                raise BKRInputError(f"coordinate {i}: negative weight")
            if sum(row) != 1:
                raise BKRInputError(f"coordinate {i}: weights sum to {sum(row)}, not 1")

    @classmethod
    def from_weights(cls, weights: Sequence[Sequence]) -> "ProductMeasure":
        return cls(SpaceShape(tuple(len(r) for r in weights)), tuple(map(tuple, weights)))

    def point_mass(self, point: Sequence[int]) -> Fraction:
        return math.prod((row[w] for row, w in zip(self.weights, point)), start=Fraction(1))


def uniform(shape: SpaceShape) -> ProductMeasure:
    return ProductMeasure(shape, tuple((Fraction(1, s),) * s for s in shape.sizes))


def random_measure(shape: SpaceShape, rng: np.random.Generator, max_weight: int = 6) -> ProductMeasure:
    """Normalized random integer weights; zero weights are allowed."""
    rows = []
    for s in shape.sizes:
        ints = [int(x) for x in rng.integers(0, max_weight + 1, size=s)]
        if not any(ints):
            ints[int(rng.integers(s))] = 1
        total = sum(ints)
        rows.append(tuple(Fraction(x, total) for x in ints))
    return ProductMeasure(shape, tuple(rows))


def _check(p: ProductMeasure, a: Event) -> None:
    if p.shape != a.shape:
        raise BKRInputError(f"measure shape {p.shape} does not match event shape {a.shape}")


def event_probability(p: ProductMeasure, a: Event, method: str = "auto") -> Fraction:
    """P(A) exactly.

    ``"points"`` sums point masses over the members of A. ``"dp"`` contracts
    the indicator tensor one coordinate at a time in integer arithmetic over
    per-coordinate common denominators. ``"auto"`` picks "dp" for dense A.
    """
    _check(p, a)
    if method == "auto":
        method = "dp" if len(a) * 4 > a.shape.n_points and a.shape.d > 1 else "points"
    if method == "points":
        return sum((p.point_mass(w) for w in a.points()), start=Fraction(0))
    if method != "dp":
        raise ValueError(f"unknown method {method!r}")

    denom = 1
    vec = a.bits.astype(object)
    # bits are ordered with coordinate 0 fastest; peel it off first
    for row in p.weights:
        q = math.lcm(*(w.denominator for w in row))
        nums = np.array([int(w * q) for w in row], dtype=object)
        vec = vec.reshape(-1, len(row)) @ nums
        denom *= q
    return Fraction(int(vec.reshape(-1)[0]), denom)


@dataclass(frozen=True)
class BKRCheck:
    lhs: Fraction
    rhs: Fraction

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs


def check_bkr2(p: ProductMeasure, a: Event, b: Event) -> BKRCheck:
    """P(A □ B) against P(A) P(B)."""
    _check(p, a)
    _check(p, b)
    return BKRCheck(event_probability(p, bkr2(a, b)),
                    event_probability(p, a) * event_probability(p, b))


def check_bkr_r(p: ProductMeasure, events: Sequence[Event]) -> BKRCheck:
    """P(⊠ A_i) against the product of the P(A_i)."""
    for e in events:
        _check(p, e)
    rhs = math.prod((event_probability(p, e) for e in events), start=Fraction(1))
    return BKRCheck(event_probability(p, bkr_r(events)), rhs)


# -- measure file: one line per coordinate, "p/q p/q ..." ---------------------

def parse_measure(text: str) -> ProductMeasure:
    rows = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            rows.append(tuple(Fraction(tok) for tok in line.split()))
        except (ValueError, ZeroDivisionError):
            raise BKRInputError(f"bad weight line {line!r}") from None
    if not rows:
        raise BKRInputError("measure file has no coordinates")
    return ProductMeasure.from_weights(rows)


def format_measure(p: ProductMeasure) -> str:
    return "".join(" ".join(str(w) for w in row) + "\n" for row in p.weights)
