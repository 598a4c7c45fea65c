"""Quantile coupling for finite-support distributions on the real line.

With G(u) = sup{x : F(x) <= u} (right-continuous), G(U) for U uniform on
(0,1) has distribution F. The map u -> (G_1(u_1), ..., G_d(u_d)) acts
coordinatewise, so pulling events back along it commutes with the BKR
operators. Here everything is finite: coordinate i's interval (0,1) is cut
at the running sums of its probabilities, and each piece maps to one atom.
"""

from __future__ import annotations

import bisect
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .config import BKRInputError
from .measure import ProductMeasure
from .space import Event, SpaceShape


@dataclass(frozen=True)
class DiscreteDistribution:
    atoms: tuple[Fraction, ...]
    probs: tuple[Fraction, ...]

    def __post_init__(self):
        atoms = tuple(Fraction(x) for x in self.atoms)
        probs = tuple(Fraction(p) for p in self.probs)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "probs", probs)
        if not atoms or len(atoms) != len(probs):
            raise BKRInputError("need the same positive number of atoms and probabilities")
        if any(b <= a for a, b in zip(atoms, atoms[1:])):
            raise BKRInputError("atoms must be strictly increasing")
        if any(p <= 0 for p in probs):
            raise BKRInputError("probabilities must be positive")
        if sum(probs) != 1:
            raise BKRInputError(f"probabilities sum to {sum(probs)}, not 1")

    @classmethod
    def from_pairs(cls, pairs) -> "DiscreteDistribution":
        pairs = list(pairs)
        return cls(tuple(x for x, _ in pairs), tuple(p for _, p in pairs))

    @property
    def breakpoints(self) -> tuple[Fraction, ...]:
        """F(x_1), ..., F(x_m); the last one is 1."""
        return tuple(itertools.accumulate(self.probs))

    def cdf(self, x) -> Fraction:
        return sum((p for a, p in zip(self.atoms, self.probs) if a <= x), Fraction(0))

    def index(self, x) -> int:
        try:
            return self.atoms.index(Fraction(x))
        except ValueError:
            raise BKRInputError(f"{x} is not an atom") from None


def quantile_index(dist: DiscreteDistribution, u) -> int:
    u = Fraction(u)
    if not 0 < u < 1:
        raise BKRInputError(f"u={u} outside (0, 1)")
    # first j with F(x_j) > u; at u == F(x_j) this moves on to x_{j+1}
    return bisect.bisect_right(dist.breakpoints, u)


def quantile(dist: DiscreteDistribution, u) -> Fraction:
    return dist.atoms[quantile_index(dist, u)]


def level_set_measure(dist: DiscreteDistribution, x) -> Fraction:
    """Length of {u in (0,1) : quantile(u) = x}.

    Measured by evaluating the quantile on every elementary piece
    [b_k, b_{k+1}) between consecutive breakpoints (the first piece is open
    at 0), where it is constant.
    """
    target = Fraction(x)
    dist.index(target)
    cuts = (Fraction(0),) + dist.breakpoints
    total = Fraction(0)
    for lo, hi in zip(cuts, cuts[1:]):
        if hi == lo:
            continue
        probe = lo if lo > 0 else hi / 2
        if quantile(dist, probe) == target:
            total += hi - lo
    return total


@dataclass(frozen=True)
class IntervalGrid:
    """Per-coordinate partitions of (0,1) induced by the quantile functions."""

    cuts: tuple[tuple[Fraction, ...], ...]  # 0 = c_0 < c_1 < ... < c_m = 1

    @classmethod
    def from_distributions(cls, dists: Sequence[DiscreteDistribution]) -> "IntervalGrid":
        return cls(tuple((Fraction(0),) + d.breakpoints for d in dists))

    @property
    def shape(self) -> SpaceShape:
        return SpaceShape(tuple(len(c) - 1 for c in self.cuts))

    @property
    def measure(self) -> ProductMeasure:
        """Uniform measure on (0,1)^d, lumped onto the grid cells."""
        return ProductMeasure(self.shape, tuple(
            tuple(b - a for a, b in zip(c, c[1:])) for c in self.cuts))

    def locate(self, u: Sequence) -> tuple[int, ...]:
        """Cell containing the point u of (0,1)^d (cells are [c_j, c_{j+1}))."""
        if len(u) != len(self.cuts):
            raise BKRInputError(f"point has {len(u)} coordinates, grid has {len(self.cuts)}")
        out = []
        for ui, c in zip(u, self.cuts):
            ui = Fraction(ui)
            if not 0 < ui < 1:
                raise BKRInputError(f"u={ui} outside (0, 1)")
            out.append(bisect.bisect_right(c, ui) - 1)
        return tuple(out)

    def representative(self, cell: Sequence[int]) -> tuple[Fraction, ...]:
        """A point of (0,1)^d inside `cell` (its midpoint)."""
        return tuple((c[j] + c[j + 1]) / 2 for c, j in zip(self.cuts, cell))


def support_shape(dists: Sequence[DiscreteDistribution]) -> SpaceShape:
    return SpaceShape(tuple(len(d.atoms) for d in dists))


def support_measure(dists: Sequence[DiscreteDistribution]) -> ProductMeasure:
    return ProductMeasure(support_shape(dists), tuple(d.probs for d in dists))


def g_map(dists: Sequence[DiscreteDistribution], u: Sequence) -> tuple[Fraction, ...]:
    """u -> (G_1(u_1), ..., G_d(u_d))."""
    if len(u) != len(dists):
        raise BKRInputError(f"point has {len(u)} coordinates, expected {len(dists)}")
    return tuple(quantile(d, ui) for d, ui in zip(dists, u))


def pullback(dists: Sequence[DiscreteDistribution], a: Event) -> tuple[IntervalGrid, Event]:
    """The event {u : g(u) in A} as a union of interval-grid cells.

    Each cell is classified by pushing its midpoint through the quantile
    map and looking the resulting atoms up in A.
    """
    shape = support_shape(dists)
    if a.shape != shape:
        raise BKRInputError(f"event shape {a.shape} does not match support shape {shape}")
    grid = IntervalGrid.from_distributions(dists)
    bits = np.zeros(grid.shape.n_points, dtype=bool)
    for idx, cell in enumerate(grid.shape.points()):
        x = g_map(dists, grid.representative(cell))
        bits[idx] = tuple(d.index(xi) for d, xi in zip(dists, x)) in a
    return grid, Event(grid.shape, bits)


# -- distribution file: lines "x p" ------------------------------------------------

def parse_distribution(text: str) -> DiscreteDistribution:
    pairs = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise BKRInputError(f"expected 'x p', got {line!r}")
        try:
            pairs.append((Fraction(parts[0]), Fraction(parts[1])))
        except (ValueError, ZeroDivisionError):
            raise BKRInputError(f"bad rational in {line!r}") from None
    return DiscreteDistribution.from_pairs(pairs)


def format_distribution(dist: DiscreteDistribution) -> str:
    return "".join(f"{x} {p}\n" for x, p in zip(dist.atoms, dist.probs))
