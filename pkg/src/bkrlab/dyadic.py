"""Sets on [0,1]^d that are unions of dyadic cells, and the approximation
argument that carries a BKR violation on [0,1]^d down to a finite grid.

A ``DyadicSet`` at resolution n is an event over the shape (2^n,)*d; cell
(c_1..c_d) stands for the box of side 2^-n with lower corner c/2^n. All
measures are exact ``Fraction``s.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .bkr import bkr2, cylinder_closure
from .config import BKRInputError
from .space import Event, SpaceShape, extend_base, mask_to_coords, project_base


@dataclass(frozen=True)
class DyadicSet:
    d: int
    n: int
    cells: Event

    def __post_init__(self):
        if self.n < 0 or self.d < 0:
            raise BKRInputError(f"bad dyadic parameters d={self.d}, n={self.n}")
        if self.cells.shape != grid_shape(self.d, self.n):
            raise BKRInputError(
                f"cells have shape {self.cells.shape}, expected {grid_shape(self.d, self.n)}")

    @classmethod
    def from_event(cls, cells: Event) -> "DyadicSet":
        sizes = set(cells.shape.sizes)
        if len(sizes) > 1 or (sizes and (next(iter(sizes)) & (next(iter(sizes)) - 1))):
            raise BKRInputError(f"shape {cells.shape} is not a dyadic grid")
        side = next(iter(sizes), 1)
        return cls(cells.shape.d, side.bit_length() - 1, cells)

    @classmethod
    def full(cls, d: int, n: int) -> "DyadicSet":
        return cls(d, n, Event.full(grid_shape(d, n)))

    @property
    def measure(self) -> Fraction:
        return Fraction(len(self.cells), 1 << (self.n * self.d))

    def __eq__(self, other):
        if not isinstance(other, DyadicSet):
            return NotImplemented
        return (self.d, self.n) == (other.d, other.n) and self.cells == other.cells

    __hash__ = None  # type: ignore[assignment]


def grid_shape(d: int, n: int) -> SpaceShape:
    return SpaceShape((1 << n,) * d)


def _tensor(c: DyadicSet) -> np.ndarray:
    return c.cells.tensor()


def refine(c: DyadicSet, finer: int) -> DyadicSet:
    """The same set described at resolution `finer` >= n."""
    if finer < c.n:
        raise BKRInputError(f"cannot refine from n={c.n} down to {finer}")
    f = 1 << (finer - c.n)
    t = _tensor(c)
    for ax in range(c.d):
        t = np.repeat(t, f, axis=ax)
    return DyadicSet(c.d, finer, Event(grid_shape(c.d, finer), t.reshape(-1)))


def _coarse_counts(c: DyadicSet, n: int) -> np.ndarray:
    """Number of fine cells of C inside each coarse atom, coarse tensor layout."""
    f = 1 << (c.n - n)
    side = 1 << n
    t = _tensor(c).reshape(sum(((side, f) for _ in range(c.d)), ()))
    return t.sum(axis=tuple(range(1, 2 * c.d, 2)), dtype=np.int64)


@dataclass(frozen=True)
class RoundingErrors:
    sym_diff: Fraction  # m(C Δ C_n)
    l1: Fraction        # E|M_n - 1_C|


def coarsen_round(c: DyadicSet, n: int) -> tuple[DyadicSet, RoundingErrors]:
    """Round the conditional density of C on resolution-n atoms.

    An atom is kept iff the fraction of it covered by C exceeds 1/2; an exact
    half is dropped.
    """
    if n > c.n:
        raise BKRInputError(f"coarse resolution {n} exceeds fine resolution {c.n}")
    if n < 0:
        raise BKRInputError(f"negative resolution {n}")
    per_atom = 1 << ((c.n - n) * c.d)
    counts = _coarse_counts(c, n)
    keep = 2 * counts > per_atom
    coarse = DyadicSet(c.d, n, Event(grid_shape(c.d, n), keep.reshape(-1)))

    total = 1 << (c.n * c.d)
    cnt = [int(x) for x in counts.reshape(-1)]
    kept = keep.reshape(-1)
    sym = sum((per_atom - k) if on else k for k, on in zip(cnt, kept))
    # on an atom with density M = k/per_atom: k cells at error 1-M, the rest at M
    l1 = sum(Fraction(2 * k * (per_atom - k), per_atom) for k in cnt)
    return coarse, RoundingErrors(Fraction(sym, total), l1 / total)


def grid_bkr(a: DyadicSet, b: DyadicSet) -> DyadicSet:
    if (a.d, a.n) != (b.d, b.n):
        raise BKRInputError(
            f"resolution mismatch: (d={a.d}, n={a.n}) vs (d={b.d}, n={b.n}); refine explicitly")
    return DyadicSet(a.d, a.n, bkr2(a.cells, b.cells))


def ascii_map(c: DyadicSet, on: str = "#", off: str = ".") -> str:
    """Cell picture for d <= 2; second coordinate grows upward."""
    if c.d > 2:
        raise BKRInputError("ASCII maps are only drawn for d <= 2")
    if c.d == 0:
        return (on if c.cells.bits[0] else off) + "\n"
    t = _tensor(c)
    if c.d == 1:
        return "".join(on if v else off for v in t) + "\n"
    # tensor axes are (coord1, coord0)
    return "".join("".join(on if v else off for v in row) + "\n" for row in t[::-1])


# -- the finite approximation construction ---------------------------------------

@dataclass
class CylinderTerm:
    mask: int
    err_a: Fraction          # m([[A]]_K Δ rounded base)
    err_b: Fraction
    loss_a: Fraction         # m([A]_K \ A_{n,K})
    loss_b: Fraction
    excess_a: Fraction       # m(A_{n,K} \ A)
    excess_b: Fraction

    @property
    def coords(self) -> tuple[int, ...]:
        return mask_to_coords(self.mask)


@dataclass
class ApproximationReport:
    d: int
    fine: int
    coarse: int
    terms: list[CylinderTerm]
    m_a: Fraction
    m_b: Fraction
    m_a_prime: Fraction
    m_b_prime: Fraction
    m_bkr: Fraction            # m(A □ B) at the fine resolution
    m_bkr_prime: Fraction      # m(A' □ B') at the coarse resolution
    excess_a: Fraction         # m(A' \ A)
    excess_b: Fraction
    a_prime: DyadicSet = field(repr=False)
    b_prime: DyadicSet = field(repr=False)
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def delta(self) -> Fraction:
        return max((max(t.err_a, t.err_b) for t in self.terms), default=Fraction(0))

    @property
    def holds(self) -> bool:
        return all(self.checks.values())


def _approximate_cylinders(a: DyadicSet, n: int):
    """Per mask K: ([A]_K, rounding error of its base, A_{n,K} refined to a.n)."""
    fine_shape = a.cells.shape
    out = []
    for mask in range(1 << a.d):
        cyl = cylinder_closure(a.cells, mask)
        base = DyadicSet(bin(mask).count("1"), a.n, project_base(cyl, mask))
        rounded, err = coarsen_round(base, n)
        back = refine(rounded, a.n).cells
        out.append((cyl, err, extend_base(back, mask, fine_shape), rounded))
    return out


def section4_construction(a: DyadicSet, b: DyadicSet, n: int) -> ApproximationReport:
    """Round every maximal cylinder base of A and B to resolution n, rebuild
    A' and B' as unions of the rounded cylinders, and verify the error chain.

    Checks recorded in ``report.checks``:

    * ``cyl_loss``:  m([A]_K \\ A_{n,K}) <= e^A_K for every K, same for B
    * ``excess``:    m(A' \\ A) <= sum_K e^A_K, same for B
    * ``bkr_loss``:  m(A □ B) - m(A' □ B') <= sum_K (e^A_K + e^B_{K^c})
    * ``eps_bkr``:   m(A' □ B') >= m(A □ B) - 2^{d+1} δ,  δ = max error
    * ``eps_mass``:  m(A') <= m(A) + 2^d δ, same for B
    """
    if (a.d, a.n) != (b.d, b.n):
        raise BKRInputError("A and B must share dimension and resolution")
    if not 0 <= n <= a.n:
        raise BKRInputError(f"coarse resolution {n} must lie in [0, {a.n}]")
    d, fine = a.d, a.n
    total = 1 << (fine * d)
    full = (1 << d) - 1

    def m(e: Event) -> Fraction:
        return Fraction(len(e), total)

    pa = _approximate_cylinders(a, n)
    pb = _approximate_cylinders(b, n)

    terms = []
    a_prime = Event.empty(a.cells.shape)
    b_prime = Event.empty(b.cells.shape)
    for mask in range(full + 1):
        cyl_a, err_a, ext_a, _ = pa[mask]
        cyl_b, err_b, ext_b, _ = pb[mask]
        a_prime = a_prime | ext_a
        b_prime = b_prime | ext_b
        terms.append(CylinderTerm(
            mask, err_a.sym_diff, err_b.sym_diff,
            m(cyl_a - ext_a), m(cyl_b - ext_b),
            m(ext_a - a.cells), m(ext_b - b.cells)))

    # A' and B' are unions of resolution-n cells; evaluate □ on the coarse grid
    a_coarse = _exact_coarsen(DyadicSet(d, fine, a_prime), n)
    b_coarse = _exact_coarsen(DyadicSet(d, fine, b_prime), n)
    bkr_prime = grid_bkr(a_coarse, b_coarse)

    rep = ApproximationReport(
        d=d, fine=fine, coarse=n, terms=terms,
        m_a=a.measure, m_b=b.measure,
        m_a_prime=m(a_prime), m_b_prime=m(b_prime),
        m_bkr=m(bkr2(a.cells, b.cells)), m_bkr_prime=bkr_prime.measure,
        excess_a=m(a_prime - a.cells), excess_b=m(b_prime - b.cells),
        a_prime=a_coarse, b_prime=b_coarse)

    sum_a = sum((t.err_a for t in terms), Fraction(0))
    sum_b = sum((t.err_b for t in terms), Fraction(0))
    cross = sum((terms[k].err_a + terms[full ^ k].err_b for k in range(full + 1)), Fraction(0))
    delta = rep.delta
    rep.checks = {
        "cyl_loss": all(t.loss_a <= t.err_a and t.loss_b <= t.err_b for t in terms),
        "excess": rep.excess_a <= sum_a and rep.excess_b <= sum_b,
        "bkr_loss": rep.m_bkr - rep.m_bkr_prime <= cross,
        "eps_bkr": rep.m_bkr_prime >= rep.m_bkr - 2 ** (d + 1) * delta,
        "eps_mass": (rep.m_a_prime <= rep.m_a + 2 ** d * delta
                     and rep.m_b_prime <= rep.m_b + 2 ** d * delta),
    }
    return rep


def _exact_coarsen(c: DyadicSet, n: int) -> DyadicSet:
    """Coarse description of a set that is already a union of resolution-n cells."""
    coarse, err = coarsen_round(c, n)
    if err.sym_diff:
        raise AssertionError("set is not measurable at the coarse resolution")
    return coarse


# -- file format: "BKD1", d, n, then Event payload ---------------------------------

DYADIC_MAGIC = b"BKD1"


def dump_dyadic(c: DyadicSet) -> bytes:
    return DYADIC_MAGIC + struct.pack("<II", c.d, c.n) + c.cells.packed()


def load_dyadic(data: bytes) -> DyadicSet:
    if data[:4] != DYADIC_MAGIC or len(data) < 12:
        raise BKRInputError("not a dyadic set file (bad magic)")
    d, n = struct.unpack("<II", data[4:12])
    return DyadicSet(d, n, Event.from_packed(grid_shape(d, n), data[12:]))
