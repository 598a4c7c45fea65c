"""Bracketed BKR products of many factors, and searches for event choices
that make the different bracketings disagree.

The r-fold simultaneous product is contained in every bracketing of the
binary product. Whether the bracketings themselves can all differ is open in
general; for a single set A and r = 4 the two commutative classes
((AA)A)A and (AA)(AA) can differ, as the eight-cylinder set
returned by ``fixture_event`` shows.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np

from .bkr import bkr2, bkr_r
from .config import BKRInputError, ResourceLimitError
from .oracle import bkr2_naive
from .parallel import first_hit, worker_pool
from .sampling import bernoulli_event, cylinder_union_event, mixed_event, trial_rng
from .space import Event, SpaceShape, cylinder_from_pattern, event_from_patterns
from .trees import (BracketTree, enumerate_commutative_shapes,
                    enumerate_parenthesizations, render, render_shape)

MODES = ("commutative", "ordered")
STRATEGIES = ("exhaustive", "random")
MAX_GROUP_ORDER = 1 << 17


class SearchRefused(ResourceLimitError):
    def __init__(self, message: str, instance_count: int):
        super().__init__(message)
        self.instance_count = instance_count


def shapes_for(r: int, mode: str) -> list[BracketTree]:
    if mode == "commutative":
        return enumerate_commutative_shapes(r)
    if mode == "ordered":
        return enumerate_parenthesizations(r)
    raise BKRInputError(f"mode must be one of {MODES}, got {mode!r}")


def shape_label(tree: BracketTree, mode: str) -> str:
    return render_shape(tree) if mode == "commutative" else render(tree)


def evaluate_all_shapes(events: Event | Sequence[Event], r: int | None = None,
                        mode: str = "ordered",
                        product: Callable[[Event, Event], Event] = bkr2) -> dict:
    """Product for every bracketing, keyed by tree.

    Commutative mode takes a single event A and evaluates one representative
    per class of A^r. Ordered mode takes r events (or one event repeated r
    times). Shared subtrees are computed once.
    """
    if isinstance(events, Event):
        if r is None:
            raise BKRInputError("r is required with a single event")
        factors = [events] * r if mode == "ordered" else [events]
    else:
        factors = list(events)
        if mode == "commutative":
            if len(factors) != 1:
                raise BKRInputError("commutative mode takes a single event")
        elif r is not None and r != len(factors):
            raise BKRInputError(f"r={r} but {len(factors)} events given")
        r = r if r is not None else len(factors)
    if mode == "ordered" and len(factors) != r:
        raise BKRInputError(f"ordered mode needs {r} events")
    memo: dict = {}

    def walk(node):
        if not isinstance(node, tuple):
            return factors[node]
        if node not in memo:
            memo[node] = product(walk(node[0]), walk(node[1]))
        return memo[node]

    return {t: walk(t) for t in shapes_for(r, mode)}


def all_distinct(results: dict) -> bool:
    return len(set(results.values())) == len(results)


# -- symmetry ---------------------------------------------------------------------

def symmetry_group(shape: SpaceShape) -> np.ndarray:
    """Point permutations from (coordinate permutations) x (symbol permutations).

    Row g maps point index p to ``out[g, p]``. Coordinates are only swapped
    with coordinates of equal alphabet size.
    """
    d = shape.d
    order = group_order(shape)
    if order > MAX_GROUP_ORDER:
        raise ResourceLimitError(f"symmetry group of order {order} exceeds {MAX_GROUP_ORDER}")
    pts = np.array(list(shape.points()), dtype=np.int64).reshape(shape.n_points, d)
    strides = np.array(shape.strides, dtype=np.int64)
    coord_perms = [p for p in itertools.permutations(range(d))
                   if all(shape.sizes[i] == shape.sizes[p[i]] for i in range(d))]
    symbol_perms = [list(itertools.permutations(range(s))) for s in shape.sizes]
    rows = []
    for sigma in coord_perms:
        for pis in itertools.product(*symbol_perms):
            new = np.empty_like(pts)
            for i in range(d):
                new[:, sigma[i]] = np.asarray(pis[i], dtype=np.int64)[pts[:, i]]
            rows.append(new @ strides)
    return np.array(rows, dtype=np.int64).reshape(len(rows), shape.n_points)


def group_order(shape: SpaceShape) -> int:
    by_size: dict[int, int] = {}
    for s in shape.sizes:
        by_size[s] = by_size.get(s, 0) + 1
    return (math.prod(math.factorial(c) for c in by_size.values())
            * math.prod(math.factorial(s) for s in shape.sizes))


def _cycle_count(perm: np.ndarray) -> int:
    seen = np.zeros(perm.shape[0], dtype=bool)
    cycles = 0
    for start in range(perm.shape[0]):
        if not seen[start]:
            cycles += 1
            p = start
            while not seen[p]:
                seen[p] = True
                p = perm[p]
    return cycles


def orbit_count(shape: SpaceShape, k: int = 1, group: np.ndarray | None = None) -> int:
    """Number of orbits of k-tuples of events under the symmetry group (Burnside)."""
    g = symmetry_group(shape) if group is None else group
    total = sum(1 << (k * _cycle_count(row)) for row in g)
    count, rem = divmod(total, g.shape[0])
    assert rem == 0
    return count


def _tuple_group(group: np.ndarray, k: int, n: int) -> np.ndarray:
    """The diagonal action on k stacked copies of the point set."""
    return np.concatenate([group + t * n for t in range(k)], axis=1)


def _is_canonical(x: np.ndarray, inverse: np.ndarray) -> bool:
    """x is lexicographically first (smallest sorted member list) in its orbit."""
    images = x[inverse]
    diff = images != x
    rows = diff.any(axis=1)
    if not rows.any():
        return True
    first = diff[rows].argmax(axis=1)
    return bool(x[first].all())


def _orderly(shape: SpaceShape, k: int) -> Iterator[np.ndarray]:
    n = shape.n_points
    g = _tuple_group(symmetry_group(shape), k, n)
    inverse = np.argsort(g, axis=1)
    m = k * n

    def visit(x, top):
        yield x
        for e in range(top + 1, m):
            y = x.copy()
            y[e] = True
            if _is_canonical(y, inverse):
                yield from visit(y, e)

    yield from visit(np.zeros(m, dtype=bool), -1)


def orbit_representatives(shape: SpaceShape, k: int = 1) -> Iterator[list[Event]]:
    """One k-tuple of events per orbit, by orderly generation.

    Sets over the k*N stacked points are grown by appending elements above
    the current maximum, pruning any set that is not the smallest of its
    orbit. Dropping the largest element of an orbit-smallest set leaves an
    orbit-smallest set, so each orbit appears exactly once.
    """
    n = shape.n_points
    for x in _orderly(shape, k):
        yield [Event(shape, x[t * n:(t + 1) * n]) for t in range(k)]


# -- search -------------------------------------------------------------------------

@dataclass
class SearchReport:
    r: int
    shape: SpaceShape
    mode: str
    strategy: str
    seed: int | None
    budget: int
    status: str = "budget reached"
    instances_tried: int = 0
    instance_count: int | None = None
    density: float | None = None
    witness_index: int | None = None
    witness: list[Event] | None = None
    results: dict = field(default_factory=dict)
    verified: bool | None = None
    note: str = ""

    def to_dict(self, dump_events: bool = False) -> dict:
        out: dict = {
            "kind": "distinctness_search",
            "r": self.r,
            "shape": str(self.shape),
            "mode": self.mode,
            "strategy": self.strategy,
            "seed": self.seed,
            "budget": self.budget,
            "density": self.density,
            "status": self.status,
            "instances_tried": self.instances_tried,
            "instance_count": self.instance_count,
            "note": self.note,
            "witness": None,
        }
        if self.witness is not None:
            out["witness"] = {
                "index": self.witness_index,
                "verified": self.verified,
                "events": [_event_record(e, True) for e in self.witness],
                "results": [dict(shape=shape_label(t, self.mode),
                                 **_event_record(e, dump_events))
                            for t, e in self.results.items()],
            }
        return out

    def to_text(self, dump_events: bool = False) -> str:
        return json.dumps(self.to_dict(dump_events), indent=2) + "\n"


def _event_record(e: Event, dump: bool) -> dict:
    rec = {"cardinality": len(e), "sha256": e.digest()}
    if dump:
        rec["bits"] = e.packed().hex()
    return rec


def _instance(shape: SpaceShape, r: int, mode: str, seed: int, index: int,
              density: float | None) -> list[Event]:
    rng = trial_rng(seed, index)
    k = 1 if mode == "commutative" else r
    if density is not None:
        return [bernoulli_event(shape, rng, density) for _ in range(k)]
    if rng.random() < 0.5:
        return [cylinder_union_event(shape, rng) for _ in range(k)]
    return [mixed_event(shape, rng) for _ in range(k)]


def _evaluate(events: list[Event], r: int, mode: str) -> dict:
    if mode == "commutative":
        return evaluate_all_shapes(events[0], r, mode)
    return evaluate_all_shapes(events, r, mode)


def _scan_random(task):
    sizes, r, mode, seed, lo, hi, density = task
    shape = SpaceShape(sizes)
    for i in range(lo, hi):
        events = _instance(shape, r, mode, seed, i, density)
        if all_distinct(_evaluate(events, r, mode)):
            return i
    return None


def _scan_given(task):
    sizes, r, mode, lo, packed = task
    shape = SpaceShape(sizes)
    for j, tup in enumerate(packed):
        events = [Event.from_packed(shape, b) for b in tup]
        if all_distinct(_evaluate(events, r, mode)):
            return lo + j
    return None


def verify_witness(events: Sequence[Event], r: int, mode: str) -> tuple[bool, dict]:
    """Replay every bracketing through the definitional oracle."""
    slow = (evaluate_all_shapes(events[0], r, mode, product=bkr2_naive)
            if mode == "commutative" else
            evaluate_all_shapes(list(events), r, mode, product=bkr2_naive))
    return all_distinct(slow), slow


def distinctness_search(r: int, shape: SpaceShape, mode: str = "commutative",
                        strategy: str = "random", seed: int = 0, budget: int = 10_000,
                        density: float | None = None, workers: int = 1,
                        block: int = 64) -> SearchReport:
    """Look for events whose bracketed products are pairwise distinct.

    Commutative mode searches single sets A over the classes of A^r; ordered
    mode searches r-tuples over all bracketings. The exhaustive strategy
    walks one representative per symmetry orbit and refuses (raising
    `SearchRefused` with the orbit count) when that count exceeds `budget`.
    """
    if budget <= 0:
        raise BKRInputError("budget must be positive")
    if strategy not in STRATEGIES:
        raise BKRInputError(f"strategy must be one of {STRATEGIES}, got {strategy!r}")
    trees = shapes_for(r, mode)
    rep = SearchReport(r=r, shape=shape, mode=mode, strategy=strategy,
                       seed=seed if strategy == "random" else None,
                       budget=budget, density=density)
    if len(trees) <= 1:
        rep.status = "no search needed"
        rep.note = f"{len(trees)} class" if mode == "commutative" else f"{len(trees)} shape"
        return rep

    k = 1 if mode == "commutative" else r
    with worker_pool(workers) as pool:
        if strategy == "random":
            hit = first_hit(pool, _scan_random, budget,
                            lambda lo, hi: (shape.sizes, r, mode, seed, lo, hi, density),
                            block, workers)
            rep.instances_tried = budget if hit is None else hit + 1
            witness = None if hit is None else _instance(shape, r, mode, seed, hit, density)
        else:
            count = orbit_count(shape, k)
            rep.instance_count = count
            if count > budget:
                raise SearchRefused(
                    f"exhaustive search needs {count} orbit representatives, budget is {budget}",
                    count)
            reps = [tuple(e.packed() for e in tup) for tup in orbit_representatives(shape, k)]
            assert len(reps) == count
            hit = first_hit(pool, _scan_given, count,
                            lambda lo, hi: (shape.sizes, r, mode, lo, reps[lo:hi]),
                            block, workers)
            rep.instances_tried = count if hit is None else hit + 1
            witness = (None if hit is None
                       else [Event.from_packed(shape, b) for b in reps[hit]])

    if witness is None:
        rep.status = "exhausted" if strategy == "exhaustive" else "budget reached"
        return rep
    rep.status = "witness"
    rep.witness_index = hit
    rep.witness = witness
    rep.results = _evaluate(witness, r, mode)
    ok, slow = verify_witness(witness, r, mode)
    rep.verified = ok and slow == rep.results
    return rep


# -- the r = 4 example on {0,1}^6 --------------------------------------------------

FIXTURE_PATTERNS = ("11****", "**11**", "1**0**", "*11***",
                        "**00**", "****00", "**1**0", "***00*")


def fixture_event() -> Event:
    return event_from_patterns(SpaceShape((2,) * 6), FIXTURE_PATTERNS)


@dataclass
class FixtureReport:
    checks: dict[str, bool]

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_text(self) -> str:
        return "".join(f"{'PASS' if ok else 'FAIL'}  {name}\n" for name, ok in self.checks.items())


def example_8_3_fixture() -> FixtureReport:
    """Rebuild A from its eight 2-cylinders and verify every stated claim."""
    shape = SpaceShape((2,) * 6)
    a = fixture_event()
    aa = bkr2(a, a)
    aa_aa = bkr2(aa, aa)
    left = bkr2(bkr2(aa, a), a)
    box4 = bkr_r([a, a, a, a])

    def cyl(p):
        return cylinder_from_pattern(shape, p)

    checks = {f"|{p}| = 16": len(cyl(p)) == 16 for p in FIXTURE_PATTERNS}
    for p in ("1111**", "1110**", "111***", "***000"):
        checks[f"{p} ⊆ AA"] = cyl(p) <= aa
    checks["111000 ∈ (AA)(AA)"] = (1, 1, 1, 0, 0, 0) in aa_aa
    checks["((AA)A)A = ∅"] = not left
    checks["((AA)A)A ≠ (AA)(AA)"] = left != aa_aa
    checks["⊠(A,A,A,A) ⊆ ((AA)A)A"] = box4 <= left
    checks["⊠(A,A,A,A) = ∅"] = not box4
    return FixtureReport(checks)
