"""Seeded property suites.

Each trial draws its instance from ``trial_rng(seed, index)`` so a failing
trial can be replayed alone, and reports are identical for any number of
workers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import bkr, oracle
from .dyadic import (DyadicSet, coarsen_round, grid_bkr, grid_shape, refine,
                     section4_construction)
from .measure import check_bkr2, check_bkr_r, event_probability, random_measure
from .parallel import worker_pool
from .quantile import (DiscreteDistribution, level_set_measure, pullback,
                       support_measure)
from .sampling import (bernoulli_event, cylinder_union_event, mixed_event,
                       random_shape, trial_rng)
from .space import Event, SpaceShape
from .trees import enumerate_parenthesizations


def _ev(e: Event) -> str:
    return e.packed().hex()


def _instance_info(shape: SpaceShape, events, measure=None) -> dict:
    info = {"shape": str(shape), "events": [_ev(e) for e in events]}
    if measure is not None:
        info["measure"] = [[str(w) for w in row] for row in measure.weights]
    return info


# -- individual trials: return None on success, a detail dict on violation -----

def trial_ineq2(rng, params):
    shape = random_shape(rng, max_d=4, max_size=3)
    p = random_measure(shape, rng)
    a, b = mixed_event(shape, rng), mixed_event(shape, rng)
    res = check_bkr2(p, a, b)
    if not res.holds:
        return dict(_instance_info(shape, [a, b], p), lhs=str(res.lhs), rhs=str(res.rhs))
    return None


def trial_ineqr(rng, params):
    shape = random_shape(rng, max_d=4, max_size=3)
    r = int(rng.integers(3, 5))
    p = random_measure(shape, rng)
    events = [mixed_event(shape, rng) for _ in range(r)]
    res = check_bkr_r(p, events)
    if not res.holds:
        return dict(_instance_info(shape, events, p), lhs=str(res.lhs), rhs=str(res.rhs))
    return None


def _oracle_shape(rng, params) -> SpaceShape:
    if params.get("shape"):
        return SpaceShape(tuple(params["shape"]))
    return random_shape(rng, max_d=3, max_size=3)


def trial_oracle2(rng, params):
    shape = _oracle_shape(rng, params)
    a, b = mixed_event(shape, rng), mixed_event(shape, rng)
    if bkr.bkr2(a, b) != oracle.bkr2_naive(a, b):
        return _instance_info(shape, [a, b])
    return None


def trial_oracle_r(rng, params):
    shape = _oracle_shape(rng, params)
    r = int(params.get("r", 3))
    events = [mixed_event(shape, rng) for _ in range(r)]
    if bkr.bkr_r(events) != oracle.bkr_r_naive(events):
        return _instance_info(shape, events)
    return None


def trial_containment(rng, params):
    shape = random_shape(rng, max_d=4, max_size=3)
    r = int(params.get("r") or rng.integers(3, 5))
    events = [mixed_event(shape, rng) for _ in range(r)]
    box = bkr.bkr_r(events)
    bad = [str(t) for t in enumerate_parenthesizations(r)
           if not box <= bkr.chained_product(t, events)]
    if bad:
        return dict(_instance_info(shape, events), trees=bad)
    return None


def _dyadic(rng, d: int, n: int) -> DyadicSet:
    shape = grid_shape(d, n)
    e = cylinder_union_event(shape, rng) if rng.random() < 0.5 else bernoulli_event(shape, rng)
    return DyadicSet(d, n, e)


def trial_coarsen(rng, params):
    d = int(rng.integers(1, 3))
    fine = int(rng.integers(1, 4 if d == 2 else 6))
    c = _dyadic(rng, d, fine)
    l1_by_n = []
    for n in range(fine + 1):
        _, err = coarsen_round(c, n)
        if err.sym_diff > 2 * err.l1:
            return dict(_instance_info(c.cells.shape, [c.cells]), n=n,
                        sym_diff=str(err.sym_diff), l1=str(err.l1))
        l1_by_n.append(err.l1)
    if any(b > a for a, b in zip(l1_by_n, l1_by_n[1:])):
        return dict(_instance_info(c.cells.shape, [c.cells]), l1=[str(x) for x in l1_by_n])
    return None


def trial_refine(rng, params):
    d = int(rng.integers(1, 3))
    n = int(rng.integers(1, 3))
    finer = n + int(rng.integers(0, 2))
    a, b = _dyadic(rng, d, n), _dyadic(rng, d, n)
    lhs = grid_bkr(refine(a, finer), refine(b, finer))
    if lhs != refine(grid_bkr(a, b), finer):
        return dict(_instance_info(a.cells.shape, [a.cells, b.cells]), finer=finer)
    return None


def trial_approx(rng, params):
    d = int(params.get("d", 2))
    fine = int(params.get("fine", 3))
    n = int(rng.integers(1, fine))
    a, b = _dyadic(rng, d, fine), _dyadic(rng, d, fine)
    rep = section4_construction(a, b, n)
    if not rep.holds:
        return dict(_instance_info(a.cells.shape, [a.cells, b.cells]), n=n,
                    checks={k: v for k, v in rep.checks.items()})
    return None


def random_distribution(rng, max_atoms: int = 4) -> DiscreteDistribution:
    m = int(rng.integers(1, max_atoms + 1))
    denom = int(rng.integers(1, 4))
    xs = sorted(int(x) for x in rng.choice(np.arange(-20, 21), size=m, replace=False))
    weights = [int(v) for v in rng.integers(1, 7, size=m)]
    total = sum(weights)
    return DiscreteDistribution(tuple(Fraction(x, denom) for x in xs),
                                tuple(Fraction(w, total) for w in weights))


def trial_levelset(rng, params):
    dist = random_distribution(rng, max_atoms=6)
    got = [level_set_measure(dist, x) for x in dist.atoms]
    if got != list(dist.probs):
        return {"atoms": [str(x) for x in dist.atoms], "probs": [str(p) for p in dist.probs],
                "level_sets": [str(v) for v in got]}
    return None


def trial_pullback(rng, params):
    d = int(rng.integers(1, 4))
    dists = [random_distribution(rng) for _ in range(d)]
    p = support_measure(dists)
    a, b = mixed_event(p.shape, rng), mixed_event(p.shape, rng)
    grid, pa = pullback(dists, a)
    _, pb = pullback(dists, b)
    _, pab = pullback(dists, bkr.bkr2(a, b))
    problems = []
    if event_probability(grid.measure, pa) != event_probability(p, a):
        problems.append("probability")
    if pab != bkr.bkr2(pa, pb):
        problems.append("bkr")
    if problems:
        return dict(_instance_info(p.shape, [a, b]), problems=problems,
                    dists=[[str(x), str(q)] for dd in dists for x, q in zip(dd.atoms, dd.probs)])
    return None


TRIALS: dict[str, Callable] = {
    "ineq2": trial_ineq2,
    "ineqr": trial_ineqr,
    "oracle2": trial_oracle2,
    "oracler": trial_oracle_r,
    "containment": trial_containment,
    "coarsen": trial_coarsen,
    "refine": trial_refine,
    "approx": trial_approx,
    "levelset": trial_levelset,
    "pullback": trial_pullback,
}

# CLI kinds that bundle several trial types
SUITES: dict[str, tuple[str, ...]] = {
    "ineq2": ("ineq2",),
    "ineqr": ("ineqr",),
    "oracle": ("oracle2", "oracler"),
    "containment": ("containment",),
    "dyadic": ("coarsen", "refine", "approx"),
    "quantile": ("levelset", "pullback"),
}


@dataclass
class FuzzReport:
    kind: str
    seed: int
    trials: int
    params: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)   # [(trial index, detail)]

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "seed": self.seed,
            "trials": self.trials,
            "params": self.params,
            "status": "pass" if self.passed else "violation",
            "violation_count": len(self.violations),
            "first_violation": (None if not self.violations else
                                {"trial": self.violations[0][0], **self.violations[0][1]}),
        }

    def to_text(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _run_block(task):
    kind, seed, lo, hi, params = task
    fn = TRIALS[kind]
    out = []
    for i in range(lo, hi):
        detail = fn(trial_rng(seed, i), params)
        if detail is not None:
            out.append((i, detail))
    return out


def run_trials(kind: str, trials: int, seed: int, workers: int = 1,
               block: int = 250, **params) -> FuzzReport:
    if kind not in TRIALS:
        raise ValueError(f"unknown trial kind {kind!r}")
    if trials <= 0:
        raise ValueError("trials must be positive")
    tasks = [(kind, seed, lo, min(trials, lo + block), params)
             for lo in range(0, trials, block)]
    rep = FuzzReport(kind, seed, trials, params)
    with worker_pool(workers) as pool:
        for part in pool.map(_run_block, tasks):
            rep.violations.extend(part)
    return rep


def run_suite(kind: str, trials: int, seed: int, workers: int = 1, **params) -> list[FuzzReport]:
    """All trial types of a CLI suite; the seed is offset per trial type."""
    if kind not in SUITES:
        raise ValueError(f"unknown suite {kind!r}; choose from {sorted(SUITES)}")
    return [run_trials(sub, trials, seed + k, workers, **params)
            for k, sub in enumerate(SUITES[kind])]


# -- exhaustive oracle sweep ------------------------------------------------------

def _all_events(shape: SpaceShape) -> list[Event]:
    n = shape.n_points
    return [Event(shape, [(m >> i) & 1 for i in range(n)]) for m in range(1 << n)]


def _sweep_block(task):
    sizes, lo, hi = task
    shape = SpaceShape(sizes)
    events = _all_events(shape)
    closures = [oracle.closure_family(e) for e in events]
    bad = []
    for i in range(lo, hi):
        a = events[i]
        for j, b in enumerate(events):
            if bkr.bkr2(a, b) != oracle.bkr2_from_closures(shape, closures[i], closures[j]):
                bad.append((i, j))
    return bad


def oracle_sweep(shape: SpaceShape, workers: int = 1) -> tuple[int, list]:
    """bkr2 against the definitional oracle on every ordered pair of events."""
    if shape.n_points > 8:
        raise ValueError("exhaustive pair sweep is limited to N <= 8 (65,536 pairs)")
    count = 1 << shape.n_points
    block = max(1, count // 16)
    tasks = [(shape.sizes, lo, min(count, lo + block)) for lo in range(0, count, block)]
    bad: list = []
    with worker_pool(workers) as pool:
        for part in pool.map(_sweep_block, tasks):
            bad.extend(part)
    return count * count, bad


def sweep_report(shape: SpaceShape, workers: int = 1) -> dict:
    pairs, bad = oracle_sweep(shape, workers)
    return {"kind": "oracle-exhaustive", "shape": str(shape), "pairs": pairs,
            "status": "pass" if not bad else "violation", "violation_count": len(bad),
            "first_violation": None if not bad else list(bad[0])}
