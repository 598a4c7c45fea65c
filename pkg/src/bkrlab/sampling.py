"""Seeded random events, shapes and event tuples for fuzzing and search."""

from __future__ import annotations

import numpy as np

from .space import Event, SpaceShape, event_from_patterns


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream per (seed, trial); results never depend on sharding."""
    return np.random.default_rng([int(seed), int(index)])


def random_shape(rng: np.random.Generator, max_d: int = 4, max_size: int = 3,
                 min_d: int = 1, min_size: int = 1) -> SpaceShape:
    d = int(rng.integers(min_d, max_d + 1))
    return SpaceShape(tuple(int(s) for s in rng.integers(min_size, max_size + 1, size=d)))


def bernoulli_event(shape: SpaceShape, rng: np.random.Generator,
                    density: float | None = None) -> Event:
    if density is None:
        density = float(rng.random())
    return Event(shape, rng.random(shape.n_points) < density)


def random_pattern(shape: SpaceShape, rng: np.random.Generator, fix_prob: float) -> str:
    out = []
    for s in shape.sizes:
        if s <= 10 and rng.random() < fix_prob:
            out.append(str(int(rng.integers(s))))
        else:
            out.append("*")
    return "".join(out)


def cylinder_union_event(shape: SpaceShape, rng: np.random.Generator,
                         n_cylinders: int | None = None, fix_prob: float | None = None) -> Event:
    """Union of random cylinders, the structure that makes □ nontrivial."""
    if n_cylinders is None:
        n_cylinders = int(rng.integers(1, 2 * shape.d + 2))
    if fix_prob is None:
        fix_prob = float(rng.uniform(0.2, 0.8))
    return event_from_patterns(shape, [random_pattern(shape, rng, fix_prob)
                                       for _ in range(n_cylinders)])


def mixed_event(shape: SpaceShape, rng: np.random.Generator,
                density: float | None = None) -> Event:
    """Bernoulli, cylinder-union, or (rarely) empty/full events."""
    u = rng.random()
    if u < 0.05:
        return Event.empty(shape)
    if u < 0.10:
        return Event.full(shape)
    if u < 0.55 or max(shape.sizes, default=1) > 10:
        return bernoulli_event(shape, rng, density)
    return cylinder_union_event(shape, rng)
