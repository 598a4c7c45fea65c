from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bkrlab.bkr import bkr2, bkr_r, chained_product
from bkrlab.config import BKRInputError
from bkrlab.fuzz import random_distribution
from bkrlab.measure import event_probability
from bkrlab.quantile import (DiscreteDistribution, IntervalGrid,
                             format_distribution, g_map, level_set_measure,
                             parse_distribution, pullback, quantile,
                             support_measure)
from bkrlab.sampling import mixed_event
from bkrlab.space import Event
from bkrlab.trees import enumerate_parenthesizations

D = DiscreteDistribution((F(0), F(5)), (F(1, 3), F(2, 3)))


def _sup_oracle(dist, u):
    """sup{x : F(x) <= u} by scanning atoms with the cdf."""
    below = [j for j, x in enumerate(dist.atoms) if dist.cdf(x) <= u]
    return dist.atoms[below[-1] + 1] if below else dist.atoms[0]


def test_quantile_examples():
    assert quantile(D, F(1, 4)) == 0
    assert quantile(D, F(1, 3)) == 5
    assert quantile(D, F(99, 100)) == 5
    single = DiscreteDistribution((F(7, 2),), (F(1),))
    assert all(quantile(single, u) == F(7, 2) for u in (F(1, 100), F(1, 2), F(99, 100)))


@pytest.mark.parametrize("u", [0, 1, F(-1, 2), F(3, 2)])
def test_quantile_domain(u):
    with pytest.raises(BKRInputError):
        quantile(D, u)


@settings(max_examples=80)
@given(st.integers(0, 2**32), st.fractions(min_value=F(1, 10**6), max_value=F(10**6 - 1, 10**6)))
def test_quantile_matches_sup_definition(seed, u):
    dist = random_distribution(np.random.default_rng(seed), max_atoms=6)
    assert quantile(dist, u) == _sup_oracle(dist, u)


def test_right_continuity(rng):
    for _ in range(50):
        dist = random_distribution(rng, max_atoms=6)
        cuts = (F(0),) + dist.breakpoints
        for lo, hi in zip(cuts[1:-1], cuts[2:]):
            at = quantile(dist, lo)
            for k in range(1, 12):
                assert quantile(dist, lo + (hi - lo) / 2**k) == at
            # left of the breakpoint the value differs
            assert quantile(dist, lo - F(1, 10**9)) != at


def test_level_sets():
    assert level_set_measure(D, 0) == F(1, 3)
    assert level_set_measure(D, 5) == F(2, 3)
    assert level_set_measure(DiscreteDistribution((F(2),), (F(1),)), 2) == 1
    with pytest.raises(BKRInputError):
        level_set_measure(D, 1)


def test_level_sets_fuzz(rng):
    for _ in range(100):
        dist = random_distribution(rng, max_atoms=6)
        got = [level_set_measure(dist, x) for x in dist.atoms]
        assert got == list(dist.probs)
        assert sum(got) == 1


def test_distribution_validation():
    for atoms, probs in [((1, 1), (F(1, 2), F(1, 2))), ((2, 1), (F(1, 2), F(1, 2))),
                         ((1,), (F(1, 2),)), ((1, 2), (F(1), F(0))), ((), ())]:
        with pytest.raises(BKRInputError):
            DiscreteDistribution(atoms, probs)


def test_pullback_full_support():
    dist = DiscreteDistribution((F(-1), F(2), F(3)), (F(1, 6), F(1, 2), F(1, 3)))
    grid, pa = pullback([dist], Event.full(support_measure([dist]).shape))
    assert pa.is_full()
    assert event_probability(grid.measure, pa) == 1
    assert grid.cuts == ((F(0), F(1, 6), F(2, 3), F(1)),)


def test_pullback_membership_by_random_points(rng):
    for _ in range(30):
        d = int(rng.integers(1, 4))
        dists = [random_distribution(rng) for _ in range(d)]
        a = mixed_event(support_measure(dists).shape, rng)
        grid, pa = pullback(dists, a)
        for _ in range(20):
            u = tuple(F(int(rng.integers(1, 10**6)), 10**6) for _ in range(d))
            x = g_map(dists, u)
            idx = tuple(dd.index(xi) for dd, xi in zip(dists, x))
            assert (grid.locate(u) in pa) == (idx in a)


def test_pullback_transport(rng):
    for _ in range(60):
        d = int(rng.integers(1, 4))
        dists = [random_distribution(rng) for _ in range(d)]
        p = support_measure(dists)
        events = [mixed_event(p.shape, rng) for _ in range(4)]
        grid, pulled = None, []
        for e in events:
            grid, pe = pullback(dists, e)
            pulled.append(pe)
            assert event_probability(grid.measure, pe) == event_probability(p, e)
        assert pullback(dists, bkr2(events[0], events[1]))[1] == bkr2(pulled[0], pulled[1])
        assert pullback(dists, bkr_r(events[:3]))[1] == bkr_r(pulled[:3])
        for tree in enumerate_parenthesizations(4):
            assert pullback(dists, chained_product(tree, events))[1] == chained_product(tree, pulled)


def test_pullback_shape_mismatch():
    with pytest.raises(BKRInputError):
        pullback([D], Event.full(support_measure([D, D]).shape))


def test_interval_grid_locate():
    grid = IntervalGrid.from_distributions([D])
    assert grid.locate((F(1, 3),)) == (1,)
    assert grid.locate((F(1, 4),)) == (0,)
    with pytest.raises(BKRInputError):
        grid.locate((F(1),))


def test_distribution_file_roundtrip(rng):
    dist = random_distribution(rng)
    assert parse_distribution(format_distribution(dist)) == dist
    assert parse_distribution("# d\n0 1/3\n5 2/3\n") == D
    for bad in ["0 1/3 1\n", "0 x\n", "5 1/3\n0 2/3\n"]:
        with pytest.raises(BKRInputError):
            parse_distribution(bad)
