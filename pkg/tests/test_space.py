import itertools
import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bkrlab.config import BKRInputError, ResourceLimitError, override_limits
from bkrlab.formats import (dump_event, format_event_text, load_event,
                            parse_event_text, read_event)
from bkrlab.space import (Event, SpaceShape, cardinality, complement,
                          cylinder_from_pattern, equals, event_from_patterns,
                          extend_base, intersect, is_subset, project_base, rank,
                          union, unrank)

from conftest import ev

EX83 = ["11****", "**11**", "1**0**", "*11***", "**00**", "****00", "**1**0", "***00*"]


def test_rank_examples():
    assert rank(SpaceShape((2, 2)), (0, 0)) == 0
    assert rank(SpaceShape((2, 2)), (1, 0)) == 1
    assert rank(SpaceShape((2, 3)), (1, 2)) == 5


def test_rank_rejects_out_of_range():
    with pytest.raises(BKRInputError):
        rank(SpaceShape((2, 3)), (2, 0))
    with pytest.raises(BKRInputError):
        rank(SpaceShape((2, 3)), (0,))


@pytest.mark.parametrize("sizes", [(2,) * 16, (4, 4, 4, 4, 4, 4, 4, 4), (3, 5, 7, 11), (1, 6, 1), (65536,)])
def test_rank_unrank_bijection_exhaustive(sizes):
    shape = SpaceShape(sizes)
    n = shape.n_points
    seen = np.zeros(n, dtype=bool)
    strides = np.array(shape.strides)
    for idx, p in enumerate(shape.points()):
        r = int(np.dot(p, strides))
        assert r == idx
        seen[r] = True
        if idx % 997 == 0:
            assert unrank(shape, r) == p and rank(shape, p) == r
    assert seen.all()


@given(st.lists(st.integers(1, 6), min_size=1, max_size=6), st.data())
def test_rank_unrank_roundtrip(sizes, data):
    shape = SpaceShape(tuple(sizes))
    p = tuple(data.draw(st.integers(0, s - 1)) for s in sizes)
    assert unrank(shape, rank(shape, p)) == p


def test_shape_caps():
    with pytest.raises(ResourceLimitError):
        SpaceShape((2,) * 25)
    with pytest.raises(ResourceLimitError):
        SpaceShape((2,) * 20 + (128,))
    with override_limits(max_dims=30, max_points=2**30):
        assert SpaceShape((1,) * 30).d == 30
    with pytest.raises(BKRInputError):
        SpaceShape((2, 0))


def test_shape_parse():
    assert SpaceShape.parse("2^3,3").sizes == (2, 2, 2, 3)
    assert SpaceShape.parse("2, 5").sizes == (2, 5)
    with pytest.raises(BKRInputError):
        SpaceShape.parse("2,x")


def test_patterns():
    sh6 = SpaceShape((2,) * 6)
    assert len(event_from_patterns(sh6, ["11****"])) == 16
    assert event_from_patterns(SpaceShape((2, 2)), ["**"]).is_full()
    a = event_from_patterns(SpaceShape((2, 2)), ["0*", "*0"])
    assert a == ev((2, 2), "00", "01", "10")
    assert len(a) == 3


@pytest.mark.parametrize("bad", ["1*", "12*", "2**", "a**"])
def test_pattern_errors(bad):
    with pytest.raises(BKRInputError):
        event_from_patterns(SpaceShape((2, 2, 2)), [bad])


def _pattern_meet(p, q):
    out = []
    for a, b in zip(p, q):
        if a == "*":
            out.append(b)
        elif b == "*" or a == b:
            out.append(a)
        else:
            return None
    return "".join(out)


def test_example_union_cardinality_two_ways():
    a = event_from_patterns(SpaceShape((2,) * 6), EX83)
    total = 0
    for k in range(1, len(EX83) + 1):
        for combo in itertools.combinations(EX83, k):
            meet = combo[0]
            for q in combo[1:]:
                meet = meet and _pattern_meet(meet, q)
            if meet:
                total += (-1) ** (k + 1) * 2 ** meet.count("*")
    assert cardinality(a) == total == 54


def test_set_algebra(rng):
    sh = SpaceShape((3, 2, 2))
    empty = Event.empty(sh)
    assert complement(empty).is_full()
    for _ in range(50):
        a = Event(sh, rng.random(12) < 0.5)
        b = Event(sh, rng.random(12) < 0.5)
        assert is_subset(intersect(a, b), a)
        assert is_subset(a, union(a, b))
        assert equals(complement(complement(a)), a)
        assert cardinality(union(a, b)) + cardinality(intersect(a, b)) == len(a) + len(b)
        assert set(union(a, b).points()) == set(a.points()) | set(b.points())


def test_set_algebra_shape_mismatch():
    with pytest.raises(BKRInputError):
        union(Event.full(SpaceShape((2, 2))), Event.full(SpaceShape((4,))))


def test_events_are_immutable():
    a = Event.full(SpaceShape((2, 2)))
    with pytest.raises(ValueError):
        a.bits[0] = False


def test_project_base_examples():
    a = ev((2, 2), "00", "01")
    assert project_base(a, 0b01) == ev((2,), "0")
    pt = project_base(a, 0)
    assert pt.shape.d == 0 and len(pt) == 1
    assert not project_base(Event.empty(SpaceShape((2, 3))), 0b10)


def test_extend_base_examples(rng):
    full_shape = SpaceShape((2, 2))
    assert extend_base(ev((2,), "0"), 0b01, full_shape) == ev((2, 2), "00", "01")
    assert extend_base(Event.full(SpaceShape((2,))), 0b10, full_shape).is_full()
    sh = SpaceShape((2, 3, 2, 2))
    for _ in range(30):
        mask = int(rng.integers(16))
        sub = sh.sub(mask)
        c = Event(sub, rng.random(sub.n_points) < 0.5)
        e = extend_base(c, mask, sh)
        assert project_base(e, mask) == c
        assert len(e) == len(c) * sh.n_points // sub.n_points
    with pytest.raises(BKRInputError):
        extend_base(ev((2,), "0"), 0b11, full_shape)


def _free_outside(a: Event, mask: int) -> bool:
    """Direct definition: membership ignores coordinates outside K."""
    pts = set(a.points())
    for p in a.shape.points():
        for q in a.shape.points():
            if all(p[i] == q[i] for i in range(a.shape.d) if mask >> i & 1):
                if (p in pts) != (q in pts):
                    return False
    return True


def test_extend_project_contains_and_cylinder_criterion(rng):
    for sizes in [(2, 2), (2, 3), (2, 2, 2), (3, 2, 2)]:
        sh = SpaceShape(sizes)
        for trial in range(40):
            if trial % 2:
                a = Event(sh, rng.random(sh.n_points) < 0.5)
            else:
                pats = ["".join(str(int(rng.integers(s))) if rng.random() < 0.4 else "*"
                                for s in sizes) for _ in range(2)]
                a = event_from_patterns(sh, pats)
            for mask in range(1 << sh.d):
                back = extend_base(project_base(a, mask), mask, sh)
                assert a <= back
                assert (back == a) == _free_outside(a, mask)


def test_patterns_match_extended_bases():
    sh = SpaceShape((2, 3, 2, 2))
    for pat in ["1*0*", "**1*", "0*1*", "12*0", "****"]:
        mask = sum(1 << i for i, c in enumerate(pat) if c != "*")
        sub = sh.sub(mask)
        point = tuple(int(c) for c in pat if c != "*")
        base = Event.from_points(sub, [point])
        assert cylinder_from_pattern(sh, pat) == extend_base(base, mask, sh)


def test_binary_format_is_bit_exact():
    sh = SpaceShape((2, 3, 2))
    a = Event.from_points(sh, [(0, 0, 0), (1, 2, 1)])   # ranks 0 and 11
    data = dump_event(a)
    assert data[:4] == b"BKR1"
    assert struct.unpack("<4I", data[4:20]) == (3, 2, 3, 2)
    assert data[20:] == bytes([0b00000001, 0b00001000])
    assert load_event(data) == a


def test_binary_format_rejects_padding_bits():
    data = b"BKR1" + struct.pack("<II", 1, 3) + bytes([0b1000_0001])
    with pytest.raises(BKRInputError):
        load_event(data)


def test_text_format(tmp_path):
    text = "# the r=4 example\nshape: 2^6\n" + "\n".join(EX83) + "\n"
    a = parse_event_text(text)
    assert a == event_from_patterns(SpaceShape((2,) * 6), EX83)
    assert parse_event_text(format_event_text(a)) == a
    big = Event.from_points(SpaceShape((12, 2)), [(11, 1), (3, 0)])
    assert parse_event_text(format_event_text(big)) == big
    one = Event.from_points(SpaceShape((12,)), [(11,)])
    assert parse_event_text(format_event_text(one)) == one
    path = tmp_path / "a.bkr"
    path.write_bytes(dump_event(a))
    assert read_event(path) == a
    with pytest.raises(BKRInputError):
        parse_event_text("11****\n")


@settings(max_examples=50)
@given(st.lists(st.integers(1, 4), min_size=1, max_size=4), st.integers(0, 2**32))
def test_pack_roundtrip(sizes, seed):
    sh = SpaceShape(tuple(sizes))
    bits = np.random.default_rng(seed).random(sh.n_points) < 0.5
    a = Event(sh, bits)
    assert Event.from_packed(sh, a.packed()) == a
    assert load_event(dump_event(a)) == a
