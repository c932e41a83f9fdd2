import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gwproj.genus0 import Genus0, two_point_descendant
from gwproj.kernel import Rat
from gwproj.store import (
    AuxKey,
    Cache,
    CacheConflict,
    CacheParseError,
    InvKey,
    aux,
    cache_load,
    cache_save,
    convention_value,
    degree0_formula,
    genus0_value,
)
from gwproj.target import pairing


def test_key_canonical():
    k1 = InvKey(2, 1, 3, ((1, 2), (0, 0)))
    k2 = InvKey(2, 1, 3, ((0, 0), (1, 2)))
    assert k1 == k2 and hash(k1) == hash(k2)
    assert k1.insertions == ((0, 0), (1, 2))


def test_convention_examples():
    assert convention_value(InvKey(2, 0, 0, ((-2, 2),))) == 1
    assert convention_value(InvKey(2, 0, 0, ((-2, 1),))) == 0
    for r in (1, 2, 3):
        for a, b in itertools.product(range(r + 1), repeat=2):
            assert convention_value(InvKey(r, 0, 0, ((0, a), (-1, b)))) == pairing(r, a, b)
            assert convention_value(InvKey(r, 0, 0, ((1, a), (-2, b)))) == -pairing(r, a, b)
    assert convention_value(InvKey(2, 0, 0, ((0, 0), (0, 1), (0, 1)))) == 1
    assert convention_value(InvKey(2, 0, 0, ((0, 0), (0, 0), (0, 1)))) == 0


def test_convention_genuine_and_negative():
    assert convention_value(InvKey(2, 0, 1, ((0, 2), (0, 2)))) is None
    assert convention_value(InvKey(2, 1, 0, ((1, 0),))) is None
    assert convention_value(InvKey(2, 1, 0, ((-1, 0), (2, 1)))) == 0
    assert convention_value(InvKey(2, 0, 2, ((-1, 2),) * 3)) == 0


@given(st.integers(1, 3), st.integers(-6, 6), st.integers(-6, 6), st.integers(0, 3), st.integers(0, 3))
def test_two_point_convention_symmetric(r, m1, m2, a, b):
    a, b = a % (r + 1), b % (r + 1)
    k1 = InvKey(r, 0, 0, ((m1, a), (m2, b)))
    k2 = InvKey(r, 0, 0, ((m2, b), (m1, a)))
    assert convention_value(k1) == convention_value(k2)


@pytest.mark.parametrize("r", [1, 2, 3])
def test_multinomial_matches_conventions(r):
    for a in range(r + 1):
        for m in range(-4, 3):
            key = InvKey(r, 0, 0, ((m, a),))
            assert convention_value(key) == degree0_formula(r, key.insertions)
    for a, b in itertools.product(range(r + 1), repeat=2):
        for m1, m2 in itertools.product(range(-4, 4), repeat=2):
            if m1 < 0 or m2 < 0:
                key = InvKey(r, 0, 0, ((m1, a), (m2, b)))
                assert convention_value(key) == degree0_formula(r, key.insertions)


def test_aux_level_shift_identity():
    for r in (1, 2, 3):
        g0 = Genus0(r)
        cache = Cache()
        for i in range(7):
            for a, b in itertools.product(range(r + 1), repeat=2):
                assert aux(AuxKey(r, i, (-i - 1, a), b, 0), cache, g0) == pairing(r, a, b)


def _reference_aux_degree0(r, i, m, a, b):
    """Plain recursion at degree 0 with level 0 given by the two-point conventions."""
    if i == 0:
        return convention_value(InvKey(r, 0, 0, ((m, a), (0, b))))
    total = _reference_aux_degree0(r, i - 1, m + 1, a, b)
    for c in range(r + 1):
        f = convention_value(InvKey(r, 0, 0, ((m, a), (0, c))))
        if f:
            total -= f * _reference_aux_degree0(r, i - 1, 0, r - c, b)
    return total


@pytest.mark.parametrize("r", [1, 2, 3])
def test_aux_degree0_shortcut_matches_recursion(r):
    g0 = Genus0(r)
    cache = Cache()
    for i in range(5):
        for m in range(-8, 3):
            for a, b in itertools.product(range(r + 1), repeat=2):
                assert aux(AuxKey(r, i, (m, a), b, 0), cache, g0) == _reference_aux_degree0(r, i, m, a, b)


@pytest.mark.parametrize("r", [2, 3])
def test_aux_level0_is_two_point(r):
    g0 = Genus0(r)
    cache = Cache()
    for e in range(1, 4):
        for b, bj in itertools.product(range(r + 1), repeat=2):
            m = (r + 1) * e - 1 - b + bj
            if m >= 0:
                assert aux(AuxKey(r, 0, (m, b), r - bj, e), cache, g0) == two_point_descendant(r, e, b, bj)


@pytest.mark.parametrize("r", [2, 3])
def test_aux_level1_unrolled(r):
    g0 = Genus0(r)
    cache = Cache()
    for e in range(0, 3):
        for b, s in itertools.product(range(r + 1), repeat=2):
            m = (r + 1) * e + r - 1 - 1 - b - s
            direct = aux(AuxKey(r, 1, (m, b), s, e), cache, g0)
            if m + 1 < 0:
                continue
            expected = genus0_value(g0, ((m + 1, b), (0, s)), e) if m + 1 >= 0 else Rat(0)
            for a in range(r + 1):
                for e1 in range(e + 1):
                    if m < 0:
                        break
                    expected -= genus0_value(g0, ((m, b), (0, a)), e1) * genus0_value(
                        g0, ((0, r - a), (0, s)), e - e1)
            if m >= 0:
                assert direct == expected


def _sample_cache():
    c = Cache()
    c.put(InvKey(2, 1, 2, ((5, 2),)), Rat(1, 32))
    c.put(InvKey(3, 3, 3, ((0, 3),) * 6), Rat(-43, 4032))
    c.put(InvKey(2, 0, 1, ()), Rat(7))
    c.put(AuxKey(2, 3, (-4, 1), 1, 0), Rat(1))
    c.put(AuxKey(2, 1, (2, 0), 2, 1), Rat(-3, 5))
    return c


def test_cache_round_trip(tmp_path):
    c = _sample_cache()
    path = tmp_path / "cache.txt"
    cache_save(c, path)
    assert cache_load(path) == c
    text = path.read_text()
    assert "3|3|3|0:3,0:3,0:3,0:3,0:3,0:3|-43/4032" in text
    assert "aux|2|3|-4:1|1|0|1" in text
    assert "2|0|1||7" in text


def test_cache_skips_aux_with_extra_points(tmp_path):
    c = Cache()
    c.put(AuxKey(2, 1, (1, 0), 2, 1, ((0, 2),)), Rat(2))
    path = tmp_path / "c.txt"
    cache_save(c, path)
    assert path.read_text() == ""


def test_empty_cache(tmp_path):
    path = tmp_path / "empty.txt"
    cache_save(Cache(), path)
    assert path.read_text() == ""
    assert len(cache_load(path)) == 0


@pytest.mark.parametrize("line", ["2|1|2|5:2|3/", "2|1|2|5:2", "aux|2|1|0:1|2|1", "2|x|2|5:2|1", "2|1|2|5-2|1"])
def test_malformed_lines_name_the_line(tmp_path, line):
    path = tmp_path / "bad.txt"
    path.write_text("2|1|0|1:0|1/8\n" + line + "\n")
    with pytest.raises(CacheParseError, match="line 2"):
        cache_load(path)


def test_conflicts(tmp_path):
    c = Cache()
    key = InvKey(2, 1, 0, ((1, 0),))
    c.put(key, Rat(1, 8))
    c.put(key, Rat(1, 8))
    with pytest.raises(CacheConflict):
        c.put(key, Rat(1, 7))
    path = tmp_path / "c.txt"
    path.write_text("2|1|0|1:0|1/8\n")
    other = Cache()
    other.put(key, Rat(1, 9))
    with pytest.raises(CacheConflict):
        cache_load(path, into=other)


keys = st.builds(
    lambda r, g, d, ins: InvKey(r, g, d, ins),
    st.integers(1, 4), st.integers(0, 4), st.integers(0, 6),
    st.lists(st.tuples(st.integers(-3, 9), st.integers(0, 4)), max_size=5),
)
values = st.builds(lambda n, d: Rat(n, d), st.integers(-10**9, 10**9), st.integers(1, 10**6))


@settings(max_examples=40, deadline=None)
@given(st.dictionaries(keys, values, max_size=8))
def test_cache_round_trip_random(tmp_path_factory, table):
    c = Cache()
    for k, v in table.items():
        c.put(k, v)
    path = tmp_path_factory.mktemp("rt") / "c.txt"
    cache_save(c, path)
    assert cache_load(path) == c
