from itertools import combinations
from math import comb

import pytest
from hypothesis import given, strategies as st

from artifact.pattern import (
    DyckPath,
    Pattern,
    PatternError,
    content,
    dyck_from_pattern,
    enumerate_patterns,
    face_min_gaps,
    fully_nested,
    least_nested,
    pattern_count,
    pattern_from_dyck,
    pattern_from_key,
    stratum_of,
    word_decode,
    word_encode,
)


def brute_force_count(n):
    """Noncrossing matchings of n - (n odd) points on a line times the
    admissible puncture positions: k+1 faces for even n = 2k, and the
    defect slot for odd n is free.  Counted independently of the package."""
    def matchings(points):
        if not points:
            return [[]]
        a = points[0]
        out = []
        for j in range(1, len(points), 2):
            inner, outer = points[1:j], points[j + 1:]
            for m1 in matchings(inner):
                for m2 in matchings(outer):
                    out.append([(a, points[j])] + m1 + m2)
        return out

    if n % 2 == 0:
        return len(matchings(list(range(1, n + 1)))) * (n // 2 + 1)
    total = 0
    for d in range(1, n + 1):
        # the defect strand always reaches the puncture, so every
        # noncrossing matching of the remaining points is admissible
        total += len(matchings([p for p in range(1, n + 1) if p != d]))
    return total


@pytest.mark.parametrize("n", range(0, 8))
def test_counts_match_binomial_and_brute_force(n):
    assert pattern_count(n) == comb(n, (n + 1) // 2)
    assert len(enumerate_patterns(n)) == comb(n, (n + 1) // 2)
    assert len(set(enumerate_patterns(n))) == pattern_count(n)
    assert pattern_count(n) == brute_force_count(n)


def test_small_counts():
    assert pattern_count(3) == 3
    assert pattern_count(4) == 6
    assert pattern_count(0) == 1


@pytest.mark.parametrize("n", range(0, 7))
def test_word_round_trip(n):
    for L in enumerate_patterns(n):
        assert word_decode(word_encode(L)) == L
        if n:
            assert pattern_from_key(L.key()) == L


def test_every_binary_word_with_right_weight_is_a_pattern():
    words = set()
    for pos in combinations(range(5), 3):
        w = "".join("a" if i in pos else "b" for i in range(5))
        words.add(word_encode(word_decode(w)))
    assert len(words) == 10


@given(st.integers(1, 9).flatmap(lambda n: st.permutations(["a"] * ((n + 1) // 2) + ["b"] * (n // 2))))
def test_decode_then_encode_is_identity(letters):
    w = "".join(letters)
    assert word_encode(word_decode(w)) == w


def test_defect_gets_alpha():
    L = Pattern(3, ((2, 3),), defect=1)
    assert word_encode(L)[0] == "a"


def test_bad_words_rejected():
    with pytest.raises(PatternError):
        word_decode("aa")
    with pytest.raises(PatternError):
        word_decode("axb")


def test_crossing_matching_rejected():
    with pytest.raises(PatternError):
        Pattern(4, ((1, 3), (2, 4)), gap=0)


def test_dyck_examples():
    assert dyck_from_pattern(least_nested(6)) == DyckPath((1, 0, 1, 0, 1, 0))
    top = DyckPath((1, 2, 3, 2, 1, 0))
    assert pattern_from_dyck(top).arches == ((1, 6), (2, 5), (3, 4))
    assert DyckPath((1, 0, 1, 0, 1, 0)).content == 3
    assert top.content == 0
    assert content(least_nested(6)) == 3


def test_dyck_round_trip_on_base_stratum():
    for n in range(1, 8):
        for L in enumerate_patterns(n):
            base = (L.defect == n) if L.odd else (L.gap == 0)
            if base:
                assert pattern_from_dyck(dyck_from_pattern(L), odd=L.odd) == L


def test_invalid_dyck_path():
    with pytest.raises(PatternError):
        DyckPath((1, 2, 1))


def test_faces_per_matching():
    for k in range(1, 4):
        n = 2 * k
        matchings = {L.arches for L in enumerate_patterns(n)}
        for m in matchings:
            assert len(face_min_gaps(n, m)) == k + 1


def test_fully_nested_shapes():
    assert fully_nested(3) == Pattern(3, ((1, 3),), defect=2)
    assert fully_nested(4).arches == ((1, 4), (2, 3))
    assert len(enumerate_patterns(2)) == 2
    assert {L.gap for L in enumerate_patterns(2)} == {0, 1}


def test_least_nested_touches_gap_zero():
    assert 4 in stratum_of(least_nested(4))
