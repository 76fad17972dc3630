from fractions import Fraction
from itertools import combinations_with_replacement
from math import factorial

import pytest

from bvinf.fixtures import (as_scalar, connected_cumulant_oracle, double_factorial,
                            perfect_matchings, wick_moment)
from bvinf.morphisms import cumulant_n


def profiles(max_legs, max_len):
    for n in range(1, max_len + 1):
        for p in combinations_with_replacement(range(1, max_legs + 1), n):
            if sum(p) <= max_legs:
                yield p


def test_double_factorial():
    assert [double_factorial(n) for n in range(-1, 10)] == [1, 1, 1, 2, 3, 8, 15, 48, 105, 384, 945]


@pytest.mark.parametrize("n", range(0, 9))
def test_perfect_matching_counts(n):
    ms = list(perfect_matchings(range(n)))
    if n % 2:
        assert ms == []
        return
    # (2k)! / (2^k k!) pairings, all distinct and covering every point
    k = n // 2
    assert len(ms) == factorial(n) // (2 ** k * factorial(k))
    assert len({frozenset(frozenset(e) for e in m) for m in ms}) == len(ms)
    for m in ms:
        assert sorted(x for e in m for x in e) == list(range(n))


@pytest.mark.parametrize("k", range(0, 7))
def test_wick_moment_matches_component(a1, k):
    f = a1.f
    t2k = f.source.ring.monomial((2 * k, 0))
    fk = f.component(k, t2k).shift(k)
    assert wick_moment(k) == {k: Fraction((-1) ** k * double_factorial(2 * k - 1))}
    assert fk == as_scalar(wick_moment(k), fk.ring)


def test_connected_oracle_examples():
    assert connected_cumulant_oracle((2, 2)) == {2: 2}
    assert connected_cumulant_oracle((1, 1)) == {1: -1}
    assert connected_cumulant_oracle((1, 1, 2)) == {2: 2}
    assert connected_cumulant_oracle((1, 2)) == {}
    # a self-loop-only vertex cannot reach the others
    assert connected_cumulant_oracle((2, 0)) == {}
    assert connected_cumulant_oracle((4,)) == wick_moment(2)


def test_cumulants_match_connected_matchings(a1):
    f = a1.f
    r = f.source.ring
    bad = []
    for prof in profiles(8, 6):
        got = cumulant_n(f, [r.monomial((a, 0)) for a in prof], check=False)
        if got != as_scalar(connected_cumulant_oracle(prof), got.ring):
            bad.append(prof)
    assert not bad


def test_cumulant_hbar_divisibility(a1):
    f = a1.f
    r = f.source.ring
    for prof in profiles(8, 5):
        got = cumulant_n(f, [r.monomial((a, 0)) for a in prof], check=False)
        if not got.is_zero():
            assert got.valuation() >= len(prof) - 1, prof
