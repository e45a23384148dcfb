import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bohrstrip.monomials import (
    ExponentVector,
    count_monomials,
    enumerate_exponents,
    multiset_table,
    rank,
    suffix_offsets,
    unrank,
)


def brute_exponents(n, m):
    """All exponent vectors of total degree m, lexicographically decreasing."""
    vecs = [v for v in itertools.product(range(m + 1), repeat=n) if sum(v) == m]
    return sorted(vecs, reverse=True)


def test_count_examples():
    assert count_monomials(4, 2) == 10 == len(brute_exponents(4, 2))
    assert count_monomials(7, 0) == 1
    assert count_monomials(1, 5) == 1


def test_enumeration_examples():
    assert [e.exponents for e in enumerate_exponents(2, 2)] == [(2, 0), (1, 1), (0, 2)]
    assert [e.exponents for e in enumerate_exponents(3, 1)] == [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    assert sum(1 for _ in enumerate_exponents(8, 3)) == 120


@pytest.mark.parametrize("n,m", [(1, 3), (2, 4), (3, 3), (4, 2), (5, 3), (3, 5)])
def test_enumeration_matches_brute_force(n, m):
    assert [e.exponents for e in enumerate_exponents(n, m)] == brute_exponents(n, m)


@pytest.mark.parametrize("n,m", [(2, 9), (16, 3), (32, 3), (64, 3), (20, 4), (10, 6)])
def test_stream_length_equals_count(n, m):
    stream = list(enumerate_exponents(n, m))
    assert len(stream) == count_monomials(n, m)
    assert all(e.degree == m and e.n_vars == n for e in stream)
    assert len({e.exponents for e in stream}) == len(stream)


def test_bracketing_exhaustive():
    for n in range(1, 65):
        for m in range(1, 10):
            c = count_monomials(n, m)
            assert n**m <= c * math.factorial(m)
            assert c <= n**m


def test_overflow_detected():
    with pytest.raises(OverflowError):
        count_monomials(2**20, 9)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 12), st.integers(0, 6), st.data())
def test_rank_unrank_round_trip(n, m, data):
    r = data.draw(st.integers(0, count_monomials(n, m) - 1))
    ev = unrank(n, m, r)
    assert sum(ev.exponents) == m
    assert rank(ev) == r


def test_ranks_follow_stream_order():
    for r, ev in enumerate(enumerate_exponents(6, 3)):
        assert unrank(6, 3, r) == ev


def test_stream_slices():
    full = list(enumerate_exponents(9, 3))
    assert list(enumerate_exponents(9, 3, start=40, stop=77)) == full[40:77]


def test_multiset_table_and_suffix_offsets():
    n, m = 7, 3
    table = multiset_table(n, m)
    expected = [e.variable_indices() for e in enumerate_exponents(n, m)]
    assert [tuple(row) for row in table.tolist()] == [tuple(v) for v in expected]
    offs = suffix_offsets(n, m - 1)
    sub = multiset_table(n, m - 1)
    # monomials of degree m-1 using only variables >= i start at offs[i]
    for i in range(n):
        assert np.all(sub[offs[i]:] >= i)
        if offs[i] > 0:
            assert sub[offs[i] - 1, 0] < i
    assert offs[n] == len(sub)


def test_exponent_vector_invariant():
    ev = ExponentVector((2, 0, 1))
    assert ev.degree == 3
    assert ExponentVector.from_indices(3, [0, 0, 2]) == ev
    with pytest.raises(ValueError):
        ExponentVector((1, -1))
