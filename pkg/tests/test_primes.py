import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bohrstrip.primes import (
    is_prime,
    nth_prime,
    pnt_ratio_scan,
    prime_table,
    primes_by_index,
    sieve_primes,
)


def trial_division_primes(limit):
    return [n for n in range(2, limit + 1) if all(n % d for d in range(2, int(n**0.5) + 1))]


def test_small_tables():
    assert sieve_primes(10).primes.tolist() == [2, 3, 5, 7]
    assert sieve_primes(2).primes.tolist() == [2]
    assert sieve_primes(100).count == 25 == len(trial_division_primes(100))


def test_rejects_small_limit():
    with pytest.raises(ValueError):
        sieve_primes(1)


@pytest.mark.parametrize("limit", [3, 30, 97, 1000, 7919, 65537, 131072])
def test_sieve_matches_trial_division(limit):
    table = sieve_primes(limit)
    assert table.primes.tolist() == trial_division_primes(limit)
    assert table.count == len(table.primes)


def test_table_invariants():
    p = sieve_primes(200_000).primes
    assert p[:3].tolist() == [2, 3, 5]
    assert np.all(np.diff(p) > 0)
    sample = np.random.default_rng(0).choice(p, 300, replace=False)
    assert all(is_prime(int(q)) for q in sample)


def test_nth_prime_examples():
    assert nth_prime(1) == 2
    assert nth_prime(4) == 7
    assert nth_prime(16) == 53
    with pytest.raises(ValueError):
        nth_prime(0)


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=1, max_value=5000))
def test_nth_prime_consistent_with_sieve(n):
    table = sieve_primes(60_000)
    assert nth_prime(n) == int(table.primes[n - 1])


def test_prime_windows_disjoint():
    windows = [primes_by_index(2**k, 2 ** (k + 1) - 1) for k in range(2, 10)]
    for lo, hi in zip(windows, windows[1:]):
        assert lo[-1] < hi[0]
    assert windows[0].tolist() == [7, 11, 13, 17]
    assert windows[-1][-1] == trial_division_primes(8200)[1022]
    assert prime_table(1023).count >= 1023


def test_pnt_ratio_examples():
    r = pnt_ratio_scan(2, 3.0)
    assert r.max_ratio == pytest.approx(3 / (2 * math.log(2)), rel=1e-15)
    assert r.all_within
    assert not pnt_ratio_scan(2, 1.01).all_within
    assert pnt_ratio_scan(10**5, 3.0).all_within


def test_pnt_ratio_report_matches_definition():
    r = pnt_ratio_scan(5000, 1.3)
    p = sieve_primes(60_000).primes[1:5000].astype(float)
    n = np.arange(2, 5001, dtype=float)
    ratios = p / (n * np.log(n))
    assert r.min_ratio == pytest.approx(ratios.min(), rel=1e-14)
    assert r.max_ratio == pytest.approx(ratios.max(), rel=1e-14)
    assert r.all_within == bool(np.all((ratios > 1 / 1.3) & (ratios < 1.3)))
