"""Prime enumeration and empirical prime-number-theorem ratio checks.

The sieve is segmented over odd numbers so that tables reaching
``p_(10^6) = 15485863`` stay cheap.  A process-wide table is grown on
demand and shared behind a lock.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

DEFAULT_C1 = 3.0
SEGMENT_SIZE = 1 << 20


@dataclass(frozen=True)
class PrimeTable:
    """All primes up to ``limit`` in ascending order."""

    limit: int
    primes: np.ndarray

    @property
    def count(self) -> int:
        return int(self.primes.size)

    def __len__(self) -> int:
        return self.count


@dataclass(frozen=True)
class PntRatioReport:
    n_max: int
    c1: float
    min_ratio: float
    max_ratio: float
    all_within: bool


def _small_sieve(limit: int) -> np.ndarray:
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def sieve_primes(limit: int) -> PrimeTable:
    """Segmented sieve of Eratosthenes returning every prime ``<= limit``."""
    limit = int(limit)
    if limit < 2:
        raise ValueError(f"limit must be >= 2, got {limit}")
    base = _small_sieve(math.isqrt(limit) + 1)
    chunks = [np.array([2], dtype=np.int64)]
    odd_base = base[1:]
    low = 3
    while low <= limit:
        # segment covers the odd numbers low, low+2, ..., < high
        high = min(low + 2 * SEGMENT_SIZE, limit + 1)
        size = (high - low + 1) // 2
        mask = np.ones(size, dtype=bool)
        for p in odd_base:
            p = int(p)
            if p * p >= high:
                break
            start = max(p * p, ((low + p - 1) // p) * p)
            if start % 2 == 0:
                start += p
            if start < high:
                mask[(start - low) // 2 :: p] = False
        chunks.append(low + 2 * np.flatnonzero(mask).astype(np.int64))
        low += 2 * size
    primes = np.concatenate(chunks)
    primes = primes[primes <= limit]
    return PrimeTable(limit=limit, primes=primes)


_cache_lock = threading.Lock()
_cached: PrimeTable | None = None


def _limit_for_index(n: int) -> int:
    # Rosser: p_n < n (ln n + ln ln n) for n >= 6
    if n < 6:
        return 15
    return int(n * (math.log(n) + math.log(math.log(n)))) + 10


def prime_table(min_count: int) -> PrimeTable:
    """Return the shared table, extended so that it holds at least ``min_count`` primes."""
    global _cached
    with _cache_lock:
        if _cached is None or _cached.count < min_count:
            limit = _limit_for_index(max(min_count, 1024))
            if _cached is not None:
                limit = max(limit, 2 * _cached.limit)
            _cached = sieve_primes(limit)
        return _cached


def nth_prime(n: int) -> int:
    """The ``n``-th prime, 1-indexed (``nth_prime(1) == 2``)."""
    if n < 1:
        raise ValueError(f"prime index must be >= 1, got {n}")
    return int(prime_table(n).primes[n - 1])


def primes_by_index(first: int, last: int) -> np.ndarray:
    """Primes ``p_first, ..., p_last`` (inclusive, 1-indexed) as an int64 array."""
    if first < 1 or last < first:
        raise ValueError(f"bad index range [{first}, {last}]")
    return prime_table(last).primes[first - 1 : last].copy()


def pnt_ratio_scan(n_max: int, c1: float = DEFAULT_C1) -> PntRatioReport:
    """Scan ``p_n / (n ln n)`` for ``2 <= n <= n_max`` against the window ``(1/c1, c1)``."""
    if n_max < 2:
        raise ValueError(f"n_max must be >= 2, got {n_max}")
    if not c1 > 1:
        raise ValueError(f"c1 must exceed 1, got {c1}")
    p = prime_table(n_max).primes[1:n_max].astype(np.float64)
    n = np.arange(2, n_max + 1, dtype=np.float64)
    ratio = p / (n * np.log(n))
    lo, hi = float(ratio.min()), float(ratio.max())
    return PntRatioReport(
        n_max=n_max,
        c1=float(c1),
        min_ratio=lo,
        max_ratio=hi,
        all_within=bool(lo > 1.0 / c1 and hi < c1),
    )


def is_prime(n: int) -> bool:
    """Trial division; used as an independent check on the sieve."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True
