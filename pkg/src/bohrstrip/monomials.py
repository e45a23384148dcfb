"""Degree-m monomials in n variables and their canonical rank order.

A monomial ``z_1^a_1 ... z_n^a_n`` is identified with its exponent vector.
Canonical order is lexicographically *decreasing* exponent vectors, which
is the same as lexicographically increasing sorted variable-index tuples:
``z1^2 < z1 z2 < z2^2`` for two variables.  The rank of a monomial is its
0-based position in that order; signs of random polynomials are keyed by
it, so the order must never change.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

# ranks feed a 64-bit counter-mode generator
MAX_RANK_COUNT = 2**63 - 1


@dataclass(frozen=True)
class ExponentVector:
    exponents: tuple[int, ...]

    def __post_init__(self):
        if any(e < 0 for e in self.exponents):
            raise ValueError(f"negative exponent in {self.exponents}")

    @property
    def degree(self) -> int:
        return sum(self.exponents)

    @property
    def n_vars(self) -> int:
        return len(self.exponents)

    def variable_indices(self) -> tuple[int, ...]:
        """Sorted multiset of 0-based variable indices, e.g. (2, 1, 0) -> (0, 0, 1)."""
        out: list[int] = []
        for j, e in enumerate(self.exponents):
            out.extend([j] * e)
        return tuple(out)

    @classmethod
    def from_indices(cls, n_vars: int, indices: Sequence[int]) -> "ExponentVector":
        exps = [0] * n_vars
        for j in indices:
            exps[j] += 1
        return cls(tuple(exps))


def count_monomials(n_vars: int, degree: int) -> int:
    """Number of degree-``degree`` monomials in ``n_vars`` variables, C(n+m-1, m).

    Raises
    ------
    OverflowError
        If the count does not fit the 64-bit rank space.
    """
    if n_vars < 1:
        raise ValueError(f"n_vars must be >= 1, got {n_vars}")
    if degree < 0:
        raise ValueError(f"degree must be >= 0, got {degree}")
    c = math.comb(n_vars + degree - 1, degree)
    if c > MAX_RANK_COUNT:
        raise OverflowError(
            f"C({n_vars}+{degree}-1, {degree}) = {c} exceeds the 64-bit rank range"
        )
    return c


def _tail_count(n_vars: int, degree: int, first: int) -> int:
    # multisets of size `degree` drawn from variables first..n_vars-1
    return math.comb(n_vars - first + degree - 1, degree)


def unrank(n_vars: int, degree: int, rank: int) -> ExponentVector:
    """Exponent vector at position ``rank`` of the canonical order."""
    total = count_monomials(n_vars, degree)
    if not 0 <= rank < total:
        raise IndexError(f"rank {rank} outside [0, {total})")
    indices = []
    lo = 0
    for d in range(degree, 0, -1):
        j = lo
        # skip blocks whose smallest index is j
        while True:
            block = _tail_count(n_vars, d - 1, j)
            if rank < block:
                break
            rank -= block
            j += 1
        indices.append(j)
        lo = j
    return ExponentVector.from_indices(n_vars, indices)


def rank(ev: ExponentVector) -> int:
    """Inverse of :func:`unrank`."""
    n_vars = ev.n_vars
    idx = ev.variable_indices()
    r = 0
    lo = 0
    d = len(idx)
    for j in idx:
        for skipped in range(lo, j):
            r += _tail_count(n_vars, d - 1, skipped)
        lo = j
        d -= 1
    return r


def enumerate_exponents(
    n_vars: int, degree: int, start: int = 0, stop: int | None = None
) -> Iterator[ExponentVector]:
    """Yield exponent vectors in canonical order, optionally for ranks ``[start, stop)``.

    Sub-ranges produce exactly the vectors the full stream has at those
    ranks, so a stream can be split across workers.
    """
    total = count_monomials(n_vars, degree)
    stop = total if stop is None else min(stop, total)
    if start >= stop:
        return
    if degree == 0:
        yield ExponentVector((0,) * n_vars)
        return
    idx = list(unrank(n_vars, degree, start).variable_indices())
    r = start
    while True:
        yield ExponentVector.from_indices(n_vars, idx)
        r += 1
        if r >= stop:
            return
        # successor of a non-decreasing tuple in lex order
        pos = degree - 1
        while idx[pos] == n_vars - 1:
            pos -= 1
        v = idx[pos] + 1
        for q in range(pos, degree):
            idx[q] = v


def multiset_table(n_vars: int, degree: int) -> np.ndarray:
    """All sorted index tuples as a ``(count, degree)`` int array in canonical order.

    Built from the suffix structure: tuples starting with ``i`` are ``i``
    followed by the canonical tail of degree-1 tuples whose first entry is
    at least ``i``, and that tail is a contiguous suffix.
    """
    count_monomials(n_vars, degree)
    dtype = np.int16 if n_vars < 2**15 else np.int32
    table = np.zeros((1, 0), dtype=dtype)
    for d in range(1, degree + 1):
        offs = suffix_offsets(n_vars, d - 1)
        parts = []
        for i in range(n_vars):
            tail = table[offs[i] :]
            head = np.full((tail.shape[0], 1), i, dtype=dtype)
            parts.append(np.hstack([head, tail]))
        table = np.vstack(parts)
    return table


def suffix_offsets(n_vars: int, degree: int) -> np.ndarray:
    """``offs[i]`` = number of canonical degree-``degree`` tuples whose first index is below ``i``.

    For degree 0 the single empty tuple belongs to every suffix, so all
    offsets are zero.
    """
    if degree == 0:
        return np.zeros(n_vars + 1, dtype=np.int64)
    total = math.comb(n_vars + degree - 1, degree)
    return np.array(
        [total - _tail_count(n_vars, degree, i) for i in range(n_vars + 1)],
        dtype=np.int64,
    )
