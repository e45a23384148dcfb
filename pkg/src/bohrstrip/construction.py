"""The width-1/2 series built block by block from random polynomials over prime windows.

Block ``k`` (``k >= 2``) takes a random +-1 homogeneous polynomial of degree
``k`` in ``2^k`` variables and substitutes ``p^(-s)`` for the variables,
where the primes are ``p_(2^k), ..., p_(2^(k+1)-1)``.  Each monomial becomes
a single term ``+-n^(-s)`` with ``n`` the matching product of ``k`` primes.

Blocks up to :data:`MATERIALIZE_MAX_K` are stored as coefficient maps;
larger ones are only streamed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np
from scipy import optimize

from .dirichlet import DirichletCoefficients, add, zeta_shift_coeffs
from .monomials import count_monomials, enumerate_exponents, suffix_offsets, unrank
from .primes import DEFAULT_C1, primes_by_index
from .randpoly import SignedHomogeneousPolynomial, SupEstimate, evaluate_batch, make_polynomial

K_MIN, K_MAX = 2, 9
MATERIALIZE_MAX_K = 5
DEFAULT_T_SAMPLES = 4096
DEFAULT_T_MAX = 1e4
# largest tail table held in memory while streaming a block
STREAM_TABLE_MAX = 1 << 24
ENUMERATE_MAX_TERMS = 2 * 10**8


def _check_k(k: int) -> None:
    if not K_MIN <= k <= K_MAX:
        raise ValueError(f"block index k must lie in [{K_MIN}, {K_MAX}], got {k}")


@dataclass(frozen=True)
class BlockSpec:
    k: int
    primes: tuple[int, ...]

    @property
    def n_vars(self) -> int:
        return 2**self.k

    @property
    def degree(self) -> int:
        return self.k

    @property
    def prime_indices(self) -> range:
        return range(2**self.k, 2 ** (self.k + 1))

    @property
    def count(self) -> int:
        return count_monomials(self.n_vars, self.k)

    @property
    def min_index(self) -> int:
        return self.primes[0] ** self.k

    @property
    def max_index(self) -> int:
        return self.primes[-1] ** self.k


def block_spec(k: int) -> BlockSpec:
    _check_k(k)
    ps = primes_by_index(2**k, 2 ** (k + 1) - 1)
    return BlockSpec(k, tuple(int(p) for p in ps))


def block_polynomial(k: int, seed: int) -> SignedHomogeneousPolynomial:
    _check_k(k)
    return make_polynomial(2**k, k, seed)


def index_of(spec: BlockSpec, exponents: tuple[int, ...]) -> int:
    n = 1
    for p, e in zip(spec.primes, exponents):
        if e:
            n *= p**e
    return n


def block_support(k: int, start: int = 0, stop: int | None = None) -> Iterator[tuple[int, int]]:
    """Yield ``(rank, n)`` for the block's monomials in canonical order (Python ints)."""
    spec = block_spec(k)
    r = start
    for ev in enumerate_exponents(spec.n_vars, k, start, stop):
        yield r, index_of(spec, ev.exponents)
        r += 1


def _log_monomials(logp: np.ndarray, degree: int) -> np.ndarray:
    """Sum of logs for every canonical degree-``degree`` monomial (1-D, canonical order)."""
    n = logp.size
    v = np.zeros(1)
    for d in range(1, degree + 1):
        offs = suffix_offsets(n, d - 1)
        v = np.concatenate([logp[i] + v[offs[i] :] for i in range(n)])
    return v


def _int_monomials(primes: np.ndarray, degree: int) -> np.ndarray:
    n = primes.size
    v = np.ones(1, dtype=np.int64)
    for d in range(1, degree + 1):
        offs = suffix_offsets(n, d - 1)
        v = np.concatenate([primes[i] * v[offs[i] :] for i in range(n)])
    return v


def iter_log_chunks(k: int) -> Iterator[tuple[int, np.ndarray]]:
    """Stream ``(first_rank, log n)`` chunks covering the whole block in canonical order.

    Ranks are split by a prefix of the sorted index tuple; the tail after
    each prefix is a contiguous suffix of one precomputed table of log
    values, so memory stays bounded for any ``k``.
    """
    spec = block_spec(k)
    n = spec.n_vars
    logp = np.log(np.asarray(spec.primes, dtype=np.float64))
    prefix_len = 0
    while math.comb(n + k - prefix_len - 1, k - prefix_len) > STREAM_TABLE_MAX:
        prefix_len += 1
    tail_deg = k - prefix_len
    table = _log_monomials(logp, tail_deg)
    offs = suffix_offsets(n, tail_deg)
    rank0 = 0
    if prefix_len == 0:
        yield 0, table
        return
    for ev in enumerate_exponents(n, prefix_len):
        idx = ev.variable_indices()
        base = float(sum(logp[j] for j in idx))
        chunk = base + table[offs[idx[-1]] :]
        yield rank0, chunk
        rank0 += chunk.size


def complete_homogeneous(x: np.ndarray, degree: int) -> float:
    """``h_m(x) = sum over degree-m monomials of prod x_j^a_j`` by the recurrence
    ``h_d(x_j..x_n) = x_j h_(d-1)(x_j..x_n) + h_d(x_(j+1)..x_n)``."""
    h = np.zeros(degree + 1)
    h[0] = 1.0
    for xj in np.asarray(x, dtype=np.float64)[::-1]:
        for d in range(1, degree + 1):
            h[d] += xj * h[d - 1]
    return float(h[degree])


def block_absolute_sum(k: int, sigma: float, method: str = "auto") -> float:
    """``sum over the block support of n^(-sigma)`` (every ``|a_n| = 1``).

    ``enumerate`` visits every term (streamed for large blocks);
    ``symmetric`` evaluates the same sum as a complete homogeneous
    symmetric polynomial in ``p^(-sigma)``.  ``auto`` enumerates whenever
    the block has at most :data:`ENUMERATE_MAX_TERMS` terms.
    """
    spec = block_spec(k)
    if method == "auto":
        method = "enumerate" if spec.count <= ENUMERATE_MAX_TERMS else "symmetric"
    if method == "symmetric":
        return complete_homogeneous(np.asarray(spec.primes, dtype=np.float64) ** (-sigma), k)
    if method != "enumerate":
        raise ValueError(f"unknown method {method!r}")
    parts = [float(np.sum(np.exp(-sigma * chunk))) for _, chunk in iter_log_chunks(k)]
    return math.fsum(parts)


@dataclass
class BlockStream:
    """Handle for a block too large to materialize; re-enumerated on demand."""

    k: int
    seed: int

    @property
    def spec(self) -> BlockSpec:
        return block_spec(self.k)

    @property
    def count(self) -> int:
        return self.spec.count

    def items(self, start: int = 0, stop: int | None = None) -> Iterator[tuple[int, int]]:
        """``(n, a_n)`` pairs for ranks ``[start, stop)``."""
        poly = block_polynomial(self.k, self.seed)
        for r, n in block_support(self.k, start, stop):
            yield n, poly.sign(r)

    def absolute_sum(self, sigma: float) -> float:
        return block_absolute_sum(self.k, sigma)


def build_block(k: int, seed: int) -> DirichletCoefficients | BlockStream:
    """Coefficients of block ``k``: ``a_n`` is the sign of the monomial that produced ``n``."""
    _check_k(k)
    if k > MATERIALIZE_MAX_K:
        return BlockStream(k, seed)
    spec = block_spec(k)
    n = _int_monomials(np.asarray(spec.primes, dtype=np.int64), k)
    signs = block_polynomial(k, seed).signs(np.arange(n.size))
    return DirichletCoefficients.from_arrays(n, signs.astype(np.float64))


@dataclass
class ConstructedSeries:
    k_max: int
    seed: int
    blocks: dict = field(default_factory=dict)

    def materialized(self, N: int | None = None) -> DirichletCoefficients:
        """Union of the stored blocks, optionally truncated at index ``N``."""
        out = DirichletCoefficients()
        for k in sorted(self.blocks):
            blk = self.blocks[k]
            if isinstance(blk, DirichletCoefficients):
                out = add(out, blk if N is None else blk.truncate(N))
        return out

    def streaming_blocks(self) -> list[BlockStream]:
        return [b for b in self.blocks.values() if isinstance(b, BlockStream)]

    def manifests(self) -> list[dict]:
        return [block_manifest(k, self.seed) for k in sorted(self.blocks)]


def build_series(k_max: int, seed: int) -> ConstructedSeries:
    """Blocks ``2..k_max`` under one seed."""
    _check_k(k_max)
    return ConstructedSeries(k_max, seed, {k: build_block(k, seed) for k in range(K_MIN, k_max + 1)})


def block_manifest(k: int, seed: int) -> dict:
    spec = block_spec(k)
    return {
        "k": k,
        "seed": seed,
        "count": spec.count,
        "min_n": str(spec.min_index),
        "max_n": str(spec.max_index),
    }


@dataclass(frozen=True)
class LineSupEstimate(SupEstimate):
    """Sup estimate on a vertical line; ``t`` is the ordinate of the witness."""

    t: float = 0.0


def block_line_values(poly: SignedHomogeneousPolynomial, logp: np.ndarray, sigma: float,
                      t: np.ndarray) -> np.ndarray:
    """Block sum ``sum a_n n^(-sigma-it)`` at each ``t``, via the polynomial at ``z_j = p_j^(-sigma-it)``."""
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    rows = max(1, (1 << 21) // max(1, count_monomials(poly.n_vars, poly.degree - 1)))
    out = np.empty(t.size, dtype=np.complex128)
    for i in range(0, t.size, rows):
        tt = t[i : i + rows]
        z = np.exp(-np.outer(sigma + 1j * tt, logp))
        out[i : i + rows] = evaluate_batch(poly, z)
    return out


def block_line_sup(
    k: int,
    seed: int,
    sigma: float,
    t_samples: int = DEFAULT_T_SAMPLES,
    sample_seed: int = 0,
    t_max: float = DEFAULT_T_MAX,
    refine: bool = True,
) -> LineSupEstimate:
    """Largest sampled ``|block sum|`` on ``Re s = sigma`` for ``t`` uniform in ``[0, t_max]``.

    The best sample is refined by bounded Brent search between its sorted
    neighbours.  Only materialized blocks (``k <= 5``) are supported.
    """
    _check_k(k)
    if k > MATERIALIZE_MAX_K:
        raise ValueError(f"line sups need a materialized block (k <= {MATERIALIZE_MAX_K}), got {k}")
    if t_samples < 1:
        raise ValueError("t_samples must be positive")
    spec = block_spec(k)
    poly = block_polynomial(k, seed)
    logp = np.log(np.asarray(spec.primes, dtype=np.float64))
    rng = np.random.default_rng([int(sample_seed), k])
    ts = np.sort(rng.uniform(0.0, t_max, size=t_samples))
    vals = np.abs(block_line_values(poly, logp, sigma, ts))
    i = int(np.argmax(vals))
    best_t, best = float(ts[i]), float(vals[i])
    if refine:
        lo = ts[i - 1] if i > 0 else 0.0
        hi = ts[i + 1] if i + 1 < ts.size else t_max
        res = optimize.minimize_scalar(
            lambda t: -abs(block_line_values(poly, logp, sigma, np.array([t]))[0]),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-10 * max(1.0, t_max)},
        )
        if -res.fun > best:
            best_t = float(res.x)
    witness = np.exp(-(sigma + 1j * best_t) * logp)
    value = float(abs(block_line_values(poly, logp, sigma, np.array([best_t]))[0]))
    return LineSupEstimate(estimate=value, witness_point=witness, samples_used=t_samples, t=best_t)


def theoretical_block_sup_bound(k: int, sigma: float, c1: float = DEFAULT_C1, c2: float = 1.0) -> float:
    """``c2 2^(k(k+1)/2) sqrt(ln k) / (k 2^k / (2 c1))^(k sigma)``."""
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    log_val = (
        math.log(c2)
        + k * (k + 1) / 2 * math.log(2.0)
        + 0.5 * math.log(math.log(k))
        - k * sigma * math.log(k * 2.0**k / (2.0 * c1))
    )
    return math.exp(log_val)


def divergence_log_term(k: int, sigma: float, c1: float = DEFAULT_C1) -> float:
    """Natural log of :func:`divergence_lower_bound`."""
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    return k * k * (1.0 - sigma) * math.log(2.0) - k * (1.0 + sigma) * math.log(3.0 * c1 * k)


def divergence_lower_bound(k: int, sigma: float, c1: float = DEFAULT_C1) -> float:
    """``2^(k^2 (1-sigma)) / (3 c1 k)^(k (1+sigma))``; ``inf`` if it overflows a double."""
    lt = divergence_log_term(k, sigma, c1)
    return math.exp(lt) if lt < 709.0 else math.inf


def combine_width(series: ConstructedSeries, lam: float, N: int) -> DirichletCoefficients:
    """Coefficients of ``f(s) + zeta(s + lam)`` for ``n <= N`` (materialized blocks only)."""
    if not 0 < lam < 0.5:
        raise ValueError(f"lam must lie in (0, 1/2), got {lam}")
    return add(series.materialized(N), zeta_shift_coeffs(lam, N))


def factor_over(n: int, primes) -> tuple[int, ...] | None:
    """Exponents of ``n`` over ``primes``, or None if ``n`` has another prime factor."""
    exps = []
    for p in primes:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        exps.append(e)
    return tuple(exps) if n == 1 else None


def support_index(k: int, rank: int) -> int:
    """Index ``n`` of the monomial at ``rank`` in block ``k``."""
    spec = block_spec(k)
    return index_of(spec, unrank(spec.n_vars, k, rank).exponents)
