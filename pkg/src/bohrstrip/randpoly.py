"""Random +-1 homogeneous polynomials and sampled sup norms on a polytorus.

Signs come from a counter-mode hash of ``(seed, n_vars, degree, rank)`` so
any rank's sign can be produced without generating the others.

Evaluation uses the first-variable split of the canonical order::

    P(z) = sum_i z_i * sum_{q >= offs[i]} s(i, q) * V_q(z)

where ``V_q`` runs over the degree-(m-1) monomials.  The inner sums are a
single real matrix product against the sign matrix, which keeps batched
evaluation in BLAS.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import optimize

from .monomials import count_monomials, suffix_offsets

DEFAULT_SAMPLES = 100_000
DEFAULT_SWEEPS = 2
DEFAULT_C2 = 1.0
# Empirical multiplier on the Kahane bound used in sampling studies; not a
# value of c2.
KAHANE_TEST_MULTIPLIER = 3.0
SAMPLE_CHUNK = 4096

_MASK64 = (1 << 64) - 1
_GOLDEN64 = 0x9E3779B97F4A7C15


def _mix64_int(x: int) -> int:
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def _mix64(x: np.ndarray) -> np.ndarray:
    x = x ^ (x >> np.uint64(30))
    x = x * np.uint64(0xBF58476D1CE4E5B9)
    x = x ^ (x >> np.uint64(27))
    x = x * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


def sign_stream_key(seed: int, n_vars: int, degree: int) -> int:
    key = _mix64_int(seed)
    key = _mix64_int(key ^ (n_vars * _GOLDEN64))
    return _mix64_int(key ^ ((degree + 1) * 0xD1B54A32D192ED03))


def hashed_signs(key: int, ranks: np.ndarray) -> np.ndarray:
    """+-1 (int8) for each rank under the stream ``key``."""
    r = np.asarray(ranks, dtype=np.uint64)
    with np.errstate(over="ignore"):
        h = _mix64(r * np.uint64(_GOLDEN64) + np.uint64(key))
    return np.where((h >> np.uint64(63)) == 0, 1, -1).astype(np.int8)


@dataclass(frozen=True)
class SignedHomogeneousPolynomial:
    """Degree-``degree`` polynomial in ``n_vars`` variables with +-1 coefficients.

    ``seed=None`` means every coefficient is +1.
    """

    n_vars: int
    degree: int
    seed: int | None = None
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    @property
    def n_terms(self) -> int:
        return count_monomials(self.n_vars, self.degree)

    @property
    def all_plus(self) -> bool:
        return self.seed is None

    def signs(self, ranks) -> np.ndarray:
        ranks = np.asarray(ranks)
        if self.seed is None:
            return np.ones(ranks.shape, dtype=np.int8)
        return hashed_signs(sign_stream_key(self.seed, self.n_vars, self.degree), ranks)

    def sign(self, rank: int) -> int:
        if not 0 <= rank < self.n_terms:
            raise IndexError(f"rank {rank} outside [0, {self.n_terms})")
        return int(self.signs(np.array([rank]))[0])

    def _structure(self):
        """Transposed (n_vars, n_prefix) sign matrix; zero where the term does not exist."""
        if "structure" not in self._cache:
            n, m = self.n_vars, self.degree
            n_prefix = count_monomials(n, m - 1)
            offs = suffix_offsets(n, m - 1)
            smat = np.zeros((n, n_prefix), dtype=np.float64)
            base = 0
            for i in range(n):
                width = n_prefix - int(offs[i])
                smat[i, offs[i] :] = self.signs(np.arange(base, base + width))
                base += width
            self._cache["structure"] = np.ascontiguousarray(smat.T)
        return self._cache["structure"]


def make_polynomial(n_vars: int, degree: int, seed: int | None = None) -> SignedHomogeneousPolynomial:
    """Build a polynomial; ``seed=None`` gives the all-plus polynomial.

    Seeded polynomials need ``n_vars >= 2`` and ``degree >= 2``.
    """
    if seed is None:
        if n_vars < 1 or degree < 0:
            raise ValueError(f"need n_vars >= 1 and degree >= 0, got ({n_vars}, {degree})")
    else:
        if n_vars < 2 or degree < 2:
            raise ValueError(f"seeded polynomials need n_vars, degree >= 2, got ({n_vars}, {degree})")
        if not 0 <= seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    count_monomials(n_vars, degree)
    return SignedHomogeneousPolynomial(n_vars, degree, seed)


def monomial_values(z: np.ndarray, degree: int) -> np.ndarray:
    """All degree-``degree`` monomials of each row of ``z``, columns in canonical order."""
    n = z.shape[1]
    v = np.ones((z.shape[0], 1), dtype=z.dtype)
    for d in range(1, degree + 1):
        offs = suffix_offsets(n, d - 1)
        out = np.empty((z.shape[0], count_monomials(n, d)), dtype=z.dtype)
        pos = 0
        for i in range(n):
            tail = v[:, offs[i] :]
            w = tail.shape[1]
            np.multiply(z[:, i : i + 1], tail, out=out[:, pos : pos + w])
            pos += w
        v = out
    return v


def evaluate_batch(poly: SignedHomogeneousPolynomial, points: np.ndarray) -> np.ndarray:
    """Evaluate at each row of ``points`` (shape ``(B, n_vars)``); every term is summed."""
    z = np.asarray(points, dtype=np.complex128)
    if z.ndim != 2 or z.shape[1] != poly.n_vars:
        raise ValueError(f"points must have shape (B, {poly.n_vars}), got {z.shape}")
    if poly.degree == 0:
        return np.full(z.shape[0], float(poly.signs(np.array([0]))[0]), dtype=np.complex128)
    smat_t = poly._structure()
    v = monomial_values(z, poly.degree - 1)
    inner = (np.ascontiguousarray(v.real) @ smat_t) + 1j * (np.ascontiguousarray(v.imag) @ smat_t)
    return np.sum(z * inner, axis=1)


def evaluate(poly: SignedHomogeneousPolynomial, point: Sequence[complex]) -> complex:
    """Exact value of the polynomial at one point."""
    z = np.asarray(point, dtype=np.complex128)
    if z.ndim != 1 or z.size != poly.n_vars:
        raise ValueError(f"point must have length {poly.n_vars}, got shape {z.shape}")
    return complex(evaluate_batch(poly, z[None, :])[0])


def kahane_bound(n_vars: int, degree: int, c2: float = DEFAULT_C2) -> float:
    """``c2 * n^((m+1)/2) * sqrt(ln m)``, the typical sup size of a random +-1 polynomial."""
    if degree < 2:
        raise ValueError(f"degree must be >= 2 so that ln(degree) > 0, got {degree}")
    return c2 * n_vars ** ((degree + 1) / 2) * math.sqrt(math.log(degree))


@dataclass(frozen=True)
class SupEstimate:
    """A certified lower bound on a sup norm with the point that attains it."""

    estimate: float
    witness_point: np.ndarray
    samples_used: int


def sample_phases(sample_seed: int, chunk: int, n_vars: int) -> np.ndarray:
    """Phases for sample chunk ``chunk``; depends only on (seed, chunk), not on worker layout."""
    rng = np.random.default_rng([int(sample_seed), int(chunk)])
    return rng.uniform(0.0, 2.0 * np.pi, size=(SAMPLE_CHUNK, n_vars))


def _golden_max(g, lo: float, hi: float, iters: int = 60) -> tuple[float, float]:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    gc, gd = g(c), g(d)
    for _ in range(iters):
        if gc >= gd:
            b, d, gd = d, c, gc
            c = b - invphi * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + invphi * (b - a)
            gd = g(d)
    x = c if gc >= gd else d
    return x, max(gc, gd)


def refine_phases(
    poly: SignedHomogeneousPolynomial,
    radii: np.ndarray,
    phases: np.ndarray,
    sweeps: int = DEFAULT_SWEEPS,
) -> np.ndarray:
    """Coordinate-wise phase ascent.

    In one coordinate the polynomial is a polynomial of degree <= m in that
    variable, so its coefficients come from m+1 evaluations at rotated
    points (a small DFT).  The resulting trigonometric polynomial is
    maximized by a grid scan followed by golden-section search.
    """
    m = poly.degree
    theta = np.array(phases, dtype=np.float64)
    q = m + 1
    roots = np.exp(2j * np.pi * np.arange(q) / q)
    grid = np.linspace(0.0, 2.0 * np.pi, 16 * q, endpoint=False)
    step = grid[1] - grid[0]
    powers = np.arange(q)
    for _ in range(sweeps):
        for j in range(poly.n_vars):
            pts = np.tile(radii * np.exp(1j * theta), (q, 1))
            pts[:, j] = radii[j] * roots
            vals = evaluate_batch(poly, pts)
            coef = np.fft.fft(vals) / q  # coef[d] multiplies (z_j / r_j)^d

            def g(t, coef=coef):
                return abs(np.polyval(coef[::-1], np.exp(1j * t)))

            gvals = np.abs(np.exp(1j * np.outer(grid, powers)) @ coef)
            t0 = grid[int(np.argmax(gvals))]
            t_best, g_best = _golden_max(g, t0 - step, t0 + step)
            if g_best > g(theta[j]):
                theta[j] = t_best % (2.0 * np.pi)
    return theta


def polish_phases(
    poly: SignedHomogeneousPolynomial, radii: np.ndarray, phases: np.ndarray, h: float = 1e-6
) -> np.ndarray:
    """Joint quasi-Newton ascent of ``|P|`` over all phases (central-difference gradient).

    Coordinate sweeps converge only linearly near a maximum; this closes
    the remaining gap.
    """
    n = poly.n_vars
    eye = np.eye(n)

    def negmod(theta):
        shifted = np.vstack([theta, theta + h * eye, theta - h * eye])
        vals = np.abs(evaluate_batch(poly, radii * np.exp(1j * shifted)))
        grad = (vals[1 : n + 1] - vals[n + 1 :]) / (2.0 * h)
        return -vals[0], -grad

    res = optimize.minimize(negmod, phases, jac=True, method="BFGS", options={"gtol": 1e-10})
    return np.mod(res.x, 2.0 * np.pi)


def estimate_sup_polytorus(
    poly: SignedHomogeneousPolynomial,
    radii: Sequence[float] | None = None,
    n_samples: int = DEFAULT_SAMPLES,
    sample_seed: int = 0,
    sweeps: int = DEFAULT_SWEEPS,
    polish: bool = True,
) -> SupEstimate:
    """Lower bound on ``sup |P|`` over ``|z_j| = radii[j]`` by random phases plus refinement.

    Samples are drawn in fixed chunks of :data:`SAMPLE_CHUNK` keyed by
    ``(sample_seed, chunk)``; ties go to the earliest sample.  The best
    sample is refined by ``sweeps`` coordinate sweeps and, if ``polish``,
    a joint gradient ascent.  The reported estimate is always
    ``|P(witness_point)|`` recomputed from scratch.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    r = np.ones(poly.n_vars) if radii is None else np.asarray(radii, dtype=np.float64)
    if r.shape != (poly.n_vars,):
        raise ValueError(f"radii must have length {poly.n_vars}")
    if np.any(r <= 0):
        raise ValueError("radii must be positive")

    best_val, best_phase = -1.0, None
    done = 0
    chunk = 0
    while done < n_samples:
        take = min(SAMPLE_CHUNK, n_samples - done)
        theta = sample_phases(sample_seed, chunk, poly.n_vars)[:take]
        vals = np.abs(evaluate_batch(poly, r * np.exp(1j * theta)))
        i = int(np.argmax(vals))
        if vals[i] > best_val:
            best_val, best_phase = float(vals[i]), theta[i]
        done += take
        chunk += 1

    candidates = [best_phase]
    if sweeps > 0:
        candidates.append(refine_phases(poly, r, best_phase, sweeps))
    if polish:
        candidates.append(polish_phases(poly, r, candidates[-1]))
    points = np.stack([r * np.exp(1j * c) for c in candidates])
    vals = np.abs(evaluate_batch(poly, points))
    i = int(np.argmax(vals))
    return SupEstimate(estimate=float(vals[i]), witness_point=points[i], samples_used=n_samples)
