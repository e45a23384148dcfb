"""Real-coefficient Dirichlet series: storage, partial sums and mean-square identities."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import IO, Iterable, Iterator, Mapping

import numpy as np

from . import quadrature

DEFAULT_CAP = 10**7
INDEX_LIMIT = 2**128


class CapacityError(MemoryError):
    """Materializing a coefficient map would exceed the configured cap."""


class DirichletCoefficients:
    """Finite map ``n -> a_n`` with real nonzero values and indices ``1 <= n < 2**128``.

    Entries are held sorted by index.  Indices that fit in int64 are stored
    in an int64 array, larger ones fall back to Python ints (object array).
    """

    __slots__ = ("_n", "_a", "_logn", "cap")

    def __init__(self, entries: Mapping[int, float] | Iterable[tuple[int, float]] = (), cap: int = DEFAULT_CAP):
        items = entries.items() if isinstance(entries, Mapping) else entries
        keys, vals = [], []
        for n, a in items:
            keys.append(int(n))
            vals.append(float(a))
        wide = bool(keys) and (max(keys) >= 2**63 or min(keys) < 0)
        idx = np.array(keys, dtype=object) if wide else np.array(keys, dtype=np.int64)
        self._set(idx, np.asarray(vals, dtype=np.float64), cap)

    @classmethod
    def from_arrays(cls, indices, values, cap: int = DEFAULT_CAP) -> "DirichletCoefficients":
        obj = cls.__new__(cls)
        obj._set(indices, np.asarray(values, dtype=np.float64), cap)
        return obj

    def _set(self, indices, values: np.ndarray, cap: int) -> None:
        self.cap = cap
        n = np.asarray(indices)
        if n.dtype == np.uint64 and n.size and n.max() >= 2**63:
            n = np.array([int(v) for v in n], dtype=object)
        if n.dtype != object and n.size and not np.issubdtype(n.dtype, np.integer):
            raise TypeError("indices must be integers")
        if n.size != values.size:
            raise ValueError("indices and values differ in length")
        if n.size > cap:
            raise CapacityError(f"{n.size} entries exceed cap {cap}")
        if n.size and (n.min() < 1 or n.max() >= INDEX_LIMIT):
            raise ValueError("indices must lie in [1, 2**128)")
        if n.dtype == object:
            if n.size == 0 or n.max() < 2**63:
                n = n.astype(np.int64)
        else:
            n = n.astype(np.int64)
        order = np.argsort(n, kind="stable")
        n, values = n[order], values[order]
        if n.size > 1 and np.any(n[1:] == n[:-1]):
            raise ValueError("duplicate indices")
        keep = values != 0.0
        self._n, self._a = n[keep], values[keep]
        self._logn = None

    # mapping-ish access
    def __len__(self) -> int:
        return int(self._n.size)

    def __getitem__(self, n: int) -> float:
        i = int(np.searchsorted(self._n, n))
        if i < self._n.size and self._n[i] == n:
            return float(self._a[i])
        return 0.0

    def __contains__(self, n: int) -> bool:
        return self[n] != 0.0

    def __eq__(self, other) -> bool:
        if not isinstance(other, DirichletCoefficients):
            return NotImplemented
        return self.as_dict() == other.as_dict()

    def __repr__(self) -> str:
        return f"DirichletCoefficients({len(self)} entries)"

    def items(self) -> Iterator[tuple[int, float]]:
        for n, a in zip(self._n.tolist(), self._a.tolist()):
            yield int(n), a

    def as_dict(self) -> dict[int, float]:
        return dict(self.items())

    @property
    def indices(self) -> np.ndarray:
        return self._n

    @property
    def values(self) -> np.ndarray:
        return self._a

    @property
    def log_indices(self) -> np.ndarray:
        if self._logn is None:
            if self._n.dtype == object:
                self._logn = np.array([math.log(int(n)) for n in self._n], dtype=np.float64)
            else:
                self._logn = np.log(self._n.astype(np.float64))
        return self._logn

    def min_index(self) -> int | None:
        return int(self._n[0]) if len(self) else None

    def max_index(self) -> int | None:
        return int(self._n[-1]) if len(self) else None

    def truncate(self, N: int) -> "DirichletCoefficients":
        k = int(np.searchsorted(self._n, N, side="right"))
        return DirichletCoefficients.from_arrays(self._n[:k], self._a[:k], self.cap)

    def _upto(self, N: int | None):
        k = len(self) if N is None else int(np.searchsorted(self._n, N, side="right"))
        return self.log_indices[:k], self._a[:k]

    def __neg__(self) -> "DirichletCoefficients":
        return DirichletCoefficients.from_arrays(self._n, -self._a, self.cap)

    def __add__(self, other: "DirichletCoefficients") -> "DirichletCoefficients":
        return add(self, other)

    # JSON lines, indices as decimal strings
    def to_jsonl(self, fh: IO[str]) -> None:
        for n, a in self.items():
            fh.write(json.dumps({"n": str(n), "a": a}) + "\n")

    @classmethod
    def from_jsonl(cls, fh: IO[str], cap: int = DEFAULT_CAP) -> "DirichletCoefficients":
        pairs = []
        for line in fh:
            line = line.strip()
            if line:
                rec = json.loads(line)
                pairs.append((int(rec["n"]), float(rec["a"])))
        return cls(pairs, cap=cap)


def eta_coefficients(N: int) -> DirichletCoefficients:
    """``a_n = (-1)^(n+1)`` for ``n <= N``."""
    n = np.arange(1, N + 1, dtype=np.int64)
    return DirichletCoefficients.from_arrays(n, np.where(n % 2 == 1, 1.0, -1.0), cap=max(N, DEFAULT_CAP))


def ones_coefficients(N: int) -> DirichletCoefficients:
    n = np.arange(1, N + 1, dtype=np.int64)
    return DirichletCoefficients.from_arrays(n, np.ones(N), cap=max(N, DEFAULT_CAP))


def partial_sum(coeffs: DirichletCoefficients, s: complex, N: int | None = None) -> complex:
    """``sum_{n <= N} a_n n^(-s)`` with ``n^(-s) = exp(-s ln n)``, terms in ascending ``n``."""
    logn, a = coeffs._upto(N)
    return complex(np.sum(a * np.exp(-complex(s) * logn)))


def partial_sums_at(coeffs: DirichletCoefficients, s_values: np.ndarray, N: int | None = None,
                    chunk: int = 1 << 22) -> np.ndarray:
    """:func:`partial_sum` at many points ``s`` at once."""
    logn, a = coeffs._upto(N)
    s_values = np.atleast_1d(np.asarray(s_values, dtype=np.complex128))
    out = np.zeros(s_values.shape, dtype=np.complex128)
    flat_s, flat_out = s_values.ravel(), out.ravel()
    step = max(1, chunk // max(1, logn.size))
    for i in range(0, flat_s.size, step):
        ss = flat_s[i : i + step]
        flat_out[i : i + step] = np.exp(-np.outer(ss, logn)) @ a
    return out


def absolute_partial_sum(coeffs: DirichletCoefficients, sigma: float, N: int | None = None) -> float:
    """``sum_{n <= N} |a_n| n^(-sigma)``."""
    logn, a = coeffs._upto(N)
    return float(np.sum(np.abs(a) * np.exp(-sigma * logn)))


class AverageMode(str, Enum):
    CLOSED_FORM = "closed_form"
    QUADRATURE = "quadrature"


def mean_square_diagonal(coeffs: DirichletCoefficients, b: float, N: int | None = None) -> float:
    """``sum_{n <= N} a_n^2 n^(-2b)``, the T -> infinity limit of the time average."""
    logn, a = coeffs._upto(N)
    return float(np.sum(a * a * np.exp(-2.0 * b * logn)))


def time_average_square(
    coeffs: DirichletCoefficients,
    b: float,
    T: float,
    N: int | None = None,
    mode: AverageMode | str = AverageMode.CLOSED_FORM,
    tol: float = 1e-9,
) -> float:
    """Mean of ``|sum_{n<=N} a_n n^(-b-it)|^2`` over ``t in [-T, T]``.

    ``closed_form`` expands the square: the diagonal plus
    ``2 sum_{n<m} a_n a_m (nm)^(-b) sinc(T ln(m/n))``.  ``quadrature``
    integrates the square numerically (absolute tolerance ``tol`` on the
    mean) and is the independent check on the expansion.
    """
    if not T > 0:
        raise ValueError(f"T must be positive, got {T}")
    mode = AverageMode(mode)
    logn, a = coeffs._upto(N)
    if logn.size == 0:
        return 0.0
    w = a * np.exp(-b * logn)
    if mode is AverageMode.CLOSED_FORM:
        diag = float(np.sum(w * w))
        iu, ju = np.triu_indices(logn.size, k=1)
        x = T * (logn[ju] - logn[iu])
        return diag + 2.0 * float(np.sum(w[iu] * w[ju] * np.sinc(x / np.pi)))

    # |S(t)|^2 is even in t for real coefficients
    def integrand(t):
        s = np.exp(-1j * np.outer(t, logn)) @ w
        return s.real**2 + s.imag**2

    top = float(logn[-1] - logn[0])
    width = np.pi / top if top > 0 else T
    return float(quadrature.integrate(integrand, 0.0, T, max_width=min(width, T), tol=tol * T)) / T


def sinc_tail_bound(coeffs: DirichletCoefficients, b: float, T: float, N: int | None = None) -> float:
    """Explicit bound on ``|average(T) - diagonal|``: ``(2/T) sum_{n<m} |a_n a_m| (nm)^(-b) / ln(m/n)``."""
    logn, a = coeffs._upto(N)
    w = np.abs(a) * np.exp(-b * logn)
    iu, ju = np.triu_indices(logn.size, k=1)
    return float(2.0 / T * np.sum(w[iu] * w[ju] / (logn[ju] - logn[iu])))


@dataclass(frozen=True)
class CauchySchwarzResult:
    lhs: float
    rhs: float
    holds: bool


def cauchy_schwarz_check(coeffs: DirichletCoefficients, b: float, eps: float, N: int | None = None) -> CauchySchwarzResult:
    """Compare ``sum |a_n| n^-(b+eps+1/2)`` with ``(sum |a_n|^2 n^-2b)^(1/2) (sum n^(-1-2eps))^(1/2)``.

    The second factor runs over every ``n <= N``; with ``N=None`` it runs up
    to the largest stored index.
    """
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    logn, a = coeffs._upto(N)
    top = N if N is not None else (coeffs.max_index() or 1)
    lhs = float(np.sum(np.abs(a) * np.exp(-(b + eps + 0.5) * logn)))
    weights = float(np.sum(np.arange(1, top + 1, dtype=np.float64) ** (-1.0 - 2.0 * eps)))
    rhs = math.sqrt(float(np.sum(a * a * np.exp(-2.0 * b * logn)))) * math.sqrt(weights)
    return CauchySchwarzResult(lhs, rhs, lhs <= rhs * (1.0 + 1e-12))


def add(c1: DirichletCoefficients, c2: DirichletCoefficients, cap: int | None = None) -> DirichletCoefficients:
    """Pointwise sum; entries that cancel exactly are dropped."""
    cap = cap if cap is not None else max(c1.cap, c2.cap)
    if len(c1) + len(c2) > cap:
        # the union may still fit; check properly before giving up
        union = len(set(c1.indices.tolist()) | set(c2.indices.tolist()))
        if union > cap:
            raise CapacityError(f"sum has {union} entries, cap is {cap}")
    if c1.indices.dtype == object or c2.indices.dtype == object:
        out = c1.as_dict()
        for n, a in c2.items():
            out[n] = out.get(n, 0.0) + a
        return DirichletCoefficients(out, cap=cap)
    n = np.concatenate([c1.indices, c2.indices])
    a = np.concatenate([c1.values, c2.values])
    uniq, inv = np.unique(n, return_inverse=True)
    summed = np.zeros(uniq.size)
    np.add.at(summed, inv, a)
    return DirichletCoefficients.from_arrays(uniq, summed, cap)


def zeta_shift_coeffs(lam: float, N: int) -> DirichletCoefficients:
    """``a_n = n^(-lam)`` for ``n <= N``: the truncated series of ``zeta(s + lam)``."""
    n = np.arange(1, N + 1, dtype=np.int64)
    return DirichletCoefficients.from_arrays(n, np.exp(-lam * np.log(n.astype(np.float64))), cap=max(N, DEFAULT_CAP))


class Provenance(str, Enum):
    THEORETICAL = "theoretical"
    EMPIRICAL = "empirical-diagnostic"


@dataclass(frozen=True)
class AbscissaTriple:
    """Abscissas of absolute (A), uniform (B) and ordinary (C) convergence."""

    sigma_abs: float
    sigma_unif: float
    sigma_conv: float
    provenance: Provenance = Provenance.THEORETICAL

    def __post_init__(self):
        if not self.sigma_conv <= self.sigma_unif <= self.sigma_abs:
            raise ValueError(f"need C <= B <= A, got {self}")
        if math.isfinite(self.sigma_abs) and self.sigma_abs - self.sigma_conv > 1:
            raise ValueError(f"need A - C <= 1, got {self}")

    @property
    def bohr_width(self) -> float:
        """Width A - B of the strip of uniform but not absolute convergence."""
        return self.sigma_abs - self.sigma_unif


ZETA_ABSCISSAE = AbscissaTriple(1.0, 1.0, 1.0)
ETA_ABSCISSAE = AbscissaTriple(1.0, 1.0, 0.0)


def width_lambda_abscissae(lam: float) -> AbscissaTriple:
    """Abscissas of ``f(s) + zeta(s + lam)`` for the width-1/2 series ``f`` and ``0 < lam < 1/2``."""
    if not 0 < lam < 0.5:
        raise ValueError(f"lam must lie in (0, 1/2), got {lam}")
    return AbscissaTriple(1.0, 1.0 - lam, 1.0 - lam)


def empirical_abscissae(coeffs: DirichletCoefficients) -> AbscissaTriple:
    """Growth-rate estimates of A and C from partial sums at ``s = 0``.

    ``A ~ log(sum_{n<=x} |a_n|) / log x`` and ``C ~ log|sum_{n<=x} a_n| / log x``
    at the largest ``x``, clipped to keep the ordering.  A diagnostic
    only; B has no coefficient-only estimate and is set to A.
    """
    if len(coeffs) == 0:
        raise ValueError("no coefficients")
    top = coeffs.max_index()
    lx = math.log(top) if top > 1 else 1.0
    abs_a = math.log(max(absolute_partial_sum(coeffs, 0.0), 1e-300)) / lx
    conv = math.log(max(abs(partial_sum(coeffs, 0.0)), 1e-300)) / lx
    abs_a = max(abs_a, 0.0)
    conv = min(max(conv, abs_a - 1.0), abs_a)
    return AbscissaTriple(abs_a, abs_a, conv, Provenance.EMPIRICAL)
