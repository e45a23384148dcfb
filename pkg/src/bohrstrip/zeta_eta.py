"""The alternating zeta series, zeta through it, and iterated Cesaro means."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .dirichlet import ETA_ABSCISSAE, AbscissaTriple

SINGULAR_TOL = 1e-8
EULER_TARGET = 1e-10
EULER_MAX_DEPTH = 64
_CHUNK_ELEMS = 1 << 22


class SingularFactorError(ArithmeticError):
    """``1 - 2^(1-s)`` vanishes (numerically) at the requested point."""


def eta_partial(s: complex, N: int) -> complex:
    """``sum_{n <= N} (-1)^(n+1) n^(-s)``, ascending ``n``."""
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    n = np.arange(1, N + 1, dtype=np.float64)
    signs = np.where(np.arange(N) % 2 == 0, 1.0, -1.0)
    return complex(np.sum(signs * np.exp(-complex(s) * np.log(n))))


def _euler_weights(depth: int) -> np.ndarray:
    return np.array([math.comb(depth, j) for j in range(depth + 1)], dtype=np.float64) / 2.0**depth


def _eta_chunk(s: np.ndarray, n_direct: int, max_depth: int, target: float) -> np.ndarray:
    n = np.arange(1, n_direct + max_depth + 1, dtype=np.float64)
    signs = np.where(np.arange(n.size) % 2 == 0, 1.0, -1.0)
    terms = signs * np.exp(-np.outer(s, np.log(n)))
    head = terms[:, :n_direct].sum(axis=1)
    # partial sums S_{n_direct}, ..., S_{n_direct + max_depth}
    tail = head[:, None] + np.hstack(
        [np.zeros((s.size, 1), dtype=terms.dtype), np.cumsum(terms[:, n_direct:], axis=1)]
    )
    val = tail[:, :9] @ _euler_weights(8)
    done = np.zeros(s.size, dtype=bool)
    depth = 8
    while depth < max_depth:
        depth = min(2 * depth, max_depth)
        nxt = tail[:, : depth + 1] @ _euler_weights(depth)
        close = np.abs(nxt - val) <= target * np.maximum(1.0, np.abs(nxt))
        val = np.where(done, val, nxt)
        done |= close
        if done.all():
            break
    return val


def _direct_terms(s: complex) -> int:
    return 32 + int(math.ceil(0.75 * abs(s)))


def eta(s, n_direct: int | None = None, target: float = EULER_TARGET, max_depth: int = EULER_MAX_DEPTH):
    """Alternating zeta ``eta(s)`` by direct summation plus Euler transform of the tail.

    The first ``n_direct`` terms are summed plainly; the Euler transform is
    then applied as repeated averaging of the following partial sums
    (binomial weights), which is stable at any depth.  The direct part
    defaults to ``32 + 0.75|s|`` terms so the tail terms vary slowly in
    ``n``.  Depth doubles from 8 until successive estimates agree to
    ``target`` (the deeper one is kept) or ``max_depth`` is reached.

    Accepts a scalar or an array of complex points.
    """
    scalar = np.ndim(s) == 0
    z = np.atleast_1d(np.asarray(s, dtype=np.complex128)).ravel()
    out = np.empty(z.size, dtype=np.complex128)
    if z.size == 0:
        return out
    # group points of similar size so each chunk sums only as many terms as it needs
    order = np.argsort(np.abs(z), kind="stable")
    i = 0
    while i < z.size:
        idx = order[i : i + 256]
        nd = _direct_terms(z[idx[-1]]) if n_direct is None else int(n_direct)
        step = max(256, _CHUNK_ELEMS // (nd + max_depth + 1))
        idx = order[i : i + step]
        if n_direct is None:
            nd = _direct_terms(z[idx[-1]])
        val = _eta_chunk(z[idx], nd, max_depth, target)
        out[idx] = val
        i += idx.size
    result = out.reshape(np.shape(s)) if not scalar else complex(out[0])
    return result


def singular_factor(s: complex) -> complex:
    """``1 - 2^(1-s)``."""
    return 1.0 - np.exp((1.0 - complex(s)) * math.log(2.0))


def zeta_via_eta(s: complex, N: int | None = None, tol: float = SINGULAR_TOL, accelerate: bool = True) -> complex:
    """``zeta(s) = eta(s) / (1 - 2^(1-s))`` for ``Re s > 0``.

    With ``accelerate`` (default) eta is evaluated by :func:`eta`, using
    ``N`` direct terms if given.  Without it the plain partial sum
    :func:`eta_partial` with ``N`` terms is used.

    Raises
    ------
    SingularFactorError
        When ``|1 - 2^(1-s)| < tol``: at ``s = 1`` and ``s = 1 + 2 pi i k / ln 2``.
    """
    s = complex(s)
    if not s.real > 0:
        raise ValueError(f"need Re s > 0, got {s}")
    factor = singular_factor(s)
    if abs(factor) < tol:
        raise SingularFactorError(f"|1 - 2^(1-s)| = {abs(factor):.3e} < {tol} at s = {s}")
    if accelerate:
        value = eta(s, n_direct=N)
    else:
        if N is None:
            raise ValueError("N is required without acceleration")
        value = eta_partial(s, N)
    return value / factor


@dataclass
class CesaroState:
    """Running accumulators for iterated Cesaro means.

    ``levels[0]`` is the current partial sum; ``levels[j+1]`` is the running
    arithmetic mean of the values level ``j`` has taken so far.
    """

    order: int
    count: int = 0
    levels: list = field(default_factory=list)
    _sums: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        if self.order < 0:
            raise ValueError(f"order must be >= 0, got {self.order}")
        self.levels = [0.0] * (self.order + 1)
        self._sums = [0.0] * (self.order + 1)

    def push(self, term) -> None:
        self.count += 1
        self.levels[0] = self.levels[0] + term
        for j in range(1, self.order + 1):
            self._sums[j] = self._sums[j] + self.levels[j - 1]
            self.levels[j] = self._sums[j] / self.count

    @property
    def value(self):
        return self.levels[self.order]


def cesaro_value(terms: Iterable, order: int, N: int):
    """Top-level iterated Cesaro mean after the first ``N`` terms of ``terms``."""
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    state = CesaroState(order)
    for i, t in enumerate(terms):
        if i >= N:
            break
        state.push(t)
    if state.count < N:
        raise ValueError(f"stream ended after {state.count} terms, needed {N}")
    return state.value


def eta_terms(s: complex):
    """Infinite stream ``(-1)^(n+1) n^(-s)``, n = 1, 2, ..."""
    s = complex(s)
    n = 1
    while True:
        t = complex(np.exp(-s * math.log(n)))
        yield t if n % 2 == 1 else -t
        n += 1


def zeta_via_cesaro(s: complex, order: int, N: int, tol: float = SINGULAR_TOL) -> complex:
    """``zeta(s)`` as the order-``order`` Cesaro value of the eta series over ``1 - 2^(1-s)``."""
    factor = singular_factor(s)
    if abs(factor) < tol:
        raise SingularFactorError(f"|1 - 2^(1-s)| = {abs(factor):.3e} < {tol} at s = {s}")
    return complex(cesaro_value(eta_terms(s), order, N)) / factor


def eta_abscissae() -> AbscissaTriple:
    return ETA_ABSCISSAE
