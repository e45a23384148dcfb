"""Contour-integral recovery of Dirichlet partial sums.

For ``x = M + 1/2`` the integral

    (1 / 2 pi i) * integral over the right edge of f(z) x^(z-s) / (z-s) dz

approximates ``sum_{n <= M} b_n n^(-s)``.  Each term contributes
``b_n n^(-s) K(x/n)`` where the kernel ``K(r)`` tends to 1 for ``r > 1`` and
to 0 for ``r < 1`` as the edge grows.  Closing the rectangle instead gives
``f(s)`` exactly (Cauchy), which is how finite series are validated.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, TextIO, Union

import numpy as np
from scipy.special import exp1

from . import quadrature
from .dirichlet import DirichletCoefficients, partial_sum, partial_sums_at

DEFAULT_TOL = 1e-8
Evaluator = Callable[[np.ndarray], np.ndarray]
SeriesLike = Union[DirichletCoefficients, Evaluator]


@dataclass(frozen=True)
class ContourSpec:
    """Rectangle with vertices ``s - delta +- iH`` and ``s + (a - b) +- iH``.

    ``height`` defaults to ``M^(a-b+2)``.
    """

    s: complex
    a: float
    b: float
    delta: float
    M: int
    height_override: float | None = None
    tol: float = DEFAULT_TOL
    max_panels: int = quadrature.MAX_PANELS

    def __post_init__(self):
        if not self.b < self.a:
            raise ValueError(f"need b < a, got a={self.a}, b={self.b}")
        if not 0 < self.delta < 1:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if self.M < 0:
            raise ValueError(f"M must be >= 0, got {self.M}")
        if complex(self.s).real < self.b + self.delta - 1e-12:
            raise ValueError(f"need Re s >= b + delta, got s={self.s}")
        if self.height_override is not None and not self.height_override > 0:
            raise ValueError("height override must be positive")

    @property
    def height(self) -> float:
        if self.height_override is not None:
            return float(self.height_override)
        return float(self.M) ** (self.a - self.b + 2.0)

    @property
    def x(self) -> float:
        return self.M + 0.5

    @property
    def right_offset(self) -> float:
        return self.a - self.b

    def vertices(self) -> tuple[complex, complex, complex, complex]:
        s, h = complex(self.s), self.height
        return (
            s - self.delta - 1j * h,
            s + self.right_offset - 1j * h,
            s + self.right_offset + 1j * h,
            s - self.delta + 1j * h,
        )


def _kernel_width(log_r: float) -> float:
    return min(1.0, math.pi / abs(log_r)) if log_r != 0 else 1.0


def kernel_edge_integral(r: float, c: float, H: float, tol: float = DEFAULT_TOL,
                         max_panels: int = quadrature.MAX_PANELS) -> float:
    """``(1 / 2 pi i) * integral_{c-iH}^{c+iH} r^w / w dw`` by adaptive quadrature.

    The integrand is conjugate-symmetric in ``Im w``, so the value is real:
    ``(1/pi) * integral_0^H Re(r^(c+iy) / (c+iy)) dy``.
    """
    if r <= 0 or r == 1:
        raise ValueError(f"r must be positive and != 1, got {r}")
    if not (c > 0 and H > 0):
        raise ValueError(f"need c > 0 and H > 0, got c={c}, H={H}")
    lr = math.log(r)
    rc = math.exp(c * lr)

    def g(y):
        return (rc * np.exp(1j * lr * y) / (c + 1j * y)).real

    return float(quadrature.integrate(g, 0.0, H, _kernel_width(lr), tol=math.pi * tol,
                                      max_panels=max_panels)) / math.pi


def kernel_edge_exact(r: float, c: float, H: float) -> float:
    """Closed form of :func:`kernel_edge_integral` through the exponential integral ``E1``.

    With ``u = ln r``: ``[u > 0] + (E1(-u(c - iH)) - E1(-u(c + iH))) / (2 pi i)``;
    the step term accounts for the path crossing the branch cut of ``E1``
    when ``r > 1``.
    """
    if r <= 0 or r == 1:
        raise ValueError(f"r must be positive and != 1, got {r}")
    u = math.log(r)
    z0 = -u * complex(c, -H)
    z1 = -u * complex(c, H)
    val = (1.0 if u > 0 else 0.0) + (exp1(z0) - exp1(z1)) / (2j * math.pi)
    return float(val.real)


def kernel_tail_bound(r: float, c: float, H: float) -> float:
    """``r^c / (pi H |ln r|)``: bound on ``|kernel - [r > 1]|`` from closing the contour."""
    return r**c / (math.pi * H * abs(math.log(r)))


def as_evaluator(f: SeriesLike) -> Evaluator:
    if isinstance(f, DirichletCoefficients):
        return lambda z: partial_sums_at(f, z)
    return f


def _edge_width(spec: ContourSpec, f: SeriesLike) -> float:
    top = math.log(spec.x) if spec.x > 1 else 0.0
    if isinstance(f, DirichletCoefficients) and len(f):
        top = max(top, abs(math.log(spec.x) - float(f.log_indices[-1])))
    return _kernel_width(top) if top > 0 else 1.0


def perron_partial_sum(f: SeriesLike, spec: ContourSpec, kernel: str = "quadrature") -> complex:
    """Right-edge integral ``(1/2 pi i) int f(z) x^(z-s)/(z-s) dz``, ``x = M + 1/2``.

    ``f`` is a coefficient map or a vectorized callable.  A coefficient map is
    integrated term by term: ``sum b_n n^(-s) K(x/n)``, with the kernel from
    quadrature or, for ``kernel="exact"``, from the closed form (which
    allows very tall edges).  A callable is integrated directly along the
    edge with the same adaptive quadrature.
    """
    s, c, H = complex(spec.s), spec.right_offset, spec.height
    if H == 0:
        return 0j
    if isinstance(f, DirichletCoefficients):
        total = 0j
        for n, bn in f.items():
            r = spec.x / n
            if kernel == "exact":
                k = kernel_edge_exact(r, c, H)
            elif kernel == "quadrature":
                k = kernel_edge_integral(r, c, H, tol=spec.tol, max_panels=spec.max_panels)
            else:
                raise ValueError(f"unknown kernel {kernel!r}")
            total += bn * np.exp(-s * math.log(n)) * k
        return complex(total)
    lx = math.log(spec.x)

    def g(y):
        w = c + 1j * y
        return f(s + w) * np.exp(w * lx) / w

    val = quadrature.integrate(g, -H, H, _edge_width(spec, f), tol=2 * math.pi * spec.tol,
                               max_panels=spec.max_panels)
    return complex(val) / (2 * math.pi)


@dataclass(frozen=True)
class ContourEdges:
    """Each edge integral already divided by ``2 pi i``; ``total`` should equal ``f(s)``."""

    bottom: complex
    right: complex
    top: complex
    left: complex
    left_sup: float
    edge_sup: float

    @property
    def total(self) -> complex:
        return self.bottom + self.right + self.top + self.left


def contour_edges(f: SeriesLike, spec: ContourSpec) -> ContourEdges:
    """All four edges of the rectangle, counter-clockwise, with ``|f|`` maxima on the nodes.

    ``left_sup`` is the largest ``|f|`` seen on the left edge and
    ``edge_sup`` on any edge; both stand in for the bound K on ``|f|``.
    """
    ev = as_evaluator(f)
    s, c, d, H = complex(spec.s), spec.right_offset, spec.delta, spec.height
    lx = math.log(spec.x)
    width = _edge_width(spec, f)
    tol = 2 * math.pi * spec.tol
    seen = {"left": 0.0, "all": 0.0}

    def track(vals, key):
        m = float(np.max(np.abs(vals))) if np.size(vals) else 0.0
        seen["all"] = max(seen["all"], m)
        if key == "left":
            seen["left"] = max(seen["left"], m)

    def vertical(re_off, key):
        def g(y):
            w = re_off + 1j * y
            fv = ev(s + w)
            track(fv, key)
            return fv * np.exp(w * lx) / w * 1j
        return g

    def horizontal(im_off):
        def g(u):
            w = u + 1j * im_off
            fv = ev(s + w)
            track(fv, "top")
            return fv * np.exp(w * lx) / w
        return g

    hw = min(width, (c + d) / 4)
    kw = dict(tol=tol, max_panels=spec.max_panels)
    right = quadrature.integrate(vertical(c, "right"), -H, H, width, **kw)
    left = -quadrature.integrate(vertical(-d, "left"), -H, H, min(width, d), **kw)
    bottom = quadrature.integrate(horizontal(-H), -d, c, hw, **kw)
    top = -quadrature.integrate(horizontal(H), -d, c, hw, **kw)
    k = 2j * math.pi
    return ContourEdges(
        bottom=complex(bottom) / k,
        right=complex(right) / k,
        top=complex(top) / k,
        left=complex(left) / k,
        left_sup=seen["left"],
        edge_sup=seen["all"],
    )


def left_edge_bound(K: float, spec: ContourSpec) -> float:
    """``K x^(-delta) (1/2pi) int_{-H}^{H} (delta^2 + y^2)^(-1/2) dy`` for the left edge."""
    return K * spec.x ** (-spec.delta) * 2.0 * math.asinh(spec.height / spec.delta) / (2 * math.pi)


def horizontal_edge_bound(K: float, spec: ContourSpec) -> float:
    """``(K / 2pi H) int_{-delta}^{a-b} x^u du`` for the top or bottom edge."""
    lx = math.log(spec.x)
    c, d = spec.right_offset, spec.delta
    integral = (math.exp(c * lx) - math.exp(-d * lx)) / lx if lx != 0 else c + d
    return K * integral / (2 * math.pi * spec.height)


@dataclass(frozen=True)
class ScanRow:
    M: int
    error: float
    bound: float
    ratio: float


def perron_error_scan(
    f: Evaluator | complex,
    series: DirichletCoefficients,
    s: complex,
    b: float,
    a: float,
    delta: float,
    M_list: Sequence[int],
) -> list[ScanRow]:
    """``|f(s) - sum_{n<=M} b_n n^(-s)|`` against ``M^(-delta) ln M`` for each ``M``.

    ``f`` is an evaluator or the value ``f(s)`` itself, computed
    independently of the truncated sums.  ``a`` and ``b`` are only
    validated (``Re s >= b + delta``, ``b < a``); the errors come from
    direct truncation, not from the contour.
    """
    ContourSpec(s, a, b, delta, max(M_list) if M_list else 0)
    ms = list(M_list)
    if any(m < 2 for m in ms) or ms != sorted(ms):
        raise ValueError("M_list must be ascending with entries >= 2")
    target = complex(f(np.array([complex(s)]))[0]) if callable(f) else complex(f)
    rows = []
    for m in ms:
        err = abs(target - partial_sum(series, s, m))
        bound = m ** (-delta) * math.log(m)
        rows.append(ScanRow(m, err, bound, err / bound))
    return rows


SCAN_COLUMNS = ("M", "error", "M^-delta*logM", "ratio")


def write_scan_csv(rows: Iterable[ScanRow], fh: TextIO) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SCAN_COLUMNS)
    for r in rows:
        w.writerow([r.M, f"{r.error:.17g}", f"{r.bound:.17g}", f"{r.ratio:.17g}"])


def log_gap_holds(M_max: int = 10**6) -> bool:
    """``-ln((2M+1)/(2M+2)) > 1/(2M+2)`` for every ``M`` in ``1..M_max``."""
    m = np.arange(1, M_max + 1, dtype=np.float64)
    return bool(np.all(-np.log1p(-1.0 / (2 * m + 2)) > 1.0 / (2 * m + 2)))
