import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bohrstrip.dirichlet import DirichletCoefficients, eta_coefficients, partial_sum
from bohrstrip.perron import (
    SCAN_COLUMNS,
    ContourSpec,
    contour_edges,
    horizontal_edge_bound,
    kernel_edge_exact,
    kernel_edge_integral,
    kernel_tail_bound,
    left_edge_bound,
    log_gap_holds,
    perron_error_scan,
    perron_partial_sum,
    write_scan_csv,
)
from bohrstrip.zeta_eta import eta

FINITE = DirichletCoefficients({1: 1.0, 2: -1.0, 3: 2.0})


def test_contour_spec_validation_and_geometry():
    spec = ContourSpec(1 + 2j, a=2, b=0, delta=0.5, M=3)
    assert spec.height == 3.0**4
    assert spec.x == 3.5
    lo_l, lo_r, hi_r, hi_l = spec.vertices()
    assert lo_l == 0.5 + 2j - 81j and hi_r == 3 + 2j + 81j
    assert lo_r.real == hi_r.real == 3 and lo_l.real == hi_l.real == 0.5
    assert ContourSpec(1, 2, 0, 0.5, 3, height_override=10).height == 10
    for bad in [dict(a=0, b=0), dict(delta=0), dict(delta=1), dict(M=-1), dict(b=0.8)]:
        kw = dict(s=1, a=2, b=0, delta=0.5, M=3)
        kw.update(bad)
        with pytest.raises(ValueError):
            ContourSpec(**kw)


def test_kernel_examples():
    assert abs(kernel_edge_integral(2, 1, 1e3) - 1) <= 1e-3
    assert abs(kernel_edge_integral(0.5, 1, 1e3)) <= 1e-3
    assert isinstance(kernel_edge_integral(3, 0.7, 50), float)
    with pytest.raises(ValueError):
        kernel_edge_integral(1, 1, 10)


@pytest.mark.parametrize("r", [0.25, 0.5, 2, 4])
@pytest.mark.parametrize("H", [1e2, 1e3])
def test_kernel_dichotomy_within_tail_bound(r, H):
    tol = 1e-8
    k = kernel_edge_integral(r, 1, H, tol=tol)
    assert abs(k - (1.0 if r > 1 else 0.0)) <= kernel_tail_bound(r, 1, H) + tol
    assert k == pytest.approx(kernel_edge_exact(r, 1, H), abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 20), st.floats(0.1, 3), st.floats(1, 500))
def test_exact_kernel_matches_quadrature(r, c, H):
    if abs(math.log(r)) < 1e-2:
        return
    assert kernel_edge_exact(r, c, H) == pytest.approx(kernel_edge_integral(r, c, H, tol=1e-10), abs=1e-8)


def test_finite_polynomial_example():
    spec = ContourSpec(1, a=2, b=0, delta=0.5, M=2, height_override=1e9)
    assert abs(perron_partial_sum(FINITE, spec, kernel="exact") - 0.5) <= 1e-6


def test_finite_polynomial_at_default_height_is_within_tail_bounds():
    spec = ContourSpec(1, a=2, b=0, delta=0.5, M=2)
    got = perron_partial_sum(FINITE, spec)
    assert got == pytest.approx(perron_partial_sum(FINITE, spec, kernel="exact"), abs=1e-9)
    bound = sum(abs(a) * n**-1 * kernel_tail_bound(spec.x / n, 2, spec.height) for n, a in FINITE.items())
    assert abs(got - 0.5) <= bound


def test_empty_partial_sum():
    spec = ContourSpec(1, a=2, b=0, delta=0.5, M=0)
    assert perron_partial_sum(FINITE, spec) == 0


def test_eta_right_edge_example():
    spec = ContourSpec(1.5, a=1.2, b=0.6, delta=0.3, M=20)
    got = perron_partial_sum(eta, spec)
    want = partial_sum(eta_coefficients(20), 1.5)
    assert abs(got - want) <= 5e-3


@pytest.mark.parametrize(
    "coeffs,s,M",
    [
        (FINITE, 1.0, 3),
        (DirichletCoefficients({1: 0.5, 4: -2.0, 5: 1.0, 6: 3.0}), 0.7 + 2j, 6),
        (DirichletCoefficients({2: 1.0, 3: -1.0}), 1.2 - 1j, 4),
    ],
)
def test_closed_contour_recovers_finite_sum(coeffs, s, M):
    spec = ContourSpec(s, a=1.5, b=complex(s).real - 0.4, delta=0.4, M=M)
    edges = contour_edges(coeffs, spec)
    direct = partial_sum(coeffs, s)
    scale = 1 + sum(abs(a) for _, a in coeffs.items())
    assert abs(edges.total - direct) <= 10 * spec.tol * scale
    # the omitted edges are bounded by the measured sup of |f| on the contour
    assert abs(edges.left) <= left_edge_bound(edges.left_sup, spec) * 1.01
    assert abs(edges.top) <= horizontal_edge_bound(edges.edge_sup, spec) * 1.01
    assert abs(edges.bottom) <= horizontal_edge_bound(edges.edge_sup, spec) * 1.01


def test_horizontal_bound_decays_like_inverse_square():
    K = 1.0
    scaled = [horizontal_edge_bound(K, ContourSpec(1, 2, 0, 0.5, M)) * M**2 for M in (4, 16, 64, 256)]
    assert all(a >= b for a, b in zip(scaled, scaled[1:]))


def test_error_scan_examples():
    rows = perron_error_scan(eta, eta_coefficients(64), 0.8, 0.5, 1.5, 0.3, [8, 16, 32, 64])
    ratios = [r.ratio for r in rows]
    assert max(ratios) / min(ratios) <= 10
    for r in rows:
        assert r.bound == pytest.approx(r.M**-0.3 * math.log(r.M), rel=1e-15)
        assert r.error == pytest.approx(abs(eta(0.8) - partial_sum(eta_coefficients(r.M), 0.8)), rel=1e-12)

    exact = perron_error_scan(partial_sum(FINITE, 1.0), FINITE, 1.0, 0.5, 1.5, 0.3, [3, 5])
    assert all(r.error <= 1e-15 for r in exact)

    errs = [r.error for r in perron_error_scan(eta, eta_coefficients(64), 2, 1.5, 2.5, 0.3, [8, 16, 32, 64])]
    assert all(a > b for a, b in zip(errs, errs[1:]))


def test_scan_csv_format():
    import io

    rows = perron_error_scan(eta, eta_coefficients(16), 0.8, 0.5, 1.5, 0.3, [8, 16])
    buf = io.StringIO()
    write_scan_csv(rows, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == ",".join(SCAN_COLUMNS) == "M,error,M^-delta*logM,ratio"
    assert float(lines[1].split(",")[1]) == rows[0].error


def test_log_gap():
    assert log_gap_holds(10**6)
