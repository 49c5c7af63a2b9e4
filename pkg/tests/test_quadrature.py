from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hardylab.core import ConvergenceError, DomainError, QuadratureConfig
from hardylab.quadrature import graded_integral, refine_oracle


def test_refine_identical_values():
    assert refine_oracle(1.25, 1.25) == (1.25, 0.0)


def test_refine_simpson_smooth():
    # Simpson is exact on t^2 per band and the geometric tail closes the remainder exactly
    res = graded_integral(lambda t: t**2, 1.0)
    assert abs(res.value - 1.0 / 3.0) <= 1e-12


def test_refine_midpoint_order_two():
    # midpoint errors on t^2 are exactly h^2/12 per unit length; order-2 Richardson removes them
    n = 8
    coarse = np.mean(((np.arange(n) + 0.5) / n) ** 2)
    fine = np.mean(((np.arange(2 * n) + 0.5) / (2 * n)) ** 2)
    value, err = refine_oracle(coarse, fine, order=2)
    assert value == pytest.approx(1.0 / 3.0, abs=1e-15)
    assert err > 0


def test_singular_integrand_estimate_bounds_error():
    res = graded_integral(lambda t: t**-0.5, 1.0)
    assert abs(res.value - 2.0) <= max(res.error, 1e-12)
    assert abs(res.value - 2.0) <= 1e-9


@given(st.floats(-0.95, 3.0))
def test_power_law_integrals(k):
    res = graded_integral(lambda t: t**k, 1.0)
    assert res.value == pytest.approx(1.0 / (k + 1.0), rel=1e-7)


def test_knots_handle_jumps():
    f = lambda t: np.where(t < 0.3, 1.0, 5.0)  # noqa: E731
    res = graded_integral(f, 1.0, knots=[0.3])
    assert res.value == pytest.approx(0.3 + 0.7 * 5.0, rel=1e-12)


def test_knot_near_zero_with_fast_transition():
    # running mean of a step weight with a tiny first piece: varies on a scale far below the segment
    b, lo_level, hi_level = 0.005, 0.03, 0.4

    def F(s):
        return np.where(s < b, lo_level, (lo_level * b + hi_level * (s - b)) / s)

    res = graded_integral(lambda s: F(s) ** -4.0, 1.0, knots=[b])
    import mpmath as mp

    mp.mp.dps = 30
    ref = mp.quad(lambda s: (lo_level * b + hi_level * (s - b)) ** -4 * s**4, [b, 2 * b, 0.1, 1]) + b * lo_level**-4
    assert res.value == pytest.approx(float(ref), rel=1e-8)


def test_non_integrable_detected():
    with pytest.raises((DomainError, ConvergenceError)):
        graded_integral(lambda t: t**-1.0, 1.0)


def test_non_finite_values_rejected():
    with pytest.raises(DomainError):
        graded_integral(lambda t: np.full_like(t, np.nan), 1.0)


def test_refinement_failure_raises():
    cfg = QuadratureConfig(bands=2, cells_per_band=1, rel_tol=1e-12)
    with pytest.raises(ConvergenceError):
        graded_integral(lambda t: np.sin(40 * t) + 2, 1.0, cfg)


def test_bad_length():
    with pytest.raises(DomainError):
        graded_integral(lambda t: t, 0.0)


def test_segment_edges_land_on_knots():
    # 0.06389270152636678 + (0.7453600868233851 - 0.06389270152636678) rounds one ulp past the knot
    u, v = 0.06389270152636678, 0.7453600868233851
    assert u + (v - u) != v
    f = lambda s: np.where(s < v, 2.0, 0.5)  # noqa: E731
    res = graded_integral(f, 0.8, knots=[u, v])
    assert res.value == pytest.approx(2.0 * v + 0.5 * (0.8 - v), rel=1e-13)
