from __future__ import annotations

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hardylab.core import ConvergenceError, DomainError, Exponents
from hardylab.sharpness import (
    G_derivative,
    G_function,
    G_limit,
    H_derivative,
    H_function,
    L_a_closed_form,
    L_a_limit,
    L_a_quadrature,
    ratio_sweep_theorem_D,
    sharpness_sweep_theorem1,
)

exponents = st.floats(0.1, 5.0).flatmap(lambda p: st.floats(0.05, p).map(lambda q: Exponents(p, q)))


def _mp_L_a(a, p, q, ell):
    a, p, q, ell = (mp.mpf(x) for x in (a, p, q, ell))
    return ell**-p * (1 - (1 - a) ** -q * ((p + 1) / p) ** q) / (1 + a * p)


class TestLa:
    def test_value(self):
        assert L_a_closed_form(-0.5, Exponents(1.0, 1.0)) == pytest.approx(-2.0 / 3.0, rel=1e-14)

    def test_near_endpoint(self):
        assert L_a_closed_form(-0.999, Exponents(1.0, 1.0)) == pytest.approx(-0.50025, abs=1e-5)

    @pytest.mark.parametrize("p, q, limit", [(1.0, 1.0, -0.5), (2.0, 1.0, -1.0 / 3.0), (3.0, 1.0, -0.25)])
    def test_limits(self, p, q, limit):
        assert L_a_limit(Exponents(p, q)) == pytest.approx(limit, rel=1e-15)

    @given(exponents, st.floats(1e-6, 0.999), st.floats(0.1, 10.0))
    def test_against_mpmath(self, e, frac, ell):
        a = -frac / e.p
        if not -1.0 < a < 0.0:
            return
        with mp.workdps(40):
            ref = float(_mp_L_a(a, e.p, e.q, ell))
        assert L_a_closed_form(a, e, ell) == pytest.approx(ref, rel=1e-11)

    @given(exponents)
    def test_closed_form_is_negative(self, e):
        a = max(-0.5 / e.p, -0.5)
        assert L_a_closed_form(a, e) < 0

    @pytest.mark.parametrize("e", [Exponents(1.0, 1.0), Exponents(2.0, 1.0), Exponents(3.0, 1.5)])
    def test_quadrature_cross_check(self, e):
        a = -0.5 / e.p
        closed = L_a_closed_form(a, e)
        assert L_a_quadrature(a, e) == pytest.approx(closed, rel=1e-6)

    def test_parameter_range(self):
        with pytest.raises(DomainError):
            L_a_closed_form(-1.0, Exponents(1.0, 1.0))
        with pytest.raises(DomainError):
            L_a_closed_form(0.0, Exponents(1.0, 1.0))


class TestSweeps:
    def test_theorem1_small_offset(self):
        e = Exponents(2.0, 2.0)
        a = -0.5 + 1e-4
        assert L_a_closed_form(a, e) == pytest.approx(L_a_limit(e), abs=1e-3)

    def test_theorem1_sweep_converges(self):
        sweep = sharpness_sweep_theorem1(Exponents(2.0, 1.0), steps=14)
        assert sweep.converged
        assert sweep.extras["cross_check_ok"]
        assert np.all(np.diff(sweep.deviations) <= 0)
        assert len(sweep.rows()) == 14

    def test_theorem1_strict_failure(self):
        with pytest.raises(ConvergenceError):
            sharpness_sweep_theorem1(Exponents(2.0, 2.0), ell=0.5, steps=4)

    def test_theorem1_lenient(self):
        sweep = sharpness_sweep_theorem1(Exponents(2.0, 2.0), ell=0.5, steps=4, strict=False)
        assert not sweep.converged

    def test_theorem_D_ratio(self):
        sweep = ratio_sweep_theorem_D(2.0, steps=12)
        assert sweep.converged
        assert np.all(np.diff(sweep.observed) > 0)
        assert np.all(sweep.observed < 1.0)

    def test_theorem_D_needs_p_at_least_one(self):
        with pytest.raises(DomainError):
            ratio_sweep_theorem_D(0.5)


class TestGH:
    @given(exponents, st.floats(0.1, 10.0), st.floats(1.5, 50.0))
    def test_derivative_matches_finite_difference(self, e, c, scale):
        # kept away from the branch point x = c/(p+1), where G'' blows up
        x = scale * c / (e.p + 1.0)
        h = 1e-5
        fd = (G_function(x + h, c, e) - G_function(x - h, c, e)) / (2 * h)
        assert fd == pytest.approx(G_derivative(x, c, e), abs=1e-6)

    @given(exponents, st.floats(0.01, 0.999))
    def test_H_increasing_and_nonpositive(self, e, t):
        if e.p == e.q:
            assert H_function(t, e) == 0.0
            return
        assert H_derivative(t, e) > 0
        assert H_function(t, e) <= 0

    def test_H_at_one(self):
        assert H_function(1.0, Exponents(3.0, 1.0)) == 0.0

    @given(exponents, st.floats(0.1, 10.0))
    def test_G_approaches_limit(self, e, c):
        x = 1e8 * c
        assert G_function(x, c, e) == pytest.approx(G_limit(c, e), rel=1e-6)

    @given(exponents, st.floats(0.1, 10.0), st.floats(1.01, 100.0))
    def test_G_decreases_to_its_infimum(self, e, c, scale):
        x = scale * c / (e.p + 1.0)
        assert G_function(x, c, e) >= G_limit(c, e) * (1 - 1e-12)

    def test_G_domain(self):
        with pytest.raises(DomainError):
            G_function(0.1, 1.0, Exponents(1.0, 1.0))
        with pytest.raises(DomainError):
            H_function(0.0, Exponents(1.0, 1.0))

    def test_equal_exponent_continuity(self):
        # G at p = q is the constant c/(p+1); nearby ratios approach it
        c, x = 1.0, 2.0
        base = G_function(x, c, Exponents(2.0, 2.0))
        near = G_function(x, c, Exponents(2.0, 2.0 - 1e-9))
        assert near == pytest.approx(base, rel=1e-7)
