from __future__ import annotations

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hardylab.core import Constant, ConvergenceError, DomainError, ExtremalPhi, Power, Step, ToleranceConfig
from hardylab.muckenhoupt import (
    M_closed_form,
    MuckenhouptParams,
    c_closed_form,
    check_corollary,
    check_gy_monotone,
    check_theorem_3,
    gy_function,
    muckenhoupt_constant,
    muckenhoupt_profile,
    p0_residual,
    sharpness_t1_sweep,
    solve_p0,
    solve_p0_detailed,
    theorem_constants,
)

q_values = st.floats(1.05, 5.0)
M_values = st.floats(1.0, 10.0)


def _mp_p0(q, M):
    with mp.workdps(40):
        q, M = mp.mpf(q), mp.mpf(M)
        f = lambda p: (q - p) / (q - 1) * (M * p) ** (1 / (q - 1)) - 1  # noqa: E731
        return mp.findroot(f, (mp.mpf(1), q - mp.mpf(10) ** -30), solver="anderson")


class TestP0:
    def test_known_values(self):
        assert solve_p0(2.0, 2.0) == pytest.approx(1.0 + math.sqrt(0.5), rel=1e-15)
        assert solve_p0(3.0, 2.0) == pytest.approx(2.0, rel=1e-14)

    def test_M_one_gives_one(self):
        assert solve_p0(2.5, 1.0) == 1.0

    def test_domain(self):
        with pytest.raises(DomainError):
            solve_p0(1.0, 2.0)
        with pytest.raises(DomainError):
            solve_p0(2.0, 0.5)

    @given(q_values, st.floats(1.01, 10.0))
    def test_against_mpmath_findroot(self, q, M):
        sol = solve_p0_detailed(q, M)
        ref = _mp_p0(q, M)
        assert sol.p0 == pytest.approx(float(ref), rel=1e-12)
        assert sol.gap == pytest.approx(float(mp.mpf(q) - ref), rel=1e-8)

    @given(q_values, M_values)
    def test_residual_small(self, q, M):
        sol = solve_p0_detailed(q, M)
        assert abs(sol.residual) <= 1e-10
        assert 1.0 <= sol.p0 < q or sol.gap > 0

    @given(st.floats(1.5, 5.0), st.floats(1.01, 5.0), st.floats(0.01, 1.0))
    def test_monotone_in_M(self, q, M, bump):
        # a larger Muckenhoupt constant can only push the admissible range up
        assert solve_p0(q, M) <= solve_p0(q, M + bump)

    @given(q_values, st.floats(1.01, 10.0), st.floats(1e-6, 1e-2))
    def test_K_positive_above_p0(self, q, M, frac):
        params = MuckenhouptParams(q, M)
        p = q - params.p0_gap * (1.0 - frac)
        if not p > params.p0 or q - p >= params.p0_gap:
            return
        tc = theorem_constants(p, params)
        assert tc.K > 0 and tc.Kprime > 0
        assert tc.Kprime == pytest.approx(tc.K / p ** (1.0 / (q - 1.0)), rel=1e-9, abs=1e-15)

    def test_K_vanishes_at_p0(self):
        params = MuckenhouptParams(2.0, 2.0)
        assert p0_residual(params.p0, 2.0, 2.0) == pytest.approx(0.0, abs=1e-15)
        with pytest.raises(DomainError):
            theorem_constants(params.p0, params)
        with pytest.raises(DomainError):
            theorem_constants(2.5, params)

    def test_constants_example(self):
        tc = theorem_constants(1.8, MuckenhouptParams(2.0, 2.0))
        assert tc.K == pytest.approx(0.28, rel=1e-13)
        assert tc.Kprime == pytest.approx(0.28 / 1.8, rel=1e-13)

    def test_nonconvergence_reported(self):
        with pytest.raises(ConvergenceError):
            solve_p0(2.5, 3.0, tol=-1.0)


class TestProfile:
    def test_constant_weight_has_constant_one(self):
        const, prof = muckenhoupt_constant(Constant(3.0), 2.0)
        assert np.allclose(prof.values, 1.0, rtol=1e-14)
        assert const == pytest.approx(1.0, rel=1e-14)

    def test_step_weight_sup_at_least_one(self):
        const, _ = muckenhoupt_constant(Step([0.5], [1.0, 2.0]), 2.0)
        assert const >= 1.0
        # at t = 1: mean 1.5, inverse mean 0.75
        assert muckenhoupt_profile(Step([0.5], [1.0, 2.0]), 2.0, [1.0]).values[0] == pytest.approx(1.125)

    @pytest.mark.parametrize("q, a", [(2.0, 0.3), (2.0, 0.5), (3.0, 1.0)])
    def test_power_profile_is_flat_at_closed_form(self, q, a):
        M = M_closed_form(q, a)
        prof = muckenhoupt_profile(ExtremalPhi(a), q)
        assert np.allclose(prof.values, M, rtol=1e-12)
        forced = muckenhoupt_profile(ExtremalPhi(a), q, np.geomspace(1e-3, 1, 8), force_quadrature=True)
        assert np.allclose(forced.values, M, rtol=1e-6)

    def test_closed_form_examples(self):
        assert M_closed_form(2.0, 0.5) == pytest.approx(4.0 / 3.0, rel=1e-15)
        assert c_closed_form(2.0, 0.5) == pytest.approx(4.0 / 3.0, rel=1e-15)
        assert c_closed_form(3.0, 1.0) == pytest.approx(M_closed_form(3.0, 1.0) ** 0.5, rel=1e-15)

    def test_rejects_decreasing(self):
        with pytest.raises(DomainError):
            muckenhoupt_profile(Power(1.0, -0.5), 2.0)
        with pytest.raises(DomainError):
            muckenhoupt_profile(Constant(1.0), 1.0)

    @given(st.lists(st.floats(0.1, 10.0), min_size=3, max_size=3), q_values)
    def test_profile_at_least_one(self, levels, q):
        # Hölder/Jensen: the averaged product never drops below 1
        prof = muckenhoupt_profile(Step([0.3, 0.6], sorted(levels)), q, np.linspace(0.1, 1, 10))
        assert np.all(prof.values >= 1.0 - 1e-12)


class TestTheorem3:
    def test_extremal_at_equal_exponents(self):
        a, q = 0.5, 2.0
        params = MuckenhouptParams(q, M_closed_form(q, a))
        assert params.M == pytest.approx(4.0 / 3.0)
        rep = check_theorem_3(ExtremalPhi(a), 2.0, params)
        assert rep.satisfied
        assert rep.extras["A1"] is None
        # p = q gives K = 1 and the bound c (q/p) ((p-1)/(q-1))^2 = c
        assert rep.extras["K"] == 1.0
        # F = t^a/(1+a), so (1/t) int F^-1 = (1+a)/(1-a) at t=1
        assert rep.lhs == pytest.approx(1.5 / 0.5, rel=1e-12)

    def test_constant_weight_value(self):
        rep = check_theorem_3(Constant(1.0), 1.8, MuckenhouptParams(2.0, 2.0))
        assert rep.lhs == pytest.approx(1.0)
        assert rep.rhs == pytest.approx(2.0 * (2 / 1.8) * 0.64 / (0.28 / 1.8), rel=1e-12)

    @given(st.floats(0.05, 0.95), st.floats(0.1, 1.0))
    def test_chain_intermediates(self, frac, t):
        q, a = 2.0, 0.4
        params = MuckenhouptParams(q, M_closed_form(q, a))
        p = params.p0 + frac * (q - params.p0)
        rep = check_theorem_3(ExtremalPhi(a), p, params, t=t)
        ex = rep.extras
        assert rep.satisfied
        assert ex["K_J"] <= ex["K_J_bound"] * (1 + 1e-9)
        assert ex["holder_lhs"] <= ex["holder_rhs"] * (1 + 1e-9)

    def test_step_weight(self):
        w = Step([0.25, 0.5], [1.0, 1.5, 3.0])
        M = muckenhoupt_constant(w, 2.0, np.geomspace(1e-6, 1, 1024))[0] * 1.01
        params = MuckenhouptParams(2.0, M)
        for t in (0.1, 0.3, 0.7, 1.0):
            assert check_theorem_3(w, 0.5 * (params.p0 + 2.0), params, t=t).satisfied

    def test_rejects_understated_M(self):
        with pytest.raises(DomainError):
            check_theorem_3(ExtremalPhi(0.5), 2.0, MuckenhouptParams(2.0, 1.0))

    def test_corollary_closed_form(self):
        a, q, p = 0.3, 2.0, 1.9
        params = MuckenhouptParams(q, M_closed_form(q, a))
        rep = check_corollary(ExtremalPhi(a), p, params)
        expected = ((p - 1) / (p - 1 - a)) ** (p - 1) / (a + 1)
        assert rep.lhs == pytest.approx(expected, rel=1e-12)
        assert rep.satisfied

    def test_corollary_scale_invariance(self):
        a, q, p = 0.3, 2.0, 1.9
        params = MuckenhouptParams(q, M_closed_form(q, a))
        vals = [check_corollary(ExtremalPhi(a), p, params, t=t).lhs for t in (0.1, 0.5, 1.0)]
        assert np.allclose(vals, vals[0], rtol=1e-12)


class TestSharpnessAtOne:
    def test_ratio_formula_for_q_two(self):
        p = 2.0
        sweep = sharpness_t1_sweep(p, 2.0, [0.5, 0.79, 0.799], strict=False)
        # for q = 2 the ratio is (p - 1 + a) / (2 (p - 1))
        assert sweep.observed == pytest.approx([0.75, 0.895, 0.8995], rel=1e-12)

    def test_monotone_toward_limit(self):
        a = 2.0 - np.geomspace(1.0, 1e-6, 12)
        sweep = sharpness_t1_sweep(3.0, 3.0, a)
        assert sweep.converged
        assert np.all(np.diff(sweep.deviations) < 0)

    def test_bad_schedule(self):
        with pytest.raises(DomainError):
            sharpness_t1_sweep(2.0, 2.0, [0.5, 0.4])
        with pytest.raises(DomainError):
            sharpness_t1_sweep(2.0, 2.0, [1.2])


class TestGy:
    @given(st.floats(0.01, 10.0), st.floats(1.05, 3.0), st.floats(0.05, 0.95))
    def test_nonincreasing_beyond_y(self, y, q, frac):
        p = 1.0 + frac * (q - 1.0)
        x = y * np.geomspace(1.0, 100.0, 50)
        assert check_gy_monotone(y, p, q, x)

    def test_increasing_below_y(self):
        # g_y peaks at x = y, so on (0, y) it rises
        y, p, q = 1.0, 1.5, 2.0
        g = gy_function(np.linspace(0.1, 1.0, 20), y, p, q)
        assert np.all(np.diff(g) > 0)

    def test_domain(self):
        with pytest.raises(DomainError):
            check_gy_monotone(1.0, 2.0, 2.0, [1.0, 2.0])
        with pytest.raises(DomainError):
            check_gy_monotone(1.0, 1.5, 2.0, [0.5, 2.0])


def test_params_reject_small_M():
    with pytest.raises(DomainError):
        MuckenhouptParams(2.0, 0.9)


def test_tolerance_paths_are_used():
    rep = check_theorem_3(Constant(1.0), 2.0, MuckenhouptParams(2.0, 1.0))
    assert rep.rel_tol == ToleranceConfig().for_path(True)
