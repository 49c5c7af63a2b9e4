from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hardylab.core import (
    UNIT,
    Constant,
    DomainError,
    Exponents,
    ExtremalG,
    ExtremalPhi,
    InequalityReport,
    Interval,
    Power,
    QuadratureConfig,
    SequenceData,
    Step,
    Tabulated,
    ToleranceConfig,
    evaluate_weight,
    make_report,
    validate_exponents,
    weight_from_dict,
)
from hardylab.discrete import prefix_sums

positive = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False)


class TestExponents:
    def test_boundary_p_equals_q(self):
        assert validate_exponents(1, 1) == Exponents(1.0, 1.0)

    def test_interior_point(self):
        e = validate_exponents(2, 0.5)
        assert (e.p, e.q) == (2.0, 0.5)
        assert e.ratio == 0.25
        assert e.constant == pytest.approx(1.5**0.5, rel=1e-15)

    def test_p_below_q_rejected(self):
        with pytest.raises(DomainError):
            validate_exponents(0.5, 2)

    @given(st.floats(-5, 5, allow_nan=False), st.floats(-5, 5, allow_nan=False))
    def test_rejects_exactly_the_complement(self, p, q):
        valid = p >= q > 0
        if valid:
            assert validate_exponents(p, q).p == p
        else:
            with pytest.raises(DomainError):
                validate_exponents(p, q)

    def test_non_finite_rejected(self):
        with pytest.raises(DomainError):
            Exponents(math.inf, 1.0)


def test_interval_requires_lo_below_hi():
    assert Interval(0, 2).length == 2.0
    with pytest.raises(DomainError):
        Interval(1, 1)
    with pytest.raises(DomainError):
        Interval(0, math.nan)


class TestWeights:
    def test_extremal_g_value(self):
        assert evaluate_weight(ExtremalG(-0.5, 1.0), 0.25) == pytest.approx(0.75, rel=1e-15)

    def test_constant_value(self):
        for t in (0.0, 0.3, 1.0):
            assert evaluate_weight(Constant(3.0), t) == 3.0

    def test_extremal_phi_value(self):
        assert evaluate_weight(ExtremalPhi(0.5), 0.09) == pytest.approx(0.3, rel=1e-15)

    def test_extremal_phi_epsilon_shift(self):
        assert evaluate_weight(ExtremalPhi(0.5, 0.1), 0.09) == pytest.approx(0.4, rel=1e-15)

    def test_outside_domain(self):
        with pytest.raises(DomainError):
            evaluate_weight(ExtremalG(-0.5), 0.0)
        with pytest.raises(DomainError):
            evaluate_weight(ExtremalPhi(0.5), 1.5)

    def test_step_is_right_continuous(self):
        w = Step([0.5], [1.0, 2.0])
        assert evaluate_weight(w, 0.49) == 1.0
        assert evaluate_weight(w, 0.5) == 2.0
        assert w.is_nondecreasing
        assert not Step([0.5], [2.0, 1.0]).is_nondecreasing

    def test_step_validation(self):
        with pytest.raises(DomainError):
            Step([0.5], [1.0])
        with pytest.raises(DomainError):
            Step([0.5, 0.4], [1.0, 1.0, 1.0])
        with pytest.raises(DomainError):
            Step([0.5], [1.0, -1.0])

    def test_tabulated_interpolates_linearly(self):
        w = Tabulated([0.0, 1.0], [1.0, 3.0])
        assert evaluate_weight(w, 0.25) == pytest.approx(1.5)
        assert w.integral(0.0, 1.0) == pytest.approx(2.0, rel=1e-15)

    def test_power_and_extremal_parameter_ranges(self):
        with pytest.raises(DomainError):
            Power(1.0, -1.0)
        with pytest.raises(DomainError):
            ExtremalG(-1.0)
        with pytest.raises(DomainError):
            ExtremalG(0.1)

    @pytest.mark.parametrize(
        "w",
        [
            Constant(2.0),
            Power(1.5, 0.5),
            ExtremalG(-0.5, 2.0),
            ExtremalPhi(0.5, 0.1),
            Step([0.3, 0.7], [1.0, 2.0, 0.5]),
            Tabulated([0.0, 0.5, 1.0], [1.0, 4.0, 2.0]),
        ],
    )
    def test_dict_round_trip(self, w):
        assert weight_from_dict(w.to_dict()) == w

    def test_unknown_kind(self):
        with pytest.raises(DomainError):
            weight_from_dict({"kind": "nope"})

    @given(
        st.sampled_from(["const", "pow", "extg", "extphi", "step"]),
        st.floats(1e-6, 1.0, exclude_min=False),
    )
    def test_strictly_positive_on_open_domain(self, kind, t):
        w = {
            "const": Constant(0.5),
            "pow": Power(2.0, -0.7),
            "extg": ExtremalG(-0.9, 0.1),
            "extphi": ExtremalPhi(3.0),
            "step": Step([0.2, 0.9], [1e-3, 5.0, 2.0]),
        }[kind]
        assert evaluate_weight(w, t) > 0

    @pytest.mark.parametrize(
        "w",
        [Power(1.5, 0.5), ExtremalG(-0.4, 2.0), ExtremalPhi(0.7), Step([0.25, 0.6], [1.0, 3.0, 2.0])],
    )
    def test_integral_from_matches_primitive_difference(self, w):
        lo = 0.2
        s = np.array([1e-12, 1e-6, 0.1, 0.5, 0.8])
        direct = w.primitive(lo + s) - w.primitive(lo)
        assert np.allclose(w.integral_from(lo, s), direct, rtol=1e-9, atol=1e-16)

    def test_integral_from_keeps_precision_for_tiny_offsets(self):
        # primitive differences lose everything here, the offset form does not
        w = Power(1.0, 0.5)
        got = float(w.integral_from(0.5, 1e-14))
        assert got == pytest.approx(0.5**0.5 * 1e-14, rel=1e-10)


class TestSequences:
    def test_rejects_nonpositive(self):
        with pytest.raises(DomainError):
            SequenceData([1, 1], [1, 0])
        with pytest.raises(DomainError):
            SequenceData([1], [1, 2])
        with pytest.raises(DomainError):
            SequenceData([], [])

    def test_read_only(self):
        s = SequenceData([1, 2], [3, 4])
        with pytest.raises(ValueError):
            s.a[0] = 5

    def test_equality_and_dict(self):
        s = SequenceData([1, 2], [3, 4])
        assert s == SequenceData([1.0, 2.0], [3.0, 4.0])
        assert s.to_dict() == {"lambda": [1.0, 2.0], "a": [3.0, 4.0]}
        assert SequenceData.unweighted([1, 2]) == SequenceData([1, 1], [1, 2])

    @given(st.lists(st.tuples(positive, positive), min_size=1, max_size=50))
    def test_prefix_sums_strictly_increasing(self, pairs):
        lam, a = zip(*pairs)
        pre = prefix_sums(SequenceData(lam, a))
        assert np.all(np.diff(pre.Lam) > 0)
        assert np.all(np.diff(pre.A) > 0)
        assert pre.Lam[0] == lam[0]
        assert pre.A[0] == lam[0] * a[0]


class TestReports:
    def test_margin_and_satisfaction(self):
        r = make_report("x", 2.0, 3.0, 1e-9)
        assert r.margin == 1.0 and r.relative_margin == pytest.approx(1 / 3)
        assert r.satisfied
        assert not make_report("x", 3.0, 2.0, 1e-9).satisfied

    def test_tolerance_band(self):
        assert make_report("x", 1.0 + 1e-10, 1.0, 1e-9).satisfied
        assert not make_report("x", 1.0 + 1e-8, 1.0, 1e-9).satisfied

    def test_round_trip(self):
        r = make_report("x", 1.0, 2.0, 1e-9, {"p": 1.0}, {"c": 2.0})
        assert InequalityReport.from_dict(r.to_dict()) == r

    @given(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6), st.floats(1e-12, 0.5))
    def test_satisfied_iff_relative_margin_within_tol(self, lhs, rhs, tol):
        r = make_report("x", lhs, rhs, tol)
        assert r.satisfied == (r.relative_margin >= -tol)


class TestConfigs:
    def test_quadrature_defaults(self):
        cfg = QuadratureConfig()
        assert cfg.total_cells == cfg.bands * cfg.cells_per_band
        assert cfg.order == 4
        assert QuadratureConfig(rule="midpoint").order == 2

    @pytest.mark.parametrize(
        "kwargs", [{"bands": 0}, {"rule": "trapezoid"}, {"grading_ratio": 1.0}, {"rel_tol": 0.0}]
    )
    def test_quadrature_validation(self, kwargs):
        with pytest.raises(DomainError):
            QuadratureConfig(**kwargs)

    def test_tolerance_paths(self):
        tol = ToleranceConfig()
        assert tol.for_path(True) == 1e-9
        assert tol.for_path(False) == 1e-6
        assert ToleranceConfig(rel_tol=1e-4).for_path(True) == 1e-4
        with pytest.raises(DomainError):
            ToleranceConfig(rel_tol=1.5)


def test_unit_interval():
    assert UNIT == Interval(0.0, 1.0)
