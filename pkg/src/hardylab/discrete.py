"""Discrete Hardy/Copson inequalities and the pieces of the negative-exponent proof.

All checkers truncate the series to the first ``N`` terms.  For the
positive-exponent inequalities (Hardy, Copson) and for the negative-exponent
inequality without correction term, the truncated form is implied by the full
statement, so a truncated check is a genuine instance of the theorem.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .core import (
    CLOSED_FORM_REL_TOL,
    DomainError,
    Exponents,
    InequalityReport,
    PrefixState,
    SequenceData,
    make_report,
)

__all__ = [
    "ReductionState",
    "compensated_cumsum",
    "prefix_sums",
    "copson_mean",
    "check_copson",
    "check_hardy_discrete",
    "check_theorem_F",
    "check_theorem_2",
    "check_lemma1_term",
    "check_young_pointwise",
    "check_lemma2",
    "reduction_state",
]


def compensated_cumsum(x: ArrayLike) -> NDArray[np.float64]:
    """Running sums of ``x`` with the rounding error of every step fed back.

    ``np.cumsum`` adds sequentially, so the exact error of each partial sum
    can be recovered with the TwoSum transformation in vectorized form and
    accumulated separately (cascaded summation).
    """
    x = np.asarray(x, dtype=float)
    s = np.cumsum(x)
    prev = np.concatenate(([0.0], s[:-1]))
    bp = s - prev
    err = (prev - (s - bp)) + (x - bp)
    return s + np.cumsum(err)


def prefix_sums(seq: SequenceData) -> PrefixState:
    return PrefixState(Lam=compensated_cumsum(seq.lam), A=compensated_cumsum(seq.lam * seq.a))


def copson_mean(seq: SequenceData) -> NDArray[np.float64]:
    """Weighted running means ``A_n / Lambda_n``."""
    return prefix_sums(seq).means


def _fsum(x: NDArray[np.float64]) -> float:
    return math.fsum(x.tolist())


def _truncate(seq: SequenceData, N: int | None) -> tuple[int, NDArray, NDArray, PrefixState]:
    n = seq.length if N is None else int(N)
    if not 1 <= n <= seq.length:
        raise DomainError(f"need 1 <= N <= {seq.length}, got N={n}")
    lam, a = seq.lam[:n], seq.a[:n]
    pre = PrefixState(Lam=compensated_cumsum(lam), A=compensated_cumsum(lam * a))
    return n, lam, a, pre


def _need_p_above_one(p: float) -> float:
    p = float(p)
    if not p > 1:
        raise DomainError(f"need p > 1, got p={p}")
    return p


def check_copson(
    seq: SequenceData, p: float, N: int | None = None, rel_tol: float = CLOSED_FORM_REL_TOL
) -> InequalityReport:
    """Copson: ``sum lam_n (A_n/Lam_n)^p <= (p/(p-1))^p sum lam_n a_n^p``."""
    p = _need_p_above_one(p)
    n, lam, a, pre = _truncate(seq, N)
    lhs = _fsum(lam * pre.means**p)
    rhs = (p / (p - 1.0)) ** p * _fsum(lam * a**p)
    return make_report("copson", lhs, rhs, rel_tol, {"p": p, "N": n})


def check_hardy_discrete(
    a: ArrayLike, p: float, N: int | None = None, rel_tol: float = CLOSED_FORM_REL_TOL
) -> InequalityReport:
    """Hardy's inequality: Copson with unit weights."""
    rep = check_copson(SequenceData.unweighted(a), p, N, rel_tol)
    return make_report("hardy_discrete", rep.lhs, rep.rhs, rel_tol, rep.params)


@dataclass(frozen=True)
class _NegativeTerms:
    n: int
    x: float  # sum lam (A/Lam)^-p
    y: float  # sum lam a^(q/p) (A/Lam)^(-p-q/p)
    z: float  # sum lam a^-q (A/Lam)^(-p+q)
    w: float  # sum lam a (A/Lam)^(-p-1)
    c: float  # Lam_N (A_N/Lam_N)^-p


def _negative_terms(seq: SequenceData, e: Exponents, N: int | None) -> _NegativeTerms:
    n, lam, a, pre = _truncate(seq, N)
    p, q = e.p, e.q
    r = q / p
    m = pre.means
    x = _fsum(lam * m**-p)
    y = _fsum(lam * a**r * m ** (-p - r))
    z = _fsum(lam * a**-q * m ** (q - p))
    w = _fsum(lam * a * m ** (-p - 1.0))
    c = float(pre.Lam[-1] * m[-1] ** -p)
    return _NegativeTerms(n, x, y, z, w, c)


def check_theorem_F(
    seq: SequenceData, e: Exponents, N: int | None = None, rel_tol: float = CLOSED_FORM_REL_TOL
) -> InequalityReport:
    """Negative-exponent weighted inequality without the correction term."""
    t = _negative_terms(seq, e, N)
    return make_report("theorem_F", t.x, e.constant * t.z, rel_tol, {"p": e.p, "q": e.q, "N": t.n})


def check_theorem_2(
    seq: SequenceData, e: Exponents, N: int | None = None, rel_tol: float = CLOSED_FORM_REL_TOL
) -> InequalityReport:
    """Negative-exponent inequality with the ``q/(p+1) Lam_N (A_N/Lam_N)^-p`` correction.

    The report's ``extras`` carry the proof quantities ``x, y, z, c``.
    """
    t = _negative_terms(seq, e, N)
    correction = e.q / (e.p + 1.0) * t.c
    rhs = e.constant * t.z - correction
    extras = {"x": t.x, "y": t.y, "z": t.z, "c": t.c, "correction": correction}
    return make_report("theorem_2", t.x, rhs, rel_tol, {"p": e.p, "q": e.q, "N": t.n}, extras)


def check_lemma1_term(
    a_n: float, mean_n: float, e: Exponents, rel_tol: float = CLOSED_FORM_REL_TOL
) -> InequalityReport:
    """Single-term inequality behind the summed estimate, for ``mean_n = A_n/Lam_n``."""
    a_n, m = float(a_n), float(mean_n)
    if not (a_n > 0 and m > 0):
        raise DomainError("a_n and mean_n must be positive")
    p, q = e.p, e.q
    r = q / p
    lhs = (p + 1.0) * m**-p
    rhs = e.constant * a_n**-q * m ** (q - p) + p * ((p + 1.0) / p) ** -r * a_n**r * m ** (-p - r)
    return make_report("lemma1", lhs, rhs, rel_tol, {"p": p, "q": q, "a_n": a_n, "mean_n": m})


def check_young_pointwise(y: float, p: float, rel_tol: float = CLOSED_FORM_REL_TOL) -> InequalityReport:
    """``p + 1 <= y^-p + p y``, with equality exactly at ``y = 1``."""
    y, p = float(y), float(p)
    if not y > 0:
        raise DomainError(f"need y > 0, got y={y}")
    if not p >= 0:
        raise DomainError(f"need p >= 0, got p={p}")
    return make_report("young", p + 1.0, y**-p + p * y, rel_tol, {"p": p, "y": y})


def check_lemma2(
    seq: SequenceData, p: float, N: int | None = None, rel_tol: float = CLOSED_FORM_REL_TOL
) -> InequalityReport:
    """``S_N >= Lam_N/(p+1) (A_N/Lam_N)^-p`` where
    ``S_N = sum lam_n (A_n/Lam_n)^-p - p/(p+1) sum lam_n a_n (A_n/Lam_n)^(-p-1)``.

    The report keeps the ``lhs <= rhs`` orientation: ``lhs`` is the bound and
    ``rhs`` is ``S_N``.  Both are also stored under ``extras``.
    """
    p = float(p)
    if not p > 0:
        raise DomainError(f"need p > 0, got p={p}")
    n, lam, a, pre = _truncate(seq, N)
    m = pre.means
    terms = np.concatenate((lam * m**-p, -(p / (p + 1.0)) * lam * a * m ** (-p - 1.0)))
    s_n = _fsum(terms)
    bound = float(pre.Lam[-1] / (p + 1.0) * m[-1] ** -p)
    return make_report("lemma2", bound, s_n, rel_tol, {"p": p, "N": n}, {"S_N": s_n, "bound": bound})


@dataclass(frozen=True)
class ReductionState:
    """Quantities of the Hölder reduction for one truncated sequence."""

    x: float
    y: float
    z: float
    c: float
    p: float
    q: float
    holder_bound: float
    chain_holds: bool

    @property
    def excess(self) -> float:
        """``x - c/(p+1)``; strictly positive for every positive sequence."""
        return self.x - self.c / (self.p + 1.0)


def _holder_bound(x: float, c: float, p: float, q: float) -> float:
    r = q / p
    return ((p + 1.0) / p) ** r * (x - c / (p + 1.0)) ** r * x ** (1.0 - r)


def reduction_state(
    seq: SequenceData, e: Exponents, N: int | None = None, rel_tol: float = CLOSED_FORM_REL_TOL
) -> ReductionState:
    """Compute ``x, y, z, c`` and test ``y <= ((p+1)/p)^(q/p) (x - c/(p+1))^(q/p) x^(1-q/p)``.

    Only defined for ``p > q``; the ``p = q`` case is reached as a limit.
    """
    if e.p == e.q:
        raise DomainError("reduction state needs p > q; use the p -> q+ limit for p = q")
    t = _negative_terms(seq, e, N)
    if not t.x > t.c / (e.p + 1.0):
        raise DomainError(f"x={t.x} does not exceed c/(p+1)={t.c / (e.p + 1.0)}")
    bound = _holder_bound(t.x, t.c, e.p, e.q)
    holds = t.y <= bound * (1.0 + rel_tol)
    return ReductionState(t.x, t.y, t.z, t.c, e.p, e.q, bound, bool(holds))
