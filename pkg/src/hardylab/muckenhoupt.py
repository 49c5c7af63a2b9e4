"""Muckenhoupt-weight application: the condition profile, the critical exponent
``p0``, the constants ``K`` and ``K'`` and the reverse-Hölder bound for
nondecreasing weights on (0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, NamedTuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .continuous import HardyAverage, _hardy_integral, _integrate
from .core import (
    UNIT,
    ConvergenceError,
    DomainError,
    InequalityReport,
    Interval,
    QuadratureConfig,
    ToleranceConfig,
    WeightFamily,
    make_report,
)
from .sharpness import SharpnessSweep

__all__ = [
    "DEFAULT_T_GRID",
    "MuckenhouptParams",
    "TheoremConstants",
    "P0Solution",
    "MuckenhouptProfile",
    "M_closed_form",
    "c_closed_form",
    "muckenhoupt_profile",
    "muckenhoupt_constant",
    "p0_residual",
    "solve_p0",
    "solve_p0_detailed",
    "theorem_constants",
    "gy_function",
    "check_gy_monotone",
    "check_theorem_3",
    "check_corollary",
    "sharpness_t1_sweep",
]

DEFAULT_T_GRID = np.geomspace(1e-6, 1.0, 256)


# ---------------------------------------------------------------------------
# Critical exponent
# ---------------------------------------------------------------------------


class P0Solution(NamedTuple):
    q: float
    M: float
    p0: float
    gap: float  # q - p0, kept separately to full relative precision
    residual: float
    iterations: int


def _check_qM(q_exp: float, M: float) -> tuple[float, float]:
    q, M = float(q_exp), float(M)
    if not (q > 1 and math.isfinite(q)):
        raise DomainError(f"need q > 1, got q={q}")
    if not (M >= 1 and math.isfinite(M)):
        raise DomainError(f"need M >= 1, got M={M}")
    return q, M


def p0_residual(p: float, q_exp: float, M: float) -> float:
    """``((q-p)/(q-1)) (M p)^(1/(q-1)) - 1``."""
    q = float(q_exp)
    return (q - p) / (q - 1.0) * (M * p) ** (1.0 / (q - 1.0)) - 1.0


def solve_p0_detailed(q_exp: float, M: float, max_iter: int = 200) -> P0Solution:
    """Root of ``((q-p)/(q-1)) (M p)^(1/(q-1)) = 1`` in ``[1, q)`` by bisection.

    The unknown is ``u = log(q - p)``.  In that variable the logarithm of the
    left side, ``u - log(q-1) + log(M (q - e^u))/(q-1)``, is strictly
    increasing for ``p > 1``; bisecting on it keeps ``q - p0`` accurate even
    when it is far below the spacing of doubles near ``q``.
    """
    q, M = _check_qM(q_exp, M)
    if M == 1.0:
        return P0Solution(q, M, 1.0, q - 1.0, 0.0, 0)
    lq1 = math.log(q - 1.0)
    inv = 1.0 / (q - 1.0)

    def log_lhs(u: float) -> float:
        return u - lq1 + inv * math.log(M * (q - math.exp(u)))

    hi = lq1  # p = 1, log_lhs = log(M)/(q-1) > 0
    lo = lq1 - 1.0
    while log_lhs(lo) >= 0.0:
        lo = lq1 - 2.0 * (lq1 - lo)
        if lo < -700.0:
            raise ConvergenceError(f"q - p0 underflows for q={q}, M={M}")
    it = 0
    while it < max_iter:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if log_lhs(mid) < 0.0:
            lo = mid
        else:
            hi = mid
        it += 1
    u = lo if abs(log_lhs(lo)) <= abs(log_lhs(hi)) else hi
    gap = math.exp(u)
    residual = math.expm1(log_lhs(u))
    return P0Solution(q, M, q - gap, gap, residual, it)


def solve_p0(q_exp: float, M: float, tol: float = 1e-10) -> float:
    sol = solve_p0_detailed(q_exp, M)
    if abs(sol.residual) > tol:
        raise ConvergenceError(f"p0 residual {sol.residual:.3e} exceeds {tol:.1e}")
    return sol.p0


# ---------------------------------------------------------------------------
# Parameters and constants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MuckenhouptParams:
    q_exp: float
    M: float
    c: float = field(init=False)
    p0: float = field(init=False)
    p0_gap: float = field(init=False)

    def __post_init__(self) -> None:
        q, M = _check_qM(self.q_exp, self.M)
        sol = solve_p0_detailed(q, M)
        object.__setattr__(self, "q_exp", q)
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "c", M ** (1.0 / (q - 1.0)))
        object.__setattr__(self, "p0", sol.p0)
        object.__setattr__(self, "p0_gap", sol.gap)

    def to_dict(self) -> dict[str, float]:
        return {"q": self.q_exp, "M": self.M, "c": self.c, "p0": self.p0}


@dataclass(frozen=True)
class TheoremConstants:
    K: float
    Kprime: float


def _raw_constants(p: float, q: float, c: float) -> TheoremConstants:
    root = p ** (1.0 / (q - 1.0))
    K = 1.0 - c * root * (q - p) / (q - 1.0)
    Kp = 1.0 / root - c * (q - p) / (q - 1.0)
    return TheoremConstants(K, Kp)


def theorem_constants(p: float, params: MuckenhouptParams) -> TheoremConstants:
    """``K = 1 - c p^(1/(q-1)) (q-p)/(q-1)`` and ``K' = K / p^(1/(q-1))`` for p in (p0, q]."""
    p, q = float(p), params.q_exp
    if p > q:
        raise DomainError(f"need p <= q = {q}, got p={p}")
    # compare through q - p0, which may be below the spacing of doubles near q
    if not q - p < params.p0_gap:
        raise DomainError(f"need p > p0 = {params.p0}, got p={p}")
    tc = _raw_constants(p, q, params.c)
    if not (tc.K > 0 and tc.Kprime > 0):
        raise DomainError(f"K={tc.K} is not positive at p={p}; p is at or below p0")
    return tc


# ---------------------------------------------------------------------------
# The condition profile
# ---------------------------------------------------------------------------


def M_closed_form(q_exp: float, a_param: float) -> float:
    """Muckenhoupt constant of ``t^a``: ``(1/(a+1)) ((q-1)/(q-1-a))^(q-1)``."""
    q, a = float(q_exp), float(a_param)
    if not 0.0 < a < q - 1.0:
        raise DomainError(f"need 0 < a < q-1, got a={a}, q={q}")
    return ((q - 1.0) / (q - 1.0 - a)) ** (q - 1.0) / (a + 1.0)


def c_closed_form(q_exp: float, a_param: float) -> float:
    """``M(q,a)^(1/(q-1)) = ((q-1)/((q-1)-a)) (1+a)^(-1/(q-1))``."""
    q, a = float(q_exp), float(a_param)
    M_closed_form(q, a)
    return (q - 1.0) / (q - 1.0 - a) * (1.0 + a) ** (-1.0 / (q - 1.0))


@dataclass(frozen=True)
class MuckenhouptProfile:
    t: NDArray[np.float64]
    values: NDArray[np.float64]

    @property
    def constant(self) -> float:
        """Maximum over the grid, a lower bound for the true supremum."""
        return float(np.max(self.values))


def _check_phi(phi: WeightFamily) -> None:
    phi.check_interval(UNIT)
    if not phi.is_nondecreasing:
        raise DomainError(f"the {phi.kind} weight is not nondecreasing")


def _mean(phi: WeightFamily, t: float, power: float, cfg: QuadratureConfig, force: bool = False) -> float:
    return _integrate(phi, Interval(0.0, t), power, cfg, force)[0] / t


def muckenhoupt_profile(
    phi: WeightFamily,
    q_exp: float,
    t_grid: ArrayLike | None = None,
    cfg: QuadratureConfig | None = None,
    force_quadrature: bool = False,
) -> MuckenhouptProfile:
    """``(1/t int_0^t phi) (1/t int_0^t phi^(-1/(q-1)))^(q-1)`` at every grid ``t``."""
    q = float(q_exp)
    if not q > 1:
        raise DomainError(f"need q > 1, got q={q}")
    _check_phi(phi)
    cfg = cfg or QuadratureConfig()
    t = DEFAULT_T_GRID if t_grid is None else np.asarray(t_grid, dtype=float).ravel()
    if t.size == 0 or np.any(t <= 0.0) or np.any(t > 1.0):
        raise DomainError("t grid must be nonempty and inside (0, 1]")
    vals = np.empty(t.size)
    for i, ti in enumerate(t):
        avg = _mean(phi, ti, 1.0, cfg, force_quadrature)
        inv = _mean(phi, ti, -1.0 / (q - 1.0), cfg, force_quadrature)
        vals[i] = avg * inv ** (q - 1.0)
    return MuckenhouptProfile(t=t, values=vals)


def muckenhoupt_constant(
    phi: WeightFamily,
    q_exp: float,
    t_grid: ArrayLike | None = None,
    cfg: QuadratureConfig | None = None,
) -> tuple[float, MuckenhouptProfile]:
    prof = muckenhoupt_profile(phi, q_exp, t_grid, cfg)
    return prof.constant, prof


@lru_cache(maxsize=512)
def _grid_constant(phi: WeightFamily, q: float, cfg: QuadratureConfig) -> float:
    return muckenhoupt_profile(phi, q, None, cfg).constant


# ---------------------------------------------------------------------------
# g_y monotonicity
# ---------------------------------------------------------------------------


def gy_function(x: ArrayLike, y: float, p: float, q: float) -> NDArray[np.float64]:
    """``((q-1)/(q-p)) y x^((q-p)/(p-1)) - x^((q-1)/(p-1))``."""
    x = np.asarray(x, dtype=float)
    return (q - 1.0) / (q - p) * y * x ** ((q - p) / (p - 1.0)) - x ** ((q - 1.0) / (p - 1.0))


def check_gy_monotone(y: float, p: float, q: float, x_grid: ArrayLike) -> bool:
    """True when ``g_y`` is non-increasing along the sorted grid ``x >= y``."""
    y, p, q = float(y), float(p), float(q)
    if not (y > 0 and q > p > 1):
        raise DomainError(f"need y > 0 and q > p > 1, got y={y}, p={p}, q={q}")
    x = np.asarray(x_grid, dtype=float).ravel()
    if x.size == 0 or np.any(np.diff(x) < 0) or x[0] < y:
        raise DomainError("x grid must be sorted with min >= y")
    g = gy_function(x, y, p, q)
    slack = 1e-12 * np.maximum(np.abs(g[1:]), np.abs(g[:-1]))
    return bool(np.all(np.diff(g) <= slack))


# ---------------------------------------------------------------------------
# Theorem 3, corollary, sharpness at t = 1
# ---------------------------------------------------------------------------


def _bound_factor(p: float, params: MuckenhouptParams, tc: TheoremConstants) -> float:
    q = params.q_exp
    return params.c * (q / p) * ((p - 1.0) / (q - 1.0)) ** 2 / tc.Kprime


def _prepare(
    phi: WeightFamily, p: float, params: MuckenhouptParams, t: float, tol: ToleranceConfig
) -> tuple[float, float, TheoremConstants]:
    p, t = float(p), float(t)
    if not 0.0 < t <= 1.0:
        raise DomainError(f"need t in (0, 1], got t={t}")
    tc = theorem_constants(p, params)
    _check_phi(phi)
    m = _grid_constant(phi, params.q_exp, tol.quadrature)
    if m > params.M * (1.0 + tol.for_path(False)):
        raise DomainError(f"weight has Muckenhoupt constant {m:.6g} > M = {params.M}")
    return p, t, tc


def check_theorem_3(
    phi: WeightFamily,
    p: float,
    params: MuckenhouptParams,
    t: float = 1.0,
    tol: ToleranceConfig | None = None,
) -> InequalityReport:
    """``(1/t) int_0^t F^(-1/(p-1)) <= F(t)^(-1/(p-1)) c (q/p) ((p-1)/(q-1))^2 / K'``.

    ``F`` is the running mean of ``phi``.  Extras trace the intermediate steps:
    ``J = (1/t) int_0^t phi^(-1/(q-1)) F^(-1/(p-1)+1/(q-1))`` with ``K J`` bounded
    by ``c (q/p) ((p-1)/(q-1))^2 F(t)^(-1/(p-1))``, ``A1 = ((q-1)/(q-p)) t J``
    for ``p < q``, and the averaged Muckenhoupt bound on ``phi^(-1/(q-1))``.
    """
    tol = tol or ToleranceConfig()
    p, t, tc = _prepare(phi, p, params, t, tol)
    q, cfg = params.q_exp, tol.quadrature
    avg = HardyAverage(phi, UNIT)
    b = 1.0 / (p - 1.0)
    integral, closed1 = _hardy_integral(avg, -b, 0.0, t, cfg)
    lhs = integral / t
    mean_t, closed2 = _integrate(phi, Interval(0.0, t), 1.0, cfg)
    mean_t /= t
    rhs = mean_t**-b * _bound_factor(p, params, tc)

    j_int, closed3 = _hardy_integral(avg, -b + 1.0 / (q - 1.0), -1.0 / (q - 1.0), t, cfg)
    J = j_int / t
    inv_mean = _mean(phi, t, -1.0 / (q - 1.0), cfg)
    extras: dict[str, Any] = {
        "K": tc.K,
        "Kprime": tc.Kprime,
        "J": J,
        "K_J": tc.K * J,
        "K_J_bound": params.c * (q / p) * ((p - 1.0) / (q - 1.0)) ** 2 * mean_t**-b,
        "A1": (q - 1.0) / (q - p) * t * J if p < q else None,
        "holder_lhs": inv_mean ** ((q - 1.0) * b),
        "holder_rhs": params.M**b * mean_t**-b,
    }
    closed = closed1 and closed2 and closed3
    return make_report(
        "theorem_3",
        lhs,
        rhs,
        tol.for_path(closed),
        {"weight": phi.to_dict(), "p": p, "t": t, **params.to_dict()},
        extras,
    )


def check_corollary(
    phi: WeightFamily,
    p: float,
    params: MuckenhouptParams,
    t: float = 1.0,
    tol: ToleranceConfig | None = None,
) -> InequalityReport:
    """``(1/t int phi^(-1/(p-1)))^(p-1) (1/t int phi) <= [c (q/p) ((p-1)/(q-1))^2 / K']^(p-1)``."""
    tol = tol or ToleranceConfig()
    p, t, tc = _prepare(phi, p, params, t, tol)
    cfg = tol.quadrature
    iv = Interval(0.0, t)
    inv, c1 = _integrate(phi, iv, -1.0 / (p - 1.0), cfg)
    avg, c2 = _integrate(phi, iv, 1.0, cfg)
    lhs = (inv / t) ** (p - 1.0) * (avg / t)
    rhs = _bound_factor(p, params, tc) ** (p - 1.0)
    return make_report(
        "corollary",
        lhs,
        rhs,
        tol.for_path(c1 and c2),
        {"weight": phi.to_dict(), "p": p, "t": t, **params.to_dict()},
        {"K": tc.K, "Kprime": tc.Kprime},
    )


def sharpness_t1_sweep(
    p: float, q_exp: float, a_values: ArrayLike, tol: float = 1e-3, strict: bool = True
) -> SharpnessSweep:
    """Ratio of the two sides of Theorem 3 at ``t = 1`` along ``phi_a = t^a``.

    For each ``a`` the weight's own constant ``c_a = M(q,a)^(1/(q-1))`` is used,
    and ``R(a) = K'(p,q,c_a) (p-1)/((p-1)-a) / (c_a (q/p) ((p-1)/(q-1))^2)``
    should approach 1 as ``a -> (p-1)^-``.
    """
    p, q = float(p), float(q_exp)
    a = np.asarray(a_values, dtype=float).ravel()
    if a.size == 0:
        raise DomainError("a schedule must be nonempty")
    if np.any(np.diff(a) <= 0):
        raise DomainError("a schedule must increase strictly toward p-1")
    if not q >= p > 1:
        raise DomainError(f"need 1 < p <= q, got p={p}, q={q}")
    lhs = np.empty(a.size)
    rhs = np.empty(a.size)
    for i, ai in enumerate(a):
        if not 0.0 < ai < min(p - 1.0, q - 1.0):
            raise DomainError(f"need 0 < a < min(p-1, q-1), got a={ai}")
        M = M_closed_form(q, ai)
        params = MuckenhouptParams(q, max(M, 1.0))
        c_a = c_closed_form(q, ai)
        tc = _raw_constants(p, q, c_a)
        if not (p > params.p0 and tc.Kprime > 0):
            raise DomainError(f"p={p} is not above p0={params.p0} for a={ai}")
        lhs[i] = tc.Kprime * (p - 1.0) / ((p - 1.0) - ai)
        rhs[i] = c_a * (q / p) * ((p - 1.0) / (q - 1.0)) ** 2
    sweep = SharpnessSweep(
        label="theorem3_t1",
        parameters=a,
        observed=lhs / rhs,
        limit=1.0,
        tolerance=tol,
        lhs=lhs,
        rhs=rhs,
        extras={"p": p, "q": q},
    )
    if strict and not sweep.converged:
        raise ConvergenceError(f"R(a) ended {sweep.final_deviation:.3e} from 1, tolerance {tol}")
    return sweep
