"""Sharpness of the negative-exponent Hardy inequality with mean constraint.

Along the extremal family ``g_a(t) = ell (1-a) t^-a`` the slack

    L_a = int F^-p - ((p+1)/p)^q int F^(q-p) g_a^-q

has the closed form ``ell^-p [1 - (1-a)^-q ((p+1)/p)^q] / (1 + a p)`` and tends
to ``-q/(p+1) ell^-p`` as ``a -> -1/p``, so the correction constant cannot be
enlarged.  The auxiliary ``G`` and ``H`` functions carry the infimum argument
that produces the correction term in the discrete proof.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .continuous import _negative_sides, check_theorem_D
from .core import UNIT, ConvergenceError, DomainError, Exponents, ExtremalG, ToleranceConfig

__all__ = [
    "SharpnessSweep",
    "L_a_closed_form",
    "L_a_quadrature",
    "L_a_limit",
    "sharpness_sweep_theorem1",
    "ratio_sweep_theorem_D",
    "G_function",
    "G_derivative",
    "G_limit",
    "H_function",
    "H_derivative",
]


@dataclass(frozen=True)
class SharpnessSweep:
    """A parameter sweep toward a critical endpoint and the limit it should reach."""

    label: str
    parameters: NDArray[np.float64]
    observed: NDArray[np.float64]
    limit: float
    tolerance: float
    lhs: NDArray[np.float64]
    rhs: NDArray[np.float64]
    extras: dict[str, Any] = field(default_factory=dict)

    @property
    def deviations(self) -> NDArray[np.float64]:
        return np.abs(self.observed - self.limit)

    @property
    def final_deviation(self) -> float:
        return float(self.deviations[-1])

    @property
    def converged(self) -> bool:
        return self.final_deviation <= self.tolerance

    def rows(self) -> list[dict[str, float]]:
        return [
            {
                "parameter": float(a),
                "lhs": float(lo),
                "rhs": float(hi),
                "value": float(v),
                "limit": float(self.limit),
                "deviation": float(d),
            }
            for a, lo, hi, v, d in zip(self.parameters, self.lhs, self.rhs, self.observed, self.deviations)
        ]


def _check_a(a_param: float, p: float) -> float:
    a = float(a_param)
    if not -1.0 / p < a < 0.0:
        raise DomainError(f"need a in (-1/p, 0) = ({-1.0 / p}, 0), got a={a}")
    return a


def L_a_closed_form(a_param: float, e: Exponents, ell: float = 1.0) -> float:
    """Closed-form slack of Theorem E on ``g_a``; stable as ``a -> -1/p``."""
    p, q = e.p, e.q
    a = _check_a(a_param, p)
    d = 1.0 + a * p
    # (p+1)/(p(1-a)) = 1 + d/(p(1-a)), so the bracket is -expm1(q log1p(.)).
    bracket = -math.expm1(q * math.log1p(d / (p * (1.0 - a))))
    return ell**-p * bracket / d


def L_a_limit(e: Exponents, ell: float = 1.0) -> float:
    return -e.q / (e.p + 1.0) * ell**-e.p


def _g_sides(a: float, e: Exponents, ell: float, quadrature: bool, tol: ToleranceConfig) -> tuple[float, float]:
    lhs, rhs, _ = _negative_sides(ExtremalG(a, ell), UNIT, e, tol, force_quadrature=quadrature)
    return lhs, rhs


def L_a_quadrature(a_param: float, e: Exponents, ell: float = 1.0, tol: ToleranceConfig | None = None) -> float:
    """The same slack computed by graded quadrature of ``F`` built from ``g_a``."""
    a = _check_a(a_param, e.p)
    lhs, rhs = _g_sides(a, e, ell, True, tol or ToleranceConfig())
    return lhs - rhs


def sharpness_sweep_theorem1(
    e: Exponents,
    ell: float = 1.0,
    steps: int = 12,
    delta0: float | None = None,
    tol: float = 1e-3,
    cross_check: bool = True,
    cross_tol: float = 1e-6,
    strict: bool = True,
) -> SharpnessSweep:
    """Evaluate ``L_a`` at ``a_j = -1/p + delta0 2^-j`` and compare with its limit.

    With ``cross_check`` every point is recomputed by quadrature and must agree
    with the closed form to ``cross_tol`` relative.  With ``strict`` a final
    deviation above ``tol`` or a failed cross-check raises ConvergenceError;
    otherwise the outcome is left in ``converged`` and ``extras``.
    """
    if steps < 3:
        raise DomainError(f"need at least 3 steps, got {steps}")
    p = e.p
    delta0 = 0.5 / p if delta0 is None else float(delta0)
    if not 0.0 < delta0 < 1.0 / p:
        raise DomainError(f"delta0 must lie in (0, 1/p), got {delta0}")
    a_vals = -1.0 / p + delta0 * 2.0 ** -np.arange(steps, dtype=float)
    lhs = np.empty(steps)
    rhs = np.empty(steps)
    obs = np.empty(steps)
    quad = np.full(steps, np.nan)
    cfg = ToleranceConfig()
    for j, a in enumerate(a_vals):
        lhs[j], rhs[j] = _g_sides(a, e, ell, False, cfg)
        obs[j] = L_a_closed_form(a, e, ell)
        if cross_check:
            quad[j] = L_a_quadrature(a, e, ell, cfg)
    sweep = SharpnessSweep(
        label="theorem1",
        parameters=a_vals,
        observed=obs,
        limit=L_a_limit(e, ell),
        tolerance=tol,
        lhs=lhs,
        rhs=rhs,
        extras={"quadrature": quad, "p": p, "q": e.q, "ell": ell},
    )
    if cross_check:
        worst = float(np.max(np.abs(quad - obs) / np.abs(obs)))
        sweep.extras["cross_check_rel"] = worst
        sweep.extras["cross_check_ok"] = worst <= cross_tol
        if strict and worst > cross_tol:
            raise ConvergenceError(f"quadrature disagrees with closed-form L_a by {worst:.3e} relative")
    if strict and not sweep.converged:
        raise ConvergenceError(
            f"L_a ended {sweep.final_deviation:.3e} from its limit {sweep.limit}, tolerance {tol}"
        )
    return sweep


def ratio_sweep_theorem_D(
    p: float,
    ell: float = 1.0,
    steps: int = 12,
    delta0: float | None = None,
    tol: float = 1e-3,
    strict: bool = True,
) -> SharpnessSweep:
    """Ratio of the two sides of Theorem D on ``g_a`` as ``a -> -1/p``.

    The ratio is ``((1-a) p/(p+1))^p``, which rises to 1 at the endpoint.
    Needs ``p >= 1`` so that ``-1/p`` is inside the family's range ``(-1, 0)``.
    """
    p = float(p)
    if not p >= 1.0:
        raise DomainError(f"the g_a family reaches the Theorem D endpoint only for p >= 1, got p={p}")
    if steps < 3:
        raise DomainError(f"need at least 3 steps, got {steps}")
    delta0 = 0.5 / p if delta0 is None else float(delta0)
    if not 0.0 < delta0 < 1.0 / p:
        raise DomainError(f"delta0 must lie in (0, 1/p), got {delta0}")
    a_vals = -1.0 / p + delta0 * 2.0 ** -np.arange(steps, dtype=float)
    lhs = np.empty(steps)
    rhs = np.empty(steps)
    for j, a in enumerate(a_vals):
        rep = check_theorem_D(ExtremalG(a, ell), UNIT, p)
        lhs[j], rhs[j] = rep.lhs, rep.rhs
    sweep = SharpnessSweep(
        label="theoremD",
        parameters=a_vals,
        observed=lhs / rhs,
        limit=1.0,
        tolerance=tol,
        lhs=lhs,
        rhs=rhs,
        extras={"p": p, "ell": ell},
    )
    if strict and not sweep.converged:
        raise ConvergenceError(f"ratio ended {sweep.final_deviation:.3e} from 1, tolerance {tol}")
    return sweep


def _shifted(c: float, e: Exponents) -> float:
    if not c > 0:
        raise DomainError(f"need c > 0, got c={c}")
    return c / (e.p + 1.0)


def G_function(x: ArrayLike, c: float, e: Exponents) -> NDArray[np.float64] | float:
    """``G(x) = x - (x - c/(p+1))^(q/p) x^(1-q/p)`` for ``x > c/(p+1)``."""
    cp = _shifted(c, e)
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= cp):
        raise DomainError(f"G is defined for x > c/(p+1) = {cp}")
    if e.p == e.q:
        out = np.full_like(xa, cp)
    else:
        out = -xa * np.expm1(e.ratio * np.log1p(-cp / xa))
    return float(out) if out.ndim == 0 else out


def G_derivative(x: ArrayLike, c: float, e: Exponents) -> NDArray[np.float64] | float:
    """Analytic ``G'(x) = H(1 - c/((p+1) x))``."""
    cp = _shifted(c, e)
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= cp):
        raise DomainError(f"G is defined for x > c/(p+1) = {cp}")
    return H_function(1.0 - cp / xa, e)


def G_limit(c: float, e: Exponents) -> float:
    """``lim_{x -> inf} G(x) = q c / (p (p+1))``."""
    _shifted(c, e)
    return e.q * c / (e.p * (e.p + 1.0))


def H_function(t: ArrayLike, e: Exponents) -> NDArray[np.float64] | float:
    """``H(t) = 1 - (1 - q/p) t^(q/p) - (q/p) t^(q/p - 1)`` on ``(0, 1]``; ``H(1) = 0``."""
    ta = np.asarray(t, dtype=float)
    if np.any(ta <= 0.0) or np.any(ta > 1.0):
        raise DomainError("H is defined on (0, 1]")
    r = e.ratio
    if r == 1.0:
        out = np.zeros_like(ta)
    else:
        # Factored so that t = 1 gives exactly 0.
        out = 1.0 - ta ** (r - 1.0) * ((1.0 - r) * ta + r)
    return float(out) if out.ndim == 0 else out


def H_derivative(t: ArrayLike, e: Exponents) -> NDArray[np.float64] | float:
    """``H'(t) = -t^(q/p - 2) (1 - q/p) (q/p) (t - 1)``."""
    ta = np.asarray(t, dtype=float)
    r = e.ratio
    out = -(ta ** (r - 2.0)) * (1.0 - r) * r * (ta - 1.0)
    return float(out) if out.ndim == 0 else out
