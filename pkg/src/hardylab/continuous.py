"""Continuous Hardy-type inequalities on an interval.

The Hardy average ``F(t) = (1/(t - lo)) * integral_lo^t f`` is always
evaluated from the weight's exact antiderivative.  Integrals of ``F**alpha *
f**beta`` use closed forms for constants and for power laws anchored at 0;
everything else goes through the graded quadrature in :mod:`.quadrature`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .core import (
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
    ToleranceConfig,
    WeightFamily,
    make_report,
)
from .discrete import check_theorem_2
from .quadrature import graded_integral

__all__ = [
    "HardyAverage",
    "BridgeResult",
    "integrate",
    "hardy_average",
    "hardy_integral",
    "check_hardy_continuous",
    "check_theorem_D",
    "check_theorem_E",
    "check_theorem_1",
    "check_lemmaA_identity",
    "riemann_bridge",
]


def _knots(w: WeightFamily, lo: float, hi: float) -> list[float]:
    return [b - lo for b in w.breakpoints if lo < b < hi]


def _power_closed(k: float, e: float, power: float, lo: float, hi: float) -> float:
    """``integral_lo^hi (k t^e)^power dt`` for ``lo >= 0``."""
    s = e * power
    if lo == 0.0 and s <= -1.0:
        raise DomainError(f"t^{s:g} is not integrable at 0 (need exponent*power > -1)")
    if s == -1.0:
        return k**power * math.log(hi / lo)
    return k**power * (hi ** (s + 1.0) - lo ** (s + 1.0)) / (s + 1.0)


def _integrate(
    w: WeightFamily, iv: Interval, power: float, cfg: QuadratureConfig, force_quadrature: bool = False
) -> tuple[float, bool]:
    w.check_interval(iv)
    power = float(power)
    if not force_quadrature:
        if isinstance(w, Constant):
            return w.level**power * iv.length, True
        pl = w.power_law()
        if pl is not None:
            return _power_closed(pl[0], pl[1], power, iv.lo, iv.hi), True
        if power == 1.0:
            return w.integral(iv.lo, iv.hi), True
        if isinstance(w, Step):
            edges = np.concatenate(([iv.lo], [b for b in w.breakpoints if iv.lo < b < iv.hi], [iv.hi]))
            mids = 0.5 * (edges[1:] + edges[:-1])
            return math.fsum((w.value(mids) ** power * np.diff(edges)).tolist()), True
    pl = w.power_law()
    if pl is not None and iv.lo == 0.0 and pl[1] * power <= -1.0:
        raise DomainError("weight power is not integrable at the left endpoint")
    lo = iv.lo
    res = graded_integral(lambda s: w.value(lo + s) ** power, iv.length, cfg, _knots(w, lo, iv.hi))
    return res.value, False


def integrate(
    w: WeightFamily,
    iv: Interval = UNIT,
    power: float = 1.0,
    cfg: QuadratureConfig | None = None,
    force_quadrature: bool = False,
) -> float:
    """``integral over iv of w(t)**power``, closed form whenever the family admits one."""
    return _integrate(w, iv, power, cfg or QuadratureConfig(), force_quadrature)[0]


@dataclass(frozen=True)
class HardyAverage:
    """``F(t) = (1/(t - lo)) integral_lo^t f`` for ``t`` in ``(lo, hi]``."""

    source: WeightFamily
    interval: Interval

    def __post_init__(self) -> None:
        self.source.check_interval(self.interval)

    @property
    def closed_form(self) -> tuple[float, float] | None:
        """``(K, e)`` with ``F(t) = K (t - lo)**e`` when such a form exists."""
        w = self.source
        if isinstance(w, Constant):
            return (w.level, 0.0)
        pl = w.power_law()
        if pl is not None and self.interval.lo == 0.0:
            k, e = pl
            return (k / (e + 1.0), e)
        return None

    def at_offset(self, s: ArrayLike) -> NDArray[np.float64]:
        s = np.asarray(s, dtype=float)
        return self.source.integral_from(self.interval.lo, s) / s

    def __call__(self, t: ArrayLike) -> NDArray[np.float64]:
        t = np.asarray(t, dtype=float)
        if np.any(t <= self.interval.lo) or np.any(t > self.interval.hi):
            raise DomainError("F is defined on (lo, hi] only")
        return self.at_offset(t - self.interval.lo)


def hardy_average(w: WeightFamily, iv: Interval = UNIT, cfg: QuadratureConfig | None = None) -> HardyAverage:
    return HardyAverage(w, iv)


def _hardy_integral(
    avg: HardyAverage,
    alpha: float,
    beta: float,
    upper: float | None,
    cfg: QuadratureConfig,
    force_quadrature: bool = False,
) -> tuple[float, bool]:
    w, lo = avg.source, avg.interval.lo
    hi = avg.interval.hi if upper is None else float(upper)
    if not lo < hi <= avg.interval.hi:
        raise DomainError(f"upper limit {hi} outside ({lo}, {avg.interval.hi}]")
    cf = avg.closed_form
    if cf is not None:
        K, e = cf
        k = K * (e + 1.0)
        s = e * (alpha + beta)
        if lo == 0.0 and s <= -1.0:
            raise DomainError(f"F^{alpha:g} f^{beta:g} ~ t^{s:g} is not integrable at 0")
        if not force_quadrature:
            if isinstance(w, Constant):
                return w.level ** (alpha + beta) * (hi - lo), True
            return K**alpha * k**beta * hi ** (s + 1.0) / (s + 1.0), True

    def g(s: NDArray[np.float64]) -> NDArray[np.float64]:
        out = avg.at_offset(s) ** alpha
        if beta != 0.0:
            out = out * w.value(lo + s) ** beta
        return out

    res = graded_integral(g, hi - lo, cfg, _knots(w, lo, hi))
    return res.value, False


def hardy_integral(
    avg: HardyAverage,
    alpha: float,
    beta: float = 0.0,
    upper: float | None = None,
    cfg: QuadratureConfig | None = None,
    force_quadrature: bool = False,
) -> float:
    """``integral_lo^upper F(t)**alpha * f(t)**beta dt``."""
    return _hardy_integral(avg, alpha, beta, upper, cfg or QuadratureConfig(), force_quadrature)[0]


def _params(w: WeightFamily, iv: Interval, **extra) -> dict:
    return {"weight": w.to_dict(), "interval": [iv.lo, iv.hi], **extra}


def check_hardy_continuous(
    w: WeightFamily, p: float, iv: Interval = UNIT, tol: ToleranceConfig | None = None
) -> InequalityReport:
    """``integral F^p <= (p/(p-1))^p integral f^p`` for ``p > 1``."""
    p = float(p)
    if not p > 1:
        raise DomainError(f"need p > 1, got p={p}")
    tol = tol or ToleranceConfig()
    avg = HardyAverage(w, iv)
    lhs, c1 = _hardy_integral(avg, p, 0.0, None, tol.quadrature)
    f_p, c2 = _integrate(w, iv, p, tol.quadrature)
    rhs = (p / (p - 1.0)) ** p * f_p
    return make_report("hardy_continuous", lhs, rhs, tol.for_path(c1 and c2), _params(w, iv, p=p))


def check_theorem_D(
    w: WeightFamily, iv: Interval, p: float, tol: ToleranceConfig | None = None
) -> InequalityReport:
    """``integral F^-p <= ((p+1)/p)^p integral f^-p`` for ``p > 0``."""
    p = float(p)
    if not p > 0:
        raise DomainError(f"need p > 0, got p={p}")
    tol = tol or ToleranceConfig()
    avg = HardyAverage(w, iv)
    lhs, c1 = _hardy_integral(avg, -p, 0.0, None, tol.quadrature)
    f_p, c2 = _integrate(w, iv, -p, tol.quadrature)
    rhs = ((p + 1.0) / p) ** p * f_p
    return make_report("theorem_D", lhs, rhs, tol.for_path(c1 and c2), _params(w, iv, p=p))


def _negative_sides(
    w: WeightFamily, iv: Interval, e: Exponents, tol: ToleranceConfig, force_quadrature: bool = False
) -> tuple[float, float, bool]:
    avg = HardyAverage(w, iv)
    lhs, c1 = _hardy_integral(avg, -e.p, 0.0, None, tol.quadrature, force_quadrature)
    mixed, c2 = _hardy_integral(avg, e.q - e.p, -e.q, None, tol.quadrature, force_quadrature)
    return lhs, e.constant * mixed, c1 and c2


def check_theorem_E(
    w: WeightFamily, iv: Interval, e: Exponents, tol: ToleranceConfig | None = None
) -> InequalityReport:
    """``integral F^-p <= ((p+1)/p)^q integral F^(q-p) f^-q``."""
    tol = tol or ToleranceConfig()
    lhs, rhs, closed = _negative_sides(w, iv, e, tol)
    return make_report("theorem_E", lhs, rhs, tol.for_path(closed), _params(w, iv, p=e.p, q=e.q))


def check_theorem_1(
    w: WeightFamily, iv: Interval, e: Exponents, tol: ToleranceConfig | None = None
) -> InequalityReport:
    """Theorem E sharpened by ``- q/(p+1) (b - a) ell^-p`` where ``ell`` is the mean of ``w``."""
    tol = tol or ToleranceConfig()
    lhs, first, closed = _negative_sides(w, iv, e, tol)
    ell = w.integral(iv.lo, iv.hi) / iv.length
    correction = e.q / (e.p + 1.0) * iv.length * ell**-e.p
    return make_report(
        "theorem_1",
        lhs,
        first - correction,
        tol.for_path(closed),
        _params(w, iv, p=e.p, q=e.q),
        {"ell": float(ell), "correction": float(correction), "first_term": float(first)},
    )


def _t_psi_derivative(psi: WeightFamily) -> Callable[[NDArray[np.float64]], NDArray[np.float64]]:
    """Analytic ``d/dt [t psi(t)]`` for the closed-form families."""
    if isinstance(psi, ExtremalPhi):
        a, eps = psi.a_param, psi.epsilon
        return lambda t: (a + 1.0) * t**a + eps
    if isinstance(psi, (Constant, Power, ExtremalG)):
        k, e = psi.power_law()
        return lambda t: k * (e + 1.0) * t**e
    raise DomainError(f"Lemma A identity needs a closed-form psi, got {psi.kind}")


def check_lemmaA_identity(
    psi: WeightFamily, a_exp: float, u: float, tol: ToleranceConfig | None = None
) -> InequalityReport:
    """Integration-by-parts identity
    ``a int_0^u psi^(a-1) [t psi]' = u psi(u)^a + (a-1) int_0^u psi^a``.

    The left side is integrated numerically from the analytic derivative,
    the right side uses closed-form antiderivatives.  ``satisfied`` means the
    two sides agree to ``rel_tol`` (default 1e-8).
    """
    a_exp, u = float(a_exp), float(u)
    if not a_exp > 1:
        raise DomainError(f"need a > 1, got a={a_exp}")
    if not 0.0 < u <= 1.0:
        raise DomainError(f"need u in (0, 1], got u={u}")
    deriv = _t_psi_derivative(psi)
    pl = psi.power_law()
    if pl is not None and pl[1] * a_exp + 1.0 <= 0.0:
        raise DomainError("t * psi(t)^a does not vanish at 0")
    tol = tol or ToleranceConfig()
    rel_tol = tol.rel_tol if tol.rel_tol is not None else 1e-8
    iv = Interval(0.0, u)

    res = graded_integral(lambda t: psi.value(t) ** (a_exp - 1.0) * deriv(t), u, tol.quadrature)
    lhs = a_exp * res.value
    rhs = u * float(psi.value(u)) ** a_exp + (a_exp - 1.0) * integrate(psi, iv, a_exp, tol.quadrature)
    rep = make_report("lemmaA", lhs, rhs, rel_tol, {"psi": psi.to_dict(), "a": a_exp, "u": u})
    residual = abs(rhs - lhs)
    return InequalityReport(
        **{**rep.__dict__, "satisfied": abs(rep.relative_margin) <= rel_tol, "extras": {"residual": float(residual)}}
    )


@dataclass(frozen=True)
class BridgeResult:
    """Dyadic discretisation of Theorem 1 on [0, 1] at level ``k``."""

    k: int
    lhs: float
    rhs: float
    cells: NDArray[np.float64]

    @property
    def mean(self) -> float:
        return math.fsum(self.cells.tolist()) / self.cells.size


def riemann_bridge(w: WeightFamily, k: int, e: Exponents) -> BridgeResult:
    """Cell averages ``a_i = 2^k int_{(i-1)/2^k}^{i/2^k} f`` fed to the discrete inequality.

    ``lhs = 2^-k sum (A_n/n)^-p`` is a right-endpoint Riemann sum of
    ``integral F^-p``; ``rhs`` is the discrete right side rescaled by
    ``2^-k`` whose correction equals ``q/(p+1) ell^-p`` exactly.
    """
    k = int(k)
    if k < 0:
        raise DomainError(f"need k >= 0, got k={k}")
    w.check_interval(UNIT)
    n = 2**k
    edges = np.arange(n + 1, dtype=float) / n
    prim = w.primitive(edges)
    if not np.all(np.isfinite(prim)):
        raise DomainError("weight antiderivative is not finite on [0, 1]")
    cells = np.diff(prim) * n
    rep = check_theorem_2(SequenceData.unweighted(cells), e)
    return BridgeResult(k=k, lhs=rep.lhs / n, rhs=rep.rhs / n, cells=cells)
