"""Shared domain types: exponents, intervals, weight families, sequences, reports.

Weight families are small frozen dataclasses that know how to evaluate
themselves, their antiderivative and (when they have one) their power-law
form ``k * t**e``.  Everything downstream (quadrature, closed forms, the
Muckenhoupt averages) is written against that narrow surface.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

__all__ = [
    "DomainError",
    "ConvergenceError",
    "Exponents",
    "Interval",
    "Constant",
    "Power",
    "ExtremalG",
    "ExtremalPhi",
    "Step",
    "Tabulated",
    "WeightFamily",
    "SequenceData",
    "PrefixState",
    "InequalityReport",
    "QuadratureConfig",
    "ToleranceConfig",
    "CLOSED_FORM_REL_TOL",
    "QUADRATURE_REL_TOL",
    "validate_exponents",
    "evaluate_weight",
    "weight_from_dict",
    "make_report",
]

CLOSED_FORM_REL_TOL = 1e-9
QUADRATURE_REL_TOL = 1e-6


class DomainError(ValueError):
    """Input outside the region where the inequality or formula is defined."""


class ConvergenceError(RuntimeError):
    """A refinement or limiting procedure did not reach its tolerance."""


# ---------------------------------------------------------------------------
# Exponents and intervals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Exponents:
    p: float
    q: float

    def __post_init__(self) -> None:
        p, q = float(self.p), float(self.q)
        if not (math.isfinite(p) and math.isfinite(q)):
            raise DomainError(f"exponents must be finite, got p={p}, q={q}")
        if q <= 0:
            raise DomainError(f"need q > 0, got q={q}")
        if p < q:
            raise DomainError(f"need p >= q, got p={p} < q={q}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @property
    def ratio(self) -> float:
        """q/p, the Hölder exponent used throughout the discrete proof."""
        return self.q / self.p

    @property
    def constant(self) -> float:
        """((p+1)/p)**q, the leading constant of the negative-exponent inequalities."""
        return ((self.p + 1.0) / self.p) ** self.q


def validate_exponents(p: float, q: float) -> Exponents:
    """Return ``Exponents(p, q)``; raise DomainError unless p >= q > 0."""
    return Exponents(p, q)


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self) -> None:
        lo, hi = float(self.lo), float(self.hi)
        if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
            raise DomainError(f"interval needs finite lo < hi, got [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def length(self) -> float:
        return self.hi - self.lo


UNIT = Interval(0.0, 1.0)


# ---------------------------------------------------------------------------
# Weight families
# ---------------------------------------------------------------------------


def _as_array(t: ArrayLike) -> NDArray[np.float64]:
    return np.asarray(t, dtype=float)


class _Weight:
    """Common surface of the weight families (not instantiated directly)."""

    kind: str = ""

    # Support of the family: values are positive on (domain_lo, domain_hi),
    # with the endpoints included when the matching flag is set.
    domain_lo: float = -math.inf
    domain_hi: float = math.inf
    closed_lo: bool = True

    def value(self, t: ArrayLike) -> NDArray[np.float64]:
        raise NotImplementedError

    def primitive(self, t: ArrayLike) -> NDArray[np.float64]:
        """An antiderivative of the weight (fixed but unspecified origin)."""
        raise NotImplementedError

    def power_law(self) -> tuple[float, float] | None:
        """``(k, e)`` when the weight is exactly ``k * t**e`` on its domain."""
        return None

    @property
    def breakpoints(self) -> tuple[float, ...]:
        """Points where the weight or its derivative may jump."""
        return ()

    @property
    def is_nondecreasing(self) -> bool:
        return False

    def contains(self, t: float) -> bool:
        if self.closed_lo:
            ok_lo = t >= self.domain_lo
        else:
            ok_lo = t > self.domain_lo
        return ok_lo and t <= self.domain_hi

    def check_interval(self, iv: Interval) -> None:
        """Raise DomainError unless the open interval lies inside the domain."""
        if iv.lo < self.domain_lo or iv.hi > self.domain_hi:
            raise DomainError(
                f"{self.kind} weight is defined on [{self.domain_lo}, {self.domain_hi}],"
                f" interval [{iv.lo}, {iv.hi}] leaves it"
            )

    def integral_from(self, lo: float, s: ArrayLike) -> NDArray[np.float64]:
        """Exact ``integral of the weight over [lo, lo + s]``, vectorized in ``s``."""
        s = _as_array(s)
        return self.primitive(lo + s) - self.primitive(lo)

    def integral(self, lo: float, hi: float) -> float:
        """Exact integral of the weight over [lo, hi]."""
        prim = self.primitive(np.array([lo, hi]))
        return float(prim[1] - prim[0])

    def to_dict(self) -> dict[str, Any]:
        raise NotImplementedError


def _power_integral_from(k: float, e: float, lo: float, s: NDArray[np.float64]) -> NDArray[np.float64]:
    # Stable form of k * ((lo + s)**(e+1) - lo**(e+1)) / (e+1).
    e1 = e + 1.0
    if lo == 0.0:
        return k * s**e1 / e1
    return k * lo**e1 * np.expm1(e1 * np.log1p(s / lo)) / e1


@dataclass(frozen=True)
class Constant(_Weight):
    level: float

    kind = "const"

    def __post_init__(self) -> None:
        if not (self.level > 0 and math.isfinite(self.level)):
            raise DomainError(f"constant level must be positive, got {self.level}")

    def value(self, t):
        return np.full_like(_as_array(t), self.level)

    def primitive(self, t):
        return self.level * _as_array(t)

    def integral_from(self, lo, s):
        return self.level * _as_array(s)

    def power_law(self):
        return (float(self.level), 0.0)

    @property
    def is_nondecreasing(self) -> bool:
        return True

    def to_dict(self):
        return {"kind": self.kind, "level": self.level}


@dataclass(frozen=True)
class Power(_Weight):
    """``coeff * t**exponent`` on t > 0."""

    coeff: float
    exponent: float

    kind = "pow"
    domain_lo = 0.0
    closed_lo = False

    def __post_init__(self) -> None:
        if not self.coeff > 0:
            raise DomainError(f"power coefficient must be positive, got {self.coeff}")
        if not self.exponent > -1:
            raise DomainError(f"power exponent must exceed -1, got {self.exponent}")

    def value(self, t):
        return self.coeff * _as_array(t) ** self.exponent

    def primitive(self, t):
        e1 = self.exponent + 1.0
        return self.coeff * _as_array(t) ** e1 / e1

    def integral_from(self, lo, s):
        return _power_integral_from(self.coeff, self.exponent, lo, _as_array(s))

    def power_law(self):
        return (float(self.coeff), float(self.exponent))

    @property
    def is_nondecreasing(self) -> bool:
        return self.exponent >= 0

    def to_dict(self):
        return {"kind": self.kind, "coeff": self.coeff, "exponent": self.exponent}


@dataclass(frozen=True)
class ExtremalG(_Weight):
    """The family ``ell * (1 - a) * t**(-a)`` on (0, 1] with mean ``ell``.

    Sharpness of the negative-exponent Hardy inequality needs ``a`` in
    ``(-1/p, 0)``; only ``a`` in ``(-1, 0)`` is enforced here because ``p`` is
    not known yet.  Integrability is re-checked when an integral is taken.
    """

    a_param: float
    ell: float = 1.0

    kind = "extg"
    domain_lo = 0.0
    domain_hi = 1.0
    closed_lo = False

    def __post_init__(self) -> None:
        if not -1.0 < self.a_param < 0.0:
            raise DomainError(f"extremal g needs a in (-1, 0), got {self.a_param}")
        if not self.ell > 0:
            raise DomainError(f"extremal g needs ell > 0, got {self.ell}")

    def value(self, t):
        return self.ell * (1.0 - self.a_param) * _as_array(t) ** (-self.a_param)

    def primitive(self, t):
        return self.ell * _as_array(t) ** (1.0 - self.a_param)

    def integral_from(self, lo, s):
        k, e = self.power_law()
        return _power_integral_from(k, e, lo, _as_array(s))

    def power_law(self):
        return (self.ell * (1.0 - self.a_param), -float(self.a_param))

    @property
    def is_nondecreasing(self) -> bool:
        return True

    def check_for(self, p: float) -> None:
        if not -1.0 / p < self.a_param:
            raise DomainError(f"extremal g needs a > -1/p = {-1.0 / p}, got {self.a_param}")

    def to_dict(self):
        return {"kind": self.kind, "a_param": self.a_param, "ell": self.ell}


@dataclass(frozen=True)
class ExtremalPhi(_Weight):
    """``t**a + epsilon`` on (0, 1]; epsilon > 0 keeps the weight away from 0."""

    a_param: float
    epsilon: float = 0.0

    kind = "extphi"
    domain_lo = 0.0
    domain_hi = 1.0
    closed_lo = False

    def __post_init__(self) -> None:
        if not self.a_param > 0:
            raise DomainError(f"extremal phi needs a > 0, got {self.a_param}")
        if not self.epsilon >= 0:
            raise DomainError(f"epsilon must be nonnegative, got {self.epsilon}")

    def value(self, t):
        return _as_array(t) ** self.a_param + self.epsilon

    def primitive(self, t):
        t = _as_array(t)
        a1 = self.a_param + 1.0
        return t**a1 / a1 + self.epsilon * t

    def integral_from(self, lo, s):
        s = _as_array(s)
        return _power_integral_from(1.0, self.a_param, lo, s) + self.epsilon * s

    def power_law(self):
        if self.epsilon == 0:
            return (1.0, float(self.a_param))
        return None

    @property
    def is_nondecreasing(self) -> bool:
        return True

    def to_dict(self):
        return {"kind": self.kind, "a_param": self.a_param, "epsilon": self.epsilon}


@dataclass(frozen=True)
class Step(_Weight):
    """Right-continuous step function; ``levels[i]`` holds left of ``breakpoints[i]``."""

    breakpoints_: tuple[float, ...]
    levels: tuple[float, ...]

    kind = "step"

    def __init__(self, breakpoints: ArrayLike, levels: ArrayLike) -> None:
        b = tuple(float(x) for x in np.atleast_1d(np.asarray(breakpoints, dtype=float)))
        lv = tuple(float(x) for x in np.atleast_1d(np.asarray(levels, dtype=float)))
        if len(lv) != len(b) + 1:
            raise DomainError(
                f"step weight needs len(levels) == len(breakpoints) + 1, got {len(lv)} and {len(b)}"
            )
        if any(not math.isfinite(x) for x in b) or any(y <= x for x, y in zip(b, b[1:])):
            raise DomainError("step breakpoints must be finite and strictly increasing")
        if any(not (x > 0 and math.isfinite(x)) for x in lv):
            raise DomainError("step levels must be positive")
        object.__setattr__(self, "breakpoints_", b)
        object.__setattr__(self, "levels", lv)

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return self.breakpoints_

    def _cells(self, t):
        return np.searchsorted(np.asarray(self.breakpoints_), t, side="right")

    def value(self, t):
        t = _as_array(t)
        return np.asarray(self.levels)[self._cells(t)]

    def primitive(self, t):
        # Origin at the first breakpoint (or 0 for a single level).
        t = _as_array(t)
        b = np.asarray(self.breakpoints_)
        lv = np.asarray(self.levels)
        if b.size == 0:
            return lv[0] * t
        knots = np.concatenate(([0.0], np.cumsum(lv[1:-1] * np.diff(b))))
        idx = self._cells(t)
        left = np.concatenate(([b[0]], b))[idx]
        base = np.concatenate(([0.0], knots))[idx]
        return base + lv[idx] * (t - left)

    def integral_from(self, lo, s):
        s = _as_array(s)
        b = np.asarray(self.breakpoints_)
        i = int(np.searchsorted(b, lo, side="right"))
        room = b[i] - lo if i < b.size else math.inf
        level = self.levels[i]
        return np.where(s <= room, level * s, self.primitive(lo + s) - self.primitive(lo))

    def power_law(self):
        if len(self.levels) == 1:
            return (self.levels[0], 0.0)
        return None

    @property
    def is_nondecreasing(self) -> bool:
        return all(y >= x for x, y in zip(self.levels, self.levels[1:]))

    def to_dict(self):
        return {"kind": self.kind, "breakpoints": list(self.breakpoints_), "levels": list(self.levels)}


@dataclass(frozen=True)
class Tabulated(_Weight):
    """Piecewise-linear interpolant of positive samples on a strictly increasing grid."""

    grid: tuple[float, ...]
    values: tuple[float, ...]

    kind = "table"

    def __init__(self, grid: ArrayLike, values: ArrayLike) -> None:
        g = tuple(float(x) for x in np.asarray(grid, dtype=float).ravel())
        v = tuple(float(x) for x in np.asarray(values, dtype=float).ravel())
        if len(g) < 2 or len(g) != len(v):
            raise DomainError("tabulated weight needs matching grid/values of length >= 2")
        if any(not math.isfinite(x) for x in g) or any(y <= x for x, y in zip(g, g[1:])):
            raise DomainError("tabulated grid must be finite and strictly increasing")
        if any(not (x > 0 and math.isfinite(x)) for x in v):
            raise DomainError("tabulated values must be positive")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)

    @property
    def domain_lo(self) -> float:  # type: ignore[override]
        return self.grid[0]

    @property
    def domain_hi(self) -> float:  # type: ignore[override]
        return self.grid[-1]

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return self.grid

    def value(self, t):
        return np.interp(_as_array(t), self.grid, self.values)

    def primitive(self, t):
        # Exact integral of the interpolant, origin at grid[0].
        t = _as_array(t)
        g = np.asarray(self.grid)
        v = np.asarray(self.values)
        cum = np.concatenate(([0.0], np.cumsum(0.5 * (v[1:] + v[:-1]) * np.diff(g))))
        i = np.clip(np.searchsorted(g, t, side="right") - 1, 0, g.size - 2)
        dt = t - g[i]
        slope = (v[i + 1] - v[i]) / (g[i + 1] - g[i])
        return cum[i] + v[i] * dt + 0.5 * slope * dt * dt

    def integral_from(self, lo, s):
        s = _as_array(s)
        g = np.asarray(self.grid)
        v = np.asarray(self.values)
        i = int(np.clip(np.searchsorted(g, lo, side="right") - 1, 0, g.size - 2))
        slope = (v[i + 1] - v[i]) / (g[i + 1] - g[i])
        v_lo = v[i] + slope * (lo - g[i])
        local = v_lo * s + 0.5 * slope * s * s
        return np.where(s <= g[i + 1] - lo, local, self.primitive(lo + s) - self.primitive(lo))

    @property
    def is_nondecreasing(self) -> bool:
        return all(y >= x for x, y in zip(self.values, self.values[1:]))

    def to_dict(self):
        return {"kind": self.kind, "grid": list(self.grid), "values": list(self.values)}


WeightFamily = Union[Constant, Power, ExtremalG, ExtremalPhi, Step, Tabulated]

_WEIGHT_KINDS: dict[str, type] = {
    cls.kind: cls for cls in (Constant, Power, ExtremalG, ExtremalPhi, Step, Tabulated)
}


def weight_from_dict(d: dict[str, Any]) -> WeightFamily:
    """Inverse of ``to_dict`` for every weight family."""
    d = dict(d)
    kind = d.pop("kind", None)
    if kind not in _WEIGHT_KINDS:
        raise DomainError(f"unknown weight kind {kind!r}; expected one of {sorted(_WEIGHT_KINDS)}")
    try:
        return _WEIGHT_KINDS[kind](**d)
    except TypeError as exc:
        raise DomainError(f"bad fields for {kind} weight: {exc}") from None


def evaluate_weight(w: WeightFamily, t: float) -> float:
    """Point value of a weight; DomainError outside the family's domain."""
    t = float(t)
    if not w.contains(t):
        raise DomainError(f"t={t} is outside the domain of the {w.kind} weight")
    return float(w.value(t))


# ---------------------------------------------------------------------------
# Sequences
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SequenceData:
    lam: NDArray[np.float64]
    a: NDArray[np.float64]

    def __init__(self, lam: ArrayLike, a: ArrayLike) -> None:
        lam_arr = np.array(lam, dtype=float).ravel()
        a_arr = np.array(a, dtype=float).ravel()
        if lam_arr.size == 0 or lam_arr.size != a_arr.size:
            raise DomainError(
                f"lambda and a must be nonempty with equal length, got {lam_arr.size} and {a_arr.size}"
            )
        if not (np.all(np.isfinite(lam_arr)) and np.all(lam_arr > 0)):
            raise DomainError("every lambda_n must be positive and finite")
        if not (np.all(np.isfinite(a_arr)) and np.all(a_arr > 0)):
            raise DomainError("every a_n must be positive and finite")
        lam_arr.flags.writeable = False
        a_arr.flags.writeable = False
        object.__setattr__(self, "lam", lam_arr)
        object.__setattr__(self, "a", a_arr)

    @classmethod
    def unweighted(cls, a: ArrayLike) -> "SequenceData":
        a_arr = np.asarray(a, dtype=float).ravel()
        return cls(np.ones_like(a_arr), a_arr)

    @property
    def length(self) -> int:
        return int(self.lam.size)

    def __len__(self) -> int:
        return self.length

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SequenceData):
            return NotImplemented
        return np.array_equal(self.lam, other.lam) and np.array_equal(self.a, other.a)

    def to_dict(self) -> dict[str, Any]:
        return {"lambda": self.lam.tolist(), "a": self.a.tolist()}


@dataclass(frozen=True, eq=False)
class PrefixState:
    """Running sums ``Lambda_n = sum lambda_i`` and ``A_n = sum lambda_i a_i``."""

    Lam: NDArray[np.float64]
    A: NDArray[np.float64]

    @property
    def means(self) -> NDArray[np.float64]:
        return self.A / self.Lam


# ---------------------------------------------------------------------------
# Reports and tolerances
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadratureConfig:
    """Graded composite quadrature settings.

    ``bands`` geometric bands shrink by ``grading_ratio`` toward the left end
    of the first smooth segment; each band holds ``cells_per_band`` cells.
    Every quadrature is run at two nested resolutions and ``rel_tol`` bounds
    the Richardson error estimate.
    """

    bands: int = 40
    cells_per_band: int = 16
    rule: str = "simpson"
    grading_ratio: float = 0.5
    rel_tol: float = QUADRATURE_REL_TOL

    def __post_init__(self) -> None:
        if self.bands < 1 or self.cells_per_band < 1:
            raise DomainError("bands and cells_per_band must be positive")
        if self.rule not in ("midpoint", "simpson"):
            raise DomainError(f"unknown quadrature rule {self.rule!r}")
        if not 0.0 < self.grading_ratio < 1.0:
            raise DomainError("grading_ratio must lie in (0, 1)")
        if not 0.0 < self.rel_tol < 1.0:
            raise DomainError("rel_tol must lie in (0, 1)")

    @property
    def total_cells(self) -> int:
        return self.bands * self.cells_per_band

    @property
    def order(self) -> int:
        return 4 if self.rule == "simpson" else 2


@dataclass(frozen=True)
class ToleranceConfig:
    """Satisfaction tolerance; ``rel_tol=None`` picks the default for the path used."""

    rel_tol: float | None = None
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)

    def __post_init__(self) -> None:
        if self.rel_tol is not None and not 0.0 < self.rel_tol < 1.0:
            raise DomainError("rel_tol must lie in (0, 1)")

    def for_path(self, closed_form: bool) -> float:
        if self.rel_tol is not None:
            return self.rel_tol
        return CLOSED_FORM_REL_TOL if closed_form else self.quadrature.rel_tol


@dataclass(frozen=True)
class InequalityReport:
    """One evaluated inequality instance ``lhs <= rhs``."""

    name: str
    lhs: float
    rhs: float
    margin: float
    relative_margin: float
    satisfied: bool
    rel_tol: float
    params: dict[str, Any] = field(default_factory=dict)
    extras: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "relative_margin": self.relative_margin,
            "satisfied": self.satisfied,
            "rel_tol": self.rel_tol,
            "params": self.params,
            "extras": self.extras,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "InequalityReport":
        return cls(
            name=d["name"],
            lhs=float(d["lhs"]),
            rhs=float(d["rhs"]),
            margin=float(d["margin"]),
            relative_margin=float(d["relative_margin"]),
            satisfied=bool(d["satisfied"]),
            rel_tol=float(d["rel_tol"]),
            params=dict(d.get("params", {})),
            extras=dict(d.get("extras", {})),
        )


def make_report(
    name: str,
    lhs: float,
    rhs: float,
    rel_tol: float,
    params: dict[str, Any] | None = None,
    extras: dict[str, Any] | None = None,
) -> InequalityReport:
    lhs, rhs = float(lhs), float(rhs)
    margin = rhs - lhs
    scale = max(abs(lhs), abs(rhs))
    rel = margin / scale if scale > 0 else 0.0
    return InequalityReport(
        name=name,
        lhs=lhs,
        rhs=rhs,
        margin=margin,
        relative_margin=rel,
        satisfied=bool(rel >= -rel_tol),
        rel_tol=float(rel_tol),
        params=dict(params or {}),
        extras=dict(extras or {}),
    )
