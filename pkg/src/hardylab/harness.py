"""Seeded instance generators and batch property runs over the checkers.

Every instance ``index`` of a :class:`GeneratorSpec` draws from its own
``numpy`` stream seeded by ``(seed, index)``, so a batch gives the same
result whether it runs serially or on a thread pool.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

import numpy as np

from . import continuous as cont
from . import discrete as disc
from .core import (
    UNIT,
    DomainError,
    Exponents,
    ExtremalG,
    ExtremalPhi,
    InequalityReport,
    Power,
    SequenceData,
    Step,
    ToleranceConfig,
    WeightFamily,
)
from .muckenhoupt import MuckenhouptParams, check_corollary, check_theorem_3, muckenhoupt_constant
from .quadrature import refine_oracle

__all__ = [
    "KINDS",
    "CHECKERS",
    "GeneratorSpec",
    "BatchResult",
    "Checker",
    "generate",
    "draw_exponents",
    "run_batch",
    "thread_count",
    "refine_oracle",
]

KINDS = ("uniform_sequence", "lognormal_sequence", "monotone_step_weight", "power_weight", "near_extremal")
SEQUENCE_KINDS = KINDS[:2]
_EXTREMAL_WIDTH = 1e-2


@dataclass(frozen=True)
class GeneratorSpec:
    """Recipe for a reproducible stream of random instances.

    ``size`` bounds the sequence length (lengths are drawn in ``[1, size]``)
    or sets the number of step levels.  ``a_range`` is the exponent range of
    ``power_weight``; ``extremal`` picks ``"g"`` or ``"phi"`` for ``near_extremal``.
    """

    seed: int
    kind: str
    size: int = 100
    p_range: tuple[float, float] = (0.1, 5.0)
    q_range: tuple[float, float] = (0.05, 5.0)
    a_range: tuple[float, float] = (-0.9, 0.9)
    extremal: str = "g"

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise DomainError(f"unknown generator kind {self.kind!r}; expected one of {KINDS}")
        if not (isinstance(self.size, (int, np.integer)) and self.size >= 1):
            raise DomainError(f"size must be a positive integer, got {self.size}")
        if not 0 <= int(self.seed) < 2**64:
            raise DomainError("seed must fit in 64 unsigned bits")
        for name in ("p_range", "q_range", "a_range"):
            lo, hi = getattr(self, name)
            if not lo <= hi:
                raise DomainError(f"{name} must satisfy lo <= hi")
            object.__setattr__(self, name, (float(lo), float(hi)))
        if self.extremal not in ("g", "phi"):
            raise DomainError(f"extremal must be 'g' or 'phi', got {self.extremal!r}")

    @property
    def is_sequence(self) -> bool:
        return self.kind in SEQUENCE_KINDS


def _rng(spec: GeneratorSpec, index: int, stream: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(spec.seed), int(index), stream]))


def draw_exponents(
    spec: GeneratorSpec, index: int = 0, p_min: float = 0.0, q_min: float = 0.0
) -> tuple[float, float]:
    """``(p, q)`` with ``p >= q`` drawn from the generator ranges, clipped below by the minima."""
    rng = _rng(spec, index, 1)
    p_lo = max(spec.p_range[0], p_min)
    p_hi = max(spec.p_range[1], p_lo)
    p = float(rng.uniform(p_lo, p_hi))
    q_lo = max(spec.q_range[0], q_min)
    q_hi = min(spec.q_range[1], p)
    if q_lo > q_hi:
        raise DomainError(f"no q in [{q_lo}, {q_hi}] for p={p}")
    q = float(rng.uniform(q_lo, q_hi))
    return p, q


def generate(
    spec: GeneratorSpec, index: int = 0, p: float | None = None, q: float | None = None
) -> SequenceData | WeightFamily:
    """Instance ``index`` of the stream.

    ``power_weight`` keeps its exponent inside ``(-1/p, 1/p)`` so both the
    positive and negative integrals stay finite, and ``near_extremal`` needs
    ``p`` (and ``q`` for ``phi``) to locate the critical endpoint.
    """
    rng = _rng(spec, index, 0)
    kind = spec.kind
    if kind in SEQUENCE_KINDS:
        n = int(rng.integers(1, spec.size + 1))
        if kind == "uniform_sequence":
            lam = rng.uniform(0.1, 10.0, n)
            a = rng.uniform(0.1, 10.0, n)
        else:
            lam = rng.lognormal(0.0, 1.0, n)
            a = rng.lognormal(0.0, 2.0, n)
        return SequenceData(lam, a)
    if kind == "monotone_step_weight":
        b = np.sort(rng.uniform(0.0, 1.0, spec.size - 1))
        if np.any(np.diff(b) <= 0) or (b.size and (b[0] <= 0 or b[-1] >= 1)):
            raise DomainError("step breakpoints collided; draw again with another seed")
        levels = np.sort(rng.lognormal(0.0, 1.0, spec.size))
        return Step(b, levels)
    if kind == "power_weight":
        lo, hi = spec.a_range
        if p is not None:
            bound = 0.95 / float(p)
            lo, hi = max(lo, -bound), min(hi, bound)
        lo = max(lo, -0.95)
        if lo > hi:
            raise DomainError(f"empty exponent range for p={p}")
        return Power(float(rng.lognormal(0.0, 1.0)), float(rng.uniform(lo, hi)))
    # near_extremal
    if p is None:
        raise DomainError("near_extremal needs p")
    offset = float(rng.uniform(0.0, _EXTREMAL_WIDTH))
    if spec.extremal == "g":
        a = max(-1.0 / float(p), -1.0) + max(offset, 1e-12)
        if a >= 0.0:
            raise DomainError(f"p={p} is too small for a near-extremal g_a")
        return ExtremalG(a, float(rng.lognormal(0.0, 0.5)))
    if q is None:
        raise DomainError("near_extremal phi needs q")
    top = min(float(p), float(q)) - 1.0
    a = top - max(offset, 1e-12) * top
    if not a > 0:
        raise DomainError(f"no phi_a with 0 < a < min(p,q)-1 for p={p}, q={q}")
    return ExtremalPhi(a)


# ---------------------------------------------------------------------------
# Checker registry
# ---------------------------------------------------------------------------

Runner = Callable[[Any, float, float], InequalityReport]


@dataclass(frozen=True)
class Checker:
    name: str
    takes_sequence: bool
    run: Runner
    p_min: float = 0.0
    q_min: float = 0.0


def _worst_term(lhs: np.ndarray, rhs: np.ndarray) -> int:
    rel = (rhs - lhs) / np.maximum(np.abs(lhs), np.abs(rhs))
    return int(np.argmin(rel))


def _lemma1(seq: SequenceData, p: float, q: float) -> InequalityReport:
    e = Exponents(p, q)
    m = disc.copson_mean(seq)
    a = seq.a
    r = q / p
    lhs = (p + 1.0) * m**-p
    rhs = e.constant * a**-q * m ** (q - p) + p * ((p + 1.0) / p) ** -r * a**r * m ** (-p - r)
    n = _worst_term(lhs, rhs)
    return disc.check_lemma1_term(a[n], m[n], e)


def _young(seq: SequenceData, p: float, q: float) -> InequalityReport:
    y = seq.a / disc.copson_mean(seq)
    n = _worst_term(np.full_like(y, p + 1.0), y**-p + p * y)
    return disc.check_young_pointwise(y[n], p)


def _muck_setup(phi: WeightFamily, p: float, q: float) -> tuple[MuckenhouptParams, float, ToleranceConfig]:
    # The drawn pair has p >= q > 1.  The larger one becomes the Muckenhoupt
    # exponent and the smaller one sets where the checked exponent sits in (p0, q].
    tol = ToleranceConfig()
    m, _ = muckenhoupt_constant(phi, p, cfg=tol.quadrature)
    params = MuckenhouptParams(p, max(m, 1.0))
    frac = (q - 1.0) / (p - 1.0)
    pm = p - (1.0 - frac) * params.p0_gap
    # p = q is always admissible (K = 1 there) when (p0, q) has no double inside
    return params, pm if pm > params.p0 else p, tol


def _theorem3(phi: WeightFamily, p: float, q: float) -> InequalityReport:
    params, pm, tol = _muck_setup(phi, p, q)
    return check_theorem_3(phi, pm, params, 1.0, tol)


def _corollary(phi: WeightFamily, p: float, q: float) -> InequalityReport:
    params, pm, tol = _muck_setup(phi, p, q)
    return check_corollary(phi, pm, params, 1.0, tol)


CHECKERS: dict[str, Checker] = {
    c.name: c
    for c in (
        Checker("hardy_discrete", True, lambda s, p, q: disc.check_hardy_discrete(s.a, p), p_min=1.0 + 1e-3),
        Checker("copson", True, lambda s, p, q: disc.check_copson(s, p), p_min=1.0 + 1e-3),
        Checker("theorem_F", True, lambda s, p, q: disc.check_theorem_F(s, Exponents(p, q))),
        Checker("theorem_2", True, lambda s, p, q: disc.check_theorem_2(s, Exponents(p, q))),
        Checker("lemma1", True, _lemma1),
        Checker("young", True, _young),
        Checker("lemma2", True, lambda s, p, q: disc.check_lemma2(s, p)),
        Checker("hardy_continuous", False, lambda w, p, q: cont.check_hardy_continuous(w, p), p_min=1.0 + 1e-3),
        Checker("theorem_D", False, lambda w, p, q: cont.check_theorem_D(w, UNIT, p)),
        Checker("theorem_E", False, lambda w, p, q: cont.check_theorem_E(w, UNIT, Exponents(p, q))),
        Checker("theorem_1", False, lambda w, p, q: cont.check_theorem_1(w, UNIT, Exponents(p, q))),
        Checker("theorem_3", False, _theorem3, p_min=1.0 + 1e-3, q_min=1.0 + 1e-3),
        Checker("corollary", False, _corollary, p_min=1.0 + 1e-3, q_min=1.0 + 1e-3),
    )
}


# ---------------------------------------------------------------------------
# Batches
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BatchResult:
    checker: str
    total: int
    satisfied: int
    worst_relative_margin: float
    worst_index: int
    worst_case: dict[str, Any] | None = field(default=None)

    def to_dict(self) -> dict[str, Any]:
        return {
            "checker": self.checker,
            "total": self.total,
            "satisfied": self.satisfied,
            "worst_relative_margin": self.worst_relative_margin,
            "worst_index": self.worst_index,
            "worst_case": self.worst_case,
        }


def thread_count() -> int:
    """Worker threads for batches, from ``HARDYLAB_THREADS`` (default 1)."""
    raw = os.environ.get("HARDYLAB_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise DomainError(f"HARDYLAB_THREADS must be an integer, got {raw!r}") from None
    return max(n, 1)


def run_batch(
    checker: str,
    spec: GeneratorSpec,
    count: int,
    params: Mapping[str, float] | None = None,
) -> BatchResult:
    """Run ``count`` instances of ``spec`` through a registered checker.

    ``params`` may fix ``p`` and/or ``q``; missing exponents are drawn per
    instance.  A failing instance is echoed in ``worst_case`` together with its
    report.  Exceptions are re-raised with the instance index attached.
    """
    if checker not in CHECKERS:
        raise DomainError(f"unknown checker {checker!r}; expected one of {sorted(CHECKERS)}")
    chk = CHECKERS[checker]
    if chk.takes_sequence != spec.is_sequence:
        want = "sequence" if chk.takes_sequence else "weight"
        raise DomainError(f"checker {checker!r} needs a {want} generator, got {spec.kind!r}")
    if count < 1:
        raise DomainError(f"count must be positive, got {count}")
    params = dict(params or {})

    def one(i: int) -> tuple[InequalityReport, Any]:
        if "p" in params and "q" in params:
            p, q = float(params["p"]), float(params["q"])
        else:
            p, q = draw_exponents(spec, i, chk.p_min, chk.q_min)
            p = float(params.get("p", p))
            q = float(params.get("q", min(q, p)))
        try:
            inst = generate(spec, i, p, q)
            return chk.run(inst, p, q), inst
        except (DomainError, ArithmeticError, RuntimeError) as exc:
            raise type(exc)(f"{checker} instance {i} (seed {spec.seed}, p={p}, q={q}): {exc}") from exc

    workers = min(thread_count(), count)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, range(count)))
    else:
        results = [one(i) for i in range(count)]

    rel = np.array([r.relative_margin for r, _ in results])
    ok = int(sum(r.satisfied for r, _ in results))
    worst = int(np.argmin(rel))  # first minimum, independent of scheduling
    worst_case = None
    if ok < count:
        bad = [i for i, (r, _) in enumerate(results) if not r.satisfied]
        idx = min(bad, key=lambda i: rel[i])
        rep, inst = results[idx]
        worst_case = {"index": idx, "instance": inst.to_dict(), "report": rep.to_dict()}
    return BatchResult(
        checker=checker,
        total=count,
        satisfied=ok,
        worst_relative_margin=float(rel[worst]),
        worst_index=worst,
        worst_case=worst_case,
    )
