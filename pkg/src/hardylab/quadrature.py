"""Graded composite quadrature for integrands with an integrable singularity at the left end.

The integration variable is the offset ``s = t - lo`` so that cells near the
endpoint keep full relative precision.  The first smooth segment is split
into geometric bands (widths shrinking by ``grading_ratio`` toward ``s = 0``);
later segments between knots are graded toward their left knot.  The piece
left over below the last band is closed with the geometric-series tail
implied by the ratio of the two innermost band integrals, which is exact for
pure power laws ``s**k`` and negligible for bounded integrands.

Every integral is computed at ``cells_per_band`` and twice that; the pair is
combined by Richardson extrapolation and its spread is the error estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.typing import NDArray

from .core import ConvergenceError, DomainError, QuadratureConfig

__all__ = ["QuadResult", "graded_integral", "refine_oracle"]

Integrand = Callable[[NDArray[np.float64]], NDArray[np.float64]]


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    coarse: float
    fine: float


def refine_oracle(coarse: float, fine: float, order: int = 4) -> tuple[float, float]:
    """Richardson step for a rule of the given order at resolutions ``r`` and ``2r``.

    Returns ``(extrapolated, error_estimate)`` where the estimate is the
    difference scaled by ``1/(2**order - 1)``.
    """
    factor = 2.0**order - 1.0
    diff = fine - coarse
    return fine + diff / factor, abs(diff) / factor


def _band_rule(
    g: Integrand, left: NDArray, right: NDArray, cells: int, rule: str
) -> NDArray[np.float64]:
    width = right - left
    if rule == "simpson":
        u = np.linspace(0.0, 1.0, 2 * cells + 1)
        wts = np.ones(2 * cells + 1)
        wts[1:-1:2] = 4.0
        wts[2:-1:2] = 2.0
        wts /= 6.0 * cells
    else:
        u = (np.arange(cells) + 0.5) / cells
        wts = np.full(cells, 1.0 / cells)
    nodes = left[:, None] + width[:, None] * u[None, :]
    if rule == "simpson":
        # one-sided limits at cell-band ends so jumps at knots stay outside
        nodes[:, 0] = np.nextafter(left, right)
        nodes[:, -1] = np.nextafter(right, left)
    vals = np.asarray(g(nodes.ravel()), dtype=float).reshape(nodes.shape)
    if not np.all(np.isfinite(vals)):
        raise DomainError("integrand is not finite on the quadrature grid")
    return width * (vals @ wts)


def _single_pass(
    g: Integrand, length: float, knots: NDArray, cfg: QuadratureConfig, cells: int
) -> float:
    first = knots[0] if knots.size else length
    r = cfg.grading_ratio
    j = np.arange(cfg.bands + 1, dtype=float)
    edges = first * r**j  # decreasing toward 0
    band = _band_rule(g, edges[1:], edges[:-1], cells, cfg.rule)

    # band[-1] is the innermost band; geometric tail below edges[-1].
    tail = 0.0
    if band.size >= 2 and band[-2] > 0:
        rho = band[-1] / band[-2]
        if rho >= 1.0:
            raise DomainError("integrand is not integrable at the left endpoint")
        tail = band[-1] * rho / (1.0 - rho)

    total = math.fsum(band.tolist()) + tail
    if knots.size:
        seg = _knot_edges(np.concatenate((knots, [length])), r, max(cfg.bands // 2, 1))
        total += math.fsum(_band_rule(g, seg[:-1], seg[1:], cells, cfg.rule).tolist())
    return total


def _knot_edges(edges: NDArray, ratio: float, levels: int) -> NDArray:
    """Grade each segment ``[u, v]`` geometrically toward ``u``.

    After a jump of the weight the running mean changes on a scale set by the
    jump size, which can be far below the segment width.
    """
    j = ratio ** np.arange(levels, -1, -1, dtype=float)  # increasing, ends at 1
    pieces = [edges[:1]]
    for u, v in zip(edges[:-1], edges[1:]):
        seg = u + (v - u) * j
        seg[-1] = v  # u + (v - u) can round past the knot
        pieces.append(seg)
    return np.concatenate(pieces)


def graded_integral(
    g: Integrand,
    length: float,
    cfg: QuadratureConfig | None = None,
    knots: Sequence[float] = (),
) -> QuadResult:
    """Integrate ``g(s)`` over ``(0, length]``.

    ``knots`` are interior offsets where ``g`` or its derivatives jump; the
    mesh is aligned to them.  Raises ConvergenceError when the nested pair
    disagrees by more than ``cfg.rel_tol`` relative to the result.
    """
    cfg = cfg or QuadratureConfig()
    if not length > 0:
        raise DomainError(f"integration length must be positive, got {length}")
    k = np.unique(np.asarray([x for x in knots if 0.0 < x < length], dtype=float))
    coarse = _single_pass(g, length, k, cfg, cfg.cells_per_band)
    fine = _single_pass(g, length, k, cfg, 2 * cfg.cells_per_band)
    value, err = refine_oracle(coarse, fine, cfg.order)
    if err > cfg.rel_tol * abs(value) and err > 1e-300:
        raise ConvergenceError(
            f"quadrature refinement disagrees: estimate {err:.3e} vs value {value:.6e}"
        )
    return QuadResult(value=value, error=err, coarse=coarse, fine=fine)
