"""
Motivic nearby and vanishing cycles from combinatorial resolution data.

The nearby cycle of f at its zero fibre is

    [ψ_f] = Σ_{∅ ≠ I} (1 − L)^{|I| − 1} · [D̃_I°]

summed over the strata of an embedded SNC resolution, where [D̃_I°] is the class
of the étale cover of the open stratum (supplied as input). Milnor fibres of
sums of powers come from Thom–Sebastiani with the exotic product instead.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Optional

from runtime.motivic.formats import ResolutionData, Stratum, load_resolution
from runtime.motivic.motive import L, ONE, MotiveExpr, mu_n_class, mul_exotic

logger = logging.getLogger(__name__)

__all__ = [
    "QuarticTraceComponents",
    "ResolutionData",
    "Stratum",
    "milnor_fibre",
    "milnor_fibre_sum",
    "milnor_fibre_ts",
    "nearby_cycle",
    "quartic_trace_components",
    "quartic_trace_weight",
    "vanishing_cycle",
]


def nearby_cycle(data: ResolutionData) -> MotiveExpr:
    total = MotiveExpr.zero()
    one_minus_l = ONE - L
    for stratum in data.strata:
        total = total + one_minus_l ** (len(stratum.labels) - 1) * stratum.cover_class
    logger.debug("nearby cycle of %s over %d strata", data.name or "resolution", len(data.strata))
    return total


def vanishing_cycle(data: ResolutionData) -> MotiveExpr:
    return nearby_cycle(data) - data.central_fibre_class


def milnor_fibre(n: int) -> MotiveExpr:
    """MF(xⁿ) at the origin."""
    return mu_n_class(n)


def milnor_fibre_sum(exponents: Iterable[int]) -> MotiveExpr:
    """MF(x₁^{a₁} + … + x_k^{a_k}) by iterated Thom–Sebastiani."""
    exponents = list(exponents)
    if not exponents:
        raise ValueError("milnor_fibre_sum needs at least one exponent")
    for a in exponents:
        if a < 1:
            raise ValueError(f"exponents must be positive, got {a}")
    factors = (ONE - milnor_fibre(a) for a in exponents)
    return ONE - reduce(mul_exotic, factors)


def milnor_fibre_ts(a: int, b: int) -> MotiveExpr:
    """MF(xᵃ + yᵇ): 1 − MF = (1 − MF(xᵃ)) ⊛ (1 − MF(yᵇ))."""
    return milnor_fibre_sum((a, b))


@dataclass(frozen=True)
class QuarticTraceComponents:
    """Pieces of the tr(T⁴) computation on strictly upper triangular 2×2 matrices."""

    m_nt: MotiveExpr
    m_t: MotiveExpr
    d_y: MotiveExpr
    psi: MotiveExpr
    central: MotiveExpr
    weight: MotiveExpr


def quartic_trace_components(data: Optional[ResolutionData] = None) -> QuarticTraceComponents:
    """Assemble the nearby cycle of tr(T⁴) over the nt and t loci and the weight.

    The weight is −[φ]·L⁻¹ with [φ] = [ψ] − [central fibre].
    """
    data = data or load_resolution("trT4_sut")
    m_nt = nearby_cycle(data.restrict("nt"))
    m_t = nearby_cycle(data.restrict("t"))
    d_y = sum(
        (s.cover_class for s in data.strata if s.labels == frozenset({"Y"})),
        MotiveExpr.zero(),
    )
    psi = nearby_cycle(data)
    weight = -(psi - data.central_fibre_class) * L.inverse()
    return QuarticTraceComponents(
        m_nt=m_nt, m_t=m_t, d_y=d_y, psi=psi, central=data.central_fibre_class, weight=weight
    )


def quartic_trace_weight() -> MotiveExpr:
    return quartic_trace_components().weight
