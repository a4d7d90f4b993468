"""
The quantum torus over motives and the series identities built on it.

Series live in the twisted ring with x^a·x^b = s^{χ(a,b) − χ(b,a)}·x^{a+b},
where χ(a, b) = a·b − a M bᵀ is the Euler form of a quiver with incidence
matrix M. Every series carries a downward-closed truncation set; products are
exact on that set because all exponents are nonnegative.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Optional, Sequence

from runtime.motivic.errors import (
    DenominatorNotCleared,
    InputError,
    NonUnitConstant,
    ShapeError,
    TruncationError,
)
from runtime.motivic.formats import QuiverWithPotential, load_quiver
from runtime.motivic.motive import L, ONE, MotiveExpr, gl_class, grassmannian_class
from runtime.motivic.telemetry import trace_operation

logger = logging.getLogger(__name__)

DimVector = tuple[int, ...]


@lru_cache(maxsize=None)
def s_power(k: int) -> MotiveExpr:
    return MotiveExpr.monomial(1, k)


def gl_inverse(n: int) -> MotiveExpr:
    return ONE if n == 0 else gl_class(n).inverse()


# ============================================================================
# Lattice data
# ============================================================================

@dataclass(frozen=True)
class EulerForm:
    vertices: tuple[str, ...]
    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.vertices)
        if len(self.matrix) != n or any(len(row) != n for row in self.matrix):
            raise ShapeError(f"incidence matrix must be {n}x{n}")
        if any(entry < 0 for row in self.matrix for entry in row):
            raise ShapeError("incidence matrix entries must be nonnegative")

    @classmethod
    def from_quiver(cls, q: QuiverWithPotential) -> EulerForm:
        return cls(q.vertices, tuple(tuple(row) for row in q.incidence_matrix()))

    @property
    def rank(self) -> int:
        return len(self.vertices)

    def _check(self, *vectors: DimVector) -> None:
        for v in vectors:
            if len(v) != self.rank:
                raise ShapeError(f"dimension vector {v} does not match vertices {self.vertices}")

    def chi(self, a: DimVector, b: DimVector) -> int:
        self._check(a, b)
        arrows = sum(
            a[i] * self.matrix[i][j] * b[j] for i in range(self.rank) for j in range(self.rank)
        )
        return sum(x * y for x, y in zip(a, b)) - arrows

    def skew(self, a: DimVector, b: DimVector) -> int:
        return self.chi(a, b) - self.chi(b, a)

    def arrow_count(self, gamma: DimVector) -> int:
        """Dimension of the representation space Σ_{a: i→j} γ_i γ_j."""
        self._check(gamma)
        return sum(
            gamma[i] * self.matrix[i][j] * gamma[j]
            for i in range(self.rank)
            for j in range(self.rank)
        )


def framed(q: QuiverWithPotential, vertex: str, framing: str = "inf") -> QuiverWithPotential:
    """Framed quiver with the framing vertex first and one arrow into ``vertex``."""
    return q.framed(vertex, framing)


@dataclass(frozen=True)
class Truncation:
    """Rectangle {γ ≤ bound}, optionally cut by total dimension and by a corner γ ≥ avoid."""

    bound: DimVector
    max_total: Optional[int] = None
    avoid: Optional[DimVector] = None

    def __post_init__(self):
        if any(b < 0 for b in self.bound):
            raise TruncationError(f"truncation bound must be nonnegative, got {self.bound}")
        if self.max_total is not None and self.max_total < 0:
            raise TruncationError(f"total-dimension bound must be nonnegative, got {self.max_total}")
        if self.avoid is not None:
            if len(self.avoid) != len(self.bound):
                raise TruncationError(f"corner {self.avoid} does not match bound {self.bound}")
            if not any(self.avoid):
                raise TruncationError("the excluded corner cannot be the origin")

    @property
    def rank(self) -> int:
        return len(self.bound)

    def contains(self, gamma: DimVector) -> bool:
        if len(gamma) != self.rank:
            return False
        if any(g < 0 or g > b for g, b in zip(gamma, self.bound)):
            return False
        if self.max_total is not None and sum(gamma) > self.max_total:
            return False
        if self.avoid is not None and all(g >= c for g, c in zip(gamma, self.avoid)):
            return False
        return True

    def points(self) -> list[DimVector]:
        grid = itertools.product(*(range(b + 1) for b in self.bound))
        return sorted((p for p in grid if self.contains(p)), key=lambda p: (sum(p), p))

    def without_corner(self, corner: DimVector) -> Truncation:
        return replace(self, avoid=tuple(corner))

    def framed(self) -> Truncation:
        return Truncation(
            (1,) + tuple(self.bound),
            None if self.max_total is None else self.max_total + 1,
            None if self.avoid is None else (0,) + tuple(self.avoid),
        )


# ============================================================================
# Series
# ============================================================================

def _add_vectors(a: DimVector, b: DimVector) -> DimVector:
    return tuple(x + y for x, y in zip(a, b))


@dataclass(frozen=True, eq=False)
class QTSeries:
    form: EulerForm
    trunc: Truncation
    coefficients: Mapping[DimVector, MotiveExpr] = field(default_factory=dict)

    def __post_init__(self):
        if self.trunc.rank != self.form.rank:
            raise TruncationError("truncation and Euler form have different ranks")
        clean = {}
        for gamma, c in self.coefficients.items():
            gamma = tuple(gamma)
            if c.is_zero():
                continue
            if not self.trunc.contains(gamma):
                raise TruncationError(f"coefficient at {gamma} lies outside the truncation")
            clean[gamma] = c
        object.__setattr__(self, "coefficients", clean)

    @classmethod
    def one(cls, form: EulerForm, trunc: Truncation) -> QTSeries:
        return cls(form, trunc, {(0,) * form.rank: ONE})

    @classmethod
    def monomial(
        cls, form: EulerForm, trunc: Truncation, gamma: DimVector, coefficient: MotiveExpr = ONE
    ) -> QTSeries:
        """coefficient·x^γ, or zero when γ is truncated away."""
        gamma = tuple(gamma)
        form._check(gamma)
        if not trunc.contains(gamma):
            return cls(form, trunc)
        return cls(form, trunc, {gamma: coefficient})

    def coefficient(self, gamma: DimVector) -> MotiveExpr:
        return self.coefficients.get(tuple(gamma), MotiveExpr.zero())

    def terms(self) -> list[tuple[DimVector, MotiveExpr]]:
        return sorted(self.coefficients.items(), key=lambda item: (sum(item[0]), item[0]))

    def embed(self, form: EulerForm, trunc: Truncation) -> QTSeries:
        """Pad dimension vectors with leading zeros (e.g. a framing vertex)."""
        pad = form.rank - self.form.rank
        if pad < 0:
            raise ShapeError("cannot embed into a lattice of smaller rank")
        moved = {(0,) * pad + gamma: c for gamma, c in self.coefficients.items()}
        return QTSeries(form, trunc, {g: c for g, c in moved.items() if trunc.contains(g)})

    def __add__(self, other: QTSeries) -> QTSeries:
        _compatible(self, other)
        out = dict(self.coefficients)
        for gamma, c in other.coefficients.items():
            out[gamma] = out.get(gamma, MotiveExpr.zero()) + c
        return QTSeries(self.form, self.trunc, out)

    def __mul__(self, other: QTSeries) -> QTSeries:
        return qt_mul(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QTSeries):
            return NotImplemented
        return self.form == other.form and self.trunc == other.trunc and self.terms() == other.terms()

    def __str__(self) -> str:
        return "\n".join(format_term(g, c) for g, c in self.terms())


def format_term(gamma: DimVector, coefficient: MotiveExpr) -> str:
    return f"gamma=({','.join(str(g) for g in gamma)}) coeff={coefficient.to_text()}"


def _compatible(a: QTSeries, b: QTSeries) -> None:
    if a.form != b.form:
        raise ShapeError("series live over different Euler forms")
    if a.trunc != b.trunc:
        raise TruncationError(f"incompatible truncations {a.trunc} and {b.trunc}")


def qt_mul(a: QTSeries, b: QTSeries) -> QTSeries:
    _compatible(a, b)
    out: dict[DimVector, MotiveExpr] = {}
    for g1, c1 in a.coefficients.items():
        for g2, c2 in b.coefficients.items():
            gamma = _add_vectors(g1, g2)
            if not a.trunc.contains(gamma):
                continue
            term = c1 * c2 * s_power(a.form.skew(g1, g2))
            out[gamma] = out[gamma] + term if gamma in out else term
    return QTSeries(a.form, a.trunc, out)


def qt_inverse(a: QTSeries) -> QTSeries:
    """Inverse of a series with constant term 1, degree by degree."""
    zero = (0,) * a.form.rank
    if a.coefficient(zero) != ONE:
        raise NonUnitConstant(f"constant term {a.coefficient(zero).to_text()} is not 1")
    rest = [(g, c) for g, c in a.coefficients.items() if g != zero]
    out: dict[DimVector, MotiveExpr] = {zero: ONE}
    for gamma in a.trunc.points():
        if gamma == zero:
            continue
        total = MotiveExpr.zero()
        for g1, c1 in rest:
            g2 = tuple(x - y for x, y in zip(gamma, g1))
            if any(x < 0 for x in g2) or g2 not in out:
                continue
            total = total + c1 * out[g2] * s_power(a.form.skew(g1, g2))
        if not total.is_zero():
            out[gamma] = -total
    return QTSeries(a.form, a.trunc, out)


# ============================================================================
# Integration at W = 0
# ============================================================================

def w0_weight(form: EulerForm, gamma: DimVector) -> MotiveExpr:
    """s^{χ(γ,γ)}·L^{dim Rep γ}·∏ [GL_{γ_i}]⁻¹."""
    weight = s_power(form.chi(gamma, gamma)) * L ** form.arrow_count(gamma)
    for n in gamma:
        weight = weight * gl_inverse(n)
    return weight


def _require_w0(q: QuiverWithPotential) -> None:
    if q.has_potential:
        raise InputError(f"quiver {q.name or '<unnamed>'} has a nonzero potential")


def integrate_w0(
    q: QuiverWithPotential, gamma: DimVector, trunc: Optional[Truncation] = None
) -> QTSeries:
    _require_w0(q)
    form = EulerForm.from_quiver(q)
    gamma = tuple(gamma)
    trunc = trunc or Truncation(gamma)
    return QTSeries.monomial(form, trunc, gamma, w0_weight(form, gamma))


def w0_series(q: QuiverWithPotential, trunc: Truncation) -> QTSeries:
    """Σ_γ integrate_w0(γ) over the truncation: the all-representations series."""
    _require_w0(q)
    form = EulerForm.from_quiver(q)
    with trace_operation("w0_series", {"points": len(trunc.points())}):
        return QTSeries(form, trunc, {g: w0_weight(form, g) for g in trunc.points()})


def vertex_series(form: EulerForm, trunc: Truncation, vertex: int) -> QTSeries:
    """Σ_n s^{n²}/[GL_n]·x^{n e_v}: the semisimple modules at one vertex."""
    out = {}
    n = 0
    while True:
        gamma = tuple(n if k == vertex else 0 for k in range(form.rank))
        if not trunc.contains(gamma):
            break
        out[gamma] = s_power(n * n) * gl_inverse(n)
        n += 1
    return QTSeries(form, trunc, out)


def sink_order(q: QuiverWithPotential) -> list[int]:
    """Vertex indices of an acyclic quiver, each vertex after every vertex it maps to."""
    remaining = set(range(len(q.vertices)))
    matrix = q.incidence_matrix()
    order: list[int] = []
    while remaining:
        sinks = sorted(v for v in remaining if not any(matrix[v][w] for w in remaining if w != v))
        if not sinks or any(matrix[v][v] for v in sinks):
            raise InputError(f"quiver {q.name or '<unnamed>'} is not acyclic")
        order.extend(sinks)
        remaining -= set(sinks)
    return order


def hall_product_check(q: QuiverWithPotential, trunc: Truncation) -> bool:
    """All-representations series equals the ordered product of vertex series, sinks first."""
    series = w0_series(q, trunc)
    product = QTSeries.one(series.form, trunc)
    for v in sink_order(q):
        product = qt_mul(product, vertex_series(series.form, trunc, v))
    for gamma in trunc.points():
        if series.coefficient(gamma) != product.coefficient(gamma):
            logger.info("Hall factorization differs at %s", gamma)
            return False
    return True


# ============================================================================
# Conifold slope factors
# ============================================================================

def conifold_form() -> EulerForm:
    return EulerForm.from_quiver(load_quiver("conifold"))


def framed_conifold_form() -> EulerForm:
    return EulerForm.from_quiver(framed(load_quiver("conifold"), "1"))


def spherical_series(a: int, b: int, trunc: Truncation, form: Optional[EulerForm] = None) -> QTSeries:
    """P(a, b) = Σ_i s^{i²}/[GL_i]·x^{i(a,b)} for a spherical object of class (a, b)."""
    form = form or conifold_form()
    out = {}
    i = 0
    while True:
        gamma = (i * a, i * b)
        if not trunc.contains(gamma):
            break
        out[gamma] = s_power(i * i) * gl_inverse(i)
        i += 1
        if a == b == 0:
            break
    return QTSeries(form, trunc, out)


POINT_CLASS = (1, 1)


def point_slope_series(trunc: Truncation, form: Optional[EulerForm] = None) -> QTSeries:
    """P(1,1) through x^{(1,1)}, where every module has tr W ≡ 0."""
    if trunc.contains((2, 2)):
        raise TruncationError("the point slope series is only fixed below (2, 2)")
    form = form or conifold_form()
    coefficient = L * (L + 1) / (L - 1)
    return QTSeries.one(form, trunc) + QTSeries.monomial(form, trunc, POINT_CLASS, coefficient)


def slope_key(ab: tuple[int, int]) -> Fraction:
    return Fraction(ab[0], ab[0] + ab[1])


def hn_slopes(trunc: Truncation) -> list[tuple[int, int]]:
    """Classes of the slope factors that reach into ``trunc``, in phase order."""
    found = [c for c in [(0, 1), (1, 0), POINT_CLASS] if trunc.contains(c)]
    n = 1
    while trunc.contains((n, n + 1)) or trunc.contains((n + 1, n)):
        found.extend(c for c in [(n, n + 1), (n + 1, n)] if trunc.contains(c))
        n += 1
    return sorted(found, key=slope_key)


def slope_factor(ab: tuple[int, int], trunc: Truncation, form: Optional[EulerForm] = None) -> QTSeries:
    a, b = ab
    if ab == POINT_CLASS:
        return point_slope_series(trunc, form)
    if abs(a - b) != 1 or min(a, b) < 0:
        raise InputError(f"no slope factor for class {ab}")
    return spherical_series(a, b, trunc, form)


def conjugation_factor(
    ab: tuple[int, int], form: EulerForm, trunc: Truncation
) -> QTSeries:
    """Closed form of P·x^{e∞}·P⁻¹·(x^{e∞})⁻¹ for one slope factor P = P(a, b)."""
    gamma = (0,) + tuple(ab)
    frame = (1,) + (0,) * (form.rank - 1)
    shift = form.skew(gamma, frame)
    if ab == POINT_CLASS:
        return QTSeries.one(form, trunc) + QTSeries.monomial(form, trunc, gamma, L * (L + 1))
    out = {}
    for i in range(shift + 1):
        term = tuple(i * g for g in gamma)
        if trunc.contains(term):
            out[term] = s_power(i * i) * grassmannian_class(shift, i)
    return QTSeries(form, trunc, out)


def conjugate(a: QTSeries, x: QTSeries) -> QTSeries:
    return qt_mul(qt_mul(a, x), qt_inverse(a))


def bridgeland_conjugation_check(n: int, trunc: Truncation) -> bool:
    """P(n,n+1)·x^{e∞}·P(n,n+1)⁻¹ = x^{e∞}·Σ_{i≤n} L^{i²/2}[Gr(n,i)]·x^{(0,in,i(n+1))}."""
    if n < 0:
        raise InputError(f"n must be nonnegative, got {n}")
    form = framed_conifold_form()
    if trunc.rank != form.rank:
        raise TruncationError("the conjugation identity lives on the framed lattice (inf, 1, 2)")
    with trace_operation("bridgeland_conjugation_check", {"n": n}):
        unframed = Truncation(trunc.bound[1:])
        p = spherical_series(n, n + 1, unframed).embed(form, trunc)
        frame = QTSeries.monomial(form, trunc, (1, 0, 0))
        lhs = conjugate(p, frame)
        rhs = qt_mul(frame, conjugation_factor((n, n + 1), form, trunc))
    for gamma in trunc.points():
        if lhs.coefficient(gamma) != rhs.coefficient(gamma):
            logger.info("conjugation identity differs at %s", gamma)
            return False
    return True


def hn_factorization_check(
    trunc: Truncation, slopes: Optional[Sequence[tuple[int, int]]] = None
) -> bool:
    """Assemble the slope-ordered product A of the conifold and check it three ways.

    (i) A agrees with the W = 0 integration on (n, 0), (0, m) and (1, 1);
    (ii) A·x^{e∞}·A⁻¹ has no GL denominators (it counts framed Hilbert schemes);
    (iii) A·x^{e∞}·A⁻¹ equals x^{e∞} times the closed-form conjugation factors.
    Classes dominating (2, 2) are dropped from ``trunc`` first.
    """
    if trunc.rank != 2:
        raise TruncationError("the slope factorization lives on the conifold lattice (1, 2)")
    work = trunc.without_corner((2, 2))
    canonical = hn_slopes(work)
    factors = list(canonical if slopes is None else slopes)
    form = conifold_form()
    fform = framed_conifold_form()
    ftrunc = work.framed()

    with trace_operation("hn_factorization_check", {"factors": len(factors)}):
        product = QTSeries.one(form, work)
        for ab in factors:
            product = qt_mul(product, slope_factor(ab, work, form))

        frame = QTSeries.monomial(fform, ftrunc, (1, 0, 0))
        hilbert = conjugate(product.embed(fform, ftrunc), frame)
        for gamma, c in hilbert.terms():
            if not c.is_polynomial():
                raise DenominatorNotCleared(
                    f"framed coefficient at {gamma} keeps a denominator: {c.to_text()}"
                )

        for gamma in work.points():
            if gamma[0] == 0 or gamma[1] == 0 or gamma == POINT_CLASS:
                if product.coefficient(gamma) != w0_weight(form, gamma):
                    logger.info("slope product differs from the W = 0 count at %s", gamma)
                    return False

        closed = frame
        for ab in canonical:
            closed = qt_mul(closed, conjugation_factor(ab, fform, ftrunc))
        for gamma in ftrunc.points():
            if hilbert.coefficient(gamma) != closed.coefficient(gamma):
                logger.info("framed series differs from the closed form at %s", gamma)
                return False
    return True

