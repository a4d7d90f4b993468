"""
Parity-level orientation data on twisted objects.

Classes live in J₂ = (k*/k*²) × Z/2, represented by a squarefree integer and a
bit. The class of a nondegenerate quadratic space is (square class of its
determinant, dimension mod 2); in closed mode the first component collapses
to 1.

For a twisted object M the quadratic space q(M) is Hom¹_tw(M, M)/ker d with
the form ⟨d u, v⟩. At an extension E of M₂ by M₁ along α the obstruction is
l = q(E)·q(M₁)·q(M₂), and a parity assignment h is a cocycle when
h(M₁) + h(M₂) + h(E) ≡ parity(l) on every triangle.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

from runtime.motivic.ainfty import AInftyCategory, Matrix, koszul_dual, matrix_pairing
from runtime.motivic.config import FieldMode, load_config, resolve_field_mode
from runtime.motivic.errors import (
    Degenerate,
    InvalidLagrangian,
    PropagationError,
    ShapeError,
    TwistedError,
)
from runtime.motivic.formats import QuiverWithPotential, iter_words
from runtime.motivic.scalars import complement_columns, determinant, nullspace, squarefree_part
from runtime.motivic.telemetry import trace_operation
from runtime.motivic.twisted import (
    TwistedObject,
    differential_map,
    extension_object,
    is_zero_matrix,
    mc_residual,
    to_matrix,
    tw_hom_basis,
    zero_matrix,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class J2Class:
    unit_class: int = 1
    parity: int = 0

    def __post_init__(self):
        if self.unit_class == 0 or squarefree_part(self.unit_class) != self.unit_class:
            raise ValueError(f"unit class must be a nonzero squarefree integer, got {self.unit_class}")
        if self.parity not in (0, 1):
            raise ValueError(f"parity must be 0 or 1, got {self.parity}")

    def __mul__(self, other: J2Class) -> J2Class:
        return J2Class(
            squarefree_part(self.unit_class * other.unit_class), (self.parity + other.parity) % 2
        )

    def collapse(self) -> J2Class:
        return J2Class(1, self.parity)

    def is_trivial(self) -> bool:
        return self.unit_class == 1 and self.parity == 0

    def __str__(self) -> str:
        return f"({self.unit_class}, {self.parity})"


TRIVIAL = J2Class()


@dataclass(frozen=True)
class QuadSpace:
    labels: tuple[str, ...]
    matrix: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        n = len(self.labels)
        if len(self.matrix) != n or any(len(row) != n for row in self.matrix):
            raise ShapeError(f"quadratic space matrix must be {n}x{n}")
        for i in range(n):
            for j in range(i):
                if self.matrix[i][j] != self.matrix[j][i]:
                    raise ShapeError(
                        f"quadratic form is not symmetric at ({self.labels[i]}, {self.labels[j]})"
                    )

    @classmethod
    def from_rows(cls, labels: Sequence[str], rows: Sequence[Sequence]) -> QuadSpace:
        return cls(tuple(labels), tuple(tuple(Fraction(x) for x in row) for row in rows))

    @property
    def dimension(self) -> int:
        return len(self.labels)

    def direct_sum(self, other: QuadSpace) -> QuadSpace:
        n, m = self.dimension, other.dimension
        rows = [list(row) + [Fraction(0)] * m for row in self.matrix]
        rows += [[Fraction(0)] * n + list(row) for row in other.matrix]
        return QuadSpace.from_rows(self.labels + other.labels, rows)


def sdet_parity(dims: Union[Mapping[int, int], Iterable[int]]) -> int:
    """Parity of the superdeterminant line: total dimension mod 2."""
    values = dims.values() if isinstance(dims, Mapping) else dims
    return sum(values) % 2


def quad_class(q: QuadSpace, field_mode: FieldMode | str | None = None) -> J2Class:
    mode = resolve_field_mode(field_mode)
    if q.dimension == 0:
        return TRIVIAL
    det = determinant([list(row) for row in q.matrix])
    if det == 0:
        raise Degenerate(f"quadratic form on {', '.join(q.labels)} is degenerate")
    unit = 1 if mode == FieldMode.CLOSED else squarefree_part(det)
    return J2Class(unit, q.dimension % 2)


def _require_unshifted(m: TwistedObject) -> None:
    if any(shift for _, shift in m.tau):
        raise TwistedError("orientation data is computed on twisted objects with all shifts zero")


def quad_form_of(cat: AInftyCategory, m: TwistedObject) -> QuadSpace:
    """⟨d u, v⟩ on a complement of ker d inside Hom¹_tw(M, M)."""
    _require_unshifted(m)
    d = differential_map(cat, m)
    basis1 = d.degree_basis(1)
    n = len(basis1)
    block = d.block(1)
    kernel = nullspace(block, n) if block else [
        [Fraction(int(i == j)) for j in range(n)] for i in range(n)
    ]
    chosen = complement_columns(kernel, n)
    labels = [e.label for e in basis1]
    basis2 = d.degree_basis(2)
    images = {}
    for c in chosen:
        image = d.images[labels[c]]
        coords = [image.get(e.label, Fraction(0)) for e in basis2]
        images[c] = to_matrix(basis2, coords, m.size, m.size)
    rows = []
    for u in chosen:
        row = []
        for v in chosen:
            v_mat = to_matrix([basis1[v]], [Fraction(1)], m.size, m.size)
            row.append(Fraction(matrix_pairing(cat, images[u], v_mat)))
        rows.append(row)
    return QuadSpace.from_rows([labels[c] for c in chosen], rows)


def obstruction_at_extension(
    cat: AInftyCategory,
    m1: TwistedObject,
    m2: TwistedObject,
    alpha: Matrix,
    field_mode: FieldMode | str | None = None,
) -> J2Class:
    """l = q(E_α)·q(M₁)·q(M₂)."""
    e = extension_object(cat, m1, m2, alpha)
    with trace_operation("obstruction_at_extension", {"size": e.size}):
        return (
            quad_class(quad_form_of(cat, e), field_mode)
            * quad_class(quad_form_of(cat, m1), field_mode)
            * quad_class(quad_form_of(cat, m2), field_mode)
        )


def _restricted_parity(cat: AInftyCategory, m: TwistedObject, allowed: Callable[[str], bool]) -> int:
    count = sum(1 for e in tw_hom_basis(cat, m, m) if allowed(e.generator))
    return count % 2


def cgeq2_class(cat: AInftyCategory, m: TwistedObject) -> int:
    """Chain-level parity of the degree ≥ 2 part of End_tw(M)."""
    _require_unshifted(m)
    degrees = {g.name: g.degree for g in cat.generators}
    return _restricted_parity(cat, m, lambda name: degrees[name] >= 2)


def check_lagrangian(q: QuiverWithPotential, arrows: Iterable[str]) -> frozenset[str]:
    chosen = frozenset(arrows)
    known = {a.label for a in q.arrows}
    unknown = sorted(chosen - known)
    if unknown:
        raise InvalidLagrangian(f"unknown arrows {', '.join(unknown)}")
    for _, word in iter_words(q):
        hits = [a for a in word if a in chosen]
        if len(hits) > 1:
            raise InvalidLagrangian(
                f"cycle {' '.join(word)} contains more than one arrow of T ({', '.join(hits)})"
            )
    return chosen


def lagrangian_class(
    q: QuiverWithPotential,
    arrows: Iterable[str],
    m: TwistedObject,
    cat: Optional[AInftyCategory] = None,
) -> int:
    """Parity of End_tw(M) restricted to L_T = span{a ∉ T, a* for a ∈ T} ⊕ degree 3."""
    chosen = check_lagrangian(q, arrows)
    cat = cat or koszul_dual(q)
    _require_unshifted(m)
    degrees = {g.name: g.degree for g in cat.generators}

    def allowed(name: str) -> bool:
        if degrees[name] == 3:
            return True
        if degrees[name] == 2:
            return name not in chosen
        if degrees[name] == 1:
            return name.endswith("*") and name[:-1] in chosen
        return False

    return _restricted_parity(cat, m, allowed)


def orientation_parity(cat: AInftyCategory, m: TwistedObject) -> int:
    """cgeq2 parity plus dim Ext^{≤1}(M, M), mod 2."""
    if m.size == 0:
        return 0
    dims = differential_map(cat, m).cohomology_dims()
    return (cgeq2_class(cat, m) + dims.get(0, 0) + dims.get(1, 0)) % 2


def _parity(value: Union[int, J2Class]) -> int:
    return value.parity if isinstance(value, J2Class) else int(value) % 2


def cocycle_check(
    cat: AInftyCategory,
    m1: TwistedObject,
    m2: TwistedObject,
    alpha: Matrix,
    h: Callable[[TwistedObject], Union[int, J2Class]],
) -> bool:
    e = extension_object(cat, m1, m2, alpha)
    l = obstruction_at_extension(cat, m1, m2, alpha, FieldMode.CLOSED)
    lhs = (_parity(h(m1)) + _parity(h(m2)) + _parity(h(e))) % 2
    if lhs != l.parity:
        logger.debug("cocycle fails at extension of size %d", e.size)
    return lhs == l.parity


# ============================================================================
# Enumeration and propagation
# ============================================================================

ObjectKey = tuple


def object_key(m: TwistedObject) -> ObjectKey:
    entries = tuple(
        (i, j, g, c)
        for i, row in enumerate(m.a)
        for j, entry in enumerate(row)
        for g, c in sorted(entry.items())
        if c
    )
    return (m.tau, entries)


def _block(m: TwistedObject, rows: range, cols: range) -> Matrix:
    return [[dict(m.a[i][j]) for j in cols] for i in rows]


def split_at(m: TwistedObject, k: int) -> tuple[TwistedObject, TwistedObject, Matrix]:
    """M as the extension of its trailing block by its leading block."""
    head, tail = range(k), range(k, m.size)
    m1 = TwistedObject(m.tau[:k], _block(m, head, head))
    m2 = TwistedObject(m.tau[k:], _block(m, tail, tail))
    return m1, m2, _block(m, head, tail)


def enumerate_twisted_objects(
    cat: AInftyCategory,
    slots: Optional[int] = None,
    coefficients: Optional[Sequence[Fraction]] = None,
) -> list[TwistedObject]:
    """Unshifted twisted objects with at most ``slots`` generators and entries from ``coefficients``."""
    config = load_config()
    slots = slots if slots is not None else config.enum_slots
    coefficients = tuple(coefficients) if coefficients is not None else config.enum_coefficients
    found: list[TwistedObject] = []
    with trace_operation("enumerate_twisted_objects", {"slots": slots}):
        for size in range(1, slots + 1):
            for tau in itertools.product([(obj, 0) for obj in cat.objects], repeat=size):
                bare = TwistedObject(tau, zero_matrix(size, size))
                basis = [e for e in tw_hom_basis(cat, bare, bare, 1) if e.row < e.col]
                for coords in itertools.product(coefficients, repeat=len(basis)):
                    a = to_matrix(basis, coords, size, size)
                    if is_zero_matrix(mc_residual(cat, tau, a)):
                        found.append(TwistedObject(tau, a))
        logger.debug("enumerated %d twisted objects up to %d slots", len(found), slots)
    return found


def propagate_parities(
    cat: AInftyCategory,
    generator_parities: Mapping[str, int],
    objects: Optional[Sequence[TwistedObject]] = None,
    slots: Optional[int] = None,
    coefficients: Optional[Sequence[Fraction]] = None,
) -> dict[ObjectKey, int]:
    """Extend generator parities along every triangle; all splits must agree."""
    missing = [obj for obj in cat.objects if obj not in generator_parities]
    if missing:
        raise ShapeError(f"no generator parity for {', '.join(missing)}")
    objects = objects if objects is not None else enumerate_twisted_objects(cat, slots, coefficients)
    values: dict[ObjectKey, int] = {}

    def parity(m: TwistedObject) -> int:
        key = object_key(m)
        if key in values:
            return values[key]
        if m.size == 0:
            result = 0
        elif m.size == 1:
            result = generator_parities[m.tau[0][0]] % 2
        else:
            candidates = set()
            for k in range(1, m.size):
                m1, m2, alpha = split_at(m, k)
                l = obstruction_at_extension(cat, m1, m2, alpha, FieldMode.CLOSED)
                candidates.add((l.parity + parity(m1) + parity(m2)) % 2)
            if len(candidates) != 1:
                raise PropagationError(
                    f"splits of an object over {[o for o, _ in m.tau]} disagree on its parity"
                )
            result = candidates.pop()
        values[key] = result
        return result

    with trace_operation("propagate_parities", {"objects": len(objects)}):
        for m in objects:
            parity(m)
    return values


# ============================================================================
# Universal extensions
# ============================================================================

def universal_extension(
    cat: AInftyCategory, m1: TwistedObject, m2: TwistedObject
) -> tuple[TwistedObject, TwistedObject, Matrix]:
    """Extension of M₂ by M₁ ⊗ Hom¹(M₂, M₁)^∨ using every basis class once.

    Returns (E, the direct sum of e copies of M₁, the extension class).
    """
    basis = tw_hom_basis(cat, m2, m1, 1)
    copies = TwistedObject.direct_sum(*([m1] * len(basis))) if basis else TwistedObject.zero()
    alpha = zero_matrix(copies.size, m2.size)
    for k, element in enumerate(basis):
        alpha[k * m1.size + element.row][element.col] = {element.generator: Fraction(1)}
    e = extension_object(cat, copies, m2, alpha)
    return e, copies, alpha


def outwater_parity(e: int) -> int:
    """Parity of the dimension count (e² + 1) + e² + 1 at a universal extension."""
    return ((e * e + 1) + e * e + 1) % 2

