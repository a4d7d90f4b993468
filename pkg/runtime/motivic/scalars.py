"""Exact scalar and linear-algebra helpers shared by the algebra modules.

Scalars are ``fractions.Fraction``. Matrix work is delegated to sympy's
``DomainMatrix`` over ``QQ``; these helpers convert at the boundary so the rest
of the package only ever sees Fractions and plain lists.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from sympy import factorint
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

Vector = list[Fraction]
Rows = list[list[Fraction]]


def frac(value) -> Fraction:
    """Coerce ints, Fractions, strings and sympy rationals to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    numer = getattr(value, "numerator", None)
    denom = getattr(value, "denominator", None)
    if numer is not None and denom is not None:
        numer = numer() if callable(numer) else numer
        denom = denom() if callable(denom) else denom
        return Fraction(int(numer), int(denom))
    if hasattr(value, "p") and hasattr(value, "q"):
        return Fraction(int(value.p), int(value.q))
    raise TypeError(f"cannot convert {value!r} to Fraction")


def to_qq(value: Fraction):
    return QQ(value.numerator, value.denominator)


def from_qq(value) -> Fraction:
    return Fraction(int(QQ.numer(value)), int(QQ.denom(value)))


def _domain(rows: Sequence[Sequence[Fraction]], ncols: int) -> DomainMatrix:
    data = [[to_qq(frac(x)) for x in row] for row in rows]
    return DomainMatrix(data, (len(data), ncols), QQ)


def _to_rows(dm: DomainMatrix) -> Rows:
    return [[from_qq(x) for x in row] for row in dm.to_list()]


def rref(rows: Sequence[Sequence[Fraction]], ncols: int) -> tuple[Rows, tuple[int, ...]]:
    """Reduced row echelon form and pivot columns (lowest-index pivoting)."""
    if not rows or ncols == 0:
        return [], ()
    reduced, pivots = _domain(rows, ncols).rref()
    out = _to_rows(reduced)[: len(pivots)]
    return out, tuple(int(p) for p in pivots)


def rank(rows: Sequence[Sequence[Fraction]], ncols: int) -> int:
    return len(rref(rows, ncols)[1])


def determinant(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    if not rows:
        return Fraction(1)
    return from_qq(_domain(rows, len(rows)).det())


def inverse(rows: Sequence[Sequence[Fraction]]) -> Rows:
    return _to_rows(_domain(rows, len(rows)).inv())


def nullspace(rows: Sequence[Sequence[Fraction]], ncols: int) -> Rows:
    """Basis of {x : rows·x = 0}, one vector per free column, in column order."""
    reduced, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis: Rows = []
    for f in free:
        vec = [Fraction(0)] * ncols
        vec[f] = Fraction(1)
        for r, p in enumerate(pivots):
            vec[p] = -reduced[r][f]
        basis.append(vec)
    return basis


def span_basis(vectors: Sequence[Sequence[Fraction]], ncols: int) -> Rows:
    """Reduced basis of the span of ``vectors``."""
    return rref(vectors, ncols)[0]


def complement_columns(vectors: Sequence[Sequence[Fraction]], ncols: int) -> list[int]:
    """Standard basis indices spanning a complement of span(vectors)."""
    _, pivots = rref(vectors, ncols)
    return [c for c in range(ncols) if c not in pivots]


def extend_to_complement(
    subspace: Sequence[Sequence[Fraction]],
    ambient: Sequence[Sequence[Fraction]],
    ncols: int,
) -> Rows:
    """Vectors of ``ambient`` (in order) completing a basis of ``subspace`` to span(ambient)."""
    chosen: Rows = [list(v) for v in span_basis(subspace, ncols)]
    extra: Rows = []
    current = len(chosen)
    for vec in span_basis(ambient, ncols):
        if rank(chosen + [list(vec)], ncols) > current:
            chosen.append(list(vec))
            extra.append(list(vec))
            current += 1
    return extra


def solve_in_basis(basis: Sequence[Sequence[Fraction]], target: Sequence[Fraction]) -> Vector:
    """Coordinates of ``target`` in ``basis`` (which must span it)."""
    n = len(basis)
    if n == 0:
        if any(x != 0 for x in target):
            raise ValueError("target not in the span of an empty basis")
        return []
    ncols = len(target)
    # Columns of the augmented system are the basis vectors followed by the target.
    rows = [[basis[j][i] for j in range(n)] + [target[i]] for i in range(ncols)]
    reduced, pivots = rref(rows, n + 1)
    if n in pivots:
        raise ValueError("target not in the span of the basis")
    coords = [Fraction(0)] * n
    for r, p in enumerate(pivots):
        coords[p] = reduced[r][n]
    return coords


def mat_vec(rows: Sequence[Sequence[Fraction]], vec: Sequence[Fraction]) -> Vector:
    return [sum((a * b for a, b in zip(row, vec)), Fraction(0)) for row in rows]


def squarefree_part(value: Fraction | int) -> int:
    """Squarefree integer representing the square class of a nonzero rational."""
    value = frac(value)
    if value == 0:
        raise ValueError("zero has no square class")
    sign = -1 if value < 0 else 1
    product = abs(value.numerator) * value.denominator
    out = 1
    for prime, exponent in factorint(product).items():
        if exponent % 2:
            out *= int(prime)
    return sign * out


def dot(u: Iterable[Fraction], v: Iterable[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))
