"""
Twisted objects over a finite A∞-category.

A twisted object is a tuple τ of shifted objects with a strictly upper
triangular matrix A of degree 1 solving Σ_k b_k(A, ..., A) = 0. Entry (i, j)
of any matrix is a map τ_j -> τ_i; a generator g: obj_j -> obj_i sits there in
twisted degree ``deg g - n_i + n_j``.

Morphisms compose with A inserted everywhere::

    b^tw_k(u_k, ..., u_1) = Σ b(A^{p_k}, u_k, A^{p_{k-1}}, ..., u_1, A^{p_0})

which also gives the differential b^tw_1. The splitting, homotopy transfer and
cyclic splitting live here because they act on endomorphism algebras of
twisted objects.
"""

from __future__ import annotations

import itertools
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional, Sequence

from sympy.polys.domains import QQ
from sympy.polys.matrices.exceptions import DMNonInvertibleMatrixError
from sympy.polys.rings import PolyElement, ring

from runtime.motivic.ainfty import (
    AInftyCategory,
    CheckResult,
    Generator,
    Matrix,
    Tau,
    Vector,
    Violation,
    accumulate,
    check_matrix,
    matrix_op,
    matrix_pairing,
    potential_value,
    scale,
)
from runtime.motivic.config import load_config
from runtime.motivic.errors import (
    Degenerate,
    InvalidSplitting,
    NotClosed,
    ShapeError,
    TwistedError,
)
from runtime.motivic.scalars import (
    from_qq,
    inverse,
    mat_vec,
    nullspace,
    rref,
    span_basis,
    to_qq,
)
from runtime.motivic.telemetry import record_check, trace_operation

logger = logging.getLogger(__name__)


def zero_matrix(rows: int, cols: int) -> Matrix:
    return [[{} for _ in range(cols)] for _ in range(rows)]


def add_matrix(target: Matrix, other: Matrix) -> None:
    for i, row in enumerate(other):
        for j, entry in enumerate(row):
            for g, c in entry.items():
                accumulate(target[i][j], g, c)


def is_zero_matrix(mat: Matrix) -> bool:
    return all(not entry for row in mat for entry in row)


def _shift_tau(tau: Tau, k: int) -> Tau:
    return tuple((obj, n + k) for obj, n in tau)


# ============================================================================
# Twisted objects and morphisms
# ============================================================================

@dataclass(frozen=True, eq=False)
class TwistedObject:
    tau: Tau
    a: Matrix
    name: str = ""

    def __post_init__(self):
        n = len(self.tau)
        if len(self.a) != n or any(len(row) != n for row in self.a):
            raise ShapeError(f"twisted object matrix must be {n}x{n}")
        for i in range(n):
            for j in range(i + 1):
                if self.a[i][j]:
                    raise ShapeError(f"twisted object matrix is not strictly upper triangular at ({i},{j})")

    @classmethod
    def generator(cls, obj: str, shift: int = 0) -> TwistedObject:
        return cls(((obj, shift),), [[{}]], name=f"{obj}[{shift}]" if shift else obj)

    @classmethod
    def zero(cls) -> TwistedObject:
        return cls((), [], name="0")

    @classmethod
    def direct_sum(cls, *objects: TwistedObject) -> TwistedObject:
        tau: Tau = tuple(t for m in objects for t in m.tau)
        a = zero_matrix(len(tau), len(tau))
        offset = 0
        for m in objects:
            for i, row in enumerate(m.a):
                for j, entry in enumerate(row):
                    a[offset + i][offset + j] = dict(entry)
            offset += m.size
        return cls(tau, a)

    @property
    def size(self) -> int:
        return len(self.tau)

    def shifted(self, k: int) -> TwistedObject:
        return TwistedObject(_shift_tau(self.tau, k), [[dict(e) for e in row] for row in self.a])

    def dimension_vector(self, objects: Sequence[str]) -> tuple[int, ...]:
        return tuple(sum(1 for obj, _ in self.tau if obj == o) for o in objects)

    def same_as(self, other: TwistedObject) -> bool:
        return self is other or (self.tau == other.tau and self.a == other.a)


@dataclass(frozen=True, eq=False)
class TwMorphism:
    source: TwistedObject
    target: TwistedObject
    matrix: Matrix
    degree: int

    def is_zero(self) -> bool:
        return is_zero_matrix(self.matrix)


def validate(cat: AInftyCategory, obj: TwistedObject) -> TwistedObject:
    """Raise unless ``obj`` has degree-1 entries and solves the MC equation."""
    check_matrix(cat, obj.a, obj.tau, obj.tau, 1)
    if not is_zero_matrix(mc_residual(cat, obj.tau, obj.a)):
        raise TwistedError(f"{obj.name or 'twisted object'} does not satisfy the Maurer-Cartan equation")
    return obj


def mc_residual(cat: AInftyCategory, tau: Tau, a: Matrix) -> Matrix:
    """Σ_k b_k(a, ..., a); zero iff (τ, a) is a twisted object."""
    check_matrix(cat, a, tau, tau, 1)
    total = zero_matrix(len(tau), len(tau))
    for k in range(1, cat.max_arity + 1):
        add_matrix(total, matrix_op(cat, [a] * k, [tau] * (k + 1)))
    return total


def _patterns(budget: int, slots: int):
    for pattern in itertools.product(range(budget + 1), repeat=slots):
        if sum(pattern) <= budget:
            yield pattern


def insertions(
    cat: AInftyCategory, objects: Sequence[TwistedObject], morphisms: Sequence[Matrix]
) -> Matrix:
    """Σ b(A_k^{p_k}, u_k, ..., u_1, A_0^{p_0}) where u_{r+1} = morphisms[r]: objects[r] -> objects[r+1]."""
    k = len(morphisms)
    result = zero_matrix(objects[k].size, objects[0].size)
    budget = cat.max_arity - k
    if budget < 0:
        return result
    for pattern in _patterns(budget, k + 1):
        applied: list[Matrix] = []
        taus: list[Tau] = [objects[0].tau]
        for r in range(k + 1):
            for _ in range(pattern[r]):
                applied.append(objects[r].a)
                taus.append(objects[r].tau)
            if r < k:
                applied.append(morphisms[r])
                taus.append(objects[r + 1].tau)
        add_matrix(result, matrix_op(cat, list(reversed(applied)), taus))
    return result


def tw_compose(cat: AInftyCategory, morphisms: Sequence[TwMorphism]) -> TwMorphism:
    """b^tw on morphisms given in written order (u_k, ..., u_1)."""
    if not morphisms:
        raise ShapeError("tw_compose needs at least one morphism")
    chain = list(reversed(morphisms))
    for first, second in zip(chain, chain[1:]):
        if not first.target.same_as(second.source):
            raise ShapeError("morphisms are not composable")
    objects = [chain[0].source] + [u.target for u in chain]
    matrix = insertions(cat, objects, [u.matrix for u in chain])
    degree = sum(u.degree for u in chain) - len(chain) + 2
    return TwMorphism(chain[0].source, chain[-1].target, matrix, degree)


def tw_differential(cat: AInftyCategory, u: TwMorphism) -> TwMorphism:
    return tw_compose(cat, [u])


def cone(cat: AInftyCategory, m: TwMorphism) -> TwistedObject:
    """Cone of a closed degree-0 map m: M_a -> M_b, as (τ_b, τ_a[1]) with [[A_b, m], [0, A_a]]."""
    if m.degree != 0:
        raise TwistedError(f"cone needs a degree-0 morphism, got degree {m.degree}")
    check_matrix(cat, m.matrix, m.source.tau, m.target.tau, 0)
    if not tw_differential(cat, m).is_zero():
        raise NotClosed("cone of a morphism that is not closed")
    upper = m.target
    lower = m.source.shifted(1)
    return _glue(upper, lower, m.matrix)


def _glue(upper: TwistedObject, lower: TwistedObject, block: Matrix) -> TwistedObject:
    glued = TwistedObject.direct_sum(upper, lower)
    for i, row in enumerate(block):
        for j, entry in enumerate(row):
            glued.a[i][upper.size + j] = dict(entry)
    return TwistedObject(glued.tau, glued.a)


def extension_object(
    cat: AInftyCategory, m1: TwistedObject, m2: TwistedObject, alpha: Matrix
) -> TwistedObject:
    """(τ₁ ⊕ τ₂, [[A₁, α], [0, A₂]]) for a closed degree-1 α: M₂ -> M₁."""
    check_matrix(cat, alpha, m2.tau, m1.tau, 1)
    u = TwMorphism(m2, m1, alpha, 1)
    if not tw_differential(cat, u).is_zero():
        raise NotClosed("extension class is not closed")
    return _glue(m1, m2, alpha)


# ============================================================================
# Hom complexes
# ============================================================================

@dataclass(frozen=True)
class TwBasisElement:
    row: int
    col: int
    generator: str
    degree: int

    @property
    def label(self) -> str:
        return f"{self.generator}_{self.row + 1}{self.col + 1}"


def tw_hom_basis(
    cat: AInftyCategory, source: TwistedObject, target: TwistedObject, degree: Optional[int] = None
) -> list[TwBasisElement]:
    """Basis of Hom_tw(source, target), ordered by degree, then entry, then generator."""
    out = []
    for i, (obj_i, n_i) in enumerate(target.tau):
        for j, (obj_j, n_j) in enumerate(source.tau):
            for g in cat.hom_basis(obj_j, obj_i):
                tw_degree = g.degree - n_i + n_j
                if degree is None or tw_degree == degree:
                    out.append(TwBasisElement(i, j, g.name, tw_degree))
    out.sort(key=lambda e: (e.degree, e.row, e.col))
    return out


def to_matrix(basis: Sequence[TwBasisElement], coords: Sequence[Any], rows: int, cols: int) -> Matrix:
    mat = zero_matrix(rows, cols)
    for element, c in zip(basis, coords):
        if c:
            accumulate(mat[element.row][element.col], element.generator, c)
    return mat


def from_matrix(basis: Sequence[TwBasisElement], mat: Matrix) -> list[Any]:
    index = {(e.row, e.col, e.generator): k for k, e in enumerate(basis)}
    coords: list[Any] = [Fraction(0)] * len(basis)
    for i, row in enumerate(mat):
        for j, entry in enumerate(row):
            for g, c in entry.items():
                k = index.get((i, j, g))
                if k is None:
                    raise ShapeError(f"entry ({i},{j}) component {g} is outside the basis")
                coords[k] = c
    return coords


@dataclass
class LinearMap:
    """The differential b^tw_1 on End_tw(M) in the basis ``basis``."""

    basis: tuple[TwBasisElement, ...]
    images: dict[str, dict[str, Fraction]]

    def degree_basis(self, k: int) -> list[TwBasisElement]:
        return [e for e in self.basis if e.degree == k]

    def block(self, k: int) -> list[list[Fraction]]:
        """Matrix of d: degree k -> degree k + 1 (rows index the target basis)."""
        src = self.degree_basis(k)
        tgt = self.degree_basis(k + 1)
        return [[self.images[s.label].get(t.label, Fraction(0)) for s in src] for t in tgt]

    def degrees(self) -> list[int]:
        return sorted({e.degree for e in self.basis})

    def rank(self, k: int) -> int:
        rows = self.block(k)
        return len(rref(rows, len(self.degree_basis(k)))[1]) if rows else 0

    def cohomology_dims(self) -> dict[int, int]:
        return {
            k: len(self.degree_basis(k)) - self.rank(k) - self.rank(k - 1) for k in self.degrees()
        }

    def squares_to_zero(self) -> bool:
        for label, image in self.images.items():
            total: dict[str, Fraction] = {}
            for mid, c in image.items():
                for out, d in self.images.get(mid, {}).items():
                    accumulate(total, out, c * d)
            if total:
                logger.debug("d^2 is nonzero on %s", label)
                return False
        return True


def differential_map(cat: AInftyCategory, m: TwistedObject) -> LinearMap:
    basis = tuple(tw_hom_basis(cat, m, m))
    images: dict[str, dict[str, Fraction]] = {}
    for element in basis:
        u = to_matrix([element], [Fraction(1)], m.size, m.size)
        image = insertions(cat, [m, m], [u])
        coords = from_matrix(basis, image)
        images[element.label] = {b.label: c for b, c in zip(basis, coords) if c}
    return LinearMap(basis, images)


def extension_differential(
    cat: AInftyCategory, m1: TwistedObject, m2: TwistedObject, alpha: Matrix
) -> LinearMap:
    """d_α on ⊕ Hom(M_i, M_j), i.e. b^tw_1 on the endomorphisms of the extension."""
    return differential_map(cat, extension_object(cat, m1, m2, alpha))


def ext_dimensions(cat: AInftyCategory, m: TwistedObject) -> dict[int, int]:
    return differential_map(cat, m).cohomology_dims()


# ============================================================================
# Symbolic Maurer-Cartan systems
# ============================================================================

def _variable_name(element: TwBasisElement, unique: bool) -> str:
    base = f"x{element.row + 1}{element.col + 1}"
    return base if unique else f"{base}_{element.generator.replace('*', 'd')}"


def symbolic_matrix(
    cat: AInftyCategory, tau: Tau, strict: bool = True
) -> tuple[Any, list[PolyElement], Matrix]:
    """A generic degree-1 matrix over ``tau`` with one indeterminate per basis element."""
    bare = TwistedObject(tau, zero_matrix(len(tau), len(tau)))
    elements = [
        e for e in tw_hom_basis(cat, bare, bare, 1) if not strict or e.row < e.col
    ]
    counts: dict[tuple[int, int], int] = {}
    for e in elements:
        counts[(e.row, e.col)] = counts.get((e.row, e.col), 0) + 1
    names = [_variable_name(e, counts[(e.row, e.col)] == 1) for e in elements]
    if not names:
        return None, [], zero_matrix(len(tau), len(tau))
    r, *gens = ring(names, QQ)
    return r, gens, to_matrix(elements, gens, len(tau), len(tau))


def mc_system(cat: AInftyCategory, tau: Tau) -> list[tuple[tuple[int, int, str], PolyElement]]:
    """The MC equations of a generic strictly upper triangular matrix, canonically ordered."""
    _, gens, a = symbolic_matrix(cat, tau, strict=True)
    if not gens:
        return []
    residual = mc_residual(cat, tau, a)
    equations = []
    for i, row in enumerate(residual):
        for j, entry in enumerate(row):
            for g in sorted(entry):
                equations.append(((i + 1, j + 1, g), entry[g]))
    return equations


def tau_from_dimensions(cat: AInftyCategory, dims: Sequence[int]) -> Tau:
    if len(dims) != len(cat.objects):
        raise ShapeError(f"dimension vector needs {len(cat.objects)} entries, got {len(dims)}")
    return tuple((obj, 0) for obj, d in zip(cat.objects, dims) for _ in range(d))


# ============================================================================
# Potentials on twisted objects
# ============================================================================

def twisted_potential(cat: AInftyCategory, m: TwistedObject, u: Matrix):
    """W_A(u) = Σ_n (1/n)⟨b^tw_{n-1}(u, ..., u), u⟩ on End_tw(M)."""
    if any(shift for _, shift in m.tau):
        raise TwistedError("potentials on twisted objects need all shifts zero")
    total = None
    for n in range(2, cat.max_arity + 2):
        inner = insertions(cat, [m] * n, [u] * (n - 1))
        term = matrix_pairing(cat, inner, u)
        if term:
            term = scale(term, Fraction(1, n))
            total = term if total is None else total + term
    return Fraction(0) if total is None else total


def endomorphism_potential(
    cat: AInftyCategory, m: TwistedObject, vectors: Sequence[Matrix], names: Optional[Sequence[str]] = None
):
    """The potential of End_tw(M) restricted to span(vectors), as a polynomial ring element."""
    names = list(names) if names else [f"t{k + 1}" for k in range(len(vectors))]
    r, *gens = ring(names, QQ)
    u = zero_matrix(m.size, m.size)
    for t, vec in zip(gens, vectors):
        for i, row in enumerate(vec):
            for j, entry in enumerate(row):
                for g, c in entry.items():
                    accumulate(u[i][j], g, t * to_qq(Fraction(c)))
    value = twisted_potential(cat, m, u)
    if isinstance(value, Fraction):
        value = r(to_qq(value))
    return r, gens, value


def shifted_potential_check(
    cat: AInftyCategory, tau: Tau, alpha: Matrix, samples: int = 200, seed: int = 0, bound: int = 5
) -> CheckResult:
    """Check W_α(a) = W(α + a) on random rational matrices a."""
    m = validate(cat, TwistedObject(tau, alpha))
    basis = tw_hom_basis(cat, m, m, 1)
    rng = random.Random(seed)
    violations: list[Violation] = []
    with trace_operation("shifted_potential_check", {"samples": samples}) as span:
        for _ in range(samples):
            coords = [Fraction(rng.randint(-bound, bound), rng.randint(1, bound)) for _ in basis]
            a = to_matrix(basis, coords, m.size, m.size)
            total = [[dict(e) for e in row] for row in alpha]
            add_matrix(total, a)
            lhs = twisted_potential(cat, m, a)
            rhs = potential_value(cat, tau, total)
            if lhs != rhs:
                violations.append(
                    Violation("shifted_potential", 0, tuple(str(c) for c in coords), {"lhs": lhs, "rhs": rhs})
                )
        record_check(span, not violations, samples)
    return CheckResult("shifted_potential", not violations, samples, (0, 0), violations)


# ============================================================================
# Endomorphism algebras, splittings and homotopy transfer
# ============================================================================

def endomorphism_algebra(
    cat: AInftyCategory, m: TwistedObject, max_arity: Optional[int] = None
) -> AInftyCategory:
    """End_tw(M) as a one-object category with its ops table up to ``max_arity``."""
    basis = tw_hom_basis(cat, m, m)
    max_arity = cat.max_arity if max_arity is None else min(max_arity, cat.max_arity)
    gens = tuple(Generator(e.label, "M", "M", e.degree) for e in basis)
    shifts = {e.label: e.degree - 1 for e in basis}
    lowest = min(shifts.values(), default=0)
    highest = max(shifts.values(), default=0)
    ops: dict[tuple[str, ...], dict[str, Fraction]] = {}
    for k in range(1, max_arity + 1):
        for combo in itertools.product(basis, repeat=k):
            total = sum(shifts[e.label] for e in combo) + 1
            if not lowest <= total <= highest:
                continue
            chain = [to_matrix([e], [Fraction(1)], m.size, m.size) for e in reversed(combo)]
            image = insertions(cat, [m] * (k + 1), chain)
            coords = from_matrix(basis, image)
            out = {b.label: c for b, c in zip(basis, coords) if c}
            if out:
                ops[tuple(e.label for e in combo)] = out
    pairing = None
    if cat.pairing is not None and not any(shift for _, shift in m.tau):
        pairing = {}
        for u in basis:
            for v in basis:
                if u.col == v.row and u.row == v.col:
                    c = cat.pairing.get((u.generator, v.generator))
                    if c:
                        pairing[(u.label, v.label)] = c
    logger.debug("endomorphism algebra: %d generators, %d table entries", len(gens), len(ops))
    return AInftyCategory(("M",), gens, ops, pairing, {}, name=f"End({m.name or 'M'})")


@dataclass
class DegreeSplit:
    names: list[str]
    h: list[list[Fraction]]
    v1: list[list[Fraction]]
    v2: list[list[Fraction]]
    coordinates: list[list[Fraction]] = field(default_factory=list)


@dataclass
class Splitting:
    """H ⊕ V₁ ⊕ V₂ per degree with b₁: V₁ -> V₂ an isomorphism and b₁|H = 0."""

    degrees: dict[int, DegreeSplit]

    def h_vectors(self, k: int) -> list[list[Fraction]]:
        return self.degrees[k].h if k in self.degrees else []


def _b1_block(alg: AInftyCategory, src: list[str], tgt: list[str]) -> list[list[Fraction]]:
    index = {name: i for i, name in enumerate(tgt)}
    rows = [[Fraction(0)] * len(src) for _ in tgt]
    for j, name in enumerate(src):
        for out, c in alg.b((name,)).items():
            if out in index:
                rows[index[out]][j] = Fraction(c)
    return rows


def _by_degree(alg: AInftyCategory) -> dict[int, list[str]]:
    out: dict[int, list[str]] = {}
    for g in alg.generators:
        out.setdefault(g.degree, []).append(g.name)
    return out


def compute_splitting(alg: AInftyCategory) -> Splitting:
    """Deterministic splitting: lowest-index pivots throughout."""
    names = _by_degree(alg)
    degrees: dict[int, DegreeSplit] = {}
    for k, current in sorted(names.items()):
        n = len(current)
        above = names.get(k + 1, [])
        below = names.get(k - 1, [])
        d_k = _b1_block(alg, current, above) if above else []
        kernel = span_basis(nullspace(d_k, n), n) if d_k else [
            [Fraction(int(i == j)) for j in range(n)] for i in range(n)
        ]
        _, kernel_pivots = rref(kernel, n)
        d_prev = _b1_block(alg, below, current) if below else []
        images = [[row[j] for row in d_prev] for j in range(len(below))] if d_prev else []
        image, image_pivots = rref(images, n) if images else ([], ())
        h = [row for row, p in zip(kernel, kernel_pivots) if p not in image_pivots]
        v1 = [[Fraction(int(c == j)) for j in range(n)] for c in range(n) if c not in kernel_pivots]
        degrees[k] = DegreeSplit(current, h, v1, [list(r) for r in image])
    split = Splitting(degrees)
    _finish(split)
    return split


def _finish(split: Splitting) -> None:
    for part in split.degrees.values():
        full = part.h + part.v1 + part.v2
        n = len(part.names)
        if len(full) != n:
            raise InvalidSplitting(
                f"degree pieces have {len(full)} vectors for a space of dimension {n}"
            )
        if n:
            columns = [[full[j][i] for j in range(n)] for i in range(n)]
            try:
                part.coordinates = inverse(columns)
            except DMNonInvertibleMatrixError as err:
                raise InvalidSplitting("splitting vectors are not a basis") from err


def validate_splitting(alg: AInftyCategory, split: Splitting) -> None:
    _finish(split)
    names = _by_degree(alg)
    for k, part in split.degrees.items():
        above = names.get(k + 1, [])
        if not above:
            if part.v1:
                raise InvalidSplitting(f"degree {k} has V1 vectors but no differential")
            continue
        d_k = _b1_block(alg, part.names, above)
        for vec in part.h:
            if any(mat_vec(d_k, vec)):
                raise InvalidSplitting(f"b1 does not vanish on an H vector in degree {k}")
        images = [mat_vec(d_k, vec) for vec in part.v1]
        target = split.degrees.get(k + 1)
        v2 = target.v2 if target else []
        independent = len(rref(images, len(above))[1]) if images else 0
        spans = len(rref(images + v2, len(above))[1]) if images or v2 else 0
        if not len(images) == len(v2) == independent == spans:
            raise InvalidSplitting(f"b1 does not map V1 onto V2 in degree {k}")


@dataclass
class TransferResult:
    category: AInftyCategory
    inclusion: dict[str, dict[str, Fraction]]
    splitting: Splitting


def _vector_name(names: Sequence[str], vec: Sequence[Fraction]) -> str:
    terms = []
    for name, c in zip(names, vec):
        if not c:
            continue
        if c == 1:
            terms.append(name)
        elif c == -1:
            terms.append(f"-{name}")
        else:
            terms.append(f"{c}*{name}")
    text = "+".join(terms).replace("+-", "-")
    return text


def homotopy_transfer(
    alg: AInftyCategory, splitting: Optional[Splitting] = None, n_max: int = 4
) -> TransferResult:
    """Tree-formula transfer of a one-object A∞-structure onto H.

    With h(b₁w) = -w on V₂ (zero on H ⊕ V₁) and p the projection to H:
    i_r = h Σ b_k(i_{r_1}, ..., i_{r_k}) and b'_r = p Σ b_k(i_{r_1}, ..., i_{r_k}).
    """
    if len(alg.objects) != 1:
        raise ShapeError("homotopy_transfer works on one-object algebras")
    split = splitting or compute_splitting(alg)
    if splitting is not None:
        validate_splitting(alg, split)
    h_names: list[str] = []
    inclusion: dict[str, Vector] = {}
    h_degree: dict[str, int] = {}
    for k, part in sorted(split.degrees.items()):
        for vec in part.h:
            label = _vector_name(part.names, vec)
            h_names.append(label)
            inclusion[label] = {n: c for n, c in zip(part.names, vec) if c}
            h_degree[label] = k

    def decompose(vec: Vector) -> dict[int, tuple[list[Fraction], DegreeSplit]]:
        out = {}
        for k, part in split.degrees.items():
            x = [vec.get(n, Fraction(0)) for n in part.names]
            if any(x):
                out[k] = (mat_vec(part.coordinates, x), part)
        return out

    def project(vec: Vector) -> Vector:
        out: Vector = {}
        for k, (coords, part) in decompose(vec).items():
            for label_vec, c in zip(part.h, coords[: len(part.h)]):
                if c:
                    accumulate(out, _vector_name(part.names, label_vec), c)
        return out

    def homotopy(vec: Vector) -> Vector:
        out: Vector = {}
        for k, (coords, part) in decompose(vec).items():
            start = len(part.h) + len(part.v1)
            v2_coords = coords[start:]
            if not any(v2_coords):
                continue
            below = split.degrees.get(k - 1)
            if below is None or not below.v1:
                raise InvalidSplitting(f"no V1 in degree {k - 1} to invert b1 on")
            d_block = _b1_block(alg, below.names, part.names)
            # Columns: images of the V1 vectors written in V2 coordinates.
            images = []
            for v in below.v1:
                image = mat_vec(d_block, v)
                images.append(mat_vec(part.coordinates, image)[start:])
            square = [[images[j][i] for j in range(len(images))] for i in range(len(images))]
            w_coords = mat_vec(inverse(square), v2_coords)
            for v, c in zip(below.v1, w_coords):
                for name, x in zip(below.names, v):
                    if x and c:
                        accumulate(out, name, -c * x)
        return out

    tree_cache: dict[tuple[str, ...], Vector] = {}
    incl_cache: dict[tuple[str, ...], Vector] = {}

    def tree_sum(xs: tuple[str, ...]) -> Vector:
        if xs in tree_cache:
            return tree_cache[xs]
        r = len(xs)
        total: Vector = {}
        for cuts in range(1, 1 << (r - 1)):
            bounds = [0] + [p + 1 for p in range(r - 1) if cuts >> p & 1] + [r]
            blocks = [xs[bounds[t]:bounds[t + 1]] for t in range(len(bounds) - 1)]
            inputs = [include(block) for block in blocks]
            if any(not v for v in inputs):
                continue
            for name, c in alg.apply(inputs).items():
                accumulate(total, name, c)
        tree_cache[xs] = total
        return total

    def include(xs: tuple[str, ...]) -> Vector:
        if len(xs) == 1:
            return inclusion[xs[0]]
        if xs not in incl_cache:
            incl_cache[xs] = homotopy(tree_sum(xs))
        return incl_cache[xs]

    shifts = {n: h_degree[n] - 1 for n in h_names}
    lowest, highest = (min(shifts.values()), max(shifts.values())) if shifts else (0, 0)
    ops: dict[tuple[str, ...], dict[str, Fraction]] = {}
    with trace_operation("homotopy_transfer", {"n_max": n_max, "dim_h": len(h_names)}):
        for r in range(2, n_max + 1):
            for combo in itertools.product(h_names, repeat=r):
                total = sum(shifts[n] for n in combo) + 1
                if not lowest <= total <= highest:
                    continue
                value = project(tree_sum(combo))
                if value:
                    ops[combo] = value
            logger.debug("transfer arity %d: %d entries", r, len(ops))

    pairing = None
    if alg.pairing is not None:
        pairing = {}
        for u in h_names:
            for v in h_names:
                c = alg.pair(inclusion[u], inclusion[v])
                if c:
                    pairing[(u, v)] = c
    gens = tuple(Generator(n, "M", "M", h_degree[n]) for n in h_names)
    category = AInftyCategory(("M",), gens, ops, pairing, {}, name=f"H({alg.name})")
    return TransferResult(category, inclusion, split)


# ============================================================================
# Cyclic splitting W = W_min + Q
# ============================================================================

@dataclass
class CyclicSplit:
    w_min: PolyElement
    q: PolyElement
    hessian: list[list[Fraction]]
    substitution: dict[str, PolyElement]
    inverse_substitution: dict[str, PolyElement]
    order: int


def truncate(p: PolyElement, order: int) -> PolyElement:
    return p.ring.from_dict({m: c for m, c in p.items() if sum(m) <= order})


def _homogeneous(p: PolyElement, degree: int) -> PolyElement:
    return p.ring.from_dict({m: c for m, c in p.items() if sum(m) == degree})


def cyclic_split(
    potential: PolyElement,
    h_vars: Sequence[PolyElement],
    v_vars: Sequence[PolyElement],
    order: Optional[int] = None,
) -> CyclicSplit:
    """Split ``potential`` into W_min(h) + Q(v) by substitutions v -> v - S⁻¹G to ``order``.

    At each degree k the v-containing part of degree k is written Σ v_j G_j
    (each monomial charged to its first v variable) and removed by the
    substitution, where S is the Hessian of the quadratic part in v.
    """
    order = order if order is not None else load_config().order
    r = potential.ring
    gens = r.gens
    h_idx = [gens.index(x) for x in h_vars]
    v_idx = [gens.index(x) for x in v_vars]
    if sorted(h_idx + v_idx) != list(range(len(gens))):
        raise InvalidSplitting("h and v variables must partition the ring generators")
    if any(sum(m) < 2 for m in potential.keys()):
        raise InvalidSplitting("potential has a constant or linear part")

    quadratic = _homogeneous(potential, 2)
    for m in quadratic.keys():
        if any(m[i] for i in h_idx):
            raise InvalidSplitting("quadratic part must vanish on H and on H x V")
    n = len(v_vars)
    hessian = [
        [_constant(quadratic.diff(v_vars[i]).diff(v_vars[j])) for j in range(n)]
        for i in range(n)
    ]
    if n and len(rref(hessian, n)[1]) != n:
        raise Degenerate("quadratic part is degenerate on V")
    s_inv = inverse(hessian) if n else []

    current = truncate(potential, order)
    phi = {x: x for x in v_vars}
    for k in range(3, order + 1):
        layer = _homogeneous(current, k)
        g_parts = [r.zero for _ in v_vars]
        for m, c in layer.items():
            hit = next((t for t, i in enumerate(v_idx) if m[i]), None)
            if hit is None:
                continue
            reduced = list(m)
            reduced[v_idx[hit]] -= 1
            g_parts[hit] += r.from_dict({tuple(reduced): c})
        if all(not g for g in g_parts):
            continue
        step = []
        for i, x in enumerate(v_vars):
            shift = r.zero
            for j in range(n):
                if s_inv[i][j]:
                    shift += g_parts[j] * to_qq(s_inv[i][j])
            step.append((x, x - shift))
        current = truncate(current.compose(step), order)
        phi = {x: truncate(p.compose(step), order) for x, p in phi.items()}
        logger.debug("cyclic split: removed degree %d v-terms", k)

    w_min = r.from_dict({m: c for m, c in current.items() if not any(m[i] for i in v_idx)})
    q = quadratic
    rest = current - w_min - q
    if rest:
        raise InvalidSplitting("coordinate change left mixed terms below the truncation order")

    inverse_map = {x: x for x in v_vars}
    for _ in range(order):
        step = [(x, inverse_map[x]) for x in v_vars]
        inverse_map = {
            x: truncate(x - (phi[x].compose(step) - inverse_map[x]), order) for x in v_vars
        }
    check = truncate((w_min + q).compose([(x, inverse_map[x]) for x in v_vars]), order)
    if check != truncate(potential, order):
        raise InvalidSplitting("re-substitution does not reproduce the potential")
    return CyclicSplit(
        w_min=w_min,
        q=q,
        hessian=hessian,
        substitution={str(x): phi[x] for x in v_vars},
        inverse_substitution={str(x): inverse_map[x] for x in v_vars},
        order=order,
    )


def _constant(p: PolyElement) -> Fraction:
    return from_qq(p.LC) if p else Fraction(0)


def same_quartic_class(p: PolyElement, q: PolyElement) -> bool:
    """One-variable potentials agree up to a unit scalar and coordinate scaling."""
    def monomial_degree(x: PolyElement) -> Optional[tuple[int, int]]:
        terms = [m for m, c in x.items() if c]
        if len(terms) != 1:
            return None
        support = [i for i, e in enumerate(terms[0]) if e]
        if len(support) != 1:
            return None
        return support[0], terms[0][support[0]]

    a, b = monomial_degree(p), monomial_degree(q)
    return a is not None and b is not None and a[1] == b[1]


# ============================================================================
# Minimal slices
# ============================================================================

@dataclass
class Slice:
    basis: list[TwBasisElement]
    h: list[list[Fraction]]
    v: list[list[Fraction]]

    def matrices(self, size: int) -> tuple[list[Matrix], list[Matrix]]:
        return (
            [to_matrix(self.basis, vec, size, size) for vec in self.h],
            [to_matrix(self.basis, vec, size, size) for vec in self.v],
        )


def minimal_slice(cat: AInftyCategory, m: TwistedObject) -> Slice:
    """H¹ ⊕ V₁¹ inside Hom¹_tw(M, M); the gauge directions im d⁰ are dropped."""
    d = differential_map(cat, m)
    basis1 = d.degree_basis(1)
    n = len(basis1)
    d1 = d.block(1)
    kernel = span_basis(nullspace(d1, n), n) if d1 else [
        [Fraction(int(i == j)) for j in range(n)] for i in range(n)
    ]
    _, kernel_pivots = rref(kernel, n)
    d0 = d.block(0)
    images = [[row[j] for row in d0] for j in range(len(d.degree_basis(0)))] if d0 else []
    _, image_pivots = rref(images, n) if images else ([], ())
    h = [row for row, p in zip(kernel, kernel_pivots) if p not in image_pivots]
    v = [[Fraction(int(c == j)) for j in range(n)] for c in range(n) if c not in kernel_pivots]
    return Slice(basis1, h, v)


def split_endomorphism_potential(
    cat: AInftyCategory, m: TwistedObject, order: Optional[int] = None
) -> CyclicSplit:
    """W on the minimal slice of End_tw(M), split into W_min on H¹ and Q on V₁¹."""
    piece = minimal_slice(cat, m)
    h_mats, v_mats = piece.matrices(m.size)
    names = [f"x{i + 1}" for i in range(len(h_mats))] + [f"y{i + 1}" for i in range(len(v_mats))]
    if not names:
        r, _ = ring("x0", QQ)
        zero = r.zero
        return CyclicSplit(zero, zero, [], {}, {}, order or load_config().order)
    r, gens, value = endomorphism_potential(cat, m, h_mats + v_mats, names)
    return cyclic_split(value, gens[: len(h_mats)], gens[len(h_mats):], order)
