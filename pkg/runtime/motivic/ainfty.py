"""
Finite A∞-categories in the shifted (b, sign-free) convention.

A category is a finite set of objects, a graded basis of generators (each a
morphism ``source -> target``) and a sparse table of higher compositions

    b_n(x_n, ..., x_1)

written with x_1 applied first, so x_{i+1}.source == x_i.target. Shifted degree
is ``degree - 1`` and every b_n raises total shifted degree by one. The
Stasheff identities read

    Σ (-1)^{|x_n|' + ... + |x_{j+k+1}|'} b(x_n, ..., b_k(x_{j+k}, ..., x_{j+1}), ..., x_1) = 0.

The cyclic pairing ⟨u, v⟩ pairs u: B -> A with v: A -> B and is graded
antisymmetric in the shifted sense. Cyclic invariance is

    ⟨b_n(x_n, ..., x_1), x_0⟩ = (-1)^{|x_0|'(|x_1|' + ... + |x_n|')} ⟨b_n(x_0, x_n, ..., x_2), x_1⟩.

``koszul_dual`` builds D(Q, W): units e_v in degree 0, a dual arrow a* in
degree 1 (target -> source), the arrow a in degree 2 and w_v in degree 3, with
higher products contracted from the potential.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Iterator, Mapping, Optional, Sequence

from runtime.motivic.config import load_config
from runtime.motivic.errors import MissingPairing, QuiverError, ShapeError, TwistedError
from runtime.motivic.formats import Arrow, QuiverWithPotential
from runtime.motivic.telemetry import record_check, trace_operation

logger = logging.getLogger(__name__)

__all__ = [
    "AInftyCategory",
    "Arrow",
    "CheckResult",
    "Generator",
    "QuiverWithPotential",
    "Violation",
    "arity_bound",
    "check_cyclic",
    "check_stasheff",
    "cyclic_coefficients",
    "hom_dimensions",
    "koszul_dual",
    "matrix_op",
    "matrix_pairing",
    "one_object_category",
    "potential_value",
    "sphere_category",
    "with_op",
    "with_pairing_entry",
]

# A vector is a sparse map generator name -> coefficient. Coefficients are
# Fractions or elements of a sympy polynomial ring over QQ.
Vector = dict[str, Any]
Tau = tuple[tuple[str, int], ...]
Matrix = list[list[Vector]]


@dataclass(frozen=True)
class Generator:
    name: str
    source: str
    target: str
    degree: int

    @property
    def shifted(self) -> int:
        return self.degree - 1


@dataclass(frozen=True)
class Violation:
    """One failed identity: which check, at which arity, on which inputs."""

    kind: str
    arity: int
    inputs: tuple[str, ...]
    value: dict[str, Fraction]


@dataclass
class CheckResult:
    name: str
    passed: bool
    checked: int
    arities: tuple[int, int]
    violations: list[Violation] = field(default_factory=list)

    def summary(self) -> str:
        low, high = self.arities
        if self.passed:
            return f"PASS (arities {low}..{high})"
        first = min(v.arity for v in self.violations)
        return f"FAIL ({len(self.violations)} violations, first at arity {first})"


# ------------------------------------------------------------------ coefficients
def scale(value, c: Fraction):
    """``value * c`` for a structure constant ``c``, keeping the coefficient type."""
    if c == 1:
        return value
    if isinstance(value, (Fraction, int)):
        return value * c
    from runtime.motivic.scalars import to_qq

    return value * to_qq(c)


def accumulate(target: Vector, name: str, value) -> None:
    if not value:
        return
    current = target.get(name)
    total = value if current is None else current + value
    if total:
        target[name] = total
    else:
        target.pop(name, None)


def _sign(exponent: int) -> int:
    return -1 if exponent % 2 else 1


# --------------------------------------------------------------------- category
@dataclass(frozen=True, eq=False)
class AInftyCategory:
    objects: tuple[str, ...]
    generators: tuple[Generator, ...]
    ops: Mapping[tuple[str, ...], Mapping[str, Fraction]]
    pairing: Optional[Mapping[tuple[str, str], Fraction]] = None
    units: Mapping[str, str] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        by_name: dict[str, Generator] = {}
        for g in self.generators:
            if g.name in by_name:
                raise ShapeError(f"duplicate generator {g.name!r}")
            if g.source not in self.objects or g.target not in self.objects:
                raise ShapeError(f"generator {g.name!r} uses an unknown object")
            by_name[g.name] = g
        for key, out in self.ops.items():
            if not key:
                raise ShapeError("b_0 is not supported")
            gens = [by_name.get(x) for x in key]
            if any(g is None for g in gens):
                raise ShapeError(f"operation {key} uses an unknown generator")
            for later, earlier in zip(gens, gens[1:]):
                if later.source != earlier.target:
                    raise ShapeError(f"operation {key} is not composable")
            for name in out:
                g = by_name.get(name)
                if g is None:
                    raise ShapeError(f"operation {key} outputs unknown generator {name!r}")
                if g.source != gens[-1].source or g.target != gens[0].target:
                    raise ShapeError(f"operation {key} outputs {name!r} between the wrong objects")
        for (u, v) in (self.pairing or {}):
            if u not in by_name or v not in by_name:
                raise ShapeError(f"pairing entry ({u}, {v}) uses an unknown generator")
        suffixes = {key[-m:] for key in self.ops for m in range(1, len(key) + 1)}
        object.__setattr__(self, "_by_name", by_name)
        object.__setattr__(self, "_suffixes", frozenset(suffixes))
        object.__setattr__(
            self, "_outgoing",
            {obj: tuple(g for g in self.generators if g.source == obj) for obj in self.objects},
        )

    # -------------------------------------------------------------- lookup
    def generator(self, name: str) -> Generator:
        try:
            return self._by_name[name]
        except KeyError as err:
            raise ShapeError(f"unknown generator {name!r}") from err

    def b(self, inputs: tuple[str, ...]) -> Mapping[str, Fraction]:
        return self.ops.get(inputs, {})

    @property
    def max_arity(self) -> int:
        return max((len(k) for k in self.ops), default=0)

    def is_suffix(self, names: tuple[str, ...]) -> bool:
        return names in self._suffixes

    def outgoing(self, obj: str) -> tuple[Generator, ...]:
        return self._outgoing[obj]

    def hom_basis(self, source: str, target: str, degree: Optional[int] = None) -> list[Generator]:
        return [
            g for g in self.generators
            if g.source == source and g.target == target and (degree is None or g.degree == degree)
        ]

    def pair(self, u: Vector, v: Vector):
        if self.pairing is None:
            raise MissingPairing(f"{self.name or 'category'} has no pairing")
        total = None
        for g, cg in u.items():
            for h, ch in v.items():
                c = self.pairing.get((g, h))
                if c:
                    term = scale(cg * ch, c)
                    total = term if total is None else total + term
        return Fraction(0) if total is None else total

    def apply(self, vectors: Sequence[Vector]) -> Vector:
        """Multilinear extension of b to vectors (written order)."""
        out: Vector = {}
        states: dict[tuple[str, ...], Any] = {(): None}
        for vec in reversed(vectors):
            new: dict[tuple[str, ...], Any] = {}
            for names, coeff in states.items():
                for g, c in vec.items():
                    if not c:
                        continue
                    key = (g,) + names
                    if key not in self._suffixes:
                        continue
                    value = c if coeff is None else coeff * c
                    new[key] = value if key not in new else new[key] + value
            states = new
        for names, coeff in states.items():
            for g, c in self.b(names).items():
                accumulate(out, g, scale(coeff, c))
        return out

    def m_convention(self, inputs: tuple[str, ...]) -> dict[str, Fraction]:
        """m_n from b_n: sign (-1)^{Σ_i (n - i)·deg(x_i)} for inputs (x_n, ..., x_1)."""
        n = len(inputs)
        exponent = sum(
            (n - i) * self.generator(name).degree for i, name in zip(range(n, 0, -1), inputs)
        )
        sign = _sign(exponent)
        return {g: sign * c for g, c in self.b(inputs).items()}


def _unit_ops(generators: Sequence[Generator], units: Mapping[str, str]) -> dict:
    ops: dict[tuple[str, ...], dict[str, Fraction]] = {}
    for g in generators:
        left = units.get(g.target)
        right = units.get(g.source)
        if left is not None:
            ops[(left, g.name)] = {g.name: Fraction(1)}
        if right is not None:
            ops[(g.name, right)] = {g.name: Fraction(_sign(g.degree))}
    return ops


def cyclic_coefficients(q: QuiverWithPotential) -> dict[tuple[str, ...], Fraction]:
    """Ω(c, a_k, ..., a_1): (1/n)·Σ λ_w over the rotations of each word w equal to it."""
    omega: dict[tuple[str, ...], Fraction] = {}
    for coeff, word in q.potential:
        if coeff == 0:
            continue
        n = len(word)
        for r in range(n):
            rotated = word[r:] + word[:r]
            omega[rotated] = omega.get(rotated, Fraction(0)) + Fraction(coeff) / n
    return {k: v for k, v in omega.items() if v}


def koszul_dual(q: QuiverWithPotential) -> AInftyCategory:
    """D(Q, W): the minimal cyclic A∞-category of a quiver with potential."""
    units = {v: f"e{v}" for v in q.vertices}
    gens = [Generator(units[v], v, v, 0) for v in q.vertices]
    for a in q.arrows:
        gens.append(Generator(f"{a.label}*", a.target, a.source, 1))
        gens.append(Generator(a.label, a.source, a.target, 2))
    gens += [Generator(f"w{v}", v, v, 3) for v in q.vertices]
    names = [g.name for g in gens]
    if len(set(names)) != len(names):
        raise QuiverError(f"{q.name or 'quiver'}: arrow labels clash with unit names e<v>/w<v>")

    pairing: dict[tuple[str, str], Fraction] = {}
    for v in q.vertices:
        pairing[(f"e{v}", f"w{v}")] = Fraction(1)
        pairing[(f"w{v}", f"e{v}")] = Fraction(-1)
    for a in q.arrows:
        pairing[(f"{a.label}*", a.label)] = Fraction(1)
        pairing[(a.label, f"{a.label}*")] = Fraction(-1)

    ops = _unit_ops(gens, units)
    by_name = {g.name: g for g in gens}
    for (u, v), c in pairing.items():
        if {by_name[u].degree, by_name[v].degree} == {1, 2}:
            ops[(u, v)] = {f"w{by_name[v].source}": c}
    for word, value in cyclic_coefficients(q).items():
        out, rest = word[0], word[1:]
        key = tuple(f"{x}*" for x in rest)
        entry = ops.setdefault(key, {})
        entry[out] = entry.get(out, Fraction(0)) - value
    ops = {k: {g: c for g, c in v.items() if c} for k, v in ops.items()}
    ops = {k: v for k, v in ops.items() if v}
    logger.debug("koszul dual of %s: %d generators, %d table entries", q.name, len(gens), len(ops))
    return AInftyCategory(
        objects=tuple(q.vertices),
        generators=tuple(gens),
        ops=ops,
        pairing=pairing,
        units=units,
        name=f"D({q.name})" if q.name else "D(Q,W)",
    )


def sphere_category() -> AInftyCategory:
    """k ⊕ k[-3]: one object, a unit and a degree-3 class."""
    return replace(koszul_dual(QuiverWithPotential(vertices=("1",), arrows=())), name="sphere")


def one_object_category(
    degrees: Mapping[str, int],
    ops: Mapping[tuple[str, ...], Mapping[str, Fraction]],
    pairing: Optional[Mapping[tuple[str, str], Fraction]] = None,
    unit: Optional[str] = None,
    obj: str = "*",
    name: str = "",
) -> AInftyCategory:
    gens = tuple(Generator(g, obj, obj, d) for g, d in degrees.items())
    units = {obj: unit} if unit else {}
    table = dict(_unit_ops(gens, units)) if unit else {}
    table.update({k: dict(v) for k, v in ops.items()})
    return AInftyCategory(
        objects=(obj,), generators=gens, ops=table, pairing=pairing, units=units, name=name
    )


def with_op(cat: AInftyCategory, key: tuple[str, ...], value: Mapping[str, Fraction]) -> AInftyCategory:
    ops = {k: dict(v) for k, v in cat.ops.items()}
    if value:
        ops[tuple(key)] = {g: Fraction(c) for g, c in value.items()}
    else:
        ops.pop(tuple(key), None)
    return replace(cat, ops=ops)


def with_pairing_entry(cat: AInftyCategory, key: tuple[str, str], value: Fraction) -> AInftyCategory:
    pairing = dict(cat.pairing or {})
    pairing[tuple(key)] = Fraction(value)
    return replace(cat, pairing=pairing)


def hom_dimensions(cat: AInftyCategory) -> dict[tuple[str, str], dict[int, int]]:
    out: dict[tuple[str, str], dict[int, int]] = {}
    for g in cat.generators:
        dims = out.setdefault((g.source, g.target), {})
        dims[g.degree] = dims.get(g.degree, 0) + 1
    return out


def arity_bound(cat: AInftyCategory) -> int:
    """Largest n with a nonzero b_n in the table."""
    return cat.max_arity


# --------------------------------------------------------------------- checkers
def _strings(
    cat: AInftyCategory, length: int, low: int, high: int, closed: bool = False
) -> Iterator[tuple[str, ...]]:
    """Composable strings (written order) with total shifted degree in [low, high]."""
    gens = cat.generators
    lo = min((g.shifted for g in gens), default=0)
    hi = max((g.shifted for g in gens), default=0)

    def extend(prefix: list[Generator], total: int) -> Iterator[tuple[str, ...]]:
        remaining = length - len(prefix)
        if remaining == 0:
            if low <= total <= high and (not closed or prefix[-1].target == prefix[0].source):
                yield tuple(g.name for g in reversed(prefix))
            return
        if total + lo * remaining > high or total + hi * remaining < low:
            return
        for g in cat.outgoing(prefix[-1].target):
            prefix.append(g)
            yield from extend(prefix, total + g.shifted)
            prefix.pop()

    for g in gens:
        yield from extend([g], g.shifted)


def _stasheff_value(cat: AInftyCategory, xs: tuple[str, ...]) -> Vector:
    out: Vector = {}
    n = len(xs)
    shifted = [cat.generator(x).shifted for x in xs]
    for p in range(n):
        left_sign = _sign(sum(shifted[:p]))
        for k in range(1, n - p + 1):
            inner = cat.b(xs[p:p + k])
            if not inner:
                continue
            for g, c in inner.items():
                key = xs[:p] + (g,) + xs[p + k:]
                for h, d in cat.b(key).items():
                    accumulate(out, h, left_sign * c * d)
    return out


def _degree_violations(cat: AInftyCategory, n_max: int) -> list[Violation]:
    found = []
    for key, out in cat.ops.items():
        if len(key) > n_max:
            continue
        expected = sum(cat.generator(x).shifted for x in key) + 1
        for g, c in out.items():
            if c and cat.generator(g).shifted != expected:
                found.append(Violation("degree", len(key), key, {g: Fraction(c)}))
    return found


def check_stasheff(cat: AInftyCategory, n_max: Optional[int] = None) -> CheckResult:
    """Verify every Stasheff identity on basis strings up to arity ``n_max``."""
    n_max = n_max if n_max is not None else load_config().stasheff_nmax
    if n_max < 1:
        raise ValueError(f"n_max must be at least 1, got {n_max}")
    violations = _degree_violations(cat, n_max)
    checked = 0
    relevant = 2 * cat.max_arity - 1
    shifts = [g.shifted for g in cat.generators]
    low, high = (min(shifts) - 2, max(shifts) - 2) if shifts else (0, 0)
    with trace_operation("check_stasheff", {"category": cat.name, "n_max": n_max}) as span:
        for n in range(1, min(n_max, relevant) + 1):
            # An identity raises the input total by 2 and lands in a generator.
            for xs in _strings(cat, n, low, high):
                checked += 1
                value = _stasheff_value(cat, xs)
                if value:
                    violations.append(Violation("stasheff", n, xs, value))
            logger.debug("stasheff arity %d done (%d strings so far)", n, checked)
        passed = not violations
        record_check(span, passed, checked)
    return CheckResult("stasheff", passed, checked, (1, n_max), violations)


def _w(cat: AInftyCategory, xs: tuple[str, ...]):
    """⟨b_n(x_n, ..., x_1), x_0⟩ for xs = (x_n, ..., x_1, x_0)."""
    return cat.pair(dict(cat.b(xs[:-1])), {xs[-1]: Fraction(1)})


def check_cyclic(cat: AInftyCategory, n_max: Optional[int] = None) -> CheckResult:
    """Verify graded antisymmetry of the pairing and cyclic invariance of b."""
    if cat.pairing is None:
        raise MissingPairing(f"{cat.name or 'category'} has no cyclic pairing")
    n_max = n_max if n_max is not None else load_config().stasheff_nmax
    violations: list[Violation] = []
    checked = 0
    with trace_operation("check_cyclic", {"category": cat.name, "n_max": n_max}) as span:
        for (u, v), c in cat.pairing.items():
            checked += 1
            su, sv = cat.generator(u).shifted, cat.generator(v).shifted
            mirror = cat.pairing.get((v, u), Fraction(0))
            if c != -_sign(su * sv) * mirror:
                violations.append(Violation("antisymmetry", 0, (u, v), {"pairing": Fraction(c)}))
        for n in range(1, min(n_max, cat.max_arity) + 1):
            for xs in _strings(cat, n + 1, 0, 0, closed=True):
                checked += 1
                shifted = [cat.generator(x).shifted for x in xs]
                rotated = (xs[-1],) + xs[:-1]
                lhs = _w(cat, xs)
                rhs = _sign(shifted[-1] * sum(shifted[:-1])) * _w(cat, rotated)
                if lhs != rhs:
                    violations.append(Violation("cyclic", n, xs, {"lhs": lhs, "rhs": rhs}))
        passed = not violations
        record_check(span, passed, checked)
    return CheckResult("cyclic", passed, checked, (1, n_max), violations)


# ----------------------------------------------------------------------- matrices
def check_matrix(cat: AInftyCategory, mat: Matrix, source: Tau, target: Tau, degree: int) -> None:
    """Raise ShapeError unless ``mat`` is a degree-``degree`` map from ``source`` to ``target``."""
    if len(mat) != len(target) or any(len(row) != len(source) for row in mat):
        raise ShapeError(
            f"matrix shape {len(mat)}x{len(mat[0]) if mat else 0} does not match "
            f"{len(target)}x{len(source)}"
        )
    for i, (obj_i, n_i) in enumerate(target):
        for j, (obj_j, n_j) in enumerate(source):
            for name, c in mat[i][j].items():
                if not c:
                    continue
                g = cat.generator(name)
                if g.source != obj_j or g.target != obj_i:
                    raise ShapeError(f"entry ({i},{j}) uses {name} which does not map {obj_j} -> {obj_i}")
                if g.degree - n_i + n_j != degree:
                    raise ShapeError(
                        f"entry ({i},{j}) uses {name} of twisted degree {g.degree - n_i + n_j}, "
                        f"expected {degree}"
                    )


def matrix_op(cat: AInftyCategory, mats: Sequence[Matrix], taus: Sequence[Tau]) -> Matrix:
    """b_k on matrices (M_k, ..., M_1) with M_r: taus[r-1] -> taus[r].

    Entry (i, j) is Σ over index chains of b_k on the entries, signed by the
    shift of the final target.
    """
    k = len(mats)
    if len(taus) != k + 1:
        raise ShapeError("matrix_op needs one tau more than matrices")
    rows, cols = len(taus[k]), len(taus[0])
    result: Matrix = [[{} for _ in range(cols)] for _ in range(rows)]
    for j in range(cols):
        states: dict[tuple[int, tuple[str, ...]], Any] = {(j, ()): None}
        for r in range(k):
            mat = mats[k - 1 - r]
            new: dict[tuple[int, tuple[str, ...]], Any] = {}
            for (idx, names), coeff in states.items():
                for i in range(len(taus[r + 1])):
                    for g, c in mat[i][idx].items():
                        if not c:
                            continue
                        key = (g,) + names
                        if not cat.is_suffix(key):
                            continue
                        value = c if coeff is None else coeff * c
                        slot = (i, key)
                        new[slot] = value if slot not in new else new[slot] + value
            states = new
            if not states:
                break
        for (i, names), coeff in states.items():
            if not coeff:
                continue
            sign = _sign(taus[k][i][1])
            for g, c in cat.b(names).items():
                accumulate(result[i][j], g, scale(coeff, c * sign))
    return result


def matrix_pairing(cat: AInftyCategory, u: Matrix, v: Matrix):
    """Trace pairing Σ_{p,q} ⟨U_pq, V_qp⟩."""
    total = None
    for p in range(len(u)):
        for q in range(len(u[p])):
            if not u[p][q] or not v[q][p]:
                continue
            term = cat.pair(u[p][q], v[q][p])
            if term:
                total = term if total is None else total + term
    return Fraction(0) if total is None else total


def potential_value(cat: AInftyCategory, tau: Tau, a: Matrix):
    """W(a) = Σ_n (1/n)⟨b_{n-1}(a, ..., a), a⟩ for a degree-1 matrix ``a`` over ``tau``."""
    if any(shift for _, shift in tau):
        raise TwistedError("potential_value needs all shifts zero")
    check_matrix(cat, a, tau, tau, 1)
    total = None
    for n in range(2, cat.max_arity + 2):
        inner = matrix_op(cat, [a] * (n - 1), [tau] * n)
        term = matrix_pairing(cat, inner, a)
        if term:
            term = scale(term, Fraction(1, n))
            total = term if total is None else total + term
    return Fraction(0) if total is None else total
