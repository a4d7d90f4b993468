"""
The coefficient ring: μ̂-equivariant motives realized as character-sector data.

A motive is stored as a fraction whose numerator assigns a Laurent polynomial
in ``s`` (with ``s² = L``) to each character of μ̂, and whose denominator is a
product of factors Φ_d(L) (cyclotomic polynomials evaluated at ``L = s²``),
living in the trivial sector. Every product of the form ``Lᵃ − Lᵇ`` and every
``[GLₙ]`` is a monomial times such a product, so ``[GLₙ]⁻¹`` is representable.

Characters are Fractions in ``[0, 1)``; the sector for ``k/n`` carries the
character ``ζ ↦ ζᵏ`` of μ_n, and μ̂ is the colimit over all n.

Canonical form: sector Laurent polynomials are stored as ``(shift, poly)`` with
``poly(0) ≠ 0``; a denominator factor Φ_d(L) is cancelled whenever it divides
every sector. Since the Φ_d(L) are pairwise coprime this form is unique, so
equality and hashing are structural.
"""

from __future__ import annotations

import logging
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Iterable, Mapping, Optional, Union

from sympy import cyclotomic_poly
from sympy.polys.domains import ZZ
from sympy.polys.rings import PolyElement, ring

from runtime.motivic.errors import LocalizationError, NonPolynomial, PoleAtOne

logger = logging.getLogger(__name__)

S_RING, S = ring("s", ZZ)

Character = Fraction
# One sector: (character, shift, poly) meaning s^shift · poly(s).
Sector = tuple[Fraction, int, PolyElement]
# Denominator: ((d, k), ...) meaning ∏ Φ_d(L)^k with L = s².
Denominator = tuple[tuple[int, int], ...]

ZERO_CHAR = Fraction(0)


def character(k: int, n: int) -> Fraction:
    """The reduced character k/n in [0, 1)."""
    if n <= 0:
        raise ValueError(f"character denominator must be positive, got {n}")
    return Fraction(k, n) % 1


@lru_cache(maxsize=None)
def cyclotomic_in_l(d: int) -> PolyElement:
    """Φ_d(L) as a polynomial in s (only even powers)."""
    coeffs = cyclotomic_poly(d, polys=True).all_coeffs()
    degree = len(coeffs) - 1
    return S_RING.from_dict(
        {(2 * (degree - i),): int(c) for i, c in enumerate(coeffs) if c != 0}
    )


def _normalize_laurent(shift: int, poly: PolyElement) -> tuple[int, PolyElement]:
    """Pull the lowest power of s out of ``poly``."""
    if not poly:
        return 0, S_RING.zero
    low = min(monom[0] for monom in poly.keys())
    if low == 0:
        return shift, poly
    return shift + low, S_RING.from_dict({(m[0] - low,): c for m, c in poly.items()})


def _align(a: tuple[int, PolyElement], b: tuple[int, PolyElement]):
    (ea, pa), (eb, pb) = a, b
    low = min(ea, eb)
    return low, pa.mul_monom((ea - low,)), pb.mul_monom((eb - low,))


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


class MotiveExpr:
    """An element of the localized equivariant motive ring (realized)."""

    __slots__ = ("_sectors", "_denominator", "_hash")

    def __init__(
        self,
        sectors: Mapping[Fraction, tuple[int, PolyElement]] | None = None,
        denominator: Mapping[int, int] | Iterable[tuple[int, int]] | None = None,
    ):
        denom: dict[int, int] = {}
        if denominator:
            items = denominator.items() if isinstance(denominator, Mapping) else denominator
            for d, k in items:
                if k < 0:
                    raise LocalizationError("denominator exponents must be nonnegative")
                if k:
                    denom[int(d)] = denom.get(int(d), 0) + int(k)
        clean: dict[Fraction, tuple[int, PolyElement]] = {}
        for char, (shift, poly) in (sectors or {}).items():
            char = Fraction(char) % 1
            if not poly:
                continue
            clean[char] = _normalize_laurent(shift, poly)
        self._sectors, self._denominator = _reduce(clean, denom)
        self._hash = None

    # ---------------------------------------------------------------- builders
    @classmethod
    def zero(cls) -> MotiveExpr:
        return cls()

    @classmethod
    def one(cls) -> MotiveExpr:
        return cls.from_int(1)

    @classmethod
    def from_int(cls, value: int) -> MotiveExpr:
        return cls({ZERO_CHAR: (0, S_RING(int(value)))})

    @classmethod
    def monomial(cls, coefficient: int, exponent: int, char: Fraction = ZERO_CHAR) -> MotiveExpr:
        """coefficient · s^exponent in the sector ``char``."""
        return cls({char: (exponent, S_RING(int(coefficient)))})

    @classmethod
    def sqrt_l(cls) -> MotiveExpr:
        return cls.monomial(1, 1)

    @classmethod
    def lefschetz(cls) -> MotiveExpr:
        return cls.monomial(1, 2)

    @classmethod
    def character(cls, k: int, n: int) -> MotiveExpr:
        return cls.monomial(1, 0, character(k, n))

    @classmethod
    def from_laurent(cls, coefficients: Mapping[int, int], char: Fraction = ZERO_CHAR) -> MotiveExpr:
        """Build from ``{exponent of s: integer coefficient}`` in one sector."""
        if not coefficients:
            return cls()
        low = min(coefficients)
        poly = S_RING.from_dict({(e - low,): int(c) for e, c in coefficients.items() if c})
        return cls({char: (low, poly)})

    @classmethod
    def gl_inverse(cls, n: int) -> MotiveExpr:
        return gl_class(n).inverse()

    # --------------------------------------------------------------- accessors
    @property
    def sectors(self) -> tuple[Sector, ...]:
        return self._sectors

    @property
    def denominator(self) -> Denominator:
        return self._denominator

    def characters(self) -> tuple[Fraction, ...]:
        return tuple(char for char, _, _ in self._sectors)

    def sector(self, char: Fraction) -> dict[int, int]:
        """The numerator Laurent polynomial of one sector as ``{exponent: coeff}``."""
        char = Fraction(char) % 1
        for c, shift, poly in self._sectors:
            if c == char:
                return {m[0] + shift: int(v) for m, v in poly.items()}
        return {}

    def is_zero(self) -> bool:
        return not self._sectors

    def is_polynomial(self) -> bool:
        return not self._denominator

    def is_trivial_sector(self) -> bool:
        return all(char == ZERO_CHAR for char, _, _ in self._sectors)

    def denominator_poly(self) -> PolyElement:
        return reduce(
            lambda acc, item: acc * cyclotomic_in_l(item[0]) ** item[1],
            self._denominator,
            S_RING.one,
        )

    # -------------------------------------------------------------- arithmetic
    def __add__(self, other: object) -> MotiveExpr:
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return add(self, other)

    __radd__ = __add__

    def __neg__(self) -> MotiveExpr:
        return MotiveExpr(
            {c: (e, -p) for c, e, p in self._sectors}, self._denominator
        )

    def __sub__(self, other: object) -> MotiveExpr:
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return add(self, -other)

    def __rsub__(self, other: object) -> MotiveExpr:
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return add(other, -self)

    def __mul__(self, other: object) -> MotiveExpr:
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return mul_naive(self, other)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> MotiveExpr:
        return self.power(exponent)

    def exotic(self, other: MotiveExpr) -> MotiveExpr:
        return mul_exotic(self, other)

    def power(self, exponent: int, exotic: bool = False) -> MotiveExpr:
        if exponent < 0:
            return self.inverse().power(-exponent, exotic)
        result = MotiveExpr.one()
        base = self
        mul = mul_exotic if exotic else mul_naive
        while exponent:
            if exponent & 1:
                result = mul(result, base)
            base = mul(base, base)
            exponent >>= 1
        return result

    def inverse(self) -> MotiveExpr:
        """Inverse within the localized ring: only ±sᵉ·∏Φ_d(L)^m are units."""
        if self.is_zero() or not self.is_trivial_sector() or len(self._sectors) != 1:
            raise LocalizationError(f"{self.to_text()} is not a unit of the localized ring")
        _, shift, poly = self._sectors[0]
        factors, rest = _factor_cyclotomic(poly)
        if rest not in (S_RING.one, -S_RING.one):
            raise LocalizationError(
                f"{self.to_text()} has a factor outside the cyclotomic multiplicative set"
            )
        sign = int(rest[(0,)])
        numerator = self.denominator_poly() * sign
        return MotiveExpr({ZERO_CHAR: (-shift, numerator)}, factors)

    def __truediv__(self, other: object) -> MotiveExpr:
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return mul_naive(self, other.inverse())

    # --------------------------------------------------------------- equality
    def _key(self):
        return (
            tuple((c, e, tuple(sorted((m[0], int(v)) for m, v in p.items()))) for c, e, p in self._sectors),
            self._denominator,
        )

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = MotiveExpr.from_int(other)
        if not isinstance(other, MotiveExpr):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._key())
        return self._hash

    def __repr__(self) -> str:
        return f"MotiveExpr({self.to_text()!r})"

    def __str__(self) -> str:
        return self.to_text()

    def to_text(self) -> str:
        from runtime.motivic.grammar import format_motive

        return format_motive(self)


MotiveLike = Union[MotiveExpr, int]


def _coerce(value: object) -> Optional[MotiveExpr]:
    if isinstance(value, MotiveExpr):
        return value
    if isinstance(value, int):
        return MotiveExpr.from_int(value)
    return None


def _reduce(
    sectors: dict[Fraction, tuple[int, PolyElement]], denom: dict[int, int]
) -> tuple[tuple[Sector, ...], Denominator]:
    if not sectors:
        return (), ()
    for d in sorted(denom):
        f = cyclotomic_in_l(d)
        while denom[d]:
            quotients = {}
            for char, (shift, poly) in sectors.items():
                q, r = divmod(poly, f)
                if r:
                    break
                quotients[char] = (shift, q)
            else:
                sectors = {c: _normalize_laurent(e, q) for c, (e, q) in quotients.items()}
                denom[d] -= 1
                continue
            break
    ordered = tuple(sorted((c, e, p) for c, (e, p) in sectors.items()))
    return ordered, tuple(sorted((d, k) for d, k in denom.items() if k))


def _factor_cyclotomic(poly: PolyElement) -> tuple[dict[int, int], PolyElement]:
    """Split ``poly`` into ∏Φ_d(L)^k times a cofactor, by trial division."""
    degree = poly.degree()
    bound = degree * degree // 2 + 1 if degree > 0 else 0
    factors: dict[int, int] = {}
    rest = poly
    for d in range(1, bound + 1):
        f = cyclotomic_in_l(d)
        if f.degree() > rest.degree():
            continue
        while rest.degree() >= f.degree():
            q, r = divmod(rest, f)
            if r:
                break
            rest = q
            factors[d] = factors.get(d, 0) + 1
    return factors, rest


def _combine_denominators(a: Denominator, b: Denominator) -> dict[int, int]:
    out = dict(a)
    for d, k in b:
        out[d] = out.get(d, 0) + k
    return out


def _lcm_scale(a: MotiveExpr, b: MotiveExpr):
    """Bring two motives over a common denominator; return scaled sectors + denominator."""
    da, db = dict(a.denominator), dict(b.denominator)
    common = {d: max(da.get(d, 0), db.get(d, 0)) for d in set(da) | set(db)}

    def scale(m: MotiveExpr, own: dict[int, int]):
        factor = S_RING.one
        for d, k in common.items():
            extra = k - own.get(d, 0)
            if extra:
                factor *= cyclotomic_in_l(d) ** extra
        return {c: (e, p * factor) for c, e, p in m.sectors}

    return scale(a, da), scale(b, db), common


# ------------------------------------------------------------------ operations
def add(a: MotiveExpr, b: MotiveExpr) -> MotiveExpr:
    sa, sb, denom = _lcm_scale(a, b)
    out = dict(sa)
    for char, value in sb.items():
        if char in out:
            shift, pa, pb = _align(out[char], value)
            out[char] = (shift, pa + pb)
        else:
            out[char] = value
    return MotiveExpr(out, denom)


def _convolve(a: MotiveExpr, b: MotiveExpr, rule) -> MotiveExpr:
    out: dict[Fraction, tuple[int, PolyElement]] = {}
    for ca, ea, pa in a.sectors:
        for cb, eb, pb in b.sectors:
            char, extra = rule(ca, cb)
            term = (ea + eb + extra, pa * pb)
            if char in out:
                shift, p1, p2 = _align(out[char], term)
                out[char] = (shift, p1 + p2)
            else:
                out[char] = term
    return MotiveExpr(out, _combine_denominators(a.denominator, b.denominator))


def _naive_rule(c1: Fraction, c2: Fraction) -> tuple[Fraction, int]:
    return (c1 + c2) % 1, 0


def _exotic_rule(c1: Fraction, c2: Fraction) -> tuple[Fraction, int]:
    if c1 == 0 or c2 == 0:
        return (c1 + c2) % 1, 0
    total = c1 + c2
    if total.denominator == 1:
        return ZERO_CHAR, 2
    return total % 1, 1


def mul_naive(a: MotiveExpr, b: MotiveExpr) -> MotiveExpr:
    """Sectorwise convolution: characters add mod 1, polynomials multiply."""
    return _convolve(a, b, _naive_rule)


def mul_exotic(a: MotiveExpr, b: MotiveExpr) -> MotiveExpr:
    """The exotic product realizing Thom–Sebastiani on sector data.

    Two nontrivial characters summing to an integer land in the trivial sector
    with an extra factor s² = L; otherwise two nontrivial characters pick up
    one factor of s. Trivial-sector inputs multiply plainly.
    """
    return _convolve(a, b, _exotic_rule)


def gl_class(n: int) -> MotiveExpr:
    """[GLₙ] = ∏_{i<n} (Lⁿ − Lⁱ)."""
    if n < 1:
        raise ValueError(f"gl_class needs n >= 1, got {n}")
    poly = S_RING.one
    for k in range(1, n + 1):
        poly *= S_RING.from_dict({(2 * k,): 1, (0,): -1})
    return MotiveExpr({ZERO_CHAR: (n * (n - 1), poly)})


def grassmannian_class(n: int, i: int) -> MotiveExpr:
    """Gaussian binomial [n choose i] in L."""
    if n < 0 or i < 0 or i > n:
        raise ValueError(f"grassmannian_class needs 0 <= i <= n, got n={n}, i={i}")
    numerator = S_RING.one
    denominator = S_RING.one
    for k in range(i):
        numerator *= S_RING.from_dict({(2 * (n - k),): 1, (0,): -1})
        denominator *= S_RING.from_dict({(2 * (k + 1),): 1, (0,): -1})
    quotient, remainder = divmod(numerator, denominator)
    if remainder:
        raise ArithmeticError("Gaussian binomial division left a remainder")
    return MotiveExpr({ZERO_CHAR: (0, quotient)})


def mu_n_class(n: int) -> MotiveExpr:
    """[μₙ] with its regular μ̂-action: one unit in each sector k/n."""
    if n < 1:
        raise ValueError(f"mu_n_class needs n >= 1, got {n}")
    return MotiveExpr({character(k, n): (0, S_RING.one) for k in range(n)})


def sigma(n: int) -> MotiveExpr:
    """Sum of the nontrivial characters of μₙ."""
    return mu_n_class(n) - 1


def euler_specialize(a: MotiveExpr) -> Fraction:
    """Substitute s = 1 and sum every sector."""
    if any(d == 1 for d, _ in a.denominator):
        raise PoleAtOne(f"{a.to_text()} has a pole at L = 1")
    numerator = sum((int(sum(p.values())) for _, _, p in a.sectors), 0)
    denominator = a.denominator_poly()
    return Fraction(numerator, int(sum(denominator.values())))


def chi_eq(a: MotiveExpr) -> dict[Fraction, dict[int, int]]:
    """Numerator sector data ``{character: {s-exponent: coeff}}`` of a polynomial class."""
    if not a.is_polynomial():
        raise NonPolynomial(f"{a.to_text()} is not in the polynomial subring")
    return {char: a.sector(char) for char in a.characters()}


def serre_polynomial(a: MotiveExpr):
    """Trivial-sector realization as a sympy expression in q = L."""
    from sympy import Rational, Symbol

    if not a.is_trivial_sector():
        raise NonPolynomial(f"{a.to_text()} carries nontrivial characters")
    q = Symbol("q")
    numerator = sum(
        (Rational(c) * q ** Rational(e, 2) for e, c in a.sector(ZERO_CHAR).items()), Rational(0)
    )
    denominator = 1
    for d, k in a.denominator:
        denominator *= cyclotomic_poly(d, q) ** k
    return numerator / denominator


def curve_c1() -> MotiveExpr:
    """Class of the genus 3 cover curve in the resolution of x⁴ + y⁴."""
    return 1 + MotiveExpr.lefschetz() - MotiveExpr.monomial(2, 1) * sigma(4)


def curve_c2() -> MotiveExpr:
    """Class of the genus 1 cover curve in the resolution of x⁴ + y²."""
    quarter = MotiveExpr.character(1, 4) + MotiveExpr.character(3, 4)
    return 1 + MotiveExpr.lefschetz() - MotiveExpr.sqrt_l() * quarter


L = MotiveExpr.lefschetz()
ONE = MotiveExpr.one()
ZERO = MotiveExpr.zero()
