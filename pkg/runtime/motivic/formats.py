"""
Line-oriented input formats and the shipped data library.

Resolution files (``.res``) encode the combinatorics of an embedded resolution::

    # comment
    param n
    let [C1] := 1 + L - 2*s*(chi(1/4)+chi(1/2)+chi(3/4))
    divisor E mult {n}
    stratum {E} class mu({n})
    stratum {E,D1} class 1 over t
    central 1

Quiver files (``.qp``) encode a quiver with potential::

    vertex 1
    arrow a: 1 -> 1
    potential: 1 a a a a ; -1/2 a a

A potential word lists arrow labels in traversal order. Several ``potential:``
lines accumulate.
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Optional

from runtime.motivic.errors import (
    MalformedPotential,
    ParseError,
    QuiverError,
    ResolutionError,
)
from runtime.motivic.grammar import parse_motive
from runtime.motivic.motive import MotiveExpr

logger = logging.getLogger(__name__)

DATA_DIR = Path(__file__).parent / "data"
RESOLUTION_DIR = DATA_DIR / "resolutions"
QUIVER_DIR = DATA_DIR / "quivers"

_LABEL = r"[A-Za-z_][A-Za-z0-9_']*"
_LABEL_RE = re.compile(rf"^{_LABEL}$")
_STRATUM_RE = re.compile(
    rf"^stratum\s*\{{(?P<labels>[^}}]*)\}}\s+class\s+(?P<expr>.+?)(?:\s+over\s+(?P<region>{_LABEL}))?\s*$"
)
_DIVISOR_RE = re.compile(rf"^divisor\s+(?P<label>{_LABEL})\s+mult\s+(?P<mult>\S+)\s*$")
_LET_RE = re.compile(rf"^let\s+\[(?P<name>{_LABEL})\]\s*:=\s*(?P<expr>.+)$")
_PARAM_RE = re.compile(rf"^param\s+(?P<name>{_LABEL})\s*$")
_ARROW_RE = re.compile(rf"^arrow\s+(?P<label>{_LABEL})\s*:\s*(?P<src>{_LABEL}|\d+)\s*->\s*(?P<tgt>{_LABEL}|\d+)\s*$")
_VERTEX_RE = re.compile(rf"^vertex\s+(?P<label>{_LABEL}|\d+)\s*$")


# ============================================================================
# Resolution data
# ============================================================================

@dataclass(frozen=True)
class Stratum:
    """One open stratum D_I° together with the class of its étale cover."""

    labels: frozenset[str]
    cover_class: MotiveExpr
    region: Optional[str] = None


@dataclass(frozen=True)
class ResolutionData:
    """Combinatorial SNC divisor data feeding the nearby-cycle formula."""

    divisors: tuple[tuple[str, int], ...]
    strata: tuple[Stratum, ...]
    central_fibre_class: MotiveExpr = field(default_factory=MotiveExpr.one)
    name: str = ""
    template: str = field(default="", compare=False, repr=False)
    source: str = field(default="<resolution>", compare=False, repr=False)
    params: tuple[tuple[str, int], ...] = field(default=(), compare=False)
    over: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        labels = [label for label, _ in self.divisors]
        if len(set(labels)) != len(labels):
            raise ResolutionError(f"{self.name or 'resolution'}: divisor labels must be distinct")
        for label, mult in self.divisors:
            if mult < 1:
                raise ResolutionError(f"divisor {label} has multiplicity {mult} < 1")
        known = set(labels)
        mults = dict(self.divisors)
        for stratum in self.strata:
            if not stratum.labels:
                raise ResolutionError("strata must reference at least one divisor")
            unknown = stratum.labels - known
            if unknown:
                raise ResolutionError(f"stratum references undeclared divisors {sorted(unknown)}")
            order = math.gcd(*(mults[label] for label in stratum.labels))
            for char in stratum.cover_class.characters():
                if order % char.denominator:
                    raise ResolutionError(
                        f"stratum {{{','.join(sorted(stratum.labels))}}} carries character "
                        f"{char} not killed by its cover order {order}"
                    )
        if not self.central_fibre_class.is_trivial_sector():
            raise ResolutionError("central fibre class must lie in the trivial sector")

    @property
    def multiplicities(self) -> dict[str, int]:
        return dict(self.divisors)

    def regions(self) -> tuple[str, ...]:
        return tuple(sorted({s.region for s in self.strata if s.region is not None}))

    def restrict(self, region: str) -> ResolutionData:
        """Strata lying over ``region`` (untagged strata lie over every region)."""
        if region not in self.regions():
            raise ResolutionError(f"{self.name or 'resolution'} has no region {region!r}")
        kept = tuple(s for s in self.strata if s.region in (None, region))
        return replace(self, strata=kept, name=f"{self.name}[{region}]", over=region)

    def substitute(self, params: Mapping[str, int]) -> ResolutionData:
        """Re-read the source text with ``params`` overriding the current parameter values."""
        if not self.template:
            raise ResolutionError(f"{self.name or 'resolution'} was not parsed from text")
        merged = {**dict(self.params), **params}
        data = parse_resolution(self.template, source=self.source, params=merged)
        return data.restrict(self.over) if self.over is not None else data


def _substitute_params(line: str, params: Mapping[str, int]) -> str:
    for name, value in params.items():
        line = line.replace("{" + name + "}", str(value))
    return line


def _parse_expr(text: str, names: Mapping[str, MotiveExpr], lineno: int, column: int, source: str):
    try:
        return parse_motive(text, names)
    except ParseError as err:
        raise ParseError(
            err.detail,
            lineno + (err.line or 1) - 1,
            (err.column or 1) + column - 1,
            source,
        ) from err


def _strip_comment(raw: str) -> str:
    return raw.split("#", 1)[0].rstrip()


def parse_resolution(
    text: str,
    source: str = "<resolution>",
    params: Optional[Mapping[str, int]] = None,
) -> ResolutionData:
    """Parse ``.res`` text; ``params`` fills ``{name}`` placeholders."""
    params = dict(params or {})
    declared: list[str] = []
    names: dict[str, MotiveExpr] = {}
    divisors: list[tuple[str, int]] = []
    strata: list[Stratum] = []
    central: Optional[MotiveExpr] = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        line = line.strip()

        match = _PARAM_RE.match(line)
        if match:
            name = match["name"]
            if name not in params:
                raise ResolutionError(f"{source}:{lineno}: parameter {name!r} was not supplied")
            declared.append(name)
            continue
        line = _substitute_params(line, {k: params[k] for k in declared})

        if match := _LET_RE.match(line):
            names[match["name"]] = _parse_expr(
                match["expr"], names, lineno, indent + match.start("expr") + 1, source
            )
        elif match := _DIVISOR_RE.match(line):
            try:
                mult = int(match["mult"])
            except ValueError as err:
                raise ParseError(
                    f"multiplicity must be an integer, got {match['mult']!r}",
                    lineno, indent + match.start("mult") + 1, source,
                ) from err
            divisors.append((match["label"], mult))
        elif match := _STRATUM_RE.match(line):
            labels = [part.strip() for part in match["labels"].split(",") if part.strip()]
            for label in labels:
                if not _LABEL_RE.match(label):
                    raise ParseError(f"bad divisor label {label!r}", lineno, indent + 1, source)
            cover = _parse_expr(match["expr"], names, lineno, indent + match.start("expr") + 1, source)
            strata.append(Stratum(frozenset(labels), cover, match["region"]))
        elif line.startswith("central"):
            expr = line[len("central"):]
            offset = len(expr) - len(expr.lstrip())
            central = _parse_expr(
                expr.strip(), names, lineno, indent + len("central") + offset + 1, source
            )
        else:
            keyword = line.split()[0]
            raise ParseError(f"unknown directive {keyword!r}", lineno, indent + 1, source)

    missing = sorted(set(params) - set(declared))
    if missing:
        logger.debug("%s: ignoring unused parameters %s", source, missing)
    try:
        return ResolutionData(
            divisors=tuple(divisors),
            strata=tuple(strata),
            central_fibre_class=central if central is not None else MotiveExpr.one(),
            name=Path(source).stem,
            template=text,
            source=source,
            params=tuple((k, params[k]) for k in declared),
        )
    except ResolutionError as err:
        raise ResolutionError(f"{source}: {err}") from err


def _resolve(name_or_path: str | Path, directory: Path, suffix: str) -> Path:
    path = Path(name_or_path)
    if path.suffix == suffix and path.is_file():
        return path
    shipped = directory / f"{path.stem if path.suffix == suffix else path.name}{suffix}"
    if shipped.is_file():
        return shipped
    if path.is_file():
        return path
    raise FileNotFoundError(f"Input file not found: {name_or_path}")


def load_resolution(name_or_path: str | Path, **params: int) -> ResolutionData:
    """Load a shipped resolution by name (``x4y4``) or any ``.res`` path."""
    path = _resolve(name_or_path, RESOLUTION_DIR, ".res")
    return parse_resolution(path.read_text(encoding="utf-8"), source=str(path), params=params)


def shipped_resolutions() -> list[str]:
    return sorted(p.stem for p in RESOLUTION_DIR.glob("*.res"))


# ============================================================================
# Quivers with potential
# ============================================================================

@dataclass(frozen=True)
class Arrow:
    label: str
    source: str
    target: str


@dataclass(frozen=True)
class QuiverWithPotential:
    """Vertices, arrows and a potential as (coefficient, traversal word) terms."""

    vertices: tuple[str, ...]
    arrows: tuple[Arrow, ...]
    potential: tuple[tuple[Fraction, tuple[str, ...]], ...] = ()
    name: str = ""

    def __post_init__(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise QuiverError("vertex labels must be distinct")
        labels = [a.label for a in self.arrows]
        if len(set(labels)) != len(labels):
            raise QuiverError("arrow labels must be distinct")
        overlap = set(labels) & set(self.vertices)
        if overlap:
            raise QuiverError(f"labels used for both vertices and arrows: {sorted(overlap)}")
        for arrow in self.arrows:
            for end in (arrow.source, arrow.target):
                if end not in self.vertices:
                    raise QuiverError(f"arrow {arrow.label} uses undeclared vertex {end}")
        for _, word in self.potential:
            self._check_cycle(word)

    def _check_cycle(self, word: tuple[str, ...]) -> None:
        if len(word) < 2:
            raise MalformedPotential(f"potential cycle {' '.join(word)!r} is shorter than 2")
        by_label = {a.label: a for a in self.arrows}
        for label in word:
            if label not in by_label:
                raise MalformedPotential(f"potential uses unknown arrow {label!r}")
        for first, second in zip(word, word[1:] + word[:1]):
            if by_label[first].target != by_label[second].source:
                raise MalformedPotential(
                    f"potential word {' '.join(word)!r} is not a closed path at {first} -> {second}"
                )

    def arrow(self, label: str) -> Arrow:
        for a in self.arrows:
            if a.label == label:
                return a
        raise QuiverError(f"unknown arrow {label!r}")

    def vertex_index(self, label: str) -> int:
        return self.vertices.index(label)

    @property
    def has_potential(self) -> bool:
        return any(c != 0 for c, _ in self.potential)

    def max_word_length(self) -> int:
        return max((len(w) for c, w in self.potential if c != 0), default=0)

    def incidence_matrix(self) -> list[list[int]]:
        """Entry (i, j) counts arrows from vertex i to vertex j."""
        n = len(self.vertices)
        out = [[0] * n for _ in range(n)]
        for a in self.arrows:
            out[self.vertex_index(a.source)][self.vertex_index(a.target)] += 1
        return out

    def without_potential(self) -> QuiverWithPotential:
        return replace(self, potential=(), name=f"{self.name}-w0" if self.name else "")

    def framed(self, vertex: str, framing: str = "inf", arrow: str = "f") -> QuiverWithPotential:
        """Prepend a framing vertex with one arrow into ``vertex``."""
        if framing in self.vertices:
            return self
        if vertex not in self.vertices:
            raise QuiverError(f"cannot frame at unknown vertex {vertex!r}")
        return QuiverWithPotential(
            vertices=(framing,) + self.vertices,
            arrows=(Arrow(arrow, framing, vertex),) + self.arrows,
            potential=self.potential,
            name=f"{self.name}_framed" if self.name else "",
        )


def _parse_potential(body: str, lineno: int, column: int, source: str):
    terms = []
    for chunk in body.split(";"):
        parts = chunk.split()
        if not parts:
            continue
        try:
            coeff = Fraction(parts[0])
        except (ValueError, ZeroDivisionError) as err:
            raise ParseError(f"bad potential coefficient {parts[0]!r}", lineno, column, source) from err
        terms.append((coeff, tuple(parts[1:])))
    return terms


def parse_quiver(text: str, source: str = "<quiver>") -> QuiverWithPotential:
    vertices: list[str] = []
    arrows: list[Arrow] = []
    potential: list[tuple[Fraction, tuple[str, ...]]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        line = line.strip()
        if match := _VERTEX_RE.match(line):
            vertices.append(match["label"])
        elif match := _ARROW_RE.match(line):
            arrows.append(Arrow(match["label"], match["src"], match["tgt"]))
        elif line.startswith("potential:"):
            terms = _parse_potential(line[len("potential:"):], lineno, indent + 1, source)
            for _, word in terms:
                if len(word) < 2:
                    raise MalformedPotential(
                        f"{source}:{lineno}: potential cycle {' '.join(word)!r} is shorter than 2"
                    )
            potential.extend(terms)
        else:
            keyword = line.split()[0]
            raise ParseError(f"unknown directive {keyword!r}", lineno, indent + 1, source)

    try:
        return QuiverWithPotential(
            vertices=tuple(vertices),
            arrows=tuple(arrows),
            potential=tuple(potential),
            name=Path(source).stem,
        )
    except QuiverError as err:
        raise type(err)(f"{source}: {err}") from err


def load_quiver(name_or_path: str | Path) -> QuiverWithPotential:
    """Load a shipped quiver by name (``conifold``) or any ``.qp`` path."""
    path = _resolve(name_or_path, QUIVER_DIR, ".qp")
    return parse_quiver(path.read_text(encoding="utf-8"), source=str(path))


def shipped_quivers() -> list[str]:
    return sorted(p.stem for p in QUIVER_DIR.glob("*.qp"))


def iter_words(q: QuiverWithPotential) -> Iterable[tuple[Fraction, tuple[str, ...]]]:
    return ((c, w) for c, w in q.potential if c != 0)


# ============================================================================
# Twisted-object literals
# ============================================================================
#
#   1, 1[1] : 1,2 = a* ; 1,3 = 2*x1* - 1/2*y1*
#
# Objects (with optional shifts) before the colon, strictly upper entries after
# it, 1-based. An extension is written ``M1 | M2 | alpha`` where ``alpha`` holds
# entries only, indexed by (row of M1, column of M2).

_SLOT_RE = re.compile(rf"^(?P<obj>{_LABEL}|\d+)(?:\[(?P<shift>[+-]?\d+)\])?$")
_ENTRY_RE = re.compile(r"^(?P<row>\d+)\s*,\s*(?P<col>\d+)\s*=\s*(?P<body>.+)$")
_TERM_RE = re.compile(rf"^(?:(?P<coef>\d+(?:/\d+)?)\s*\*\s*)?(?P<gen>{_LABEL}\*?)$")

Entries = dict[tuple[int, int], dict[str, Fraction]]


@dataclass(frozen=True)
class TwLiteral:
    tau: tuple[tuple[str, int], ...]
    entries: Mapping[tuple[int, int], Mapping[str, Fraction]] = field(default_factory=dict)

    def matrix(self, rows: Optional[int] = None, cols: Optional[int] = None) -> list[list[dict]]:
        rows = len(self.tau) if rows is None else rows
        cols = len(self.tau) if cols is None else cols
        out: list[list[dict]] = [[{} for _ in range(cols)] for _ in range(rows)]
        for (r, c), entry in self.entries.items():
            if r >= rows or c >= cols:
                raise ParseError(f"entry ({r + 1},{c + 1}) is outside a {rows}x{cols} matrix")
            out[r][c] = dict(entry)
        return out


def _parse_linear(body: str, source: str) -> dict[str, Fraction]:
    out: dict[str, Fraction] = {}
    text = body.strip()
    for sign, chunk in re.findall(r"([+-]?)\s*([^+-]+)", text):
        chunk = chunk.strip()
        match = _TERM_RE.match(chunk)
        if not match:
            raise ParseError(f"bad entry term {chunk!r}", 1, text.find(chunk) + 1, source)
        coef = Fraction(match["coef"] or 1) * (-1 if sign == "-" else 1)
        out[match["gen"]] = out.get(match["gen"], Fraction(0)) + coef
    return {g: c for g, c in out.items() if c}


def _parse_entries(text: str, source: str) -> Entries:
    entries: Entries = {}
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        match = _ENTRY_RE.match(chunk)
        if not match:
            raise ParseError(f"bad entry {chunk!r}, expected 'row,col = terms'", 1, None, source)
        row, col = int(match["row"]) - 1, int(match["col"]) - 1
        if row < 0 or col < 0:
            raise ParseError(f"entry indices are 1-based, got {chunk!r}", 1, None, source)
        entries[(row, col)] = _parse_linear(match["body"], source)
    return entries


def parse_tw_literal(text: str, source: str = "<tw>") -> TwLiteral:
    head, _, tail = text.partition(":")
    tau = []
    for slot in head.split(","):
        slot = slot.strip()
        if not slot:
            continue
        match = _SLOT_RE.match(slot)
        if not match:
            raise ParseError(f"bad object {slot!r}, expected LABEL or LABEL[shift]", 1, None, source)
        tau.append((match["obj"], int(match["shift"] or 0)))
    return TwLiteral(tuple(tau), _parse_entries(tail, source))


def parse_ext_literal(text: str, source: str = "<ext>") -> tuple[TwLiteral, TwLiteral, Entries]:
    parts = text.split("|")
    if len(parts) != 3:
        raise ParseError("extension literal must read 'M1 | M2 | alpha'", 1, None, source)
    m1 = parse_tw_literal(parts[0], source)
    m2 = parse_tw_literal(parts[1], source)
    return m1, m2, _parse_entries(parts[2], source)
