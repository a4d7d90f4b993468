"""Typed report contracts for the CLI boundary.

The algebra modules return dataclasses, tuples and MotiveExpr values. Before
anything is written to ``result.yaml`` or compared in a golden test it is
coerced into one of these models. Coercion is *lenient on input* (dataclass,
dict or tuple shapes all work) and *strict on output* (plain strings, ints and
bools only, so the YAML is diff-stable).
"""

from __future__ import annotations

from dataclasses import asdict, is_dataclass
from fractions import Fraction
from typing import Any, Mapping

from pydantic import BaseModel, Field


def _as_dict(raw: Any) -> dict:
    if is_dataclass(raw) and not isinstance(raw, type):
        return asdict(raw)
    if isinstance(raw, Mapping):
        return dict(raw)
    return {}


def coerce_text(value: Any) -> str:
    """Canonical text for a scalar, a MotiveExpr or a polynomial."""
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, Fraction):
        return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
    to_text = getattr(value, "to_text", None)
    if callable(to_text):
        return to_text()
    return str(value)


def _vector_text(value: Any) -> str:
    if isinstance(value, Mapping):
        if not value:
            return "0"
        return " + ".join(f"{coerce_text(c)}*{g}" for g, c in sorted(value.items()))
    return coerce_text(value)


def _gamma_text(gamma: Any) -> str:
    if isinstance(gamma, str):
        return gamma
    return "(" + ",".join(str(int(g)) for g in gamma) + ")"


class Violation(BaseModel):
    kind: str = ""
    arity: int = 0
    inputs: list[str] = Field(default_factory=list)
    value: str = ""

    @classmethod
    def from_raw(cls, raw: Any) -> "Violation":
        if isinstance(raw, (tuple, list)) and len(raw) == 4:
            kind, arity, inputs, value = raw
        else:
            data = _as_dict(raw)
            kind = data.get("kind", "")
            arity = data.get("arity", 0)
            inputs = data.get("inputs", ())
            value = data.get("value", "")
        return cls(kind=str(kind), arity=int(arity), inputs=[str(x) for x in inputs], value=_vector_text(value))


class CheckReport(BaseModel):
    """Outcome of one verification: identities are data, never exceptions."""

    name: str
    passed: bool
    checked: int = 0
    arities: list[int] = Field(default_factory=list)
    violations: list[Violation] = Field(default_factory=list)
    summary: str = ""

    @classmethod
    def from_result(cls, raw: Any, name: str | None = None, limit: int = 20) -> "CheckReport":
        if isinstance(raw, bool):
            return cls(name=name or "check", passed=raw, summary="PASS" if raw else "FAIL")
        data = _as_dict(raw)
        summary = raw.summary() if callable(getattr(raw, "summary", None)) else ""
        violations = getattr(raw, "violations", None) or data.get("violations", [])
        return cls(
            name=name or str(data.get("name", "check")),
            passed=bool(data.get("passed", False)),
            checked=int(data.get("checked", 0)),
            arities=[int(a) for a in data.get("arities", ())],
            violations=[Violation.from_raw(v) for v in list(violations)[:limit]],
            summary=summary,
        )


class SeriesReport(BaseModel):
    """Nonzero coefficients of a truncated quantum-torus series."""

    vertices: list[str] = Field(default_factory=list)
    coefficients: dict[str, str] = Field(default_factory=dict)

    @classmethod
    def from_result(cls, raw: Any) -> "SeriesReport":
        terms = raw.terms() if callable(getattr(raw, "terms", None)) else list(_as_dict(raw).items())
        form = getattr(raw, "form", None)
        vertices = list(getattr(form, "vertices", ()))
        return cls(
            vertices=[str(v) for v in vertices],
            coefficients={_gamma_text(g): coerce_text(c) for g, c in terms},
        )


class J2Report(BaseModel):
    """A J₂ class printed as ``(d, p)`` plus the pieces it was assembled from."""

    unit_class: int = 1
    parity: int = 0
    text: str = "(1, 0)"
    field_mode: str = "rationals"
    details: dict[str, str] = Field(default_factory=dict)

    @classmethod
    def from_result(cls, raw: Any, field_mode: str = "rationals", details: Mapping[str, Any] | None = None) -> "J2Report":
        if isinstance(raw, (tuple, list)):
            unit, parity = raw
        else:
            data = _as_dict(raw)
            unit = data.get("unit_class", getattr(raw, "unit_class", 1))
            parity = data.get("parity", getattr(raw, "parity", 0))
        unit, parity = int(unit), int(parity) % 2
        return cls(
            unit_class=unit,
            parity=parity,
            text=f"({unit}, {parity})",
            field_mode=str(getattr(field_mode, "value", field_mode)),
            details={str(k): coerce_text(v) for k, v in (details or {}).items()},
        )


class MotiveReport(BaseModel):
    """A motive in canonical text plus its realizations when they exist."""

    expression: str = ""
    canonical: str
    polynomial: bool = True
    euler: str | None = None

    @classmethod
    def from_result(cls, raw: Any, expression: str = "") -> "MotiveReport":
        from runtime.motivic.errors import PoleAtOne
        from runtime.motivic.motive import euler_specialize

        if isinstance(raw, Mapping):
            return cls(
                expression=str(raw.get("expression", expression)),
                canonical=coerce_text(raw.get("canonical", "")),
                polynomial=bool(raw.get("polynomial", True)),
                euler=raw.get("euler"),
            )
        try:
            euler = coerce_text(euler_specialize(raw))
        except PoleAtOne:
            euler = None
        return cls(
            expression=expression,
            canonical=coerce_text(raw),
            polynomial=raw.is_polynomial(),
            euler=euler,
        )
