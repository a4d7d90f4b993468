"""Unit tests for the typed report contracts.

These lock the lenient-in / strict-out coercion applied before anything is
written to result.yaml.
"""

from fractions import Fraction

import pytest

from runtime.motivic.ainfty import check_stasheff, koszul_dual
from runtime.motivic.ainfty import Violation as RawViolation
from runtime.motivic.contracts import (
    CheckReport,
    J2Report,
    MotiveReport,
    SeriesReport,
    Violation,
    coerce_text,
)
from runtime.motivic.dt import QTSeries, Truncation, conifold_form
from runtime.motivic.formats import load_quiver
from runtime.motivic.motive import L, ONE, MotiveExpr
from runtime.motivic.orientation import J2Class


class TestCoerceText:
    def test_plain_string(self):
        assert coerce_text("hello") == "hello"

    def test_fractions(self):
        assert coerce_text(Fraction(3)) == "3"
        assert coerce_text(Fraction(-1, 4)) == "-1/4"

    def test_motive_uses_canonical_text(self):
        assert coerce_text(L) == L.to_text()

    def test_none(self):
        assert coerce_text(None) == ""


class TestViolation:
    def test_from_dataclass(self):
        raw = RawViolation("stasheff", 3, ("a", "a*"), {"w1": Fraction(2)})
        v = Violation.from_raw(raw)
        assert (v.kind, v.arity, v.inputs, v.value) == ("stasheff", 3, ["a", "a*"], "2*w1")

    def test_from_tuple_and_dict(self):
        assert Violation.from_raw(("cyclic", 2, ["x"], {})).value == "0"
        assert Violation.from_raw({"kind": "cyclic", "arity": 4}).arity == 4


class TestCheckReport:
    def test_from_check_result(self):
        result = check_stasheff(koszul_dual(load_quiver("one_loop_a2")), 4)
        report = CheckReport.from_result(result)
        assert report.passed
        assert report.arities == [1, 4]
        assert report.summary == "PASS (arities 1..4)"
        assert report.violations == []

    def test_from_bool(self):
        report = CheckReport.from_result(False, "hn")
        assert report.name == "hn"
        assert report.summary == "FAIL"

    def test_violations_are_capped(self):
        raw = {
            "name": "stasheff",
            "passed": False,
            "violations": [("stasheff", 3, (), {}) for _ in range(30)],
        }
        assert len(CheckReport.from_result(raw, limit=5).violations) == 5


class TestSeriesReport:
    def test_coefficients_are_keyed_by_vector(self):
        form = conifold_form()
        trunc = Truncation((1, 1))
        series = QTSeries.one(form, trunc) + QTSeries.monomial(form, trunc, (1, 1), L)
        report = SeriesReport.from_result(series)
        assert report.vertices == ["1", "2"]
        assert report.coefficients == {"(0,0)": ONE.to_text(), "(1,1)": L.to_text()}


class TestJ2Report:
    def test_from_class(self):
        report = J2Report.from_result(J2Class(-1, 1), "closed", {"q(E)": J2Class(-1, 1)})
        assert report.text == "(-1, 1)"
        assert report.field_mode == "closed"
        assert report.details == {"q(E)": "(-1, 1)"}

    @pytest.mark.parametrize("raw", [(2, 3), [2, 1]])
    def test_from_tuple_reduces_parity(self, raw):
        assert J2Report.from_result(raw).parity == 1


class TestMotiveReport:
    def test_polynomial_class(self):
        report = MotiveReport.from_result(L, "L")
        assert report.polynomial
        assert report.euler == "1"

    def test_pole_at_one_has_no_euler_value(self):
        value = MotiveExpr.sqrt_l() / (L - 1)
        report = MotiveReport.from_result(value)
        assert not report.polynomial
        assert report.euler is None

    def test_from_mapping(self):
        report = MotiveReport.from_result({"canonical": "1 + L"}, "x")
        assert report.canonical == "1 + L"
        assert report.expression == "x"
