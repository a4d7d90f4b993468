"""Unit tests for nearby/vanishing cycles and Milnor fibres."""

from fractions import Fraction

import pytest

from runtime import motivic
from runtime.motivic.formats import ResolutionData, Stratum, load_resolution
from runtime.motivic.motive import (
    MotiveExpr,
    chi_eq,
    curve_c1,
    curve_c2,
    euler_specialize,
    mu_n_class,
)
from runtime.motivic.vanishing import (
    milnor_fibre,
    milnor_fibre_sum,
    milnor_fibre_ts,
    nearby_cycle,
    quartic_trace_components,
    quartic_trace_weight,
    vanishing_cycle,
)

L = MotiveExpr.lefschetz()
MF44 = curve_c1() - 4 * L
MF42 = curve_c2() - 2 * L


class TestNearbyCycle:
    @pytest.mark.parametrize("n", [1, 2, 3, 4, 7])
    def test_power_germ(self, n):
        assert nearby_cycle(load_resolution("x_n", n=n)) == mu_n_class(n)

    def test_substituted_power_germ(self):
        data = load_resolution("x_n", n=2).substitute({"n": 4})
        assert nearby_cycle(data) == mu_n_class(4)

    def test_x4y4(self):
        assert nearby_cycle(load_resolution("x4y4")) == MF44

    def test_x4y2(self):
        assert nearby_cycle(load_resolution("x4y2")) == MF42

    def test_x2y2(self):
        assert nearby_cycle(load_resolution("x2y2")) == 1 - L

    def test_smooth_fibre_returns_cover(self):
        cover = L + MotiveExpr.character(1, 3)
        data = ResolutionData(divisors=(("E", 3),), strata=(Stratum(frozenset({"E"}), cover),))
        assert nearby_cycle(data) == cover

    def test_splitting_a_stratum_is_additive(self):
        data = load_resolution("x4y4")
        first, rest = data.strata[0], data.strata[1:]
        halves = (
            Stratum(first.labels, curve_c1()),
            Stratum(first.labels, MotiveExpr.from_int(-4)),
        )
        split = ResolutionData(divisors=data.divisors, strata=halves + rest)
        assert nearby_cycle(split) == nearby_cycle(data)


class TestVanishingCycle:
    def test_smooth_point(self):
        assert vanishing_cycle(load_resolution("x_n", n=1)) == 0

    def test_x_squared(self):
        assert vanishing_cycle(load_resolution("x_n", n=2)) == mu_n_class(2) - 1


class TestThomSebastiani:
    def test_matches_resolutions(self):
        assert milnor_fibre_ts(4, 4) == nearby_cycle(load_resolution("x4y4"))
        assert milnor_fibre_ts(4, 2) == nearby_cycle(load_resolution("x4y2"))
        assert milnor_fibre_ts(2, 2) == nearby_cycle(load_resolution("x2y2"))

    def test_smooth_summand(self):
        for b in range(1, 6):
            assert milnor_fibre_ts(1, b) == 1

    @pytest.mark.parametrize("a", range(2, 7))
    @pytest.mark.parametrize("b", range(2, 7))
    def test_euler_characteristic_matches_milnor_number(self, a, b):
        assert euler_specialize(milnor_fibre_ts(a, b)) == 1 - (a - 1) * (b - 1)
        assert milnor_fibre_ts(a, b) == milnor_fibre_ts(b, a)

    def test_iterated_sum(self):
        assert milnor_fibre_sum([3]) == milnor_fibre(3)
        assert milnor_fibre_sum([2, 2, 2]) == milnor_fibre_sum([2, 2, 2][::-1])
        # Three squares: 1 - MF = L ⊛ (1 - μ2) = -L·chi(1/2).
        value = milnor_fibre_sum([2, 2, 2])
        assert value == 1 + L * MotiveExpr.character(1, 2)
        assert euler_specialize(value) == 2

    def test_rejects_bad_exponents(self):
        with pytest.raises(ValueError):
            milnor_fibre_sum([])
        with pytest.raises(ValueError):
            milnor_fibre_ts(0, 2)


class TestQuarticTrace:
    def test_components(self):
        parts = quartic_trace_components()
        assert parts.m_nt == (L - 1) * MF42
        assert parts.m_t == L * MF44 + (1 - L) * MF42
        assert parts.d_y == L * MF44 + (L - 1) * L * MF42 + 2 * L * (L * L - 1)
        assert parts.psi == L * MF44
        assert parts.central == L

    def test_weight_is_one_minus_milnor_fibre(self):
        assert quartic_trace_weight() == 1 - MF44

    def test_weight_is_exported_from_the_package(self):
        assert motivic.quartic_trace_weight is quartic_trace_weight

    def test_vanishing_cycle_of_slice(self):
        data = load_resolution("trT4_sut")
        parts = quartic_trace_components(data)
        assert vanishing_cycle(data) == parts.m_nt + parts.m_t - L


def test_inequality_detection_by_sectors():
    difference = chi_eq(milnor_fibre(4) - MF42)
    assert difference == {
        Fraction(0): {2: 1},
        Fraction(1, 4): {0: 1, 1: 1},
        Fraction(1, 2): {0: 1},
        Fraction(3, 4): {0: 1, 1: 1},
    }
    assert euler_specialize(milnor_fibre(4) - MF42) == 6
