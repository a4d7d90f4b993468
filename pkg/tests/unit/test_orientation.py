"""Unit tests for J₂ classes, obstruction classes and parity propagation."""

from fractions import Fraction

import pytest

from runtime.motivic.ainfty import koszul_dual, sphere_category
from runtime.motivic.config import FieldMode
from runtime.motivic.errors import Degenerate, InvalidLagrangian, ShapeError, TwistedError
from runtime.motivic.formats import load_quiver, parse_quiver
from runtime.motivic.orientation import (
    J2Class,
    QuadSpace,
    cgeq2_class,
    cocycle_check,
    enumerate_twisted_objects,
    lagrangian_class,
    obstruction_at_extension,
    orientation_parity,
    outwater_parity,
    propagate_parities,
    quad_class,
    quad_form_of,
    sdet_parity,
    universal_extension,
)
from runtime.motivic.twisted import TwistedObject, extension_object, tw_hom_basis


@pytest.fixture
def quartic():
    return koszul_dual(load_quiver("one_loop_a4"))


def _simple(obj="1"):
    return TwistedObject.generator(obj)


def _kronecker(e):
    lines = ["vertex 1", "vertex 2"] + [f"arrow a{k}: 1 -> 2" for k in range(1, e + 1)]
    return parse_quiver("\n".join(lines) + "\n", source=f"kronecker-{e}")


# ============================================================================
# J₂ arithmetic and quadratic spaces
# ============================================================================

class TestJ2:
    def test_group_law(self):
        assert J2Class(2, 1) * J2Class(3, 1) == J2Class(6, 0)
        assert J2Class(2, 1) * J2Class(2, 0) == J2Class(1, 1)
        assert J2Class(-1, 0) * J2Class(-1, 0) == J2Class()

    def test_rejects_non_squarefree(self):
        with pytest.raises(ValueError):
            J2Class(4, 0)
        with pytest.raises(ValueError):
            J2Class(1, 2)

    def test_display(self):
        assert str(J2Class(-2, 1)) == "(-2, 1)"
        assert J2Class().is_trivial()

    def test_hyperbolic_plane(self):
        h = QuadSpace.from_rows(["u", "v"], [[0, 1], [1, 0]])
        assert quad_class(h, FieldMode.RATIONALS) == J2Class(-1, 0)
        assert quad_class(h, FieldMode.CLOSED) == J2Class(1, 0)

    def test_diagonal(self):
        assert quad_class(QuadSpace.from_rows(["u"], [[2]]), "rationals") == J2Class(2, 1)
        assert quad_class(QuadSpace.from_rows(["u"], [[8]]), "rationals") == J2Class(2, 1)

    def test_direct_sum_multiplies_classes(self):
        a = QuadSpace.from_rows(["u"], [[3]])
        b = QuadSpace.from_rows(["v", "w"], [[0, 1], [1, 0]])
        total = quad_class(a.direct_sum(b), "rationals")
        assert total == quad_class(a, "rationals") * quad_class(b, "rationals")

    def test_empty_space_is_trivial(self):
        assert quad_class(QuadSpace.from_rows([], []), "rationals") == J2Class()

    def test_degenerate(self):
        with pytest.raises(Degenerate):
            quad_class(QuadSpace.from_rows(["u", "v"], [[1, 1], [1, 1]]), "rationals")

    def test_asymmetric_matrix_rejected(self):
        with pytest.raises(ShapeError):
            QuadSpace.from_rows(["u", "v"], [[0, 1], [2, 0]])

    def test_sdet_parity(self):
        assert sdet_parity({0: 1, 1: 1}) == 0
        assert sdet_parity({3: 1}) == 1
        assert sdet_parity([1, 2, 2]) == 1
        assert sdet_parity({}) == 0


# ============================================================================
# Parities of degree-restricted endomorphism complexes
# ============================================================================

class TestChainParities:
    def test_even_square_root(self):
        cat = koszul_dual(load_quiver("one_loop_a2"))
        assert cgeq2_class(cat, _simple()) == 0

    def test_odd_square_root(self):
        assert cgeq2_class(sphere_category(), _simple()) == 1

    def test_zero_object(self, quartic):
        assert cgeq2_class(quartic, TwistedObject.zero()) == 0
        assert orientation_parity(quartic, TwistedObject.zero()) == 0

    def test_shifted_objects_rejected(self, quartic):
        with pytest.raises(TwistedError):
            cgeq2_class(quartic, TwistedObject.generator("1", 1))

    def test_empty_lagrangian_is_cgeq2(self, quartic):
        q = load_quiver("one_loop_a4")
        e = extension_object(quartic, _simple(), _simple(), [[{"a*": Fraction(1)}]])
        for m in (_simple(), e):
            assert lagrangian_class(q, [], m, quartic) == cgeq2_class(quartic, m)

    @pytest.mark.parametrize("name", ["one_loop_a4", "one_loop_a2"])
    def test_repeated_arrow_is_not_lagrangian(self, name):
        q = load_quiver(name)
        with pytest.raises(InvalidLagrangian):
            lagrangian_class(q, ["a"], _simple())

    def test_two_arrows_in_one_cycle_is_not_lagrangian(self):
        with pytest.raises(InvalidLagrangian):
            lagrangian_class(load_quiver("conifold"), ["x1", "x2"], _simple())

    def test_unknown_arrow(self):
        with pytest.raises(InvalidLagrangian):
            lagrangian_class(load_quiver("conifold"), ["z"], _simple())

    @pytest.mark.slow
    @pytest.mark.parametrize("arrow", ["x1", "x2", "y1", "y2"])
    def test_conifold_lagrangian_matches_cgeq2(self, arrow):
        q = load_quiver("conifold")
        cat = koszul_dual(q)
        objects = enumerate_twisted_objects(cat, slots=3)
        assert any(m.size == 3 for m in objects)
        for m in objects:
            assert lagrangian_class(q, [arrow], m, cat) == cgeq2_class(cat, m)


# ============================================================================
# Obstruction classes and cocycles
# ============================================================================

class TestObstruction:
    def test_simple_object_form_is_empty(self, quartic):
        assert quad_form_of(quartic, _simple()).dimension == 0

    def test_nontrivial_extension_form(self, quartic):
        e = extension_object(quartic, _simple(), _simple(), [[{"a*": Fraction(1)}]])
        form = quad_form_of(quartic, e)
        assert form.labels == ("a*_21",)
        assert abs(form.matrix[0][0]) == 1
        assert quad_class(form, FieldMode.CLOSED) == J2Class(1, 1)

    def test_obstruction_at_nontrivial_extension(self, quartic):
        l = obstruction_at_extension(quartic, _simple(), _simple(), [[{"a*": Fraction(1)}]], "closed")
        assert l == J2Class(1, 1)

    def test_split_extension_is_trivial_at_minimal_pair(self, quartic):
        l = obstruction_at_extension(quartic, _simple(), _simple(), [[{}]], "rationals")
        assert l.is_trivial()

    def test_conifold_module_form_is_split(self, conifold_cat, c23_pieces):
        form = quad_form_of(conifold_cat, extension_object(conifold_cat, *c23_pieces))
        families = [label.rsplit("_", 1)[0] for label in form.labels]
        assert form.dimension == 12
        assert set(families) == {"x1*", "x2*"}
        assert families.count("x1*") == families.count("x2*") == 6
        for i, fi in enumerate(families):
            for j, fj in enumerate(families):
                if fi == fj:
                    assert form.matrix[i][j] == 0
        assert quad_class(form, FieldMode.CLOSED).is_trivial()

    def test_conifold_module_obstruction_is_trivial(self, conifold_cat, c23_pieces):
        assert obstruction_at_extension(conifold_cat, *c23_pieces, FieldMode.CLOSED).is_trivial()

    def test_w0_extensions_are_trivial(self):
        cat = koszul_dual(load_quiver("one_loop_w0"))
        l = obstruction_at_extension(cat, _simple(), _simple(), [[{"a*": Fraction(1)}]])
        assert l.is_trivial()

    def test_canonical_assignment_is_a_cocycle(self, quartic):
        alpha = [[{"a*": Fraction(1)}]]
        assert cocycle_check(quartic, _simple(), _simple(), alpha, lambda m: orientation_parity(quartic, m))

    def test_character_twist_keeps_cocycle(self, quartic):
        alpha = [[{"a*": Fraction(1)}]]

        def twisted(m):
            return (orientation_parity(quartic, m) + m.size) % 2

        assert cocycle_check(quartic, _simple(), _simple(), alpha, twisted)

    def test_flip_at_one_class_is_detected(self, quartic):
        alpha = [[{"a*": Fraction(1)}]]

        def flipped(m):
            base = orientation_parity(quartic, m)
            return (base + 1) % 2 if m.size == 2 else base

        assert not cocycle_check(quartic, _simple(), _simple(), alpha, flipped)

    def test_cocycle_accepts_j2_values(self, quartic):
        alpha = [[{"a*": Fraction(1)}]]
        assert cocycle_check(
            quartic, _simple(), _simple(), alpha, lambda m: J2Class(1, orientation_parity(quartic, m))
        )


# ============================================================================
# Propagation from generators
# ============================================================================

class TestPropagation:
    def test_zero_potential_propagates_zero(self):
        cat = koszul_dual(load_quiver("one_loop_w0"))
        values = propagate_parities(cat, {"1": 0}, slots=3)
        assert values
        assert set(values.values()) == {0}

    def test_sphere_parity_counts_generators(self):
        cat = sphere_category()
        objects = enumerate_twisted_objects(cat, slots=3)
        values = propagate_parities(cat, {"1": 1}, objects)
        assert [values[(m.tau, ())] for m in objects] == [1, 0, 1]

    def test_conifold_propagation_is_consistent(self):
        cat = koszul_dual(load_quiver("conifold"))
        values = propagate_parities(cat, {"1": 0, "2": 0}, slots=2)
        assert len(values) >= 4

    def test_missing_generator_parity(self):
        with pytest.raises(ShapeError):
            propagate_parities(koszul_dual(load_quiver("conifold")), {"1": 0}, slots=1)

    def test_enumeration_filters_maurer_cartan(self, quartic):
        objects = enumerate_twisted_objects(quartic, slots=2)
        assert len(objects) == 1 + 2
        assert all(m.size <= 2 for m in objects)


# ============================================================================
# Universal extensions
# ============================================================================

class TestUniversalExtension:
    @pytest.mark.parametrize("e", [1, 2, 3])
    def test_dimension_count_is_even(self, e):
        assert outwater_parity(e) == 0
        cat = koszul_dual(_kronecker(e))
        m1, m2 = _simple("1"), _simple("2")
        if not tw_hom_basis(cat, m2, m1, 1):
            m1, m2 = m2, m1
        extension, copies, alpha = universal_extension(cat, m1, m2)
        assert copies.size == e
        assert extension.size == e + 1
        assert obstruction_at_extension(cat, copies, m2, alpha).parity == outwater_parity(e)
