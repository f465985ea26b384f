"""Tests for fanreg.quat13."""

from __future__ import annotations

from fractions import Fraction

import pytest

from fanreg.algebra import AlgebraSpec, Element
from fanreg.errors import InvalidParameterError, NotRegularError, SingularPairError
from fanreg.polymap import PolyMap
from fanreg.quat13 import (
    akbk,
    akbk_homogeneity,
    akbk_identity,
    akbk_is_complex,
    all_indices,
    basis_kernel_dimension,
    circle_points,
    classify_slice_preserving,
    clear_caches,
    delta_nabla_identity,
    expand_homogeneous,
    extract_stem,
    fueter_poly,
    fueter_poly_map,
    fueter_poly_sign_law,
    identity_test,
    is_monogenic,
    modulus_invariance_check,
    modulus_split,
    multi_indices,
    orbit_pairs,
    represent_general,
    represent_two_point,
    restriction_identity,
    restriction_kernel_dimension,
    series_expand,
    series_reconstruct,
    series_stem,
    stem_harmonic,
    stem_parity,
    stem_slice_preserving,
    stem_system_check,
    tk,
    tk_combination,
    tk_family,
    tk_poly,
    translation_invariance,
)
from fanreg.tregular import induce


class TestTk:
    def test_first_degree(self, H: AlgebraSpec) -> None:
        assert tk_poly((1, 0)) == PolyMap.linear(H, [-H.basis(1), H.one(), H.zero(), H.zero()])
        assert tk_poly((0, 1)) == PolyMap.linear(H, [H.one(), H.zero(), H.basis(2), H.basis(3)])

    def test_base_cases(self, H: AlgebraSpec) -> None:
        assert tk_poly((0, 0)) == PolyMap.constant(H, 4, 1)
        assert tk_poly((-1, 2)).is_zero()

    def test_homogeneous(self) -> None:
        for k in all_indices(4):
            assert tk_poly(k).is_homogeneous(k[0] + k[1])

    def test_bad_index(self) -> None:
        with pytest.raises(InvalidParameterError, match="two entries"):
            tk_poly((1, 2, 3))  # type: ignore[arg-type]

    def test_family(self) -> None:
        assert multi_indices(2) == [(2, 0), (1, 1), (0, 2)]
        assert [t.k for t in tk_family(2)] == [(2, 0), (1, 1), (0, 2)]
        assert tk((1, 1)).poly == tk_poly((1, 1))
        assert len(all_indices(3)) == 10

    def test_cache_can_be_cleared(self) -> None:
        before = tk_poly((2, 1))
        clear_caches()
        assert tk_poly((2, 1)) == before

    @pytest.mark.parametrize("k", [0, 1, 2, 3])
    def test_family_is_independent(self, k: int) -> None:
        assert basis_kernel_dimension(k) == 0


class TestFueterPolys:
    def test_first_degree(self, H: AlgebraSpec, unit_35: Element) -> None:
        assert fueter_poly_map((1, 0), unit_35) == PolyMap.linear(
            H, [-H.basis(1), H.one(), H.zero()]
        )
        assert fueter_poly_map((0, 1), unit_35) == PolyMap.linear(
            H, [-unit_35, H.zero(), H.one()]
        )
        assert fueter_poly((0, 1), unit_35).J == unit_35

    @pytest.mark.parametrize("k", [(1, 0), (0, 1), (2, 1), (1, 2), (0, 3)])
    def test_restriction_identity(self, k: tuple[int, int], unit_35: Element) -> None:
        assert restriction_identity(k, unit_35)
        assert fueter_poly_sign_law(k, unit_35)
        assert is_monogenic(fueter_poly_map(k, unit_35), unit_35)

    def test_delta_nabla(self, unit_35: Element) -> None:
        phi = fueter_poly_map((2, 1), unit_35) + fueter_poly_map((1, 1), unit_35)
        for h in [(0, 0, 1), (1, 0, 1), (0, 1, 2), (0, 0, 3)]:
            assert delta_nabla_identity(h, phi, unit_35)

    def test_circle_points(self, unit_j: Element, H: AlgebraSpec) -> None:
        third = H.element([0, 0, Fraction(3, 5), Fraction(4, 5)])
        assert circle_points(3) == [unit_j, H.basis(3), third]

    def test_circle_points_span_distinct_slices(self) -> None:
        points = circle_points(12)
        for a_index, a in enumerate(points):
            assert a.coeffs[0] == 0 and a.coeffs[1] == 0
            assert a.coeffs[2] ** 2 + a.coeffs[3] ** 2 == 1
            for b in points[a_index + 1 :]:
                assert b != a
                assert b != -a

    def test_circle_points_non_positive_count(self) -> None:
        with pytest.raises(InvalidParameterError, match="Circle point count"):
            circle_points(0)



class TestExpansion:
    def test_homogeneous_round_trip(self, H: AlgebraSpec) -> None:
        coeffs = {
            (2, 0): H.basis(1),
            (1, 1): H.element([1, 0, Fraction(1, 2), 0]),
            (0, 2): H.one(),
        }
        assert expand_homogeneous(tk_combination(coeffs), 2) == coeffs

    def test_not_regular(self, H: AlgebraSpec) -> None:
        identity = PolyMap.linear(H, [H.basis(s) for s in range(4)])
        with pytest.raises(NotRegularError) as info:
            expand_homogeneous(identity, 1)
        assert not info.value.residual.is_zero()

    def test_wrong_arity(self, H: AlgebraSpec) -> None:
        with pytest.raises(InvalidParameterError):
            expand_homogeneous(PolyMap.zero(H, 3), 0)

    def test_series_around_mirror_point(self, H: AlgebraSpec) -> None:
        f = tk_poly((1, 0))
        z0 = H.one()
        coeffs = series_expand(f, z0)
        assert coeffs[(0, 0)] == -H.basis(1)
        assert coeffs[(1, 0)] == H.one()
        assert coeffs[(0, 1)].is_zero()
        assert series_reconstruct(coeffs, z0) == f

    def test_series_round_trip(self, H: AlgebraSpec) -> None:
        f = tk_combination({(2, 1): H.basis(2), (0, 2): H.basis(1), (1, 0): H.one()})
        z0 = H.element([Fraction(1, 2), -1, 0, 0])
        assert series_reconstruct(series_expand(f, z0), z0) == f

    def test_center_off_mirror(self, H: AlgebraSpec) -> None:
        with pytest.raises(InvalidParameterError, match="mirror"):
            series_expand(tk_poly((1, 0)), H.basis(2))


class TestAkBk:
    def test_first_degree(self, H: AlgebraSpec) -> None:
        pair = akbk((0, 1))
        assert pair.A == PolyMap.variable(H, 3, 0)
        assert pair.B == PolyMap.constant(H, 3, 1)
        first = akbk((1, 0))
        assert first.A == PolyMap.linear(H, [-H.basis(1), H.one(), H.zero()])
        assert first.B.is_zero()

    @pytest.mark.parametrize("k", all_indices(4))
    def test_identity(self, k: tuple[int, int]) -> None:
        assert akbk_identity(k)
        assert akbk_homogeneity(k)
        assert akbk_is_complex(k)

    def test_modulus(self, H: AlgebraSpec) -> None:
        split = modulus_split((2, 1), H.element([1, Fraction(1, 2), 2, -1]))
        assert split.consistent
        assert split.bounded

    def test_modulus_invariance(self) -> None:
        pairs = orbit_pairs(10, seed=4)
        assert len(pairs) == 10
        for k in all_indices(3):
            assert modulus_invariance_check(k, pairs)


class TestRepresentation:
    def test_general_and_two_point(
        self, H: AlgebraSpec, unit_j: Element, unit_35: Element
    ) -> None:
        K = H.basis(3)
        z = H.element([Fraction(1, 3), -2, 0, 0])
        beta = Fraction(3, 2)
        I = H.element([0, 0, Fraction(-5, 13), Fraction(12, 13)])  # noqa: E741
        for k in all_indices(3):
            f = tk_poly(k)
            expected = f(z + I.scale(beta))
            assert represent_general(f, I, unit_j, K, z, beta) == expected
            assert represent_two_point(f, I, unit_35, z, beta) == expected

    def test_coincident_units(self, H: AlgebraSpec, unit_j: Element) -> None:
        with pytest.raises(SingularPairError):
            represent_general(tk_poly((1, 1)), unit_j, unit_j, unit_j, H.zero(), 1)


class TestStems:
    def test_paravector_stem(self, H: AlgebraSpec, unit_j: Element) -> None:
        stem = extract_stem(tk_poly((0, 1)), unit_j)
        assert stem.empty == PolyMap.variable(H, 3, 0)
        assert stem.one == PolyMap.variable(H, 3, 2)
        assert stem_slice_preserving(stem)

    @pytest.mark.parametrize("k", [(1, 0), (1, 1), (0, 2), (2, 1), (1, 2)])
    def test_stem_properties(self, k: tuple[int, int], unit_j: Element, unit_35: Element) -> None:
        stem = extract_stem(tk_poly(k), unit_j)
        assert stem_parity(stem)
        assert stem_system_check(stem)
        assert stem_harmonic(stem)
        assert extract_stem(tk_poly(k), unit_35) == stem

    def test_induced_stem(self, H: AlgebraSpec, unit_j: Element) -> None:
        f = tk_poly((2, 1))
        induced = induce(extract_stem(f, unit_j).to_stem_function())
        x = H.element([1, -1, Fraction(3, 5), Fraction(4, 5)])
        assert induced(x) == f(x)

    def test_series_stem(self, H: AlgebraSpec, unit_j: Element) -> None:
        coeffs = {(1, 1): H.basis(2), (0, 2): H.one()}
        f = tk_combination(coeffs)
        assert series_stem(coeffs, H.zero()).matches(extract_stem(f, unit_j))


class TestSlicePreservation:
    @pytest.mark.parametrize(
        ("coeffs", "expected"),
        [
            ({(1, 0): "i"}, True),
            ({(1, 0): "j"}, False),
            ({(0, 1): "i"}, False),
            ({(0, 3): "1"}, True),
            ({(1, 1): "1"}, False),
            ({(2, 2): "1"}, True),
        ],
    )
    def test_classify(self, H: AlgebraSpec, coeffs: dict, expected: bool) -> None:
        elements = {k: H.from_labels({label: 1}) for k, label in coeffs.items()}
        assert classify_slice_preserving(elements) is expected

    def test_translation_invariance(self, H: AlgebraSpec) -> None:
        check = translation_invariance(tk_poly((1, 1)), H.element([1, 1, 0, 0]))
        assert check.consistent
        assert check.regular == (True, True)


class TestIdentityPrinciple:
    def test_equal_maps(self, unit_35: Element) -> None:
        result = identity_test(tk_poly((1, 1)), tk_poly((1, 1)), unit_35)
        assert result.equal and result.slice_equal
        assert result.witness is None

    def test_witness(self, H: AlgebraSpec, unit_35: Element) -> None:
        f = tk_poly((2, 0))
        g = f + tk_poly((1, 1)) * H.basis(3)
        result = identity_test(f, g, unit_35)
        assert not result.equal
        assert not result.slice_equal
        assert result.witness == (1, 1)
        assert result.coefficient == -H.basis(3)

    def test_restriction_is_injective(self, unit_35: Element) -> None:
        assert restriction_kernel_dimension(2, unit_35) == 0
