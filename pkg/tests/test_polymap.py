"""Tests for fanreg.polymap."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fanreg.algebra import AlgebraSpec, Element, Preset, make_algebra
from fanreg.errors import AlgebraMismatchError, InvalidParameterError, VariableCountError
from fanreg.fan import TFan, TorusPoint, sphere_point
from fanreg.polymap import (
    Parity,
    PolyMap,
    apply_conj_cr,
    apply_cr,
    apply_delta,
    apply_laplacian,
    apply_nabla,
    left_mul,
    numeric_cr,
    poly_product,
    real_add,
    real_mul,
    real_poly_map,
    real_var,
    restrict_to_slice,
    right_mul,
    slice_evaluator,
    slice_images,
)
from fanreg.quat13 import fan13

_small = st.fractions(min_value=-5, max_value=5, max_denominator=6)
_indices = st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2))


def _polymaps(spec: AlgebraSpec, nvars: int) -> st.SearchStrategy[PolyMap]:
    exps = st.tuples(*[st.integers(0, 3)] * nvars)
    coeffs = st.lists(_small, min_size=spec.dim, max_size=spec.dim).map(spec.element)
    return st.dictionaries(exps, coeffs, max_size=4).map(
        lambda terms: PolyMap(spec, nvars, terms)
    )


def _circle_unit(spec: AlgebraSpec, t: Fraction) -> Element:
    c, s = sphere_point([t])
    return spec.element([0, 0, c, s])


def _identity(H: AlgebraSpec) -> PolyMap:
    """``x -> x`` in standard coordinates."""
    return PolyMap.linear(H, [H.basis(s) for s in range(4)])


class TestConstruction:
    def test_zero_coefficients_are_pruned(self, H: AlgebraSpec) -> None:
        f = PolyMap(H, 2, {(1, 0): H.zero(), (0, 1): H.one()})
        assert len(f) == 1
        assert PolyMap.zero(H, 2).is_zero()

    def test_exponent_length(self, H: AlgebraSpec) -> None:
        with pytest.raises(VariableCountError):
            PolyMap(H, 2, {(1,): H.one()})

    def test_negative_exponent(self, H: AlgebraSpec) -> None:
        with pytest.raises(InvalidParameterError):
            PolyMap(H, 1, {(-1,): H.one()})

    def test_algebra_mismatch(self, H: AlgebraSpec, octonions: AlgebraSpec) -> None:
        with pytest.raises(AlgebraMismatchError):
            PolyMap(H, 1, {(1,): octonions.one()})

    def test_variable_index(self, H: AlgebraSpec) -> None:
        with pytest.raises(VariableCountError):
            PolyMap.variable(H, 2, 2)

    def test_str(self, H: AlgebraSpec) -> None:
        f = PolyMap(H, 2, {(0, 0): H.one(), (2, 1): H.basis(1, -1)})
        assert str(f) == "(1) + (-i)*x0^2*x1"
        assert str(PolyMap.zero(H, 2)) == "0"
        assert repr(f) == "PolyMap(algebra=H, vars=2, terms=2, degree=3)"


class TestArithmetic:
    def test_sum_and_difference(self, H: AlgebraSpec) -> None:
        x0 = PolyMap.variable(H, 2, 0)
        x1 = PolyMap.variable(H, 2, 1)
        assert (x0 + x1 - x1) == x0
        assert (x0 - x0).is_zero()
        assert (x0 + 1).coefficient((0, 0)) == H.one()

    def test_variable_count_mismatch(self, H: AlgebraSpec) -> None:
        with pytest.raises(VariableCountError):
            PolyMap.variable(H, 2, 0) + PolyMap.variable(H, 3, 0)

    def test_products_keep_their_side(self, H: AlgebraSpec) -> None:
        i, j = H.basis(1), H.basis(2)
        f = PolyMap.variable(H, 1, 0, i)
        assert right_mul(f, j).coefficient((1,)) == H.basis(3)
        assert left_mul(j, f).coefficient((1,)) == -H.basis(3)
        assert (f * j) == right_mul(f, j)
        assert (j * f) == left_mul(j, f)

    def test_poly_product(self, H: AlgebraSpec) -> None:
        f = _identity(H)
        square = poly_product(f, f)
        x = H.element([1, 2, 3, 4])
        assert square(x) == x * x

    def test_scale(self, H: AlgebraSpec) -> None:
        f = PolyMap.variable(H, 1, 0)
        assert f.scale(Fraction(1, 2)).coefficient((1,)) == H.scalar(Fraction(1, 2))
        assert (2 * f) == (f * 2)


class TestEvaluation:
    def test_evaluate(self, H: AlgebraSpec) -> None:
        f = PolyMap(H, 2, {(2, 0): H.basis(1), (0, 1): H.one()})
        assert f.evaluate([3, 5]) == H.element([5, 9, 0, 0])

    def test_evaluate_arity(self, H: AlgebraSpec) -> None:
        with pytest.raises(VariableCountError):
            PolyMap.variable(H, 2, 0).evaluate([1])

    def test_call_needs_matching_dimension(self, H: AlgebraSpec) -> None:
        with pytest.raises(VariableCountError):
            PolyMap.variable(H, 3, 0)(H.one())

    def test_evaluate_array(self, H: AlgebraSpec) -> None:
        f = poly_product(_identity(H), _identity(H))
        coords = np.array([[1.0, 2.0, 3.0, 4.0], [0.0, 1.0, 0.0, 0.0]])
        values = f.evaluate_array(coords)
        assert values.shape == (2, 4)
        assert np.allclose(values[1], [-1.0, 0.0, 0.0, 0.0])
        exact = f(H.element([1, 2, 3, 4]))
        assert np.allclose(values[0], [float(c) for c in exact])


class TestCalculus:
    def test_derivative(self, H: AlgebraSpec) -> None:
        f = PolyMap(H, 2, {(3, 1): H.basis(2)})
        assert f.derivative(0) == PolyMap(H, 2, {(2, 1): H.basis(2, 3)})
        assert f.derivative(0, 2) == PolyMap(H, 2, {(1, 1): H.basis(2, 6)})
        assert f.derivative(1, 2).is_zero()

    def test_degrees_and_parity(self, H: AlgebraSpec) -> None:
        f = PolyMap(H, 2, {(2, 0): H.one(), (0, 2): H.one(), (1, 1): H.basis(1)})
        assert f.total_degree() == 2
        assert f.is_homogeneous(2)
        assert f.degree_in(1) == 2
        assert f.parity_in(0) is Parity.MIXED
        assert PolyMap(H, 1, {(3,): H.one()}).parity_in(0) is Parity.ODD
        assert PolyMap.zero(H, 1).parity_in(0) is Parity.ZERO
        assert PolyMap.zero(H, 1).total_degree() == -1

    def test_translate_and_reflect(self, H: AlgebraSpec) -> None:
        f = PolyMap(H, 1, {(2,): H.one()})
        g = f.translate([1])
        assert g == PolyMap(H, 1, {(2,): H.one(), (1,): H.scalar(2), (0,): H.one()})
        assert PolyMap(H, 1, {(1,): H.one()}).reflect(0) == PolyMap(H, 1, {(1,): -H.one()})

    def test_substitute(self, H: AlgebraSpec) -> None:
        f = PolyMap.variable(H, 1, 0, H.basis(1))
        square = real_mul(real_var(2, 0), real_var(2, 1))
        g = f.substitute([real_add(square, real_var(2, 1))], 2)
        assert g == PolyMap(H, 2, {(1, 1): H.basis(1), (0, 1): H.basis(1)})

    def test_real_poly_map(self, H: AlgebraSpec) -> None:
        f = real_poly_map(H, {(1,): Fraction(1, 2)}, 1)
        assert f.coefficient_support() == {0}

    def test_to_float(self, H: AlgebraSpec) -> None:
        f = PolyMap.variable(H, 1, 0).to_float()
        assert not f.is_exact
        assert not f.is_zero(0.5)


class TestSliceOperators:
    def test_slice_images(self, fan_13: TFan, unit_35: Element) -> None:
        images = slice_images(fan_13, TorusPoint(fan_13, (unit_35,)))
        assert images[2] == {(0, 0, 1): Fraction(3, 5)}
        assert images[3] == {(0, 0, 1): Fraction(4, 5)}

    def test_restrict(self, H: AlgebraSpec, fan_13: TFan, point_j: TorusPoint) -> None:
        restricted = restrict_to_slice(_identity(H), fan_13, point_j)
        assert restricted == PolyMap.linear(H, [H.one(), H.basis(1), H.basis(2)])

    def test_restrict_arity(self, H: AlgebraSpec, fan_13: TFan, point_j: TorusPoint) -> None:
        with pytest.raises(VariableCountError):
            restrict_to_slice(PolyMap.variable(H, 3, 0), fan_13, point_j)

    def test_cr_of_identity(self, H: AlgebraSpec, fan_13: TFan, point_j: TorusPoint) -> None:
        phi = restrict_to_slice(_identity(H), fan_13, point_j)
        # 1 + i*i + j*j
        assert apply_cr(fan_13, point_j, phi) == PolyMap.constant(H, 3, -1)
        assert apply_conj_cr(fan_13, point_j, phi) == PolyMap.constant(H, 3, 3)

    def test_laplacian(self, H: AlgebraSpec, fan_13: TFan, point_j: TorusPoint) -> None:
        phi = PolyMap(H, 3, {(2, 0, 0): H.one(), (0, 0, 2): -H.one()})
        assert apply_laplacian(fan_13, point_j, phi).is_zero()

    def test_cr_needs_slice_map(self, H: AlgebraSpec, fan_13: TFan, point_j: TorusPoint) -> None:
        with pytest.raises(VariableCountError):
            apply_cr(fan_13, point_j, _identity(H))

    def test_nabla(self, H: AlgebraSpec, unit_j: Element) -> None:
        phi = PolyMap(H, 3, {(1, 2, 3): H.one()})
        assert apply_nabla(unit_j, (1, 2, 3), phi) == PolyMap.constant(H, 3, 12)

    def test_nabla_validation(self, H: AlgebraSpec, unit_j: Element) -> None:
        phi = PolyMap.zero(H, 3)
        with pytest.raises(InvalidParameterError, match="imaginary unit"):
            apply_nabla(H.one(), (0, 0, 1), phi)
        with pytest.raises(InvalidParameterError, match="nonnegative"):
            apply_nabla(unit_j, (0, -1, 0), phi)
        with pytest.raises(VariableCountError):
            apply_nabla(unit_j, (0, 0, 1), PolyMap.zero(H, 4))

    def test_delta(self, H: AlgebraSpec) -> None:
        zeta = PolyMap.linear(H, [-H.basis(1), H.one(), H.zero()])
        # (d_0 + i d_1)(x_1 - i x_0) = -i + i
        assert apply_delta((0, 0, 1), zeta).is_zero()
        square = poly_product(zeta, zeta)
        assert apply_delta((0, 0, 2), square).is_zero()
        assert apply_delta((0, 2, 0), square) == PolyMap.constant(H, 3, 2)

    def test_numeric_cr(self, H: AlgebraSpec, fan_13: TFan, point_j: TorusPoint) -> None:
        f = poly_product(_identity(H), _identity(H))
        evaluate = slice_evaluator(fan_13, f)
        residual = numeric_cr(fan_13, point_j, evaluate, [0.5, -0.25, 1.0])
        exact = apply_cr(fan_13, point_j, restrict_to_slice(f, fan_13, point_j))
        expected = exact.evaluate([0.5, -0.25, 1.0])
        assert np.allclose([float(c) for c in residual], [float(c) for c in expected], atol=1e-6)


class TestOperatorLinearity:
    @settings(max_examples=30, deadline=None)
    @given(data=st.data())
    def test_restriction(self, data: st.DataObject) -> None:
        fan = fan13()
        H = make_algebra(Preset.QUATERNIONS)
        f, g = data.draw(_polymaps(H, 4)), data.draw(_polymaps(H, 4))
        a = data.draw(_small)
        J = TorusPoint(fan, (_circle_unit(H, data.draw(_small)),))
        combo = restrict_to_slice(f.scale(a) + g, fan, J)
        assert combo == restrict_to_slice(f, fan, J).scale(a) + restrict_to_slice(g, fan, J)

    @settings(max_examples=30, deadline=None)
    @given(data=st.data())
    def test_slice_operators(self, data: st.DataObject) -> None:
        fan = fan13()
        H = make_algebra(Preset.QUATERNIONS)
        f, g = data.draw(_polymaps(H, 3)), data.draw(_polymaps(H, 3))
        a = data.draw(_small)
        J = TorusPoint(fan, (_circle_unit(H, data.draw(_small)),))
        combo = f.scale(a) + g
        for op in (apply_cr, apply_conj_cr, apply_laplacian):
            assert op(fan, J, combo) == op(fan, J, f).scale(a) + op(fan, J, g)

    @settings(max_examples=30, deadline=None)
    @given(data=st.data())
    def test_delta_and_nabla(self, data: st.DataObject) -> None:
        H = make_algebra(Preset.QUATERNIONS)
        f, g = data.draw(_polymaps(H, 3)), data.draw(_polymaps(H, 3))
        a = data.draw(_small)
        h = data.draw(_indices)
        unit = _circle_unit(H, data.draw(_small))
        combo = f.scale(a) + g
        assert apply_delta(h, combo) == apply_delta(h, f).scale(a) + apply_delta(h, g)
        assert apply_nabla(unit, h, combo) == (
            apply_nabla(unit, h, f).scale(a) + apply_nabla(unit, h, g)
        )
