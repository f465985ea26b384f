"""Tests for fanreg.codec."""

from __future__ import annotations

import io
from fractions import Fraction
from pathlib import Path

import pytest

from fanreg.algebra import AlgebraSpec
from fanreg.codec import (
    algebra_from_dict,
    algebra_to_dict,
    coefficients_from_dict,
    coefficients_to_dict,
    dumps,
    element_from_dict,
    element_to_dict,
    fan_from_dict,
    fan_to_dict,
    load_json,
    load_polymap,
    loads,
    polymap_from_dict,
    polymap_to_dict,
    regularity_report_to_dict,
    slice_report_to_dict,
    torus_point_from_dict,
    torus_point_to_dict,
    write_csv,
)
from fanreg.errors import CodecError
from fanreg.fan import TFan, TorusPoint
from fanreg.polymap import PolyMap
from fanreg.quat13 import tk_poly
from fanreg.tregular import check_regular, check_slice_preserving

_FUETER_VARIABLE = {
    "vars": 4,
    "terms": [
        {"exp": [1, 0, 0, 0], "coeff": ["0", "-1", "0", "0"]},
        {"exp": [0, 1, 0, 0], "coeff": ["1", "0", "0", "0"]},
    ],
}


class TestJson:
    def test_dumps_appends_newline(self) -> None:
        assert dumps({"a": 1}) == b'{"a":1}\n'
        assert dumps({"a": 1}, indent=True).startswith(b"{\n")

    def test_malformed(self) -> None:
        with pytest.raises(CodecError) as info:
            loads('{"vars": 4,\n  "terms": [}')
        assert info.value.code == "malformed-input"
        assert info.value.details["line"] == 2

    def test_missing_file(self, tmp_path: Path) -> None:
        with pytest.raises(CodecError, match="Cannot read"):
            load_json(tmp_path / "absent.json")


class TestAlgebras:
    def test_preset_by_name(self, H: AlgebraSpec) -> None:
        assert algebra_from_dict({"name": "H"}) == H

    def test_full_table(self, octonions: AlgebraSpec) -> None:
        data = algebra_to_dict(octonions)
        assert data["dim"] == 8
        assert data["associative"] is False
        assert algebra_from_dict(data) == octonions

    def test_malformed_table(self) -> None:
        with pytest.raises(CodecError, match="Malformed algebra table"):
            algebra_from_dict({"name": "X", "table": [[1]], "dim": 1})

    def test_unknown_name(self) -> None:
        with pytest.raises(CodecError, match="Unknown algebra"):
            algebra_from_dict({"name": "nope"})


class TestElements:
    def test_exact_encoding(self, H: AlgebraSpec) -> None:
        x = H.element([1, 0, Fraction(1, 2), 0])
        assert element_to_dict(x) == {"algebra": "H", "coeffs": ["1", "0", "1/2", "0"]}

    def test_bare_list(self, H: AlgebraSpec) -> None:
        x = element_from_dict(["1", "-2/3", 0, 0.5], H)
        assert x.coeffs == (1, Fraction(-2, 3), 0, 0.5)
        assert not x.is_exact

    def test_wrong_length(self, H: AlgebraSpec) -> None:
        with pytest.raises(CodecError) as info:
            element_from_dict({"algebra": "H", "coeffs": ["1"]})
        assert info.value.details == {"field": "element.coeffs", "expected": 4, "got": 1}

    def test_wrong_algebra(self, H: AlgebraSpec) -> None:
        with pytest.raises(CodecError, match="where H was expected"):
            element_from_dict({"algebra": "C", "coeffs": ["1", "0"]}, H)

    def test_malformed_rational(self, H: AlgebraSpec) -> None:
        with pytest.raises(CodecError, match="Malformed rational"):
            element_from_dict(["1", "x", "0", "0"], H)

    def test_boolean_rejected(self, H: AlgebraSpec) -> None:
        with pytest.raises(CodecError):
            element_from_dict([True, 0, 0, 0], H)


class TestPolyMaps:
    def test_decode(self) -> None:
        assert polymap_from_dict(_FUETER_VARIABLE) == tk_poly((1, 0))

    def test_encode(self) -> None:
        data = polymap_to_dict(tk_poly((1, 0)))
        assert data["vars"] == 4
        assert data["algebra"] == "H"
        assert sorted(t["exp"] for t in data["terms"]) == [[0, 1, 0, 0], [1, 0, 0, 0]]

    def test_duplicate_terms_add(self, H: AlgebraSpec) -> None:
        data = {
            "vars": 1,
            "terms": [{"exp": [2], "coeff": ["1", "0", "0", "0"]}] * 2,
        }
        assert polymap_from_dict(data) == PolyMap(H, 1, {(2,): H.element([2, 0, 0, 0])})

    @pytest.mark.parametrize(
        ("term", "match"),
        [
            ({"exp": [1, 0], "coeff": ["1", "0", "0", "0"]}, "nonnegative integers"),
            ({"exp": [-1, 0, 0, 0], "coeff": ["1", "0", "0", "0"]}, "nonnegative integers"),
            ({"exp": [1, 0, 0, 0]}, "missing field 'coeff'"),
            ({"coeff": ["1", "0", "0", "0"]}, "missing field 'exp'"),
        ],
    )
    def test_bad_terms(self, term: dict, match: str) -> None:
        with pytest.raises(CodecError, match=match):
            polymap_from_dict({"vars": 4, "terms": [term]})

    def test_vars_must_be_int(self) -> None:
        with pytest.raises(CodecError, match="wrong type"):
            polymap_from_dict({"vars": True, "terms": []})

    def test_load_from_file(self, tmp_path: Path) -> None:
        path = tmp_path / "zeta.json"
        path.write_bytes(dumps(_FUETER_VARIABLE))
        assert load_polymap(path) == tk_poly((1, 0))

    def test_element_coefficients(self, H: AlgebraSpec) -> None:
        data = {"vars": 1, "terms": [{"exp": [1], "coeff": element_to_dict(H.basis(2))}]}
        assert polymap_from_dict(data) == PolyMap.linear(H, [H.basis(2)])


class TestFans:
    def test_by_name(self, fan_13: TFan) -> None:
        fan = fan_from_dict({"name": "H:(1,3)"})
        assert fan.steps == fan_13.steps
        assert fan.basis.vectors == fan_13.basis.vectors

    def test_with_basis(self, fan_13: TFan) -> None:
        data = fan_to_dict(fan_13)
        assert data["steps"] == [1, 3]
        assert data["basis"]["vectors"][0] == ["1", "0", "0", "0"]
        assert fan_from_dict(data).steps == (1, 3)

    def test_invalid_basis(self) -> None:
        data = {
            "name": "bad",
            "steps": [1, 1],
            "basis": {"algebra": "H", "vectors": [["1", "0", "0", "0"], ["0", "2", "0", "0"]]},
        }
        with pytest.raises(CodecError, match="norm"):
            fan_from_dict(data)

    def test_unknown_name(self) -> None:
        with pytest.raises(CodecError):
            fan_from_dict({"name": "H:(9)"})

    def test_torus_point(self, point_j: TorusPoint, fan_13: TFan) -> None:
        data = torus_point_to_dict(point_j)
        assert data == {"J": [{"algebra": "H", "coeffs": ["0", "0", "1", "0"]}]}
        assert torus_point_from_dict(data, fan_13).J == point_j.J


class TestCoefficients:
    def test_ordering(self, H: AlgebraSpec) -> None:
        coeffs = {(0, 1): H.one(), (1, 0): H.basis(1), (0, 0): H.zero()}
        data = coefficients_to_dict(coeffs)
        assert [t["k"] for t in data["terms"]] == [[0, 0], [1, 0], [0, 1]]
        assert coefficients_from_dict(data, H) == coeffs

    def test_bad_index(self, H: AlgebraSpec) -> None:
        with pytest.raises(CodecError, match="two nonnegative integers"):
            coefficients_from_dict({"terms": [{"k": [1], "coeff": ["1", "0", "0", "0"]}]}, H)


class TestReports:
    def test_regular(self, fan_13: TFan) -> None:
        data = regularity_report_to_dict(check_regular(tk_poly((1, 0)), fan_13))
        assert data["passed"] is True
        assert data["counterexample"] is None
        assert data["fan"] == "H:(1,3)"

    def test_counterexample(self, H: AlgebraSpec, fan_13: TFan) -> None:
        identity = PolyMap.linear(H, [H.basis(s) for s in range(4)])
        data = regularity_report_to_dict(check_regular(identity, fan_13, symbolic=False))
        assert data["verdict"] == "counterexample"
        assert data["proof"] is None
        assert data["counterexample"]["ok"] is False
        assert data["counterexample"]["residual"]["vars"] == 4

    def test_slice_report(self, H: AlgebraSpec, fan_13: TFan) -> None:
        data = slice_report_to_dict(check_slice_preserving(tk_poly((0, 1)) * H.basis(1), fan_13))
        assert data["verdict"] == "counterexample"
        assert data["counterexample"]["coefficient"]["algebra"] == "H"
        assert data["proof"] is None

    def test_slice_report_proof(self, fan_13: TFan) -> None:
        data = slice_report_to_dict(check_slice_preserving(tk_poly((2, 0)), fan_13))
        assert data["verdict"] == "preserving_on_samples+symbolic"
        assert data["proof"]["proven"] is True
        assert data["counterexample"] is None


class TestCsv:
    def test_rationals_formatted(self) -> None:
        buf = io.StringIO()
        write_csv(buf, ["k", "value"], [["(1,0)", Fraction(1, 3)], ["(0,1)", 0.5]])
        assert buf.getvalue() == "k,value\n(1,0),1/3\n(0,1),0.5\n"
