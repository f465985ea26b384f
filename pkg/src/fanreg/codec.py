"""JSON and CSV encodings of algebras, elements, polynomial maps, fans and reports.

Rationals are written as ``"p/q"`` strings (``"p"`` when integral) and floats
as JSON numbers, so exact values survive a round trip.  Decoding errors raise
:class:`~fanreg.errors.CodecError` carrying the position reported by orjson.

Schemas::

    Element     {"algebra": "H", "coeffs": ["1", "0", "1/2", "0"]}
    PolyMap     {"vars": 4, "algebra": "H",
                 "terms": [{"exp": [1, 0, 0, 0], "coeff": ["0", "-1", "0", "0"]}]}
    Basis       {"algebra": "H", "name": "H", "vectors": [[...], ...]}
    TFan        {"name": "H:(1,3)", "steps": [1, 3], "basis": Basis}
    TorusPoint  {"J": [Element, ...]}

A term coefficient may also be a full Element object; a map without
``"algebra"`` is read as quaternion valued.
"""

from __future__ import annotations

import csv
from collections.abc import Iterable, Mapping, Sequence
from fractions import Fraction
from pathlib import Path
from typing import IO, Any

import orjson

from fanreg.algebra import AlgebraSpec, Element, algebra_by_name
from fanreg.errors import CodecError, FanregError
from fanreg.fan import TFan, TorusPoint, fan_from_name, make_fan
from fanreg.hypercomplex import HypercomplexBasis, make_basis
from fanreg.polymap import PolyMap
from fanreg.scalars import format_scalar, parse_scalar
from fanreg.tregular import (
    PreservationFailure,
    ProofResult,
    RegularityReport,
    SampleResult,
    SlicePreservationReport,
)

DEFAULT_ALGEBRA = "H"


def dumps(obj: Any, *, indent: bool = False) -> bytes:
    option = orjson.OPT_INDENT_2 if indent else 0
    return orjson.dumps(obj, option=option | orjson.OPT_APPEND_NEWLINE)


def loads(data: bytes | str) -> Any:
    """Parse JSON; malformed input raises :class:`CodecError` with its position."""
    try:
        return orjson.loads(data)
    except orjson.JSONDecodeError as exc:
        msg = f"Malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        raise CodecError(msg, line=exc.lineno, column=exc.colno, pos=exc.pos) from exc


def load_json(path: str | Path) -> Any:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        msg = f"Cannot read {path}: {exc.strerror}"
        raise CodecError(msg, path=str(path)) from exc
    return loads(data)


def _require(data: Any, key: str, kind: type | tuple[type, ...], what: str) -> Any:
    if not isinstance(data, Mapping):
        msg = f"{what} must be a JSON object, got {type(data).__name__}"
        raise CodecError(msg, field=what)
    if key not in data:
        msg = f"{what} is missing field {key!r}"
        raise CodecError(msg, field=key)
    value = data[key]
    if not isinstance(value, kind) or isinstance(value, bool):
        msg = f"{what}.{key} has the wrong type {type(value).__name__}"
        raise CodecError(msg, field=key)
    return value


def _algebra(name: str) -> AlgebraSpec:
    try:
        return algebra_by_name(name)
    except FanregError as exc:
        msg = f"Unknown algebra {name!r}"
        raise CodecError(msg, algebra=name) from exc


# -- algebras and elements ----------------------------------------------------------


def algebra_to_dict(spec: AlgebraSpec) -> dict[str, Any]:
    return {
        "name": spec.name,
        "dim": spec.dim,
        "labels": list(spec.labels),
        "table": [[list(entry) for entry in row] for row in spec.table],
        "conj_signs": list(spec.conj_signs),
        "associative": spec.associative,
    }


def algebra_from_dict(data: Mapping[str, Any]) -> AlgebraSpec:
    """Rebuild an algebra; a bare preset name without a table resolves the preset."""
    name = _require(data, "name", str, "algebra")
    if "table" not in data:
        return _algebra(name)
    try:
        return AlgebraSpec(
            name=name,
            dim=int(data["dim"]),
            labels=tuple(str(label) for label in data["labels"]),
            table=tuple(
                tuple((int(index), int(sign)) for index, sign in row) for row in data["table"]
            ),
            conj_signs=tuple(int(s) for s in data["conj_signs"]),
            associative=bool(data.get("associative", True)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        msg = f"Malformed algebra table for {name!r}: {exc}"
        raise CodecError(msg, algebra=name) from exc


def coeffs_to_list(x: Element) -> list[str | float]:
    return [format_scalar(c) for c in x.coeffs]


def element_to_dict(x: Element) -> dict[str, Any]:
    return {"algebra": x.algebra.name, "coeffs": coeffs_to_list(x)}


def _coeffs(spec: AlgebraSpec, values: Any, what: str) -> Element:
    if not isinstance(values, list):
        msg = f"{what} must be a list of scalars"
        raise CodecError(msg, field=what)
    if len(values) != spec.dim:
        msg = f"{what} has {len(values)} coefficients, {spec.name} needs {spec.dim}"
        raise CodecError(msg, field=what, expected=spec.dim, got=len(values))
    return spec.element(parse_scalar(v) for v in values)


def element_from_dict(data: Any, spec: AlgebraSpec | None = None) -> Element:
    """Decode an Element object, or a bare coefficient list when *spec* is given."""
    if isinstance(data, list) and spec is not None:
        return _coeffs(spec, data, "coeffs")
    name = _require(data, "algebra", str, "element")
    element_spec = _algebra(name)
    if spec is not None and element_spec != spec:
        msg = f"Element of {name} where {spec.name} was expected"
        raise CodecError(msg, expected=spec.name, got=name)
    return _coeffs(element_spec, data.get("coeffs"), "element.coeffs")


# -- polynomial maps --------------------------------------------------------------


def polymap_to_dict(f: PolyMap) -> dict[str, Any]:
    return {
        "vars": f.nvars,
        "algebra": f.algebra.name,
        "terms": [{"exp": list(exp), "coeff": coeffs_to_list(c)} for exp, c in f],
    }


def polymap_from_dict(data: Any) -> PolyMap:
    nvars = _require(data, "vars", int, "polymap")
    spec = _algebra(data.get("algebra", DEFAULT_ALGEBRA))
    terms = _require(data, "terms", list, "polymap")
    out: dict[tuple[int, ...], Element] = {}
    for position, term in enumerate(terms):
        exp = _require(term, "exp", list, f"terms[{position}]")
        if len(exp) != nvars or not all(isinstance(e, int) and e >= 0 for e in exp):
            msg = f"terms[{position}].exp must be {nvars} nonnegative integers, got {exp}"
            raise CodecError(msg, term=position)
        if "coeff" not in term:
            msg = f"terms[{position}] is missing field 'coeff'"
            raise CodecError(msg, term=position)
        coeff = element_from_dict(term["coeff"], spec)
        key = tuple(exp)
        out[key] = out[key] + coeff if key in out else coeff
    return PolyMap(spec, nvars, out)


def load_polymap(path: str | Path) -> PolyMap:
    return polymap_from_dict(load_json(path))


# -- bases, fans and torus points -----------------------------------------------------


def basis_to_dict(basis: HypercomplexBasis) -> dict[str, Any]:
    return {
        "algebra": basis.algebra.name,
        "name": basis.name,
        "vectors": [coeffs_to_list(v) for v in basis.vectors],
    }


def basis_from_dict(data: Any) -> HypercomplexBasis:
    spec = _algebra(_require(data, "algebra", str, "basis"))
    vectors = [_coeffs(spec, v, "basis.vectors") for v in _require(data, "vectors", list, "basis")]
    try:
        return make_basis(vectors, name=str(data.get("name", "")))
    except FanregError as exc:
        raise CodecError(str(exc), **exc.details) from exc


def fan_to_dict(fan: TFan) -> dict[str, Any]:
    return {"name": fan.name, "steps": list(fan.steps), "basis": basis_to_dict(fan.basis)}


def fan_from_dict(data: Any) -> TFan:
    """Decode a fan; without a ``basis`` the name is parsed as a fan name."""
    name = _require(data, "name", str, "fan")
    try:
        if "basis" not in data:
            return fan_from_name(name)
        steps = _require(data, "steps", list, "fan")
        return make_fan(basis_from_dict(data["basis"]), steps, name=name)
    except CodecError:
        raise
    except FanregError as exc:
        raise CodecError(str(exc), **exc.details) from exc


def torus_point_to_dict(point: TorusPoint) -> dict[str, Any]:
    return {"J": [element_to_dict(unit) for unit in point.J]}


def torus_point_from_dict(data: Any, fan: TFan) -> TorusPoint:
    units = tuple(element_from_dict(u, fan.algebra) for u in _require(data, "J", list, "torus"))
    try:
        return TorusPoint(fan, units)
    except FanregError as exc:
        raise CodecError(str(exc), **exc.details) from exc


# -- reports --------------------------------------------------------------------------


def _sample_to_dict(sample: SampleResult | None) -> dict[str, Any] | None:
    if sample is None:
        return None
    return {
        "J": torus_point_to_dict(sample.J)["J"],
        "ok": sample.ok,
        "residual_norm": sample.residual_norm,
        "residual": polymap_to_dict(sample.residual),
    }


def _proof_to_dict(proof: ProofResult | None) -> dict[str, Any] | None:
    if proof is None:
        return None
    return {
        "applicable": proof.applicable,
        "proven": proof.proven,
        "seconds": round(proof.seconds, 6),
        "counterexample": _sample_to_dict(proof.counterexample),
    }


def regularity_report_to_dict(report: RegularityReport) -> dict[str, Any]:
    return {
        "fan": report.fan,
        "verdict": report.verdict.value,
        "passed": report.passed,
        "samples": len(report.samples),
        "counterexample": _sample_to_dict(report.counterexample),
        "proof": _proof_to_dict(report.proof),
    }


def _failure_to_dict(failure: PreservationFailure | None) -> dict[str, Any] | None:
    if failure is None:
        return None
    return {
        "J": torus_point_to_dict(failure.J)["J"],
        "exp": list(failure.exp),
        "coefficient": element_to_dict(failure.coefficient),
    }


def slice_report_to_dict(report: SlicePreservationReport) -> dict[str, Any]:
    return {
        "fan": report.fan,
        "verdict": report.verdict.value,
        "passed": report.passed,
        "samples": report.samples,
        "counterexample": _failure_to_dict(report.counterexample),
        "proof": _proof_to_dict(report.proof),
    }


def coefficients_to_dict(coeffs: Mapping[tuple[int, int], Element]) -> dict[str, Any]:
    """Coefficient table ``{k: c_k}`` as ``{"terms": [{"k": [k1, k2], "coeff": ...}]}``."""
    return {
        "terms": [
            {"k": list(k), "coeff": coeffs_to_list(c)}
            for k, c in sorted(coeffs.items(), key=lambda item: (sum(item[0]), -item[0][0]))
        ]
    }


def coefficients_from_dict(data: Any, spec: AlgebraSpec) -> dict[tuple[int, int], Element]:
    out: dict[tuple[int, int], Element] = {}
    for position, term in enumerate(_require(data, "terms", list, "coefficients")):
        k = _require(term, "k", list, f"terms[{position}]")
        if len(k) != 2 or not all(isinstance(v, int) and v >= 0 for v in k):
            msg = f"terms[{position}].k must be two nonnegative integers, got {k}"
            raise CodecError(msg, term=position)
        out[(k[0], k[1])] = element_from_dict(term.get("coeff"), spec)
    return out


# -- CSV ------------------------------------------------------------------------------


def write_csv(stream: IO[str], header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_scalar(v) if isinstance(v, Fraction) else v for v in row])
