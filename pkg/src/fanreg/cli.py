"""Command-line front end: ``fanreg <command> [options]``.

Reports go to stdout (or ``--out``) as JSON or CSV; logs go to stderr.
Exit codes: ``0`` when every check passes, ``1`` when a mathematical
counterexample is found, ``2`` on usage errors and malformed input.
"""

from __future__ import annotations

import argparse
import io
import sys
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Any

import structlog

from fanreg import codec
from fanreg.algebra import (
    AlgebraSpec,
    Element,
    algebra_by_name,
    close,
    cone_inverse,
    in_quadratic_cone,
    in_sphere,
)
from fanreg.cauchy import DEFAULT_ORDER, interior_points, reconstruction_table
from fanreg.config import setup_logging
from fanreg.errors import CodecError, FanregError, NotExtendableError, NotRegularError
from fanreg.fan import (
    DEFAULT_GRID_DENSITY,
    DEFAULT_SEED,
    RandomSample,
    RationalGrid,
    Sampler,
    basis_from_name,
    fan_from_name,
)
from fanreg.hypercomplex import hat_extension, verify_basis
from fanreg.polymap import PolyMap
from fanreg.quat13 import (
    akbk,
    all_indices,
    extract_stem,
    fueter_poly,
    quaternions,
    represent_general,
    represent_two_point,
    series_expand,
    stem_harmonic,
    stem_parity,
    stem_slice_preserving,
    stem_system_check,
    tk,
    tk_poly,
)
from fanreg.scalars import DEFAULT_TOLERANCE, Backend, format_scalar, parse_scalar
from fanreg.selftest import run_selftest
from fanreg.tregular import check_regular, check_slice_preserving

logger = structlog.get_logger(__name__)

EXIT_OK = 0
EXIT_COUNTEREXAMPLE = 1
EXIT_USAGE = 2


@dataclass(frozen=True)
class RunConfig:
    """Options shared by every command, resolved from the parsed arguments.

    ``tol`` only matters for the float64 backend; rational runs compare exactly.
    """

    command: str
    fan: str | None = None
    input: Path | None = None
    sampler: Sampler = RationalGrid()
    backend: Backend = Backend.RATIONAL
    fmt: str = "json"
    out: Path | None = None
    tol: float = DEFAULT_TOLERANCE
    seed: int = DEFAULT_SEED
    workers: int = 1

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> RunConfig:
        count = getattr(args, "count", None)
        sampler: Sampler = (
            RandomSample(args.seed, count)
            if count is not None
            else RationalGrid(getattr(args, "grid", DEFAULT_GRID_DENSITY))
        )
        return cls(
            command=args.command,
            fan=getattr(args, "fan", None),
            input=Path(args.input) if getattr(args, "input", None) else None,
            sampler=sampler,
            backend=Backend(args.backend),
            fmt=args.format,
            out=Path(args.out) if args.out else None,
            tol=args.tol,
            seed=args.seed,
            workers=getattr(args, "workers", 1),
        )


@dataclass(frozen=True)
class Outcome:
    """Report payload, CSV rendering and exit code of one command."""

    payload: Any
    header: Sequence[str] = ()
    rows: Sequence[Sequence[Any]] = ()
    exit_code: int = EXIT_OK


# -- argument parsing -----------------------------------------------------------------


def _shared(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tol", type=float, default=DEFAULT_TOLERANCE)
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--out", default=None, help="write the report here instead of stdout")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    parser.add_argument("--backend", choices=[b.value for b in Backend], default="rational")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fanreg", description="Regularity checks for functions on real *-algebras."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    table = sub.add_parser("table", help="coefficient tables of T_k, A_k/B_k or P^J_k")
    table.add_argument("--family", choices=("tk", "akbk", "fueter"), default="tk")
    table.add_argument("--maxdeg", type=int, default=2)
    table.add_argument("--J", default="j", help="circle point for --family fueter")

    check = sub.add_parser("check", help="T-regularity of a polynomial map")
    check.add_argument("--fan", required=True, help="e.g. 'H:(1,3)'")
    check.add_argument("--input", required=True, help="PolyMap JSON file")
    check.add_argument("--grid", type=int, default=DEFAULT_GRID_DENSITY)
    check.add_argument("--count", type=int, default=None, help="random float torus samples")
    check.add_argument("--symbolic", action=argparse.BooleanOptionalAction, default=True)
    check.add_argument("--slice-preserving", action="store_true")
    check.add_argument("--workers", type=int, default=1)

    expand = sub.add_parser("expand", help="series coefficients around a mirror point")
    expand.add_argument("--input", required=True)
    expand.add_argument("--center", default="0,0", help="x_0,x_1 of the center")
    expand.add_argument("--maxdeg", type=int, default=None)

    represent = sub.add_parser("represent", help="both representation formulas at one point")
    represent.add_argument("--input", required=True)
    represent.add_argument("--I", dest="unit_i", required=True)
    represent.add_argument("--J", dest="unit_j", required=True)
    represent.add_argument("--K", dest="unit_k", default=None)
    represent.add_argument("--z", default="0,0", help="x_0,x_1 of the mirror point")
    represent.add_argument("--beta", default="1")

    stems = sub.add_parser("stems", help="stem pair of a (1,3) map")
    stems.add_argument("--input", required=True)
    stems.add_argument("--J", default="j")

    cauchy = sub.add_parser("cauchy-demo", help="Cauchy integral reconstruction errors")
    cauchy.add_argument("--input", default=None, help="defaults to T_(1,1)")
    cauchy.add_argument("--J", default="j")
    cauchy.add_argument("--radius", type=float, default=1.0)
    cauchy.add_argument("--points", type=int, default=5)
    cauchy.add_argument("--orders", default=f"8,16,{DEFAULT_ORDER}")

    basis = sub.add_parser("basis-verify", help="verify a hypercomplex basis")
    basis.add_argument("--basis", required=True, help="e.g. 'H-MT' or 'Cl05:V5'")
    basis.add_argument("--hat", action="store_true", help="also try the hat extension")

    cone = sub.add_parser("cone", help="quadratic cone membership and inverse")
    cone.add_argument("--algebra", default="H")
    cone.add_argument("--element", required=True, help="comma-separated coefficients")

    selftest = sub.add_parser("selftest", help="run the acceptance suite")
    selftest.add_argument("--quick", action="store_true")
    selftest.add_argument("--workers", type=int, default=1)

    for command in sub.choices.values():
        _shared(command)
    return parser


# -- value parsing --------------------------------------------------------------------


def parse_element(text: str, spec: AlgebraSpec) -> Element:
    """``"j"``, ``"-k"`` or comma-separated coefficients such as ``"0,0,3/5,4/5"``."""
    text = text.strip()
    sign = -1 if text.startswith("-") and text[1:] in spec.labels else 1
    label = text[1:] if sign < 0 else text
    if label in spec.labels:
        return spec.basis(spec.index(label), sign)
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) != spec.dim:
        msg = f"Expected {spec.dim} coefficients for {spec.name}, got {text!r}"
        raise CodecError(msg, value=text)
    return spec.element(parse_scalar(p) for p in parts)


def _mirror(text: str) -> Element:
    parts = [parse_scalar(p) for p in text.split(",")]
    if len(parts) != 2:
        msg = f"Mirror points take two coordinates x_0,x_1, got {text!r}"
        raise CodecError(msg, value=text)
    return quaternions().element([parts[0], parts[1], 0, 0])


def _poly_rows(k: Sequence[int], part: str, f: PolyMap) -> list[list[Any]]:
    return [
        [*k, part, " ".join(map(str, exp)), *(format_scalar(c) for c in coeff.coeffs)]
        for exp, coeff in f
    ]


# -- commands ----------------------------------------------------------------------------


def cmd_table(config: RunConfig, args: argparse.Namespace) -> Outcome:
    H = quaternions()
    header = ["k1", "k2", "part", "exp", *H.labels]
    rows: list[list[Any]] = []
    payload: list[dict[str, Any]] = []
    for k in all_indices(args.maxdeg):
        if args.family == "tk":
            f = tk(k).poly
            rows += _poly_rows(k, "T", f)
            payload.append({"k": list(k), "poly": codec.polymap_to_dict(f)})
        elif args.family == "akbk":
            pair = akbk(k)
            rows += _poly_rows(k, "A", pair.A) + _poly_rows(k, "B", pair.B)
            payload.append(
                {
                    "k": list(k),
                    "A": codec.polymap_to_dict(pair.A),
                    "B": codec.polymap_to_dict(pair.B),
                }
            )
        else:
            f = fueter_poly(k, parse_element(args.J, H)).poly
            rows += _poly_rows(k, "P", f)
            payload.append({"k": list(k), "poly": codec.polymap_to_dict(f)})
    return Outcome({"family": args.family, "entries": payload}, header, rows)


def _load_input(config: RunConfig) -> PolyMap:
    assert config.input is not None
    f = codec.load_polymap(config.input)
    return f.to_backend(config.backend) if config.backend is Backend.FLOAT64 else f


def cmd_check(config: RunConfig, args: argparse.Namespace) -> Outcome:
    assert config.fan is not None
    fan = fan_from_name(config.fan)
    f = _load_input(config)
    symbolic = args.symbolic and config.backend is Backend.RATIONAL
    report = check_regular(
        f, fan, config.sampler, symbolic=symbolic, tol=config.tol, workers=config.workers
    )
    payload: dict[str, Any] = {"regularity": codec.regularity_report_to_dict(report)}
    rows: list[list[Any]] = [["regularity", report.verdict.value, len(report.samples)]]
    passed = report.passed
    if args.slice_preserving:
        preserving = check_slice_preserving(f, fan, config.sampler, symbolic=symbolic)
        payload["slice_preserving"] = codec.slice_report_to_dict(preserving)
        rows.append(["slice_preserving", preserving.verdict.value, preserving.samples])
        passed = passed and preserving.passed
    code = EXIT_OK if passed else EXIT_COUNTEREXAMPLE
    return Outcome(payload, ("check", "verdict", "samples"), rows, code)


def cmd_expand(config: RunConfig, args: argparse.Namespace) -> Outcome:
    f = _load_input(config)
    center = _mirror(args.center)
    try:
        coeffs = series_expand(f, center, args.maxdeg)
    except NotRegularError as exc:
        logger.warning("cli.not_regular", residual=exc.residual)
        payload = {"regular": False, "residual": codec.polymap_to_dict(exc.residual)}
        return Outcome(payload, ("regular",), [[False]], EXIT_COUNTEREXAMPLE)
    rows = [[*k, *(format_scalar(v) for v in c.coeffs)] for k, c in coeffs.items()]
    payload = {
        "regular": True,
        "center": codec.element_to_dict(center),
        **codec.coefficients_to_dict(coeffs),
    }
    return Outcome(payload, ("k1", "k2", *f.algebra.labels), rows)


def cmd_represent(config: RunConfig, args: argparse.Namespace) -> Outcome:
    f = _load_input(config)
    H = f.algebra
    I, J = parse_element(args.unit_i, H), parse_element(args.unit_j, H)  # noqa: E741
    z, beta = _mirror(args.z), parse_scalar(args.beta)
    direct = f(z + I.scale(beta))
    results = {"direct": direct, "two_point": represent_two_point(f, I, J, z, beta)}
    if args.unit_k is not None:
        K = parse_element(args.unit_k, H)
        results["general"] = represent_general(f, I, J, K, z, beta)
    agree = all(close(value, direct, config.tol) for value in results.values())
    payload = {
        "agree": agree,
        **{name: codec.element_to_dict(value) for name, value in results.items()},
    }
    rows = [[name, *(format_scalar(c) for c in v.coeffs)] for name, v in results.items()]
    code = EXIT_OK if agree else EXIT_COUNTEREXAMPLE
    return Outcome(payload, ("formula", *H.labels), rows, code)


def cmd_stems(config: RunConfig, args: argparse.Namespace) -> Outcome:
    f = _load_input(config)
    stem = extract_stem(f, parse_element(args.J, f.algebra))
    checks = {
        "parity": stem_parity(stem),
        "system": stem_system_check(stem),
        "harmonic": stem_harmonic(stem),
        "slice_preserving": stem_slice_preserving(stem),
    }
    payload = {
        "F_empty": codec.polymap_to_dict(stem.empty),
        "F_1": codec.polymap_to_dict(stem.one),
        "checks": checks,
    }
    rows = _poly_rows((), "F_empty", stem.empty) + _poly_rows((), "F_1", stem.one)
    ok = checks["parity"] and checks["system"] and checks["harmonic"]
    code = EXIT_OK if ok else EXIT_COUNTEREXAMPLE
    return Outcome(payload, ("part", "exp", *f.algebra.labels), rows, code)


def cmd_cauchy_demo(config: RunConfig, args: argparse.Namespace) -> Outcome:
    f = codec.load_polymap(config.input) if config.input else tk_poly((1, 1))
    J = parse_element(args.J, quaternions())
    orders = [int(o) for o in args.orders.split(",")]
    points = interior_points(J, args.points, 0.7 * args.radius, config.seed)
    table = reconstruction_table(f, J, quaternions().zero(), args.radius, points, orders)
    rows = [[r.order, r.point, r.abs_error, r.rel_error] for r in table]
    payload = [
        {"order": r.order, "x": r.point, "abs_error": r.abs_error, "rel_error": r.rel_error}
        for r in table
    ]
    return Outcome(payload, ("order", "x", "abs_error", "rel_error"), rows)


def cmd_basis_verify(config: RunConfig, args: argparse.Namespace) -> Outcome:
    alg, _, sub = args.basis.partition(":")
    basis = basis_from_name(alg, sub or None)
    check = verify_basis(basis.vectors)
    payload: dict[str, Any] = {"basis": codec.basis_to_dict(basis), "ok": check.ok}
    rows: list[list[Any]] = [["basis", check.ok, ""]]
    ok = check.ok
    if args.hat:
        try:
            extended = hat_extension(basis)
        except NotExtendableError as exc:
            payload["hat"] = {"ok": False, "condition": exc.condition}
            rows.append(["hat", False, exc.condition])
            ok = False
        else:
            payload["hat"] = {"ok": True, "basis": codec.basis_to_dict(extended)}
            rows.append(["hat", True, ""])
    code = EXIT_OK if ok else EXIT_COUNTEREXAMPLE
    return Outcome(payload, ("step", "ok", "condition"), rows, code)


def cmd_cone(config: RunConfig, args: argparse.Namespace) -> Outcome:
    spec = algebra_by_name(args.algebra)
    x = parse_element(args.element, spec)
    tol = DEFAULT_TOLERANCE if x.is_exact else config.tol
    inside = in_quadratic_cone(x, tol)
    inverse = cone_inverse(x, tol) if inside and not x.is_zero(tol) else None
    payload: dict[str, Any] = {
        "element": codec.element_to_dict(x),
        "in_cone": inside,
        "in_sphere": in_sphere(x, tol),
        "inverse": codec.element_to_dict(inverse) if inverse is not None else None,
    }
    rows = [[str(x), payload["in_cone"], payload["in_sphere"]]]
    return Outcome(payload, ("element", "in_cone", "in_sphere"), rows)


def cmd_selftest(config: RunConfig, args: argparse.Namespace) -> Outcome:
    results = run_selftest(
        config.backend, quick=args.quick, workers=config.workers, seed=config.seed
    )
    rows = [
        [r.name, "PASS" if r.passed else "FAIL", f"{r.seconds:.3f}", r.tolerance, r.detail]
        for r in results
    ]
    payload = [
        {
            "name": r.name,
            "passed": r.passed,
            "seconds": round(r.seconds, 6),
            "tolerance": r.tolerance,
            "detail": r.detail,
        }
        for r in results
    ]
    code = EXIT_OK if all(r.passed for r in results) else EXIT_COUNTEREXAMPLE
    return Outcome(payload, ("check", "result", "seconds", "tolerance", "detail"), rows, code)


HANDLERS: dict[str, Callable[[RunConfig, argparse.Namespace], Outcome]] = {
    "table": cmd_table,
    "check": cmd_check,
    "expand": cmd_expand,
    "represent": cmd_represent,
    "stems": cmd_stems,
    "cauchy-demo": cmd_cauchy_demo,
    "basis-verify": cmd_basis_verify,
    "cone": cmd_cone,
    "selftest": cmd_selftest,
}


def _emit(outcome: Outcome, config: RunConfig, stdout: IO[str]) -> None:
    if config.fmt == "csv":
        buffer = io.StringIO()
        codec.write_csv(buffer, outcome.header, outcome.rows)
        text = buffer.getvalue()
    else:
        text = codec.dumps(outcome.payload, indent=True).decode()
    if config.out is not None:
        config.out.write_text(text, encoding="utf-8")
    else:
        stdout.write(text)


def run(argv: Sequence[str] | None = None, *, stdout: IO[str] | None = None) -> int:
    """Parse *argv*, run the command and write its report; returns the exit code."""
    stdout = stdout if stdout is not None else sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    config = RunConfig.from_args(args)
    logger.info("cli.started", command=config.command)
    try:
        outcome = HANDLERS[config.command](config, args)
        _emit(outcome, config, stdout)
    except (CodecError, OSError) as exc:
        logger.error("cli.malformed_input", command=config.command, exc_info=exc)
        code = EXIT_USAGE
    except FanregError as exc:
        logger.error("cli.invalid_arguments", command=config.command, exc_info=exc)
        code = EXIT_USAGE
    else:
        code = outcome.exit_code
    logger.info("cli.finished", command=config.command, exit_code=code)
    return code


def main(argv: Sequence[str] | None = None) -> int:
    setup_logging()
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
