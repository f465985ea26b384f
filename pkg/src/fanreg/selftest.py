"""Acceptance suite behind ``fanreg selftest``.

Each check returns a :class:`CheckResult`.  Checks are independent and may run
on a thread pool; results come back in registration order.  Exact checks use
rational arithmetic and carry ``tolerance=None``; the float backend and the
quadrature check report the tolerance they compared with.
"""

from __future__ import annotations

import time
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import structlog

from fanreg.algebra import (
    AlgebraSpec,
    Element,
    algebra_by_name,
    check_laws,
    close,
    conj,
    is_real,
    mul,
    random_element,
)
from fanreg.cauchy import interior_points, reconstruction_error
from fanreg.errors import FanregError, NotExtendableError
from fanreg.fan import RationalGrid, fan_from_name, sphere_point
from fanreg.hypercomplex import (
    HypercomplexBasis,
    cone_inequality,
    inner_product_identity,
    make_hat_subspace,
    make_paravectors,
    make_Vh,
    named_basis,
    span_element,
)
from fanreg.polymap import PolyMap
from fanreg.quat13 import (
    MultiIndex,
    akbk_homogeneity,
    akbk_identity,
    all_indices,
    basis_kernel_dimension,
    circle_points,
    delta_nabla_identity,
    expand_homogeneous,
    extract_stem,
    fan13,
    fueter_poly_map,
    identity_test,
    modulus_invariance_check,
    multi_indices,
    orbit_pairs,
    quaternions,
    represent_general,
    represent_two_point,
    restriction_identity,
    restriction_kernel_dimension,
    series_expand,
    series_reconstruct,
    stem_harmonic,
    stem_parity,
    stem_system_check,
    tk_combination,
    tk_poly,
)
from fanreg.scalars import Backend, Scalar
from fanreg.tregular import check_regular, fan_equivalence, induce, parametrized_proof

logger = structlog.get_logger(__name__)

FLOAT_TOLERANCE = 1e-9
CAUCHY_TOLERANCE = 1e-7
DEFAULT_ALGEBRAS = ("C", "H", "O", "Cl01", "Cl02", "Cl03", "Cl04", "Cl05")


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0
    tolerance: float | None = None


@dataclass(frozen=True)
class SelftestOptions:
    """Sizes of the suite; ``quick`` shrinks degrees and sample counts."""

    backend: Backend = Backend.RATIONAL
    quick: bool = False
    seed: int = 0
    algebras: tuple[AlgebraSpec, ...] = ()

    def size(self, full: int, quick: int) -> int:
        return quick if self.quick else full

    @property
    def tolerance(self) -> float | None:
        return FLOAT_TOLERANCE if self.backend is Backend.FLOAT64 else None


Check = Callable[[SelftestOptions], CheckResult]


class _Failure(Exception):
    """Internal: a check found a mismatch described by the message."""


def _require(condition: bool, detail: str) -> None:
    if not condition:
        raise _Failure(detail)


def _random_quaternion(rng: np.random.Generator) -> Element:
    return random_element(quaternions(), rng, Backend.RATIONAL, bound=5)


def _random_unit(rng: np.random.Generator) -> Element:
    """An exact unit of ``span(j, k)``."""
    t = Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 6)))
    c, s = sphere_point([t])
    return quaternions().element([0, 0, c, s])


def _random_mirror(rng: np.random.Generator) -> Element:
    a, b = (Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 4))) for _ in range(2))
    return quaternions().element([a, b, 0, 0])


def _random_combination(
    maxdeg: int, rng: np.random.Generator, *, exact_degree: bool = False
) -> tuple[dict[MultiIndex, Element], PolyMap]:
    indices = multi_indices(maxdeg) if exact_degree else all_indices(maxdeg)
    coeffs = {k: _random_quaternion(rng) for k in indices}
    return coeffs, tk_combination(coeffs)


# -- 1-3: algebras and bases ------------------------------------------------------------


def check_algebra_laws(options: SelftestOptions) -> CheckResult:
    rng = np.random.default_rng(options.seed)
    samples = options.size(200, 40)
    algebras = options.algebras or tuple(algebra_by_name(name) for name in DEFAULT_ALGEBRAS)
    tol = options.tolerance if options.tolerance is not None else 0.0
    failures: list[str] = []
    for spec in algebras:
        report = check_laws(spec, rng, samples, options.backend, tol)
        if not report.passed:
            failures.append(f"{spec.name}: {'; '.join(report.failures)}")
    detail = " | ".join(failures) if failures else f"{len(algebras)} algebras x {samples} samples"
    return CheckResult("algebra_laws", not failures, detail, tolerance=options.tolerance)


def _random_coords(rng: np.random.Generator, count: int, backend: Backend) -> list[Scalar]:
    if backend is Backend.FLOAT64:
        return [float(v) for v in rng.standard_normal(count)]
    return [Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 5))) for _ in range(count)]


def _inner_product_bases() -> list[HypercomplexBasis]:
    return [make_paravectors(4), named_basis("H"), named_basis("O"), make_Vh(5, 5)]


def check_inner_products(options: SelftestOptions) -> CheckResult:
    rng = np.random.default_rng(options.seed + 1)
    pairs = options.size(100, 20)
    for basis in _inner_product_bases():
        for _ in range(pairs):
            x = span_element(basis, _random_coords(rng, basis.dim, options.backend))
            y = span_element(basis, _random_coords(rng, basis.dim, options.backend))
            _require(inner_product_identity(basis, x, y), f"{basis.name}: identity fails at {x}")
            if not is_real(x):
                _require(cone_inequality(x), f"{basis.name}: {x} is outside the cone")
    return CheckResult(
        "inner_products", True, f"4 subspaces x {pairs} pairs", tolerance=options.tolerance
    )


# first violated requirement of the hat extension in Cl(0,m)
_HAT_FAILURES = {3: "trace", 4: "trace", 5: "orthogonality"}


def check_hat_extension(options: SelftestOptions) -> CheckResult:
    for n, m in ((2, 2), (6, 6)):
        make_hat_subspace(n, m)
    for m, expected in _HAT_FAILURES.items():
        try:
            make_hat_subspace(m, m)
        except NotExtendableError as exc:
            _require(exc.condition == expected, f"m={m}: {exc.condition}, expected {expected}")
        else:
            raise _Failure(f"hat extension unexpectedly succeeded for m={m}")
    return CheckResult("hat_extension", True, "m=2,6 extend; m=3,4,5 refuse")


# -- 4-7: regular polynomials ------------------------------------------------------


def check_tk_regularity(options: SelftestOptions) -> CheckResult:
    maxdeg = options.size(8, 4)
    fan = fan13()
    indices = all_indices(maxdeg)
    for k in indices:
        proof = parametrized_proof(tk_poly(k), fan)
        _require(proof.proven, f"T_{k} is not proven regular")
    detail = f"{len(indices)} polynomials proven, |k| <= {maxdeg}"
    return CheckResult("tk_regularity", True, detail)


def check_lemma_bridge(options: SelftestOptions) -> CheckResult:
    maxdeg = options.size(6, 3)
    hmax = options.size(4, 2)
    rng = np.random.default_rng(options.seed + 4)
    units = circle_points(options.size(8, 3))
    hs = [(a, b, c) for a in range(hmax + 1) for b in range(hmax + 1) for c in range(hmax + 1)
          if a + b + c <= hmax]
    for J in units:
        for k in all_indices(maxdeg):
            _require(restriction_identity(k, J), f"restriction of T_{k} fails at J={J}")
        phi = PolyMap.zero(quaternions(), 3)
        for k in all_indices(hmax):
            phi = phi + fueter_poly_map(k, J) * _random_quaternion(rng)
        for h in hs:
            _require(delta_nabla_identity(h, phi, J), f"delta/nabla fails for h={h}, J={J}")
    return CheckResult("lemma_bridge", True, f"{len(units)} circle points, |k| <= {maxdeg}")


def check_expansion(options: SelftestOptions) -> CheckResult:
    rng = np.random.default_rng(options.seed + 6)
    maxdeg = options.size(6, 3)
    for k in range(maxdeg + 1):
        coeffs, P = _random_combination(k, rng, exact_degree=True)
        _require(expand_homogeneous(P, k) == coeffs, f"degree {k} expansion does not round-trip")
        _require(basis_kernel_dimension(k) == 0, f"F_{k} is linearly dependent")
    H = quaternions()
    centers = [H.zero(), H.one(), H.element([Fraction(1, 2), -1, 0, 0])]
    _, f = _random_combination(options.size(5, 3), rng)
    for z0 in centers:
        coeffs = series_expand(f, z0)
        _require(series_reconstruct(coeffs, z0) == f, f"series around {z0} does not round-trip")
    return CheckResult("expansion", True, f"degrees <= {maxdeg}, 3 centers")


def _corpus(rng: np.random.Generator) -> list[PolyMap]:
    H = quaternions()
    corpus = [tk_poly(k) for k in all_indices(3)]
    for _ in range(10):
        _, f = _random_combination(2, rng)
        corpus.append(f + PolyMap.constant(H, 4, _random_quaternion(rng)))
    for _ in range(10):
        linear = PolyMap.linear(H, [_random_quaternion(rng) for _ in range(4)])
        corpus.append(linear * linear if rng.random() < 0.5 else linear)
    return corpus


_EQUIVALENT_FANS = (
    ("H:(2,3)", "H:(3)"),
    ("H:(1,2,3)", "H:(3)"),
    ("H:(0,1,2,3)", "H:(3)"),
    ("H:(0,1,3)", "H:(1,3)"),
)


def check_negative_controls(options: SelftestOptions) -> CheckResult:
    fueter = fan_from_name("H:(3)")
    for k in ((0, 1), (0, 2), (1, 1)):
        _require(not check_regular(tk_poly(k), fueter).passed, f"T_{k} passed the (3)-fan check")
    slice_fan = fan_from_name("H:(0,3)")
    sampler = RationalGrid(options.size(4, 3))
    for k in all_indices(2)[1:]:
        report = check_regular(tk_poly(k), slice_fan, sampler)
        _require(not report.passed, f"T_{k} passed the (0,3)-fan check")
    corpus = _corpus(np.random.default_rng(options.seed + 7))
    if options.quick:
        corpus = corpus[::3]
    for first, second in _EQUIVALENT_FANS:
        a, b = fan_from_name(first), fan_from_name(second)
        for f in corpus:
            _require(fan_equivalence(f, a, b).agree, f"{first} and {second} disagree on {f}")
    return CheckResult("negative_controls", True, f"{len(corpus)} corpus maps, 4 equivalences")


# -- 8-10: representation, stems, A_k/B_k ------------------------------------------------


def _not_regular(x: Element) -> Element:
    return mul(mul(x, x), conj(x)) + x.scale(3)


def check_representation(options: SelftestOptions) -> CheckResult:
    rng = np.random.default_rng(options.seed + 8)
    maxdeg = options.size(5, 3)
    tuples = options.size(20, 4)
    polys = [tk_poly(k) for k in all_indices(maxdeg)]
    for _ in range(tuples):
        I, J = _random_unit(rng), _random_unit(rng)  # noqa: E741
        K = _random_unit(rng)
        while K == J:
            K = _random_unit(rng)
        z = _random_mirror(rng)
        beta = Fraction(int(rng.integers(1, 7)), int(rng.integers(1, 4)))
        for f in polys:
            expected = f(z + I.scale(beta))
            _require(represent_general(f, I, J, K, z, beta) == expected, f"general formula, {f}")
            _require(represent_two_point(f, I, J, z, beta) == expected, f"two-point formula, {f}")
        _require(
            represent_general(_not_regular, J, J, K, z, beta) == _not_regular(z + J.scale(beta)),
            "general formula with I = J",
        )
    return CheckResult("representation", True, f"{tuples} tuples, |k| <= {maxdeg}")


def check_stems(options: SelftestOptions) -> CheckResult:
    rng = np.random.default_rng(options.seed + 9)
    maxdeg = options.size(6, 3)
    first, second = circle_points(2)
    for k in all_indices(maxdeg):
        f = tk_poly(k)
        stem = extract_stem(f, first)
        _require(stem_parity(stem), f"stem of T_{k} has the wrong parity")
        _require(stem_system_check(stem), f"stem of T_{k} violates the coupled system")
        _require(stem_harmonic(stem), f"stem of T_{k} is not harmonic")
        _require(extract_stem(f, second) == stem, f"stem of T_{k} depends on J")
        induced = induce(stem.to_stem_function())
        for _ in range(3):
            J = _random_unit(rng)
            beta = Fraction(int(rng.integers(0, 5)), int(rng.integers(1, 4)))
            x = _random_mirror(rng) + J.scale(beta)
            _require(close(induced(x), f(x)), f"induced stem of T_{k} differs at {x}")
    return CheckResult("stems", True, f"|k| <= {maxdeg}")


def check_akbk(options: SelftestOptions) -> CheckResult:
    maxdeg = options.size(8, 4)
    for k in all_indices(maxdeg):
        _require(akbk_identity(k), f"A/B identity fails for k={k}")
        _require(akbk_homogeneity(k), f"A/B homogeneity fails for k={k}")
    pairs = orbit_pairs(options.size(50, 10), options.seed)
    for k in all_indices(options.size(5, 3)):
        _require(modulus_invariance_check(k, pairs), f"modulus of T_{k} varies on an orbit")
    return CheckResult("akbk", True, f"|k| <= {maxdeg}, {len(pairs)} orbit pairs")


# -- 11-12: Cauchy integral and identity principle ---------------------------------------


def check_cauchy(options: SelftestOptions) -> CheckResult:
    rng = np.random.default_rng(options.seed + 11)
    H = quaternions()
    J = H.basis(2)
    y0 = H.zero()
    one = PolyMap.constant(H, 4, 1)
    _, one_rel = reconstruction_error(one, J, y0, 1.0, y0, 32)
    _require(one_rel <= 1e-10, f"f = 1 reconstructed with error {one_rel:.3e}")

    _, f = _random_combination(4, rng)
    points = interior_points(J, options.size(10, 3), 0.7, options.seed)
    worst = 0.0
    for x in points:
        errors = [reconstruction_error(f, J, y0, 1.0, x, order)[1] for order in (8, 16, 32)]
        worst = max(worst, errors[-1])
        _require(errors[-1] <= CAUCHY_TOLERANCE, f"relative error {errors[-1]:.3e} at {x}")
        _require(
            errors[0] > errors[1] > errors[2] or errors[1] <= 1e-10,
            f"no convergence at {x}: {errors}",
        )
    return CheckResult(
        "cauchy", True, f"max relative error {worst:.2e}", tolerance=CAUCHY_TOLERANCE
    )


def check_identity_principle(options: SelftestOptions) -> CheckResult:
    rng = np.random.default_rng(options.seed + 12)
    maxdeg = options.size(4, 2)
    J0 = circle_points(2)[1]
    _require(restriction_kernel_dimension(maxdeg, J0) == 0, "slice restriction has a kernel")
    for _ in range(options.size(5, 2)):
        _, f = _random_combination(maxdeg, rng)
        indices = all_indices(maxdeg)
        k = indices[int(rng.integers(0, len(indices)))]
        e = _random_quaternion(rng)
        while e.is_zero():
            e = _random_quaternion(rng)
        result = identity_test(f, f + tk_poly(k) * e, J0)
        _require(not result.equal and not result.slice_equal, f"perturbation at {k} missed")
        _require(result.witness == k, f"witness {result.witness}, expected {k}")
    return CheckResult("identity_principle", True, f"degree <= {maxdeg}")


CHECKS: tuple[Check, ...] = (
    check_algebra_laws,
    check_inner_products,
    check_hat_extension,
    check_tk_regularity,
    check_lemma_bridge,
    check_expansion,
    check_negative_controls,
    check_representation,
    check_stems,
    check_akbk,
    check_cauchy,
    check_identity_principle,
)


def _run(check: Check, options: SelftestOptions) -> CheckResult:
    name = check.__name__.removeprefix("check_")
    start = time.perf_counter()
    try:
        result = check(options)
    except _Failure as exc:
        result = CheckResult(name, False, str(exc), tolerance=options.tolerance)
    except FanregError as exc:
        result = CheckResult(name, False, f"{exc.code}: {exc}", tolerance=options.tolerance)
    seconds = time.perf_counter() - start
    result = CheckResult(result.name, result.passed, result.detail, seconds, result.tolerance)
    logger.info("selftest.check", check=result.name, passed=result.passed, seconds=seconds)
    return result


def run_selftest(
    backend: Backend = Backend.RATIONAL,
    *,
    quick: bool = False,
    workers: int = 1,
    algebras: Sequence[AlgebraSpec] = (),
    seed: int = 0,
    checks: Sequence[Check] = CHECKS,
) -> list[CheckResult]:
    """Run *checks* and return their results in order.

    Parameters
    ----------
    backend:
        ``float64`` runs the algebra and inner-product checks on float samples
        compared with :data:`FLOAT_TOLERANCE`.
    quick:
        Smaller degrees and sample counts.
    workers:
        Thread pool size; ``1`` runs sequentially.
    algebras:
        Algebras for the law check instead of the presets, e.g. one with a
        corrupted product table.
    """
    options = SelftestOptions(backend, quick, seed, tuple(algebras))
    if workers <= 1:
        return [_run(check, options) for check in checks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda check: _run(check, options), checks))
