"""T-regularity, T-slice preservation, T-stem functions and induced T-functions.

A polynomial map ``f`` (variables: coordinates in the fan's basis) is
T-regular when every slice restriction ``f_J`` lies in the kernel of
``d-bar_J``.  :func:`check_regular` verifies this exactly at sampled torus
points; when every block sphere has dimension at most one,
:func:`parametrized_proof` upgrades the sampled certificate to a proof by
substituting a rational parametrization of each circle and checking that the
cleared residual vanishes as a polynomial.
"""

from __future__ import annotations

import itertools
import time
from collections.abc import Callable, Iterable, Iterator, Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import structlog

from fanreg.algebra import Element, close, mul
from fanreg.errors import InvalidParameterError, InvalidStemError
from fanreg.fan import (
    RationalGrid,
    Sampler,
    SlicePoint,
    TFan,
    TorusPoint,
    decompose,
    slice_membership,
    sphere_point,
    torus_sample,
)
from fanreg.hypercomplex import HypercomplexBasis, coordinates
from fanreg.polymap import (
    PolyMap,
    RealPoly,
    apply_cr,
    left_mul,
    poly_product,
    real_add,
    real_const,
    real_mul,
    real_poly_map,
    real_var,
    restrict_to_slice,
)
from fanreg.scalars import DEFAULT_TOLERANCE, rational_parameters

logger = structlog.get_logger(__name__)

COUNTEREXAMPLE_SEARCH = 64


class Verdict(str, Enum):
    REGULAR_ON_SAMPLES = "regular_on_samples"
    REGULAR_PROVEN = "regular_on_samples+symbolic"
    PRESERVING_ON_SAMPLES = "preserving_on_samples"
    PRESERVING_PROVEN = "preserving_on_samples+symbolic"
    COUNTEREXAMPLE = "counterexample"


@dataclass(frozen=True)
class SampleResult:
    """Outcome at one torus point; *residual* is ``d-bar_J f_J``."""

    J: TorusPoint
    residual: PolyMap
    ok: bool

    @property
    def residual_norm(self) -> float:
        return max(
            (abs(float(c)) for _, coeff in self.residual for c in coeff.coeffs), default=0.0
        )


@dataclass(frozen=True)
class ProofResult:
    applicable: bool
    proven: bool
    residual: PolyMap | None = None
    counterexample: SampleResult | None = None
    seconds: float = 0.0


@dataclass(frozen=True)
class RegularityReport:
    fan: str
    samples: tuple[SampleResult, ...]
    verdict: Verdict
    counterexample: SampleResult | None = None
    proof: ProofResult | None = None

    @property
    def passed(self) -> bool:
        return self.verdict is not Verdict.COUNTEREXAMPLE

    @property
    def proven(self) -> bool:
        return self.proof is not None and self.proof.proven


@dataclass(frozen=True)
class PreservationFailure:
    J: TorusPoint
    exp: tuple[int, ...]
    coefficient: Element


@dataclass(frozen=True)
class SlicePreservationReport:
    fan: str
    samples: int
    verdict: Verdict
    counterexample: PreservationFailure | None = None
    proof: ProofResult | None = None

    @property
    def passed(self) -> bool:
        return self.verdict is not Verdict.COUNTEREXAMPLE

    @property
    def proven(self) -> bool:
        return self.proof is not None and self.proof.proven


def _map_ordered(
    func: Callable[[TorusPoint], SampleResult], points: Sequence[TorusPoint], workers: int
) -> list[SampleResult]:
    if workers <= 1 or len(points) < 2:
        return [func(J) for J in points]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, points))


def sample_residual(
    f: PolyMap, fan: TFan, J: TorusPoint, tol: float = DEFAULT_TOLERANCE
) -> SampleResult:
    residual = apply_cr(fan, J, restrict_to_slice(f, fan, J))
    ok = residual.is_zero(None if (J.is_exact and f.is_exact) else tol)
    return SampleResult(J, residual, ok)


def check_regular(
    f: PolyMap,
    fan: TFan,
    sampler: Sampler | None = None,
    *,
    symbolic: bool = True,
    tol: float = DEFAULT_TOLERANCE,
    workers: int = 1,
) -> RegularityReport:
    """Check ``d-bar_J f_J = 0`` at sampled torus points.

    A nonzero residual at any sample is a disproof.  With *symbolic* set and a
    torus made of circles and point pairs, the verdict is upgraded by
    :func:`parametrized_proof`, which can also find counterexamples that the
    sample missed.
    """
    points = torus_sample(fan, sampler)
    results = _map_ordered(lambda J: sample_residual(f, fan, J, tol), points, workers)
    for result in results:
        logger.debug("tregular.sample", fan=str(fan), J=str(result.J), ok=result.ok)

    failure = next((r for r in results if not r.ok), None)
    proof: ProofResult | None = None
    if failure is None and symbolic:
        proof = parametrized_proof(f, fan)
        if proof.applicable and not proof.proven:
            failure = proof.counterexample

    if failure is not None or (proof is not None and proof.applicable and not proof.proven):
        logger.warning(
            "tregular.counterexample",
            fan=str(fan),
            J=str(failure.J) if failure else None,
            residual=failure.residual if failure else None,
        )
        return RegularityReport(str(fan), tuple(results), Verdict.COUNTEREXAMPLE, failure, proof)
    verdict = Verdict.REGULAR_PROVEN if proof is not None and proof.proven else (
        Verdict.REGULAR_ON_SAMPLES
    )
    return RegularityReport(str(fan), tuple(results), verdict, None, proof)


# -- symbolic quantification over the torus ------------------------------------


def supports_parametrized_proof(fan: TFan) -> bool:
    return all(d <= 1 for d in fan.sphere_dims)


def _one_minus_square(nvars: int, tvar: int) -> RealPoly:
    t = real_var(nvars, tvar)
    return real_add(real_const(nvars, 1), real_mul(t, real_var(nvars, tvar, -1)))


def _unit_poly(fan: TFan, h: int, sign: int, tvar: int | None, nvars: int) -> PolyMap:
    """Numerator ``D_h J_h`` of the parametrized unit of block ``h``."""
    block = fan.block(h)
    vectors = fan.basis.vectors
    spec = fan.algebra
    if tvar is None:
        return PolyMap.constant(spec, nvars, vectors[block[0]].scale(sign))
    a, b = vectors[block[0]], vectors[block[1]]
    first = _one_minus_square(nvars, tvar)
    second = real_var(nvars, tvar, 2)
    return real_poly_map(spec, first, nvars) * a + real_poly_map(spec, second, nvars) * b


def _parametrized_slice(
    f: PolyMap, fan: TFan, signs: Mapping[int, int]
) -> tuple[PolyMap, dict[int, int], dict[int, RealPoly]]:
    """``g(x^0, beta, t) = f(x^0 + sum beta_h D_h J_h)`` with its circle variables.

    Returns ``g``, the variable index of each circle block and ``D_h^2`` per circle.
    """
    nslice = fan.slice_dim
    circles = [h for h in range(1, fan.tau + 1) if len(fan.block(h)) == 2]
    tvars = {h: nslice + index for index, h in enumerate(circles)}
    nvars = nslice + len(circles)

    images: list[RealPoly] = [real_var(nvars, i) for i in range(fan.t0 + 1)]
    for h in range(1, fan.tau + 1):
        beta = real_var(nvars, fan.t0 + h)
        if h in tvars:
            images.append(real_mul(beta, _one_minus_square(nvars, tvars[h])))
            images.append(real_mul(beta, real_var(nvars, tvars[h], 2)))
        else:
            images.append(real_mul(beta, real_const(nvars, signs[h])))
    g = f.substitute(images, nvars)

    squares: dict[int, RealPoly] = {}
    for h, tv in tvars.items():
        d = real_add(real_const(nvars, 1), real_mul(real_var(nvars, tv), real_var(nvars, tv)))
        squares[h] = real_mul(d, d)
    return g, tvars, squares


def _cleared_factor(
    fan: TFan, squares: Mapping[int, RealPoly], nvars: int, skip: int | None = None
) -> PolyMap:
    """``prod D_h^2`` over the circle blocks other than *skip*."""
    poly: RealPoly = real_const(nvars, 1)
    for h, sq in squares.items():
        if h != skip:
            poly = real_mul(poly, sq)
    return real_poly_map(fan.algebra, poly, nvars)


def _parametrized_residual(f: PolyMap, fan: TFan, signs: Mapping[int, int]) -> PolyMap:
    g, tvars, squares = _parametrized_slice(f, fan, signs)
    nvars = g.nvars
    mirror = PolyMap.zero(fan.algebra, nvars)
    for var, unit in enumerate(fan.mirror_vectors):
        mirror = mirror + left_mul(unit, g.derivative(var))
    residual = poly_product(_cleared_factor(fan, squares, nvars), mirror)
    for h in range(1, fan.tau + 1):
        unit = _unit_poly(fan, h, signs.get(h, 1), tvars.get(h), nvars)
        term = poly_product(unit, g.derivative(fan.t0 + h))
        residual = residual + poly_product(_cleared_factor(fan, squares, nvars, h), term)
    return residual


def _rational_torus_points(fan: TFan, signs: Mapping[int, int]) -> Iterator[TorusPoint]:
    circles = [h for h in range(1, fan.tau + 1) if len(fan.block(h)) == 2]
    params = rational_parameters(COUNTEREXAMPLE_SEARCH)
    vectors = fan.basis.vectors
    for combo in itertools.product(params, repeat=len(circles)):
        units: list[Element] = []
        chosen = dict(zip(circles, combo))
        for h in range(1, fan.tau + 1):
            block = fan.block(h)
            if h in chosen:
                c0, c1 = sphere_point([chosen[h]])
                units.append(vectors[block[0]].scale(c0) + vectors[block[1]].scale(c1))
            else:
                units.append(vectors[block[0]].scale(signs[h]))
        yield TorusPoint(fan, tuple(units))


def _search_counterexample(f: PolyMap, fan: TFan, signs: Mapping[int, int]) -> SampleResult | None:
    for J in _rational_torus_points(fan, signs):
        result = sample_residual(f, fan, J)
        if not result.ok:
            return result
    return None



def parametrized_proof(f: PolyMap, fan: TFan) -> ProofResult:
    """Prove T-regularity over the whole torus when all blocks have at most 2 vectors.

    Circle blocks use ``J = ((1 - t^2) v_a + 2t v_b) / (1 + t^2)``; this misses
    only ``J = -v_a``, whose slice equals that of ``v_a``.  With ``D = 1 + t^2``
    and ``g(x^0, beta, t) = f(x^0 + beta D J)`` the residual at ``beta D``,
    multiplied by ``prod D_h^2``, is the polynomial
    ``prod D_h^2 (sum_l v_l d_l g) + sum_h (prod_{h' != h} D_{h'}^2) (D_h J_h) d_{beta_h} g``.
    Point-pair blocks are enumerated by sign.
    """
    if not supports_parametrized_proof(fan):
        return ProofResult(applicable=False, proven=False)
    start = time.perf_counter()
    logger.info("tregular.proof_started", fan=str(fan), map=f.summary())
    pairs = [h for h in range(1, fan.tau + 1) if len(fan.block(h)) == 1]
    for combo in itertools.product((1, -1), repeat=len(pairs)):
        signs = dict(zip(pairs, combo))
        residual = _parametrized_residual(f, fan, signs)
        if not residual.is_zero():
            seconds = time.perf_counter() - start
            witness = _search_counterexample(f, fan, signs)
            logger.info("tregular.proof_finished", fan=str(fan), proven=False, seconds=seconds)
            return ProofResult(True, False, residual, witness, seconds)
    seconds = time.perf_counter() - start
    logger.info("tregular.proof_finished", fan=str(fan), proven=True, seconds=seconds)
    return ProofResult(True, True, None, None, seconds)


# -- slice preservation --------------------------------------------------------


def _real_part(f: PolyMap) -> PolyMap:
    spec = f.algebra
    return PolyMap(spec, f.nvars, {exp: spec.scalar(coeff.real) for exp, coeff in f})


def _first_preservation_failure(
    f: PolyMap, fan: TFan, points: Iterable[TorusPoint]
) -> PreservationFailure | None:
    for J in points:
        for exp, coeff in restrict_to_slice(f, fan, J):
            if not slice_membership(fan, J, coeff):
                return PreservationFailure(J, exp, coeff)
    return None


def parametrized_preservation_proof(f: PolyMap, fan: TFan) -> ProofResult:
    """Prove ``f(R_J) subset R_J`` for every ``J`` when all blocks have at most 2 vectors.

    ``B_J`` is orthonormal, so ``y`` lies in ``R_J`` iff ``y = sum_v <y, v> v``.
    With the circle parametrization of :func:`parametrized_proof` and
    ``N_h = D_h J_h`` this becomes the polynomial identity
    ``prod D_h^2 (g - sum_l <g, v_l> v_l) = sum_h (prod_{h' != h} D_{h'}^2) <g, N_h> N_h``.
    Point-pair blocks need one sign only, because ``beta_h`` ranges over all reals.
    """
    if not supports_parametrized_proof(fan) or not f.is_exact:
        return ProofResult(applicable=False, proven=False)
    start = time.perf_counter()
    signs = {h: 1 for h in range(1, fan.tau + 1) if len(fan.block(h)) == 1}
    g, tvars, squares = _parametrized_slice(f, fan, signs)
    nvars = g.nvars
    mirror = g
    for v in fan.mirror_vectors:
        unit = PolyMap.constant(fan.algebra, nvars, v)
        mirror = mirror - poly_product(_real_part(poly_product(g, unit.conj())), unit)
    residual = poly_product(_cleared_factor(fan, squares, nvars), mirror)
    for h in range(1, fan.tau + 1):
        unit = _unit_poly(fan, h, 1, tvars.get(h), nvars)
        term = poly_product(_real_part(poly_product(g, unit.conj())), unit)
        residual = residual - poly_product(_cleared_factor(fan, squares, nvars, h), term)
    seconds = time.perf_counter() - start
    proven = residual.is_zero()
    logger.debug("tregular.preservation_proof", fan=str(fan), proven=proven, seconds=seconds)
    if proven:
        return ProofResult(True, True, None, None, seconds)
    return ProofResult(True, False, residual, None, seconds)


def check_slice_preserving(
    f: PolyMap, fan: TFan, sampler: Sampler | None = None, *, symbolic: bool = True
) -> SlicePreservationReport:
    """Check ``f(R_J) subset R_J``: every coefficient of ``f_J`` must lie in ``span(B_J)``.

    With *symbolic* set, an exact map and a torus made of circles and point
    pairs, a clean sample is upgraded by :func:`parametrized_preservation_proof`.
    A failed proof triggers a search over rational torus points for a witness.
    """
    points = torus_sample(fan, sampler)
    failure = _first_preservation_failure(f, fan, points)
    proof: ProofResult | None = None
    if failure is None and symbolic:
        proof = parametrized_preservation_proof(f, fan)
        if proof.applicable and not proof.proven:
            signs = {h: 1 for h in range(1, fan.tau + 1) if len(fan.block(h)) == 1}
            failure = _first_preservation_failure(f, fan, _rational_torus_points(fan, signs))

    if failure is not None or (proof is not None and proof.applicable and not proof.proven):
        logger.warning(
            "tregular.not_preserving",
            fan=str(fan),
            J=str(failure.J) if failure else None,
            coefficient=failure.coefficient if failure else None,
        )
        return SlicePreservationReport(
            str(fan), len(points), Verdict.COUNTEREXAMPLE, failure, proof
        )
    verdict = Verdict.PRESERVING_PROVEN if proof is not None and proof.proven else (
        Verdict.PRESERVING_ON_SAMPLES
    )
    return SlicePreservationReport(str(fan), len(points), verdict, None, proof)



# -- stems ----------------------------------------------------------------------

StemKey = tuple[int, ...]


@dataclass(frozen=True)
class StemFunction:
    """Components ``F_K`` over ``(x_0, ..., x_{t_0}, beta)``, keyed by sorted ``K``."""

    fan: TFan
    components: Mapping[StemKey, PolyMap] = field(default_factory=dict)

    def component(self, key: Iterable[int]) -> PolyMap:
        key = tuple(sorted(key))
        found = self.components.get(key)
        if found is not None:
            return found
        return PolyMap.zero(self.fan.algebra, self.fan.slice_dim)

    def keys(self) -> list[StemKey]:
        """Every subset of ``{1, ..., tau}`` in size-then-lexicographic order."""
        blocks = range(1, self.fan.tau + 1)
        sizes = range(self.fan.tau + 1)
        return [k for size in sizes for k in itertools.combinations(blocks, size)]


@dataclass(frozen=True)
class ParityViolation:
    key: StemKey
    h: int


@dataclass(frozen=True)
class StemParityCheck:
    violation: ParityViolation | None = None

    @property
    def ok(self) -> bool:
        return self.violation is None

    def __bool__(self) -> bool:
        return self.ok


def verify_stem_parity(stem: StemFunction) -> StemParityCheck:
    """``F_K`` must be odd in ``beta_h`` for ``h in K`` and even otherwise."""
    fan = stem.fan
    for key, comp in sorted(stem.components.items()):
        if comp.nvars != fan.slice_dim:
            msg = f"Stem component {key} has {comp.nvars} variables, expected {fan.slice_dim}"
            raise InvalidStemError(msg, key=list(key))
        for h in range(1, fan.tau + 1):
            var = fan.t0 + h
            ok = comp.is_odd_in(var) if h in key else comp.is_even_in(var)
            if not ok:
                return StemParityCheck(ParityViolation(key, h))
    return StemParityCheck()


class InducedFunction:
    """``f(x) = sum_K J_{k_1}(J_{k_2}(... (J_{k_p} F_K(x^0, beta))))``."""

    def __init__(self, stem: StemFunction) -> None:
        self.stem = stem

    def at(self, point: SlicePoint) -> Element:
        coords = point.slice_coords()
        out = self.stem.fan.algebra.zero()
        for key, comp in self.stem.components.items():
            value = comp.evaluate(coords)
            for h in reversed(key):
                value = mul(point.J.J[h - 1], value)
            out = out + value
        return out

    def __call__(self, x: Element) -> Element:
        return self.at(decompose(self.stem.fan, x))


def induce(stem: StemFunction, *, check_parity: bool = True) -> InducedFunction:
    if check_parity:
        check = verify_stem_parity(stem)
        if check.violation is not None:
            key, h = check.violation.key, check.violation.h
            msg = f"Stem component F_{key or '{}'} has the wrong parity in beta_{h}"
            raise InvalidStemError(msg, key=list(key), h=h)
    return InducedFunction(stem)


def representative_invariance(
    stem: StemFunction, point: SlicePoint, h: int, tol: float = DEFAULT_TOLERANCE
) -> bool:
    """Compare the induced values at ``(x^0, beta, J)`` and ``(x^0, beta-bar^h, J-bar^h)``."""
    func = induce(stem, check_parity=False)
    betas = list(point.betas)
    betas[h - 1] = -betas[h - 1]
    flipped = SlicePoint(point.x0, tuple(betas), point.J.flipped(h))
    return close(func.at(point), func.at(flipped), tol)


def trivial_stem(f: PolyMap, fan: TFan) -> StemFunction:
    """For ``tau = 0`` every map is a T-function, induced by ``F_{} = f``."""
    if fan.tau != 0:
        msg = f"Fan {fan} has tau = {fan.tau}; trivial stems need tau = 0"
        raise InvalidParameterError(msg, fan=str(fan))
    (J,) = torus_sample(fan, RationalGrid(1))
    return StemFunction(fan, {(): restrict_to_slice(f, fan, J)})


# -- changes of basis and fan equivalences ---------------------------------------------


def change_coordinates(
    f: PolyMap, source: HypercomplexBasis, target: HypercomplexBasis
) -> PolyMap:
    """Rewrite *f* (variables in *source* coordinates) in *target* coordinates."""
    if f.nvars != source.dim:
        msg = f"Map has {f.nvars} variables; basis {source.name} has {source.dim} vectors"
        raise InvalidParameterError(msg, expected=source.dim, got=f.nvars)
    n = target.dim
    columns = [coordinates(source, w) for w in target.vectors]
    images: list[RealPoly] = []
    for r in range(source.dim):
        image: RealPoly = {}
        for s, column in enumerate(columns):
            image = real_add(image, real_var(n, s, column[r])) if column[r] != 0 else image
        images.append(image)
    return f.substitute(images, n)


@dataclass(frozen=True)
class EquivalenceResult:
    first: RegularityReport
    second: RegularityReport

    @property
    def agree(self) -> bool:
        return self.first.passed == self.second.passed


def fan_equivalence(
    f: PolyMap,
    first: TFan,
    second: TFan,
    sampler: Sampler | None = None,
    *,
    symbolic: bool = True,
) -> EquivalenceResult:
    """Run :func:`check_regular` on both fans; *f* is given in *first*'s coordinates."""
    g = f
    if second.basis.vectors != first.basis.vectors:
        g = change_coordinates(f, first.basis, second.basis)
    return EquivalenceResult(
        check_regular(f, first, sampler, symbolic=symbolic),
        check_regular(g, second, sampler, symbolic=symbolic),
    )
