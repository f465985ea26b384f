"""The quaternionic (1,3)-fan: ``C = span(1, i)`` inside ``H``.

Slices are the hyperplanes ``span(1, i, J)`` for ``J`` on the circle of unit
vectors of ``span(j, k)``, with slice variables ``(x_0, x_1, beta)``.  This
module builds the homogeneous regular polynomials ``T_k`` and their slice
counterparts ``P^J_k``, the complex decomposition ``T_k = A_k + w B_k`` with
``w = j x_2 + k x_3``, coefficient expansions, the two representation
formulas, stem functions and exact kernel computations.

All polynomial maps are exact (rational coefficients).  ``T_k``, ``P^J_k`` and
``A_k``/``B_k`` are memoized in module-level caches guarded by one re-entrant
lock.
"""

from __future__ import annotations

import functools
import itertools
import math
import threading
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import structlog
import sympy

from fanreg.algebra import (
    AlgebraSpec,
    Element,
    Preset,
    close,
    cone_inverse,
    conj,
    make_algebra,
    mul,
    norm_form,
    power,
)
from fanreg.errors import InvalidParameterError, NotRegularError, SingularPairError
from fanreg.fan import RationalGrid, TFan, TorusPoint, fan_from_name, sphere_point
from fanreg.polymap import (
    PolyMap,
    apply_cr,
    apply_delta,
    apply_laplacian,
    apply_nabla,
    left_mul,
    poly_product,
    real_add,
    real_mul,
    real_var,
    restrict_to_slice,
)
from fanreg.scalars import Scalar, is_zero, rational_parameters
from fanreg.tregular import StemFunction, check_regular, check_slice_preserving

logger = structlog.get_logger(__name__)

MultiIndex = tuple[int, int]
Coefficients = dict[MultiIndex, Element]

_CACHE_LOCK = threading.RLock()
_TK_CACHE: dict[MultiIndex, PolyMap] = {}
_FUETER_CACHE: dict[tuple[MultiIndex, tuple[Scalar, ...]], PolyMap] = {}
_AKBK_CACHE: dict[MultiIndex, tuple[PolyMap, PolyMap]] = {}


def quaternions() -> AlgebraSpec:
    return make_algebra(Preset.QUATERNIONS)


@functools.lru_cache(maxsize=1)
def fan13() -> TFan:
    """The ``(1,3)``-fan ``C`` inside ``H`` on the basis ``(1, i, j, k)``."""
    return fan_from_name("H:(1,3)")


def torus_point(J: Element) -> TorusPoint:
    return TorusPoint(fan13(), (J,))


def circle_points(count: int = 8) -> list[Element]:
    """*count* exact units of ``span(j, k)``, one per slice.

    Parameters are the grid parameters in ``(-1, 1]``, so no two points are
    antipodal: ``t`` and ``-1/t`` never both qualify.
    """
    if count < 1:
        msg = f"Circle point count must be positive, got {count}"
        raise InvalidParameterError(msg, count=count)
    H = quaternions()
    size = 2 * count + 2
    params = [t for t in rational_parameters(size) if -1 < t <= 1]
    while len(params) < count:
        size *= 2
        params = [t for t in rational_parameters(size) if -1 < t <= 1]
    points: list[Element] = []
    for t in params[:count]:
        c, s = sphere_point([t])
        points.append(H.element([0, 0, c, s]))
    return points



def multi_indices(k: int) -> list[MultiIndex]:
    """``(k_1, k_2)`` with ``k_1 + k_2 = k``, ordered by ``k_1`` descending."""
    return [(k - k2, k2) for k2 in range(k + 1)]


def clear_caches() -> None:
    with _CACHE_LOCK:
        _TK_CACHE.clear()
        _FUETER_CACHE.clear()
        _AKBK_CACHE.clear()


def _check_index(k: MultiIndex) -> None:
    if len(k) != 2:
        msg = f"Multi-index must have two entries, got {k}"
        raise InvalidParameterError(msg, k=list(k))


def _zeta1(nvars: int) -> PolyMap:
    """``x_1 - i x_0`` in the first two of *nvars* variables."""
    H = quaternions()
    coeffs = [-H.basis(1), H.one()] + [H.zero()] * (nvars - 2)
    return PolyMap.linear(H, coeffs)


def _zeta1_signed(sign: int) -> PolyMap:
    """``x_1 - sign * i x_0`` in ``(x_0, x_1, x_2, x_3)``."""
    H = quaternions()
    return PolyMap.linear(H, [H.basis(1, -sign), H.one(), H.zero(), H.zero()])


def _paravector() -> PolyMap:
    """``x_0 + j x_2 + k x_3``."""
    H = quaternions()
    return PolyMap.linear(H, [H.one(), H.zero(), H.basis(2), H.basis(3)])


# -- T_k ----------------------------------------------------------------------------


@dataclass(frozen=True)
class Tk:
    k: MultiIndex
    poly: PolyMap


def tk_poly(k: MultiIndex) -> PolyMap:
    """``T_k``: ``T_(0,0) = 1``, zero for negative indices and

    ``|k| T_k = k_1 T_(k_1-1,k_2) zeta + k_2 T_(k_1,k_2-1) (x_0 + j x_2 + k x_3)``

    with ``zeta = x_1 - (-1)^{k_2} i x_0``.
    """
    _check_index(k)
    k1, k2 = k
    H = quaternions()
    if k1 < 0 or k2 < 0:
        return PolyMap.zero(H, 4)
    with _CACHE_LOCK:
        cached = _TK_CACHE.get((k1, k2))
        if cached is not None:
            return cached
        if k1 == k2 == 0:
            result = PolyMap.constant(H, 4, 1)
        else:
            result = PolyMap.zero(H, 4)
            if k1:
                sign = -1 if k2 % 2 else 1
                prev = tk_poly((k1 - 1, k2))
                result = result + poly_product(prev, _zeta1_signed(sign)).scale(k1)
            if k2:
                result = result + poly_product(tk_poly((k1, k2 - 1)), _paravector()).scale(k2)
            result = result.scale(Fraction(1, k1 + k2))
        _TK_CACHE[(k1, k2)] = result
        return result


def tk(k: MultiIndex) -> Tk:
    return Tk((k[0], k[1]), tk_poly(k))


def tk_family(k: int) -> list[Tk]:
    """The basis ``F_k = (T_k)_{|k| = k}`` of the degree-``k`` regular polynomials."""
    return [tk(index) for index in multi_indices(k)]


def tk_combination(coeffs: Mapping[MultiIndex, Element]) -> PolyMap:
    """``sum_k T_k c_k`` with coefficients on the right."""
    out = PolyMap.zero(quaternions(), 4)
    for index, coeff in coeffs.items():
        out = out + tk_poly(index) * coeff
    return out


# -- P^J_k ----------------------------------------------------------------------------


@dataclass(frozen=True)
class FueterPoly:
    k: MultiIndex
    J: Element
    poly: PolyMap


def fueter_poly_map(k: MultiIndex, J: Element) -> PolyMap:
    """``P^J_k`` in ``(x_0, x_1, beta)``.

    ``|k| P^J_k = k_1 P^J_(k_1-1,k_2) zeta_1 + k_2 P^J_(k_1,k_2-1) zeta_2`` with
    ``zeta_1 = x_1 - i x_0`` and ``zeta_2 = beta - J x_0``.
    """
    _check_index(k)
    k1, k2 = k
    H = quaternions()
    if k1 < 0 or k2 < 0:
        return PolyMap.zero(H, 3)
    key = ((k1, k2), J.coeffs)
    with _CACHE_LOCK:
        cached = _FUETER_CACHE.get(key)
        if cached is not None:
            return cached
        if k1 == k2 == 0:
            result = PolyMap.constant(H, 3, 1)
        else:
            result = PolyMap.zero(H, 3)
            if k1:
                prev = fueter_poly_map((k1 - 1, k2), J)
                result = result + poly_product(prev, _zeta1(3)).scale(k1)
            if k2:
                zeta2 = PolyMap.linear(H, [-J, H.zero(), H.one()])
                result = result + poly_product(fueter_poly_map((k1, k2 - 1), J), zeta2).scale(k2)
            result = result.scale(Fraction(1, k1 + k2))
        _FUETER_CACHE[key] = result
        return result


def fueter_poly(k: MultiIndex, J: Element) -> FueterPoly:
    return FueterPoly((k[0], k[1]), J, fueter_poly_map(k, J))


def restriction_identity(k: MultiIndex, J: Element) -> bool:
    """``(T_k)_J = P^J_k J^{k_2}``."""
    restricted = restrict_to_slice(tk_poly(k), fan13(), torus_point(J))
    return restricted == fueter_poly_map(k, J) * power(J, k[1])


def fueter_poly_sign_law(k: MultiIndex, J: Element) -> bool:
    """``P^{-J}_k(x_0, x_1, -beta) = (-1)^{k_2} P^J_k(x_0, x_1, beta)``."""
    flipped = fueter_poly_map(k, -J).reflect(2)
    return flipped == fueter_poly_map(k, J).scale((-1) ** k[1])


def delta_nabla_identity(h: Sequence[int], phi: PolyMap, J: Element) -> bool:
    """``delta^h phi = J^{-h_2} nabla^h_J phi`` for a J-monogenic slice map *phi*."""
    inverse_power = power(conj(J), h[2])
    return apply_delta(h, phi) == left_mul(inverse_power, apply_nabla(J, h, phi))


# -- expansions -----------------------------------------------------------------------


def _constant_term(f: PolyMap) -> Element:
    return f.coefficient((0,) * f.nvars)


def expansion_coefficient(P: PolyMap, k: MultiIndex) -> Element:
    """``c_k = delta^(0, k_1, k_2) P (0) / (k_1! k_2!)``."""
    value = _constant_term(apply_delta((0, k[0], k[1]), P))
    return value.scale(Fraction(1, math.factorial(k[0]) * math.factorial(k[1])))


def expand_homogeneous(P: PolyMap, k: int) -> Coefficients:
    """Coefficients ``c_k`` with ``P = sum_{|k| = k} T_k c_k``; raises when that fails."""
    if P.nvars != 4:
        msg = f"Expected a map in 4 variables, got {P.nvars}"
        raise InvalidParameterError(msg, nvars=P.nvars)
    coeffs = {index: expansion_coefficient(P, index) for index in multi_indices(k)}
    residual = P - tk_combination(coeffs)
    if not residual.is_zero():
        msg = f"Map is not a degree-{k} regular polynomial; expansion leaves a residual"
        raise NotRegularError(msg, residual=residual, degree=k)
    return coeffs


def _mirror_offset(z0: Element) -> list[Scalar]:
    if any(z0.coeffs[2:]):
        msg = f"Center {z0} must lie on the mirror span(1, i)"
        raise InvalidParameterError(msg, center=str(z0))
    return [z0.coeffs[0], z0.coeffs[1], 0, 0]


def series_expand(f: PolyMap, z0: Element, maxdeg: int | None = None) -> Coefficients:
    """Coefficients of ``f(x) = sum_k T_k(x - z_0) c_k`` up to degree *maxdeg*.

    Each homogeneous part of ``f(x + z_0)`` is expanded separately; a
    non-regular input raises :class:`NotRegularError`.
    """
    g = f.translate(_mirror_offset(z0))
    top = g.total_degree() if maxdeg is None else maxdeg
    coeffs: Coefficients = {}
    for degree in range(top + 1):
        coeffs.update(expand_homogeneous(g.homogeneous_part(degree), degree))
    return coeffs


def series_reconstruct(coeffs: Mapping[MultiIndex, Element], z0: Element) -> PolyMap:
    """``sum_k T_k(x - z_0) c_k``."""
    offset = [-c for c in _mirror_offset(z0)]
    return tk_combination(coeffs).translate(offset)


# -- A_k and B_k ---------------------------------------------------------------------


@dataclass(frozen=True)
class AkBk:
    """Complex polynomials in ``(x_0, x_1, gamma)`` with ``T_k = A_k + w B_k``.

    Here ``w = j x_2 + k x_3`` and ``gamma = x_2^2 + x_3^2``.
    """

    k: MultiIndex
    A: PolyMap
    B: PolyMap


def _zeta1_signed_3(sign: int) -> PolyMap:
    H = quaternions()
    return PolyMap.linear(H, [H.basis(1, -sign), H.one(), H.zero()])


def akbk_pair(k: MultiIndex) -> tuple[PolyMap, PolyMap]:
    """``A_k`` and ``B_k`` by the recursion

    ``|k| A_k = k_1 A_(k_1-1,k_2) zeta + k_2 A_(k_1,k_2-1) x_0 - k_2 conj(B_(k_1,k_2-1)) gamma``
    ``|k| B_k = k_1 B_(k_1-1,k_2) zeta + k_2 conj(A_(k_1,k_2-1)) + k_2 B_(k_1,k_2-1) x_0``

    with ``zeta = x_1 - (-1)^{k_2} i x_0``.
    """
    _check_index(k)
    k1, k2 = k
    H = quaternions()
    if k1 < 0 or k2 < 0:
        return PolyMap.zero(H, 3), PolyMap.zero(H, 3)
    with _CACHE_LOCK:
        cached = _AKBK_CACHE.get((k1, k2))
        if cached is not None:
            return cached
        if k1 == k2 == 0:
            pair = (PolyMap.constant(H, 3, 1), PolyMap.zero(H, 3))
        else:
            A = PolyMap.zero(H, 3)
            B = PolyMap.zero(H, 3)
            if k1:
                zeta = _zeta1_signed_3(-1 if k2 % 2 else 1)
                prev_a, prev_b = akbk_pair((k1 - 1, k2))
                A = A + poly_product(prev_a, zeta).scale(k1)
                B = B + poly_product(prev_b, zeta).scale(k1)
            if k2:
                prev_a, prev_b = akbk_pair((k1, k2 - 1))
                x0 = PolyMap.variable(H, 3, 0)
                gamma = PolyMap.variable(H, 3, 2)
                A = A + (poly_product(prev_a, x0) - poly_product(prev_b.conj(), gamma)).scale(k2)
                B = B + (prev_a.conj() + poly_product(prev_b, x0)).scale(k2)
            scale = Fraction(1, k1 + k2)
            pair = (A.scale(scale), B.scale(scale))
        _AKBK_CACHE[(k1, k2)] = pair
        return pair


def akbk(k: MultiIndex) -> AkBk:
    A, B = akbk_pair(k)
    return AkBk((k[0], k[1]), A, B)


def _gamma_to_ambient(f: PolyMap) -> PolyMap:
    """Substitute ``gamma := x_2^2 + x_3^2`` into a map in ``(x_0, x_1, gamma)``."""
    gamma = real_add(
        real_mul(real_var(4, 2), real_var(4, 2)), real_mul(real_var(4, 3), real_var(4, 3))
    )
    return f.substitute([real_var(4, 0), real_var(4, 1), gamma], 4)


def _gamma_to_beta(f: PolyMap) -> PolyMap:
    """Substitute ``gamma := beta^2`` into a map in ``(x_0, x_1, gamma)``."""
    square = real_mul(real_var(3, 2), real_var(3, 2))
    return f.substitute([real_var(3, 0), real_var(3, 1), square], 3)


def _w_ambient() -> PolyMap:
    H = quaternions()
    return PolyMap.linear(H, [H.zero(), H.zero(), H.basis(2), H.basis(3)])


def akbk_identity(k: MultiIndex) -> bool:
    """``T_k = A_k(x_0 + i x_1, gamma) + (j x_2 + k x_3) B_k(x_0 + i x_1, gamma)``."""
    A, B = akbk_pair(k)
    combined = _gamma_to_ambient(A) + poly_product(_w_ambient(), _gamma_to_ambient(B))
    return combined == tk_poly(k)


def akbk_homogeneity(k: MultiIndex) -> bool:
    """``A_k(z, beta^2)`` and ``beta B_k(z, beta^2)`` are ``|k|``-homogeneous."""
    A, B = akbk_pair(k)
    beta = PolyMap.variable(quaternions(), 3, 2)
    degree = k[0] + k[1]
    return _gamma_to_beta(A).is_homogeneous(degree) and poly_product(
        beta, _gamma_to_beta(B)
    ).is_homogeneous(degree)


def akbk_is_complex(k: MultiIndex) -> bool:
    A, B = akbk_pair(k)
    return A.coefficient_support() <= {0, 1} and B.coefficient_support() <= {0, 1}


@dataclass(frozen=True)
class ModulusSplit:
    """``|T_k(x)|^2 = |A_k|^2 + gamma |B_k|^2`` at one point."""

    total: Scalar
    a_part: Scalar
    b_part: Scalar

    @property
    def consistent(self) -> bool:
        return is_zero(self.total - self.a_part - self.b_part)

    @property
    def bounded(self) -> bool:
        return self.a_part <= self.total and self.b_part <= self.total


def modulus_split(k: MultiIndex, x: Element) -> ModulusSplit:
    A, B = akbk_pair(k)
    x0, x1, x2, x3 = x.coeffs
    gamma = x2 * x2 + x3 * x3
    a_value = A.evaluate([x0, x1, gamma])
    b_value = B.evaluate([x0, x1, gamma])
    return ModulusSplit(
        total=norm_form(tk_poly(k)(x)).real,
        a_part=norm_form(a_value).real,
        b_part=gamma * norm_form(b_value).real,
    )


def orbit_pairs(count: int, seed: int = 0) -> list[tuple[Element, Element]]:
    """Exact pairs sharing ``(x_0, x_1, x_2^2 + x_3^2)``.

    The second point is the first rotated in the ``(x_2, x_3)`` plane by a
    rational rotation.
    """
    H = quaternions()
    rng = np.random.default_rng(seed)
    pairs: list[tuple[Element, Element]] = []
    for _ in range(count):
        coords = [Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 5))) for _ in range(4)]
        t = Fraction(int(rng.integers(-7, 8)), int(rng.integers(1, 6)))
        c, s = sphere_point([t])
        x = H.element(coords)
        x2, x3 = coords[2], coords[3]
        y = H.element([coords[0], coords[1], c * x2 - s * x3, s * x2 + c * x3])
        pairs.append((x, y))
    return pairs


def modulus_invariance_check(k: MultiIndex, pairs: Iterable[tuple[Element, Element]]) -> bool:
    """``|T_k(x)|^2 = |T_k(y)|^2`` whenever ``x`` and ``y`` share ``(x_0, x_1, x_2^2 + x_3^2)``."""
    f = tk_poly(k)
    return all(norm_form(f(x)).real == norm_form(f(y)).real for x, y in pairs)


# -- representation formulas ------------------------------------------------------

Evaluator = Callable[[Element], Element]


def represent_general(
    f: Evaluator, I: Element, J: Element, K: Element, z: Element, beta: Scalar  # noqa: E741
) -> Element:
    """Value at ``z + beta I`` from the values at ``z + beta J`` and ``z + beta K``.

    ``(J-K)^{-1} (J f(z+beta J) - K f(z+beta K)) + I (J-K)^{-1} (f(z+beta J) - f(z+beta K))``
    """
    if close(J, K):
        msg = f"The units J and K coincide ({J}); the formula needs J != K"
        raise SingularPairError(msg, J=str(J))
    inverse = cone_inverse(J - K)
    at_j = f(z + J.scale(beta))
    at_k = f(z + K.scale(beta))
    first = mul(inverse, mul(J, at_j) - mul(K, at_k))
    second = mul(I, mul(inverse, at_j - at_k))
    return first + second


def represent_two_point(
    f: Evaluator, I: Element, J: Element, z: Element, beta: Scalar  # noqa: E741
) -> Element:
    """``(1 - IJ)/2 f(z + beta J) + (1 + IJ)/2 f(z - beta J)``."""
    ij = mul(I, J)
    one = I.algebra.one()
    return mul((one - ij) / 2, f(z + J.scale(beta))) + mul((one + ij) / 2, f(z - J.scale(beta)))


# -- stems --------------------------------------------------------------------------------


@dataclass(frozen=True)
class StemPair:
    """``F_{}`` (even in ``beta``) and ``F_1`` (odd) over ``(x_0, x_1, beta)``."""

    empty: PolyMap
    one: PolyMap

    def to_stem_function(self) -> StemFunction:
        return StemFunction(fan13(), {(): self.empty, (1,): self.one})


def extract_stem(f: PolyMap, J: Element) -> StemPair:
    """Stem components of *f* read off the ``J`` slice.

    ``F_{} = (f_J(z+beta J) + f_J(z-beta J))/2`` and
    ``F_1 = (J/2)(f_J(z-beta J) - f_J(z+beta J))``.
    """
    restricted = restrict_to_slice(f, fan13(), torus_point(J))
    mirrored = restricted.reflect(2)
    half = Fraction(1, 2)
    empty = (restricted + mirrored).scale(half)
    return StemPair(empty, left_mul(J, mirrored - restricted).scale(half))


def stem_system_check(stem: StemPair) -> bool:
    """``(d_0 + i d_1) F_{} - d_beta F_1 = 0`` and ``d_beta F_{} + (d_0 - i d_1) F_1 = 0``."""
    i = quaternions().basis(1)
    first = (
        stem.empty.derivative(0) + left_mul(i, stem.empty.derivative(1)) - stem.one.derivative(2)
    )
    second = (
        stem.empty.derivative(2) + stem.one.derivative(0) - left_mul(i, stem.one.derivative(1))
    )
    return first.is_zero() and second.is_zero()


def stem_harmonic(stem: StemPair) -> bool:
    fan = fan13()
    J = torus_point(quaternions().basis(2))
    return apply_laplacian(fan, J, stem.empty).is_zero() and apply_laplacian(
        fan, J, stem.one
    ).is_zero()


def stem_parity(stem: StemPair) -> bool:
    return stem.empty.is_even_in(2) and stem.one.is_odd_in(2)


def stem_slice_preserving(stem: StemPair) -> bool:
    """``F_{}`` complex and ``F_1`` in ``R + jR + kR``."""
    return stem.empty.coefficient_support() <= {0, 1} and stem.one.coefficient_support() <= {
        0,
        2,
        3,
    }


@dataclass(frozen=True)
class SeriesStem:
    """``A(z, gamma) = sum A_k(z - z_0, gamma) c_k`` and the matching ``B``."""

    A: PolyMap
    B: PolyMap

    def matches(self, stem: StemPair) -> bool:
        """``F_{} = A(z, beta^2)`` and ``F_1 = beta B(z, beta^2)``."""
        beta = PolyMap.variable(self.A.algebra, 3, 2)
        return stem.empty == _gamma_to_beta(self.A) and stem.one == poly_product(
            beta, _gamma_to_beta(self.B)
        )


def series_stem(coeffs: Mapping[MultiIndex, Element], z0: Element) -> SeriesStem:
    offset = [-c for c in _mirror_offset(z0)[:2]] + [0]
    H = quaternions()
    A = PolyMap.zero(H, 3)
    B = PolyMap.zero(H, 3)
    for index, coeff in coeffs.items():
        a, b = akbk_pair(index)
        A = A + a * coeff
        B = B + b * coeff
    return SeriesStem(A.translate(offset), B.translate(offset))


# -- slice preservation and identity principle ----------------------------------------


def classify_slice_preserving(coeffs: Mapping[MultiIndex, Element]) -> bool:
    """Sufficient conditions for ``sum T_k c_k`` to be slice preserving.

    ``c_k`` complex when ``k_2 = 0``; real when ``k_1 = 0 != k_2`` or when ``k_1 != 0``
    and ``k_2`` is even; zero when ``k_1 != 0`` and ``k_2`` is odd.
    """
    for (k1, k2), c in coeffs.items():
        support = set(c.support())
        if k2 == 0:
            ok = support <= {0, 1}
        elif k1 == 0 or k2 % 2 == 0:
            ok = support <= {0}
        else:
            ok = not support
        if not ok:
            return False
    return True


@dataclass(frozen=True)
class IdentityResult:
    equal: bool
    slice_equal: bool
    witness: MultiIndex | None = None
    coefficient: Element | None = None


def identity_test(f: PolyMap, g: PolyMap, J0: Element) -> IdentityResult:
    """Compare *f* and *g* on the ``J_0`` slice and through their expansion coefficients.

    The witness is the first multi-index (by degree, then descending ``k_1``)
    whose coefficient differs.
    """
    diff = f - g
    slice_equal = restrict_to_slice(diff, fan13(), torus_point(J0)).is_zero()
    for degree in range(diff.total_degree() + 1):
        part = diff.homogeneous_part(degree)
        for index in multi_indices(degree):
            coefficient = expansion_coefficient(part, index)
            if not coefficient.is_zero():
                return IdentityResult(diff.is_zero(), slice_equal, index, coefficient)
    return IdentityResult(diff.is_zero(), slice_equal)


# -- exact kernels --------------------------------------------------------------------


def _rational(value: Scalar) -> sympy.Rational:
    frac = Fraction(value)
    return sympy.Rational(frac.numerator, frac.denominator)


def _rank(columns: Sequence[PolyMap]) -> int:
    keys = sorted({(exp, s) for col in columns for exp, c in col for s in range(4) if c[s] != 0})
    if not keys or not columns:
        return 0
    rows = [[_rational(col.coefficient(exp)[s]) for col in columns] for exp, s in keys]
    return int(sympy.Matrix(rows).rank())


def basis_kernel_dimension(k: int) -> int:
    """Dimension of the kernel of ``(c_k) -> sum_{|k| = k} T_k c_k`` over the reals."""
    H = quaternions()
    columns = [tk_poly(index) * H.basis(s) for index in multi_indices(k) for s in range(4)]
    return len(columns) - _rank(columns)


def restriction_kernel_dimension(maxdeg: int, J0: Element) -> int:
    """Kernel dimension of ``sum_{|k| <= maxdeg} T_k c_k -> its J_0 slice``."""
    H = quaternions()
    point = torus_point(J0)
    columns = [
        restrict_to_slice(tk_poly(index) * H.basis(s), fan13(), point)
        for degree in range(maxdeg + 1)
        for index in multi_indices(degree)
        for s in range(4)
    ]
    return len(columns) - _rank(columns)


# -- regularity helpers --------------------------------------------------------


def is_monogenic(phi: PolyMap, J: Element) -> bool:
    return apply_cr(fan13(), torus_point(J), phi).is_zero()


@dataclass(frozen=True)
class TranslationCheck:
    regular: tuple[bool, bool]
    preserving: tuple[bool, bool]

    @property
    def consistent(self) -> bool:
        return self.regular[0] == self.regular[1] and self.preserving[0] == self.preserving[1]


def translation_invariance(
    f: PolyMap, z0: Element, sampler: RationalGrid | None = None
) -> TranslationCheck:
    """Compare ``f`` with ``g(x) = f(x + z_0)`` for regularity and slice preservation."""
    g = f.translate(_mirror_offset(z0))
    fan = fan13()
    return TranslationCheck(
        regular=(check_regular(f, fan, sampler).passed, check_regular(g, fan, sampler).passed),
        preserving=(
            check_slice_preserving(f, fan, sampler).passed,
            check_slice_preserving(g, fan, sampler).passed,
        ),
    )


def all_indices(maxdeg: int) -> list[MultiIndex]:
    return list(itertools.chain.from_iterable(multi_indices(d) for d in range(maxdeg + 1)))
