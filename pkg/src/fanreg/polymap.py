"""Polynomial maps with algebra-valued coefficients.

A :class:`PolyMap` in ``nvars`` real variables is a sparse table
``exponent tuple -> Element`` read as ``f(x) = sum_m x^m c_m``.  Real
monomials are central, so the side of ``x^m`` does not matter; products with
algebra elements built by :func:`left_mul`, :func:`right_mul` and
:func:`poly_product` keep their side (and, for the octonions, associate left
to right).

Zero coefficients are pruned on construction, so the zero map is the one
with an empty table.  The operators of this module (``apply_cr``,
``apply_conj_cr``, ``apply_laplacian``, ``apply_nabla`` and ``apply_delta``) act
on slice maps whose variables are ``(x_0, ..., x_{t_0}, beta_1, ..., beta_tau)``.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterator, Mapping, Sequence
from enum import Enum
from fractions import Fraction
from types import MappingProxyType

import numpy as np

from fanreg.algebra import AlgebraSpec, Element, conj, in_sphere, mul
from fanreg.errors import AlgebraMismatchError, InvalidParameterError, VariableCountError
from fanreg.fan import SlicePoint, TFan, TorusPoint, recompose, slice_point
from fanreg.hypercomplex import coordinates
from fanreg.scalars import DEFAULT_TOLERANCE, Backend, Scalar

Exponent = tuple[int, ...]
RealPoly = dict[Exponent, Scalar]


class Parity(str, Enum):
    ZERO = "zero"
    EVEN = "even"
    ODD = "odd"
    MIXED = "mixed"


def _is_scalar(value: object) -> bool:
    return isinstance(value, (int, float, Fraction)) and not isinstance(value, bool)


def _add_term(out: dict[Exponent, Element], exp: Exponent, coeff: Element) -> None:
    current = out.get(exp)
    out[exp] = coeff if current is None else current + coeff


class PolyMap:
    """Polynomial map ``R^nvars -> algebra``; immutable."""

    __slots__ = ("algebra", "nvars", "_terms")

    def __init__(
        self,
        algebra: AlgebraSpec,
        nvars: int,
        terms: Mapping[Exponent, Element] | None = None,
    ) -> None:
        if nvars < 0:
            msg = f"Variable count must be nonnegative, got {nvars}"
            raise InvalidParameterError(msg, nvars=nvars)
        clean: dict[Exponent, Element] = {}
        for exp, coeff in (terms or {}).items():
            if len(exp) != nvars:
                msg = f"Exponent {exp} has {len(exp)} entries, expected {nvars}"
                raise VariableCountError(msg, expected=nvars, got=len(exp))
            if any(e < 0 for e in exp):
                msg = f"Negative exponent in {exp}"
                raise InvalidParameterError(msg, exp=list(exp))
            if coeff.algebra != algebra:
                msg = f"Coefficient from {coeff.algebra.name} in a map into {algebra.name}"
                raise AlgebraMismatchError(msg, left=algebra.name, right=coeff.algebra.name)
            if any(coeff.coeffs):
                clean[tuple(exp)] = coeff
        self.algebra = algebra
        self.nvars = nvars
        self._terms = MappingProxyType(dict(sorted(clean.items())))

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, algebra: AlgebraSpec, nvars: int) -> PolyMap:
        return cls(algebra, nvars)

    @classmethod
    def constant(cls, algebra: AlgebraSpec, nvars: int, value: Element | Scalar) -> PolyMap:
        coeff = value if isinstance(value, Element) else algebra.scalar(value)
        return cls(algebra, nvars, {(0,) * nvars: coeff})

    @classmethod
    def variable(
        cls, algebra: AlgebraSpec, nvars: int, index: int, coeff: Element | None = None
    ) -> PolyMap:
        """The map ``x -> x_index * coeff`` (``coeff`` defaults to 1)."""
        if not 0 <= index < nvars:
            msg = f"Variable index {index} out of range for {nvars} variables"
            raise VariableCountError(msg, index=index, nvars=nvars)
        exp = tuple(1 if i == index else 0 for i in range(nvars))
        return cls(algebra, nvars, {exp: coeff if coeff is not None else algebra.one()})

    @classmethod
    def linear(
        cls,
        algebra: AlgebraSpec,
        coeffs: Sequence[Element],
        constant: Element | None = None,
    ) -> PolyMap:
        """``x -> constant + sum_l x_l coeffs[l]``."""
        nvars = len(coeffs)
        out: dict[Exponent, Element] = {}
        if constant is not None:
            out[(0,) * nvars] = constant
        for index, coeff in enumerate(coeffs):
            out[tuple(1 if i == index else 0 for i in range(nvars))] = coeff
        return cls(algebra, nvars, out)

    # -- container protocol -----------------------------------------------

    @property
    def terms(self) -> Mapping[Exponent, Element]:
        return self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[tuple[Exponent, Element]]:
        return iter(self._terms.items())

    def coefficient(self, exp: Sequence[int]) -> Element:
        return self._terms.get(tuple(exp), self.algebra.zero())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolyMap):
            return NotImplemented
        return (
            self.nvars == other.nvars
            and self.algebra == other.algebra
            and dict(self._terms) == dict(other._terms)
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"PolyMap({self.summary()})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for exp, coeff in self._terms.items():
            mono = "*".join(
                f"x{i}" if e == 1 else f"x{i}^{e}" for i, e in enumerate(exp) if e
            )
            parts.append(f"({coeff})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)

    def summary(self) -> str:
        return (
            f"algebra={self.algebra.name}, vars={self.nvars}, "
            f"terms={len(self)}, degree={self.total_degree()}"
        )

    # -- arithmetic -------------------------------------------------------

    def _check(self, other: PolyMap) -> None:
        if self.nvars != other.nvars:
            msg = f"Variable counts differ: {self.nvars} vs {other.nvars}"
            raise VariableCountError(msg, left=self.nvars, right=other.nvars)
        if self.algebra != other.algebra:
            msg = f"Maps into different algebras: {self.algebra.name} vs {other.algebra.name}"
            raise AlgebraMismatchError(msg, left=self.algebra.name, right=other.algebra.name)

    def __add__(self, other: object) -> PolyMap:
        if isinstance(other, Element) or _is_scalar(other):
            other = PolyMap.constant(self.algebra, self.nvars, other)  # type: ignore[arg-type]
        if not isinstance(other, PolyMap):
            return NotImplemented
        self._check(other)
        out = dict(self._terms)
        for exp, coeff in other._terms.items():
            _add_term(out, exp, coeff)
        return PolyMap(self.algebra, self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> PolyMap:
        return PolyMap(self.algebra, self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other: object) -> PolyMap:
        if isinstance(other, (PolyMap, Element)) or _is_scalar(other):
            return self + (-other)  # type: ignore[operator]
        return NotImplemented

    def scale(self, factor: Scalar) -> PolyMap:
        return PolyMap(
            self.algebra, self.nvars, {e: c.scale(factor) for e, c in self._terms.items()}
        )

    def __mul__(self, other: object) -> PolyMap:
        if isinstance(other, PolyMap):
            return poly_product(self, other)
        if isinstance(other, Element):
            return right_mul(self, other)
        if _is_scalar(other):
            return self.scale(other)  # type: ignore[arg-type]
        return NotImplemented

    def __rmul__(self, other: object) -> PolyMap:
        if isinstance(other, Element):
            return left_mul(other, self)
        if _is_scalar(other):
            return self.scale(other)  # type: ignore[arg-type]
        return NotImplemented

    # -- evaluation -------------------------------------------------------

    def evaluate(self, coords: Sequence[Scalar]) -> Element:
        """Value at the real coordinate vector *coords*."""
        if len(coords) != self.nvars:
            msg = f"Expected {self.nvars} coordinates, got {len(coords)}"
            raise VariableCountError(msg, expected=self.nvars, got=len(coords))
        out = self.algebra.zero()
        for exp, coeff in self._terms.items():
            mono: Scalar = 1
            for value, e in zip(coords, exp):
                if e:
                    mono = mono * value**e
            out = out + coeff.scale(mono)
        return out

    def __call__(self, x: Element) -> Element:
        """Value at the algebra element *x*, in standard coordinates."""
        if x.algebra.dim != self.nvars:
            msg = f"Map has {self.nvars} variables; {x.algebra.name} has dimension {x.algebra.dim}"
            raise VariableCountError(msg, expected=self.nvars, got=x.algebra.dim)
        return self.evaluate(x.coeffs)

    def evaluate_array(self, coords: np.ndarray) -> np.ndarray:
        """Values at the rows of a float ``(N, nvars)`` array, shape ``(N, dim)``."""
        coords = np.atleast_2d(np.asarray(coords, dtype=np.float64))
        if coords.shape[-1] != self.nvars:
            msg = f"Expected arrays with {self.nvars} columns, got {coords.shape[-1]}"
            raise VariableCountError(msg, expected=self.nvars, got=int(coords.shape[-1]))
        out = np.zeros((coords.shape[0], self.algebra.dim), dtype=np.float64)
        for exp, coeff in self._terms.items():
            mono = np.prod(coords ** np.asarray(exp, dtype=np.float64), axis=1)
            out += mono[:, None] * np.asarray([float(c) for c in coeff.coeffs])
        return out

    # -- calculus and structure -------------------------------------------

    def derivative(self, var: int, order: int = 1) -> PolyMap:
        if not 0 <= var < self.nvars:
            msg = f"Variable index {var} out of range for {self.nvars} variables"
            raise VariableCountError(msg, index=var, nvars=self.nvars)
        out: dict[Exponent, Element] = {}
        for exp, coeff in self._terms.items():
            e = exp[var]
            if e < order:
                continue
            factor = math.perm(e, order)
            new = exp[:var] + (e - order,) + exp[var + 1 :]
            _add_term(out, new, coeff.scale(factor))
        return PolyMap(self.algebra, self.nvars, out)

    def conj(self) -> PolyMap:
        return PolyMap(self.algebra, self.nvars, {e: conj(c) for e, c in self._terms.items()})

    def is_zero(self, tol: float | None = None) -> bool:
        """Empty table, or every coefficient within *tol* for float maps."""
        if tol is None or not self._terms:
            return not self._terms
        return all(c.is_zero(tol) for c in self._terms.values())

    @property
    def is_exact(self) -> bool:
        return all(c.is_exact for c in self._terms.values())

    def total_degree(self) -> int:
        """Largest total degree; ``-1`` for the zero map."""
        return max((sum(e) for e in self._terms), default=-1)

    def degree_in(self, var: int) -> int:
        return max((e[var] for e in self._terms), default=-1)

    def homogeneous_part(self, k: int) -> PolyMap:
        return PolyMap(
            self.algebra, self.nvars, {e: c for e, c in self._terms.items() if sum(e) == k}
        )

    def is_homogeneous(self, k: int | None = None) -> bool:
        degrees = {sum(e) for e in self._terms}
        if k is None:
            return len(degrees) <= 1
        return degrees <= {k}

    def parity_in(self, var: int) -> Parity:
        parities = {e[var] % 2 for e in self._terms}
        if not parities:
            return Parity.ZERO
        if parities == {0}:
            return Parity.EVEN
        if parities == {1}:
            return Parity.ODD
        return Parity.MIXED

    def is_even_in(self, var: int) -> bool:
        return self.parity_in(var) in (Parity.ZERO, Parity.EVEN)

    def is_odd_in(self, var: int) -> bool:
        return self.parity_in(var) in (Parity.ZERO, Parity.ODD)

    def to_float(self) -> PolyMap:
        return PolyMap(self.algebra, self.nvars, {e: c.to_float() for e, c in self._terms.items()})

    def to_backend(self, backend: Backend) -> PolyMap:
        if backend is Backend.FLOAT64:
            return self.to_float()
        return PolyMap(
            self.algebra,
            self.nvars,
            {
                e: Element(c.algebra, tuple(Fraction(v) for v in c.coeffs))
                for e, c in self._terms.items()
            },
        )

    def coefficient_support(self) -> set[int]:
        """Indices of algebra basis elements appearing in some coefficient."""
        return {i for c in self._terms.values() for i in c.support()}

    def substitute(self, images: Sequence[RealPoly], nvars_out: int) -> PolyMap:
        """Compose with the real polynomial substitution ``x_i := images[i]``.

        Each image is a real polynomial ``{exponent: scalar}`` in *nvars_out*
        variables.
        """
        if len(images) != self.nvars:
            msg = f"Need {self.nvars} images, got {len(images)}"
            raise VariableCountError(msg, expected=self.nvars, got=len(images))
        for image in images:
            if any(len(exp) != nvars_out for exp in image):
                msg = f"Substitution images must have {nvars_out} variables"
                raise VariableCountError(msg, expected=nvars_out)
        powers: dict[tuple[int, int], RealPoly] = {}

        def power(i: int, e: int) -> RealPoly:
            key = (i, e)
            if key not in powers:
                powers[key] = (
                    {(0,) * nvars_out: 1} if e == 0 else real_mul(power(i, e - 1), images[i])
                )
            return powers[key]

        out: dict[Exponent, Element] = {}
        for exp, coeff in self._terms.items():
            mono: RealPoly = {(0,) * nvars_out: 1}
            for i, e in enumerate(exp):
                if e:
                    mono = real_mul(mono, power(i, e))
            for new, factor in mono.items():
                if factor != 0:
                    _add_term(out, new, coeff.scale(factor))
        return PolyMap(self.algebra, nvars_out, out)

    def translate(self, offset: Sequence[Scalar]) -> PolyMap:
        """``x -> f(x + offset)``."""
        if len(offset) != self.nvars:
            msg = f"Offset needs {self.nvars} entries, got {len(offset)}"
            raise VariableCountError(msg, expected=self.nvars, got=len(offset))
        images = [
            real_add(real_var(self.nvars, i), real_const(self.nvars, o))
            for i, o in enumerate(offset)
        ]
        return self.substitute(images, self.nvars)

    def reflect(self, var: int) -> PolyMap:
        """``x -> f(x)`` with ``x_var`` replaced by ``-x_var``."""
        out = {
            e: (-c if e[var] % 2 else c) for e, c in self._terms.items()
        }
        return PolyMap(self.algebra, self.nvars, out)


# -- real polynomials used as substitution images ------------------------------


def real_const(nvars: int, value: Scalar) -> RealPoly:
    return {(0,) * nvars: value} if value != 0 else {}


def real_var(nvars: int, index: int, coeff: Scalar = 1) -> RealPoly:
    return {tuple(1 if i == index else 0 for i in range(nvars)): coeff}


def real_add(a: RealPoly, b: RealPoly) -> RealPoly:
    out = dict(a)
    for exp, value in b.items():
        out[exp] = out.get(exp, 0) + value
    return {e: v for e, v in out.items() if v != 0}


def real_mul(a: RealPoly, b: RealPoly) -> RealPoly:
    out: RealPoly = {}
    for ea, va in a.items():
        for eb, vb in b.items():
            exp = tuple(x + y for x, y in zip(ea, eb))
            out[exp] = out.get(exp, 0) + va * vb
    return {e: v for e, v in out.items() if v != 0}


def real_poly_map(algebra: AlgebraSpec, poly: RealPoly, nvars: int) -> PolyMap:
    """Embed a real polynomial as a map with real coefficients."""
    return PolyMap(algebra, nvars, {e: algebra.scalar(v) for e, v in poly.items()})


# -- products ------------------------------------------------------------


def left_mul(a: Element, f: PolyMap) -> PolyMap:
    """``x -> a f(x)``."""
    return PolyMap(f.algebra, f.nvars, {e: mul(a, c) for e, c in f.terms.items()})


def right_mul(f: PolyMap, a: Element) -> PolyMap:
    """``x -> f(x) a``."""
    return PolyMap(f.algebra, f.nvars, {e: mul(c, a) for e, c in f.terms.items()})


def poly_product(f: PolyMap, g: PolyMap) -> PolyMap:
    """Pointwise product ``x -> f(x) g(x)``.

    Coefficients multiply as ``c_m d_n``; longer products built from repeated
    calls associate left to right.
    """
    f._check(g)
    out: dict[Exponent, Element] = {}
    for ef, cf in f.terms.items():
        for eg, cg in g.terms.items():
            _add_term(out, tuple(a + b for a, b in zip(ef, eg)), mul(cf, cg))
    return PolyMap(f.algebra, f.nvars, out)


# -- slices --------------------------------------------------------------


def slice_images(fan: TFan, J: TorusPoint) -> list[RealPoly]:
    """Substitution ``x_l := x_l`` on the mirror and ``x_l := beta_h (J_h)_l`` on block ``h``."""
    nslice = fan.slice_dim
    images: list[RealPoly] = [real_var(nslice, i) for i in range(fan.t0 + 1)]
    for h in range(1, fan.tau + 1):
        for value in J.block_coords(h):
            images.append({} if value == 0 else real_var(nslice, fan.t0 + h, value))
    return images


def restrict_to_slice(f: PolyMap, fan: TFan, J: TorusPoint) -> PolyMap:
    """``f_J(x_0, ..., x_{t_0}, beta) = f(x^0 + sum beta_h J_h)``.

    The variables of *f* are the coordinates in the fan's basis.
    """
    if f.nvars != fan.n + 1:
        msg = f"Map has {f.nvars} variables; fan {fan} needs {fan.n + 1}"
        raise VariableCountError(msg, expected=fan.n + 1, got=f.nvars)
    return f.substitute(slice_images(fan, J), fan.slice_dim)


def slice_units(fan: TFan, J: TorusPoint) -> tuple[Element, ...]:
    """The units ``(v_0, ..., v_{t_0}, J_1, ..., J_tau)`` of ``d-bar_J``."""
    return (*fan.mirror_vectors, *J.J)


def _check_slice_vars(fan: TFan, f: PolyMap) -> None:
    if f.nvars != fan.slice_dim:
        msg = f"Slice map has {f.nvars} variables; fan {fan} slices have {fan.slice_dim}"
        raise VariableCountError(msg, expected=fan.slice_dim, got=f.nvars)


def apply_cr(fan: TFan, J: TorusPoint, f: PolyMap) -> PolyMap:
    """``d-bar_J f = d_{x_0} f + sum v_l d_{x_l} f + sum J_h d_{beta_h} f``."""
    _check_slice_vars(fan, f)
    out = PolyMap.zero(f.algebra, f.nvars)
    for var, unit in enumerate(slice_units(fan, J)):
        out = out + left_mul(unit, f.derivative(var))
    return out


def apply_conj_cr(fan: TFan, J: TorusPoint, f: PolyMap) -> PolyMap:
    """``d_J f = d_{x_0} f - sum v_l d_{x_l} f - sum J_h d_{beta_h} f``."""
    _check_slice_vars(fan, f)
    out = f.derivative(0)
    for var, unit in enumerate(slice_units(fan, J)[1:], start=1):
        out = out - left_mul(unit, f.derivative(var))
    return out


def apply_laplacian(fan: TFan, J: TorusPoint, f: PolyMap) -> PolyMap:
    _check_slice_vars(fan, f)
    out = PolyMap.zero(f.algebra, f.nvars)
    for var in range(f.nvars):
        out = out + f.derivative(var, 2)
    return out


def apply_nabla(J: Element, h: Sequence[int], f: PolyMap) -> PolyMap:
    """``d_0^{h_0} d_1^{h_1} d_beta^{h_2}`` on a slice map in ``(x_0, x_1, beta)``.

    This is the coordinate form of the derivative along ``1``, ``i`` and ``J``
    on the slice ``span(1, i, J)``; *J* only has to be an imaginary unit.
    """
    if f.nvars != 3:
        msg = f"Nabla acts on slice maps in 3 variables, got {f.nvars}"
        raise VariableCountError(msg, expected=3, got=f.nvars)
    if len(h) != 3 or any(e < 0 for e in h):
        msg = f"Multi-index must be 3 nonnegative integers, got {tuple(h)}"
        raise InvalidParameterError(msg, h=list(h))
    if not in_sphere(J):
        msg = f"{J} is not an imaginary unit"
        raise InvalidParameterError(msg, J=str(J))
    out = f
    for var, order in enumerate(h):
        if order:
            out = out.derivative(var, order)
    return out


def apply_delta(h: Sequence[int], f: PolyMap) -> PolyMap:
    """``delta^h`` in the first two variables ``(x_0, x_1)``.

    ``delta^(h_0, h_1, 2t) = d_0^{h_0} d_1^{h_1} (d_0^2 + d_1^2)^t`` and the odd
    case appends ``(d_0 + i d_1)``, with ``i`` (basis element 1) acting on the left.
    """
    if len(h) != 3 or any(e < 0 for e in h):
        msg = f"Multi-index must be 3 nonnegative integers, got {tuple(h)}"
        raise InvalidParameterError(msg, h=list(h))
    if f.nvars < 2:
        msg = f"Delta needs at least 2 variables, got {f.nvars}"
        raise VariableCountError(msg, expected=2, got=f.nvars)
    h0, h1, h2 = h
    out = f
    if h2 % 2:
        i = f.algebra.basis(1)
        out = out.derivative(0) + left_mul(i, out.derivative(1))
    for _ in range(h2 // 2):
        out = out.derivative(0, 2) + out.derivative(1, 2)
    if h0:
        out = out.derivative(0, h0)
    if h1:
        out = out.derivative(1, h1)
    return out


def numeric_cr(
    fan: TFan,
    J: TorusPoint,
    evaluator: Callable[[Element], Element],
    slice_coords: Sequence[Scalar],
    step: float | None = None,
) -> Element:
    """Central-difference ``d-bar_J`` of a black-box *evaluator* at a slice point.

    The default step is ``eps^(1/3) * max(1, |x|)``; the result is a float
    element.
    """
    point: SlicePoint = slice_point(fan, [float(c) for c in slice_coords], J)
    x = recompose(point).to_float()
    if step is None:
        size = math.sqrt(float(x.euclidean_norm2()))
        step = float(np.finfo(np.float64).eps) ** (1 / 3) * max(1.0, size)
    residual = fan.algebra.zero().to_float()
    for unit in slice_units(fan, J):
        direction = unit.to_float().scale(step)
        diff = evaluator(x + direction) - evaluator(x - direction)
        residual = residual + mul(unit.to_float(), diff.to_float().scale(1 / (2 * step)))
    return residual


def slice_evaluator(fan: TFan, f: PolyMap) -> Callable[[Element], Element]:
    """Evaluate an ambient map (variables = fan basis coordinates) at algebra points."""

    def evaluate(x: Element) -> Element:
        tol = DEFAULT_TOLERANCE if x.is_exact else 1e-9
        return f.evaluate(coordinates(fan.basis, x, tol))

    return evaluate

