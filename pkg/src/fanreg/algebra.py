"""Alternative real *-algebras with monomial structure constants.

An :class:`AlgebraSpec` stores a dense ``dim x dim`` product table whose
entries are ``(index, sign)`` pairs: ``v_s * v_t = sign * v_index``.  Every
preset (the complex numbers, the quaternions, the octonions and the Clifford
algebras ``Cl(0,n)``) has products of this form.  Basis element ``0`` is the
identity and the *-involution flips basis vectors by ``conj_signs``.

:class:`Element` is an immutable coefficient vector over one of the scalar
backends of :mod:`fanreg.scalars`.  The module-level functions implement the
trace ``t(x) = x + x^c``, the norm form ``n(x) = x x^c``, the quadratic cone
and the sphere of imaginary units.
"""

from __future__ import annotations

import functools
import math
import re
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Any

import numpy as np
import structlog

from fanreg.errors import (
    AlgebraMismatchError,
    InvalidParameterError,
    OutsideConeError,
    ZeroElementError,
)
from fanreg.scalars import DEFAULT_TOLERANCE, Backend, Scalar, format_scalar, is_exact

logger = structlog.get_logger(__name__)

ProductEntry = tuple[int, int]


class Preset(str, Enum):
    COMPLEX = "Complex"
    QUATERNIONS = "Quaternions"
    OCTONIONS = "Octonions"
    CLIFFORD0N = "Clifford0n"


@dataclass(frozen=True, eq=False)
class AlgebraSpec:
    """Structure constants and involution of a finite-dimensional *-algebra."""

    name: str
    dim: int
    labels: tuple[str, ...]
    table: tuple[tuple[ProductEntry, ...], ...]
    conj_signs: tuple[int, ...]
    associative: bool = True

    def __post_init__(self) -> None:
        if self.dim < 1:
            msg = f"Algebra dimension must be positive, got {self.dim}"
            raise InvalidParameterError(msg, dim=self.dim)
        if len(self.labels) != self.dim or len(self.conj_signs) != self.dim:
            msg = f"Algebra {self.name!r}: labels/conj_signs must have length {self.dim}"
            raise InvalidParameterError(msg, name=self.name)
        if len(self.table) != self.dim or any(len(row) != self.dim for row in self.table):
            msg = f"Algebra {self.name!r}: product table must be {self.dim}x{self.dim}"
            raise InvalidParameterError(msg, name=self.name)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AlgebraSpec):
            return NotImplemented
        return (
            self is other
            or (
                self.name == other.name
                and self.table == other.table
                and self.conj_signs == other.conj_signs
            )
        )

    def __hash__(self) -> int:
        return hash((self.name, self.dim))

    def __repr__(self) -> str:
        return f"AlgebraSpec(name={self.name!r}, dim={self.dim})"

    # -- constructors -------------------------------------------------

    def element(self, coeffs: Iterable[Scalar]) -> Element:
        return Element(self, tuple(coeffs))

    def zero(self) -> Element:
        return Element(self, (0,) * self.dim)

    def one(self) -> Element:
        return self.scalar(1)

    def scalar(self, value: Scalar) -> Element:
        return Element(self, (value,) + (0,) * (self.dim - 1))

    def basis(self, index: int, coeff: Scalar = 1) -> Element:
        if not 0 <= index < self.dim:
            msg = f"Basis index {index} out of range for {self.name} (dim {self.dim})"
            raise InvalidParameterError(msg, index=index)
        values: list[Scalar] = [0] * self.dim
        values[index] = coeff
        return Element(self, tuple(values))

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            msg = f"Unknown basis label {label!r} for {self.name}"
            raise InvalidParameterError(msg, label=label) from None

    def from_labels(self, coeffs: Mapping[str, Scalar]) -> Element:
        """Build an element from ``{label: coefficient}``, e.g. ``{"j": 3, "k": 4}``."""
        values: list[Scalar] = [0] * self.dim
        for label, value in coeffs.items():
            values[self.index(label)] = value
        return Element(self, tuple(values))


@dataclass(frozen=True, eq=False)
class Element:
    """An element of *algebra* given by its coefficient vector."""

    algebra: AlgebraSpec
    coeffs: tuple[Scalar, ...]

    def __post_init__(self) -> None:
        if len(self.coeffs) != self.algebra.dim:
            msg = (
                f"Element of {self.algebra.name} needs {self.algebra.dim} coefficients, "
                f"got {len(self.coeffs)}"
            )
            raise InvalidParameterError(msg, algebra=self.algebra.name)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Element):
            return NotImplemented
        return self.algebra == other.algebra and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.algebra.name, self.coeffs))

    def __getitem__(self, index: int) -> Scalar:
        return self.coeffs[index]

    def __iter__(self) -> Any:
        return iter(self.coeffs)

    def __add__(self, other: object) -> Element:
        if isinstance(other, Element):
            _check_same(self, other)
            return Element(self.algebra, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))
        if _is_scalar(other):
            return self + self.algebra.scalar(other)  # type: ignore[arg-type]
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other: object) -> Element:
        if isinstance(other, Element):
            _check_same(self, other)
            return Element(self.algebra, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))
        if _is_scalar(other):
            return self - self.algebra.scalar(other)  # type: ignore[arg-type]
        return NotImplemented

    def __rsub__(self, other: object) -> Element:
        if _is_scalar(other):
            return self.algebra.scalar(other) - self  # type: ignore[arg-type]
        return NotImplemented

    def __neg__(self) -> Element:
        return Element(self.algebra, tuple(-a for a in self.coeffs))

    def __mul__(self, other: object) -> Element:
        if isinstance(other, Element):
            return mul(self, other)
        if _is_scalar(other):
            return self.scale(other)  # type: ignore[arg-type]
        return NotImplemented

    def __rmul__(self, other: object) -> Element:
        if _is_scalar(other):
            return self.scale(other)  # type: ignore[arg-type]
        return NotImplemented

    def __truediv__(self, other: object) -> Element:
        if not _is_scalar(other):
            return NotImplemented
        if other == 0:
            msg = "Division of an element by zero"
            raise ZeroElementError(msg)
        if is_exact(other):
            factor: Scalar = Fraction(1) / other  # type: ignore[operator]
        else:
            factor = 1.0 / other  # type: ignore[operator]
        return self.scale(factor)

    def scale(self, factor: Scalar) -> Element:
        return Element(self.algebra, tuple(a * factor for a in self.coeffs))

    @property
    def real(self) -> Scalar:
        return self.coeffs[0]

    @property
    def is_exact(self) -> bool:
        return all(is_exact(c) for c in self.coeffs)

    def is_zero(self, tol: float = DEFAULT_TOLERANCE) -> bool:
        if self.is_exact:
            return not any(self.coeffs)
        return all(abs(c) <= tol for c in self.coeffs)

    def euclidean_norm2(self) -> Scalar:
        """Squared Euclidean norm of the coefficient vector."""
        return sum((c * c for c in self.coeffs), start=0)

    def to_float(self) -> Element:
        return Element(self.algebra, tuple(float(c) for c in self.coeffs))

    def support(self) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.coeffs) if c != 0)

    def __str__(self) -> str:
        parts: list[str] = []
        for label, value in zip(self.algebra.labels, self.coeffs):
            if value == 0:
                continue
            text = str(format_scalar(value))
            negative = text.startswith("-")
            text = text.lstrip("-")
            if label != "1":
                text = label if text == "1" else f"{text}{label}"
            if parts:
                parts.append(f"- {text}" if negative else f"+ {text}")
            else:
                parts.append(f"-{text}" if negative else text)
        return " ".join(parts) if parts else "0"


def _is_scalar(value: object) -> bool:
    return isinstance(value, (int, float, Fraction)) and not isinstance(value, bool)


def _check_same(a: Element, b: Element) -> None:
    if a.algebra is not b.algebra and a.algebra != b.algebra:
        msg = f"Operands belong to different algebras: {a.algebra.name} vs {b.algebra.name}"
        raise AlgebraMismatchError(msg, left=a.algebra.name, right=b.algebra.name)


# -- arithmetic -------------------------------------------------------


def mul(a: Element, b: Element) -> Element:
    """Bilinear product by structure constants."""
    _check_same(a, b)
    spec = a.algebra
    out: list[Scalar] = [0] * spec.dim
    b_terms = [(t, y) for t, y in enumerate(b.coeffs) if y != 0]
    for s, x in enumerate(a.coeffs):
        if x == 0:
            continue
        row = spec.table[s]
        for t, y in b_terms:
            index, sign = row[t]
            if sign > 0:
                out[index] += x * y
            elif sign < 0:
                out[index] -= x * y
    return Element(spec, tuple(out))


def conj(a: Element) -> Element:
    """The *-involution ``x -> x^c``."""
    return Element(a.algebra, tuple(s * c for s, c in zip(a.algebra.conj_signs, a.coeffs)))


def trace(a: Element) -> Element:
    return a + conj(a)


def norm_form(a: Element) -> Element:
    return mul(a, conj(a))


def power(a: Element, exponent: int) -> Element:
    """``a`` multiplied by itself *exponent* times, associated left to right."""
    if exponent < 0:
        msg = f"Negative exponent {exponent}; use cone_inverse first"
        raise InvalidParameterError(msg, exponent=exponent)
    result = a.algebra.one()
    for _ in range(exponent):
        result = mul(result, a)
    return result


def is_real(a: Element, tol: float = DEFAULT_TOLERANCE) -> bool:
    """Whether *a* lies in ``R = R * 1``.

    Exact elements need every non-identity coefficient to vanish; float
    elements allow ``tol * ||a||``.
    """
    if a.is_exact:
        return not any(a.coeffs[1:])
    size = math.sqrt(float(a.euclidean_norm2()))
    return all(abs(c) <= tol * size for c in a.coeffs[1:])


def close(a: Element, b: Element, tol: float = DEFAULT_TOLERANCE) -> bool:
    """Exact equality for exact operands, relative closeness otherwise."""
    if a.is_exact and b.is_exact:
        return a == b
    _check_same(a, b)
    scale = max(1.0, math.sqrt(float(a.euclidean_norm2())), math.sqrt(float(b.euclidean_norm2())))
    return all(abs(x - y) <= tol * scale for x, y in zip(a.coeffs, b.coeffs))


def in_quadratic_cone(a: Element, tol: float = DEFAULT_TOLERANCE) -> bool:
    """Membership in ``Q_A = R u {x : t(x), n(x) real, 4 n(x) > t(x)^2}``."""
    if is_real(a, tol):
        return True
    t = trace(a)
    n = norm_form(a)
    if not (is_real(t, tol) and is_real(n, tol)):
        return False
    return bool(4 * n.real > t.real * t.real)


def in_sphere(a: Element, tol: float = DEFAULT_TOLERANCE) -> bool:
    """Membership in ``S_A = {x : t(x) = 0, n(x) = 1}``."""
    t = trace(a)
    n = norm_form(a)
    if a.is_exact:
        return t.is_zero() and n == a.algebra.one()
    return t.is_zero(tol) and is_real(n, tol) and abs(n.real - 1) <= tol


def cone_inverse(a: Element, tol: float = DEFAULT_TOLERANCE) -> Element:
    """Return ``x^{-1} = n(x)^{-1} x^c`` for nonzero *a* in the quadratic cone."""
    if a.is_zero(tol):
        msg = "Cannot invert the zero element"
        raise ZeroElementError(msg, algebra=a.algebra.name)
    if not in_quadratic_cone(a, tol):
        msg = f"Element {a} of {a.algebra.name} lies outside the quadratic cone"
        raise OutsideConeError(msg, algebra=a.algebra.name, element=str(a))
    return conj(a) / norm_form(a).real


def mul_array(spec: AlgebraSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise products of float coefficient arrays of shape ``(..., dim)``."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=np.float64)
    for s, row in enumerate(spec.table):
        for t, (index, sign) in enumerate(row):
            if sign:
                out[..., index] += sign * a[..., s] * b[..., t]
    return out


def conj_array(spec: AlgebraSpec, a: np.ndarray) -> np.ndarray:
    return np.asarray(a, dtype=np.float64) * np.asarray(spec.conj_signs, dtype=np.float64)


# -- presets ----------------------------------------------------------


def _blade_order(n: int) -> list[int]:
    masks = list(range(1 << n))
    masks.sort(key=lambda m: (bin(m).count("1"), [i for i in range(n) if m >> i & 1]))
    return masks


def _blade_sign(a: int, b: int) -> int:
    """Sign of ``e_A e_B`` in ``Cl(0,n)`` relative to ``e_{A xor B}``."""
    swaps = 0
    shifted = a >> 1
    while shifted:
        swaps += bin(shifted & b).count("1")
        shifted >>= 1
    swaps += bin(a & b).count("1")  # e_s^2 = -1
    return -1 if swaps & 1 else 1


def _blade_label(mask: int, n: int) -> str:
    if mask == 0:
        return "1"
    indices = [str(i + 1) for i in range(n) if mask >> i & 1]
    return "e" + ("_".join(indices) if n >= 10 else "".join(indices))


def _clifford(n: int, name: str, labels: Sequence[str] | None = None) -> AlgebraSpec:
    masks = _blade_order(n)
    position = {m: i for i, m in enumerate(masks)}
    table = tuple(
        tuple((position[a ^ b], _blade_sign(a, b)) for b in masks) for a in masks
    )
    conj_signs = []
    for m in masks:
        r = bin(m).count("1")
        conj_signs.append((-1) ** r * (-1) ** (r * (r - 1) // 2))
    return AlgebraSpec(
        name=name,
        dim=1 << n,
        labels=tuple(labels) if labels is not None else tuple(_blade_label(m, n) for m in masks),
        table=table,
        conj_signs=tuple(conj_signs),
        associative=True,
    )


def _cayley_dickson(base: AlgebraSpec, name: str, new_unit: str) -> AlgebraSpec:
    """Double *base* with ``(a,b)(c,d) = (ac - d^c b, d a + b c^c)``.

    Basis element ``d + s`` is ``l v_s = (0, v_s^c)``, so the labels read
    ``l, l i, l j, ...`` for ``l = (0, 1)``.
    """
    d = base.dim
    pair_sign = [1] * d + list(base.conj_signs)

    def as_pair(index: int) -> tuple[int, int, int]:
        return (0, index, 1) if index < d else (1, index - d, pair_sign[index])

    def base_mul(s: int, t: int, conj_left: bool, conj_right: bool) -> tuple[int, int]:
        index, sign = base.table[s][t]
        if conj_left:
            sign *= base.conj_signs[s]
        if conj_right:
            sign *= base.conj_signs[t]
        return index, sign

    table: list[tuple[ProductEntry, ...]] = []
    for a in range(2 * d):
        pa, sa, ga = as_pair(a)
        row: list[ProductEntry] = []
        for b in range(2 * d):
            pb, sb, gb = as_pair(b)
            if pa == 0 and pb == 0:
                part, (index, sign) = 0, base_mul(sa, sb, False, False)
            elif pa == 0:
                part, (index, sign) = 1, base_mul(sb, sa, False, False)
                sign *= gb
            elif pb == 0:
                part, (index, sign) = 1, base_mul(sa, sb, False, True)
                sign *= ga
            else:
                part, (index, sign) = 0, base_mul(sb, sa, True, False)
                sign *= -ga * gb
            if part == 0:
                row.append((index, sign))
            else:
                row.append((d + index, sign * pair_sign[d + index]))
        table.append(tuple(row))

    labels = list(base.labels) + [
        new_unit if label == "1" else f"{new_unit}{label}" for label in base.labels
    ]
    conj_signs = list(base.conj_signs) + [-1] * d
    return AlgebraSpec(
        name=name,
        dim=2 * d,
        labels=tuple(labels),
        table=tuple(table),
        conj_signs=tuple(conj_signs),
        associative=False,
    )


@functools.lru_cache(maxsize=None)
def make_algebra(preset: Preset | str, n: int | None = None) -> AlgebraSpec:
    """Build a preset algebra.

    ``Complex`` is ``Cl(0,1)`` with basis ``(1, i)``, ``Quaternions`` is
    ``Cl(0,2)`` relabelled ``(1, i, j, k)``, ``Octonions`` doubles the
    quaternions to ``(1, i, j, k, l, li, lj, lk)`` and ``Clifford0n`` is
    ``Cl(0,n)`` with blades ordered by grade and then lexicographically.
    """
    preset = Preset(preset)
    if preset is Preset.COMPLEX:
        spec = _clifford(1, "C", ("1", "i"))
    elif preset is Preset.QUATERNIONS:
        spec = _clifford(2, "H", ("1", "i", "j", "k"))
    elif preset is Preset.OCTONIONS:
        spec = _cayley_dickson(make_algebra(Preset.QUATERNIONS), "O", "l")
    else:
        if n is None or n < 1:
            msg = f"Clifford0n needs n >= 1, got {n}"
            raise InvalidParameterError(msg, n=n)
        spec = _clifford(n, f"Cl0{n}")
    logger.debug("algebra.built", algebra=spec.name, dim=spec.dim)
    return spec


_CLIFFORD_NAME = re.compile(r"^Cl0(?:\((\d+)\)|(\d+))$")

_ALIASES: dict[str, Preset] = {
    "C": Preset.COMPLEX,
    "Complex": Preset.COMPLEX,
    "H": Preset.QUATERNIONS,
    "Quaternions": Preset.QUATERNIONS,
    "O": Preset.OCTONIONS,
    "Octonions": Preset.OCTONIONS,
}


def algebra_by_name(name: str) -> AlgebraSpec:
    """Resolve ``"C"``, ``"H"``, ``"O"`` or ``"Cl0<n>"`` to a preset."""
    if name in _ALIASES:
        return make_algebra(_ALIASES[name])
    match = _CLIFFORD_NAME.match(name)
    if match:
        return make_algebra(Preset.CLIFFORD0N, int(match.group(1) or match.group(2)))
    msg = f"Unknown algebra name {name!r}"
    raise InvalidParameterError(msg, name=name)


# -- sampling and law checks ---------------------------------------------


def random_element(
    spec: AlgebraSpec,
    rng: np.random.Generator,
    backend: Backend = Backend.RATIONAL,
    *,
    bound: int = 9,
) -> Element:
    """Draw a random element: small rationals, or standard normal floats."""
    if backend is Backend.FLOAT64:
        return Element(spec, tuple(float(v) for v in rng.standard_normal(spec.dim)))
    nums = rng.integers(-bound, bound + 1, size=spec.dim)
    dens = rng.integers(1, 5, size=spec.dim)
    return Element(spec, tuple(Fraction(int(p), int(q)) for p, q in zip(nums, dens)))


@dataclass(frozen=True)
class LawReport:
    algebra: str
    antiautomorphism: bool
    involution: bool
    alternativity: bool
    samples: int
    failures: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return self.antiautomorphism and self.involution and self.alternativity


def check_laws(
    spec: AlgebraSpec,
    rng: np.random.Generator,
    samples: int = 200,
    backend: Backend = Backend.RATIONAL,
    tol: float = 1e-9,
) -> LawReport:
    """Check the *-algebra laws; failures are reported, never raised.

    The antiautomorphism law is enumerated on all basis pairs and sampled on
    random pairs; involutivity and both alternative laws are sampled.
    """
    failures: list[str] = []
    anti = invol = alt = True
    basis = [spec.basis(i) for i in range(spec.dim)]
    for s, a in enumerate(basis):
        for t, b in enumerate(basis):
            if conj(mul(a, b)) != mul(conj(b), conj(a)):
                anti = False
                failures.append(f"antiautomorphism fails on basis pair ({s}, {t})")
                break
        if not anti:
            break

    for k in range(samples):
        x = random_element(spec, rng, backend)
        y = random_element(spec, rng, backend)
        if anti and not close(conj(mul(x, y)), mul(conj(y), conj(x)), tol):
            anti = False
            failures.append(f"antiautomorphism fails on sample {k}")
        if invol and not close(conj(conj(x)), x, tol):
            invol = False
            failures.append(f"involution fails on sample {k}")
        if alt:
            if not close(mul(x, mul(x, y)), mul(mul(x, x), y), tol):
                alt = False
                failures.append(f"left alternativity x(xy) = x^2 y fails on sample {k}")
            elif not close(mul(mul(x, y), y), mul(x, mul(y, y)), tol):
                alt = False
                failures.append(f"right alternativity (xy)y = x y^2 fails on sample {k}")
    return LawReport(
        algebra=spec.name,
        antiautomorphism=anti,
        involution=invol,
        alternativity=alt,
        samples=samples,
        failures=tuple(failures),
    )
