"""Scalar backends.

Two scalar fields are supported throughout the package:

- ``rational``: :class:`fractions.Fraction`, exact.  Verification paths use it
  by default and compare with ``==``.
- ``float64``: Python floats (and numpy arrays in the vectorized paths).
  Comparisons always go through an explicit tolerance.

Integers are accepted wherever a rational is expected.
"""

from __future__ import annotations

import math
from enum import Enum
from fractions import Fraction

import structlog

from fanreg.errors import CodecError, InvalidParameterError

logger = structlog.get_logger(__name__)

Scalar = Fraction | float | int

DEFAULT_TOLERANCE = 1e-12


class Backend(str, Enum):
    RATIONAL = "rational"
    FLOAT64 = "float64"


def is_exact(value: object) -> bool:
    return isinstance(value, (int, Fraction)) and not isinstance(value, bool)


def to_backend(value: Scalar, backend: Backend) -> Scalar:
    """Convert *value* to the scalar type of *backend*.

    Converting a float to the rational backend is exact in the binary
    sense (``Fraction(0.1)`` is not ``1/10``); callers that need decimal
    semantics should parse strings with :func:`parse_scalar` instead.
    """
    if backend is Backend.FLOAT64:
        return float(value)
    if isinstance(value, float):
        return Fraction(value)
    return Fraction(value)


def parse_scalar(text: str | int | float) -> Scalar:
    """Parse ``"p/q"``, ``"p"`` or a JSON number into a scalar.

    Strings produce exact rationals; JSON floats stay floats.
    """
    if isinstance(text, bool):
        msg = f"Booleans are not scalars: {text!r}"
        raise CodecError(msg, value=text)
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        return text
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        msg = f"Malformed rational {text!r}"
        raise CodecError(msg, value=text) from exc


def format_scalar(value: Scalar) -> str | float:
    """Format a scalar for JSON: rationals as ``"p/q"`` (``"p"`` when integral)."""
    if isinstance(value, float):
        return value
    frac = Fraction(value)
    if frac.denominator == 1:
        return str(frac.numerator)
    return f"{frac.numerator}/{frac.denominator}"


def is_zero(value: Scalar, tol: float = DEFAULT_TOLERANCE) -> bool:
    if is_exact(value):
        return value == 0
    return abs(value) <= tol


def exact_sqrt(value: Scalar) -> Fraction | None:
    """Return the exact rational square root of *value*, or ``None``."""
    if not is_exact(value):
        return None
    frac = Fraction(value)
    if frac < 0:
        return None
    num = math.isqrt(frac.numerator)
    den = math.isqrt(frac.denominator)
    if num * num == frac.numerator and den * den == frac.denominator:
        return Fraction(num, den)
    return None


def sqrt(value: Scalar) -> Scalar:
    """Square root, exact when *value* is a rational perfect square.

    Other rationals fall back to a float and log ``scalars.sqrt_inexact``.
    """
    if value < 0:
        msg = f"Square root of negative scalar {value}"
        raise InvalidParameterError(msg, value=format_scalar(value))
    root = exact_sqrt(value)
    if root is not None:
        return root
    if is_exact(value):
        logger.debug("scalars.sqrt_inexact", value=format_scalar(value))
    return math.sqrt(float(value))


def _rational_iter(limit: int) -> list[Fraction]:
    out: list[Fraction] = [Fraction(0)]
    height = 1
    while len(out) < limit:
        level = sorted(
            {
                Fraction(p, q)
                for p in range(1, height + 1)
                for q in range(1, height + 1)
                if max(p, q) == height and math.gcd(p, q) == 1
            }
        )
        for frac in level:
            out.extend((frac, -frac))
        height += 1
    return out[:limit]


def rational_parameters(count: int) -> list[Fraction]:
    """Return the first *count* grid parameters.

    The sequence is ``0, 1, -1, 1/2, -1/2, 2, -2, 1/3, -1/3, 2/3, ...``:
    nonzero rationals ``p/q`` are ordered by ``max(p, q)`` and then by value.
    """
    if count < 1:
        msg = f"Grid density must be positive, got {count}"
        raise InvalidParameterError(msg, density=count)
    return _rational_iter(count)
