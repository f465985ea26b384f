"""Surface quadrature check of the Cauchy integral formula on a (1,3) slice.

For a regular ``f`` and a ball ``B_J(y_0, R)`` of the slice ``span(1, i, J)``

    f(x) = 1/(4 pi) * integral over the boundary sphere of
           conj(y - x) / |y - x|^3 * n(y) * f(y) dA(y)

with ``n(y) = (y - y_0) / R`` the outward unit normal as a quaternion.  The
sphere is discretized with Gauss-Legendre nodes in the polar cosine and a
uniform rule in the azimuth.  Everything here is float64.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
import structlog

from fanreg.algebra import Element, conj, conj_array, mul_array
from fanreg.errors import CoincidentPointsError, InvalidParameterError, OutsideBallError
from fanreg.fan import slice_membership
from fanreg.polymap import PolyMap
from fanreg.quat13 import fan13, quaternions, torus_point

logger = structlog.get_logger(__name__)

DEFAULT_ORDER = 32
BOUNDARY_MARGIN = 0.05

Integrand = PolyMap | Callable[[Element], Element]


def cauchy_kernel(y: Element, x: Element) -> Element:
    """``conj(y - x) / (4 pi |y - x|^3)``."""
    diff = (y - x).to_float()
    if diff.is_zero(0.0):
        msg = f"Kernel is singular at y = x = {x}"
        raise CoincidentPointsError(msg, point=str(x))
    distance = math.sqrt(float(diff.euclidean_norm2()))
    return conj(diff).scale(1.0 / (4 * math.pi * distance**3))


@dataclass(frozen=True)
class QuadratureGrid:
    """Nodes on the boundary of ``B_J(center, radius)`` in standard coordinates."""

    J: Element
    center: Element
    radius: float
    order: int
    points: np.ndarray
    normals: np.ndarray
    weights: np.ndarray

    def __len__(self) -> int:
        return int(self.weights.shape[0])

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Weighted sum of per-node values of shape ``(N, ...)``."""
        weights = self.weights.reshape((-1,) + (1,) * (values.ndim - 1))
        return np.sum(values * weights, axis=0)


def _check_slice(J: Element, y: Element, what: str) -> None:
    if not slice_membership(fan13(), torus_point(J), y, 1e-9):
        msg = f"{what} {y} is not on the slice span(1, i, {J})"
        raise InvalidParameterError(msg, point=str(y), J=str(J))


def make_grid(J: Element, y0: Element, R: float, order: int = DEFAULT_ORDER) -> QuadratureGrid:
    """Product rule with ``order`` Gauss-Legendre nodes times ``2 * order`` azimuth nodes.

    The frame ``(1, i, J)`` maps the unit sphere of ``R^3`` onto the slice;
    each weight is ``R^2 * w_GL * 2 pi / (2 * order)``.
    """
    if order < 2:
        msg = f"Quadrature order must be at least 2, got {order}"
        raise InvalidParameterError(msg, order=order)
    if R <= 0:
        msg = f"Radius must be positive, got {R}"
        raise InvalidParameterError(msg, radius=R)
    _check_slice(J, y0, "Center")

    cos_theta, gl_weights = np.polynomial.legendre.leggauss(order)
    nphi = 2 * order
    phi = 2 * math.pi * np.arange(nphi) / nphi
    sin_theta = np.sqrt(1.0 - cos_theta**2)

    local = np.stack(
        [
            np.outer(sin_theta, np.cos(phi)).ravel(),
            np.outer(sin_theta, np.sin(phi)).ravel(),
            np.repeat(cos_theta, nphi),
        ],
        axis=1,
    )
    H = quaternions()
    frame = np.array([_as_float(H.one()), _as_float(H.basis(1)), _as_float(J)])
    normals = local @ frame
    center = _as_float(y0)
    points = center + R * normals
    weights = np.repeat(gl_weights, nphi) * (R * R * 2 * math.pi / nphi)
    return QuadratureGrid(J, y0, float(R), order, points, normals, weights)


def _values(f: Integrand, grid: QuadratureGrid) -> np.ndarray:
    if isinstance(f, PolyMap):
        return f.evaluate_array(grid.points)
    H = quaternions()
    return np.asarray(
        [[float(c) for c in f(H.element(row.tolist())).coeffs] for row in grid.points]
    )


def _as_float(x: Element) -> np.ndarray:
    return np.asarray([float(c) for c in x.coeffs])


def cauchy_reconstruct(
    f: Integrand,
    J: Element,
    y0: Element,
    R: float,
    x: Element,
    order: int = DEFAULT_ORDER,
    *,
    grid: QuadratureGrid | None = None,
) -> Element:
    """Approximate ``f(x)`` by the boundary integral over ``B_J(y0, R)``.

    Polynomial integrands are evaluated with numpy on all nodes at once;
    other callables node by node.  Products associate as kernel, normal, value.
    """
    _check_slice(J, x, "Point")
    distance = math.sqrt(float((x - y0).euclidean_norm2()))
    if distance >= R:
        msg = f"Point {x} is outside the open ball of radius {R} around {y0}"
        raise OutsideBallError(msg, point=str(x), radius=R, distance=distance)
    if R - distance < BOUNDARY_MARGIN * R:
        logger.warning(
            "cauchy.ill_conditioned", point=x, distance=distance, radius=R, margin=R - distance
        )
    grid = grid if grid is not None else make_grid(J, y0, R, order)

    H = quaternions()
    diff = grid.points - _as_float(x)
    dist = np.linalg.norm(diff, axis=1)
    kernel = conj_array(H, diff) / (4 * math.pi * dist**3)[:, None]
    integrand = mul_array(H, mul_array(H, kernel, grid.normals), _values(f, grid))
    total = grid.integrate(integrand)
    return H.element(float(v) for v in total)


@dataclass(frozen=True)
class ReconstructionRow:
    order: int
    point: str
    abs_error: float
    rel_error: float


def reconstruction_error(
    f: Integrand, J: Element, y0: Element, R: float, x: Element, order: int
) -> tuple[float, float]:
    """Absolute and relative error of :func:`cauchy_reconstruct` against ``f(x)``."""
    exact = _as_float(f(x))
    approx = _as_float(cauchy_reconstruct(f, J, y0, R, x, order))
    abs_error = float(np.linalg.norm(approx - exact))
    scale = float(np.linalg.norm(exact))
    return abs_error, abs_error / scale if scale > 0 else abs_error


def reconstruction_table(
    f: Integrand,
    J: Element,
    y0: Element,
    R: float,
    points: Sequence[Element],
    orders: Sequence[int] = (8, 16, 32),
) -> list[ReconstructionRow]:
    rows = []
    for order in orders:
        for x in points:
            abs_error, rel_error = reconstruction_error(f, J, y0, R, x, order)
            rows.append(ReconstructionRow(order, str(x), abs_error, rel_error))
    return rows


def interior_points(
    J: Element, count: int, max_radius: float = 0.7, seed: int = 0
) -> list[Element]:
    """Random float points of the slice ``span(1, i, J)`` with ``|x| <= max_radius``."""
    rng = np.random.default_rng(seed)
    H = quaternions()
    frame = [H.one().to_float(), H.basis(1).to_float(), J.to_float()]
    out: list[Element] = []
    for _ in range(count):
        direction = rng.standard_normal(3)
        direction /= np.linalg.norm(direction)
        radius = max_radius * float(rng.random()) ** (1 / 3)
        x = H.zero().to_float()
        for c, v in zip(direction * radius, frame):
            x = x + v.scale(float(c))
        out.append(x)
    return out
