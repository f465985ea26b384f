"""T-fans, T-tori and the slice decomposition of points.

A step list ``T = (t_0, ..., t_tau)`` with ``0 <= t_0 < ... < t_tau = n`` over a
hypercomplex basis ``(v_0, ..., v_n)`` splits the basis into the mirror
``v_0..v_{t_0}`` and ``tau`` blocks ``v_{t_{h-1}+1}..v_{t_h}``.  The T-torus is
the product of the unit spheres of the blocks, and every point decomposes as
``x = x^0 + beta_1 J_1 + ... + beta_tau J_tau``.
"""

from __future__ import annotations

import itertools
import re
from abc import ABC, abstractmethod
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import structlog

from fanreg.algebra import AlgebraSpec, Element, close, in_sphere
from fanreg.errors import InvalidParameterError, OutsideSpanError
from fanreg.hypercomplex import (
    HypercomplexBasis,
    coordinates,
    make_basis,
    make_hat_subspace,
    make_paravectors,
    make_Vh,
    named_basis,
    span_element,
)
from fanreg.scalars import DEFAULT_TOLERANCE, Scalar, is_exact, is_zero, rational_parameters, sqrt

logger = structlog.get_logger(__name__)

DEFAULT_GRID_DENSITY = 8
DEFAULT_SEED = 0
FLOAT_SPHERE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class TFan:
    basis: HypercomplexBasis
    steps: tuple[int, ...]
    name: str = ""

    @property
    def algebra(self) -> AlgebraSpec:
        return self.basis.algebra

    @property
    def n(self) -> int:
        return self.basis.m

    @property
    def tau(self) -> int:
        return len(self.steps) - 1

    @property
    def t0(self) -> int:
        return self.steps[0]

    @property
    def mirror_dim(self) -> int:
        return self.t0 + 1

    @property
    def torus_dim(self) -> int:
        return self.n - self.t0 - self.tau

    @property
    def slice_dim(self) -> int:
        """Number of slice coordinates ``x_0..x_{t_0}, beta_1..beta_tau``."""
        return self.t0 + self.tau + 1

    def block(self, h: int) -> range:
        """Basis indices of block ``h`` (1-based)."""
        if not 1 <= h <= self.tau:
            msg = f"Block index {h} out of range 1..{self.tau}"
            raise InvalidParameterError(msg, h=h)
        return range(self.steps[h - 1] + 1, self.steps[h] + 1)

    @property
    def sphere_dims(self) -> tuple[int, ...]:
        return tuple(len(self.block(h)) - 1 for h in range(1, self.tau + 1))

    @property
    def mirror_vectors(self) -> tuple[Element, ...]:
        return self.basis.vectors[: self.t0 + 1]

    def __str__(self) -> str:
        return self.name or f"{self.basis.name}:{self.steps}"


def make_fan(basis: HypercomplexBasis, steps: Sequence[int], *, name: str = "") -> TFan:
    """Validate ``0 <= t_0 < t_1 < ... < t_tau = n`` and build the fan."""
    steps = tuple(int(t) for t in steps)
    n = basis.m
    if not steps:
        msg = "A fan needs at least one step"
        raise InvalidParameterError(msg, steps=[])
    if steps[0] < 0:
        msg = f"Steps must be nonnegative, got {steps}"
        raise InvalidParameterError(msg, steps=list(steps))
    if any(a >= b for a, b in zip(steps, steps[1:])):
        msg = f"Steps must be strictly increasing, got {steps}"
        raise InvalidParameterError(msg, steps=list(steps))
    if steps[-1] != n:
        msg = f"Last step must equal n = {n}, got {steps}"
        raise InvalidParameterError(msg, steps=list(steps), n=n)
    label = name or f"{basis.name}:({','.join(map(str, steps))})"
    return TFan(basis, steps, label)


@dataclass(frozen=True)
class TorusPoint:
    """``J = (J_1, ..., J_tau)`` with ``J_h`` a unit of block ``h``."""

    fan: TFan
    J: tuple[Element, ...]

    def __post_init__(self) -> None:
        if len(self.J) != self.fan.tau:
            msg = f"Torus point needs {self.fan.tau} units, got {len(self.J)}"
            raise InvalidParameterError(msg, tau=self.fan.tau, got=len(self.J))
        for h, unit in enumerate(self.J, start=1):
            exact = unit.is_exact
            tol = DEFAULT_TOLERANCE if exact else FLOAT_SPHERE_TOLERANCE
            coords = coordinates(self.fan.basis, unit, tol)
            block = self.fan.block(h)
            if any(not is_zero(c, tol) for i, c in enumerate(coords) if i not in block):
                msg = f"J_{h} = {unit} has support outside block {h}"
                raise InvalidParameterError(msg, h=h, unit=str(unit))
            if not in_sphere(unit, tol):
                msg = f"J_{h} = {unit} is not an imaginary unit"
                raise InvalidParameterError(msg, h=h, unit=str(unit))

    @property
    def is_exact(self) -> bool:
        return all(unit.is_exact for unit in self.J)

    def block_coords(self, h: int) -> tuple[Scalar, ...]:
        coords = coordinates(self.fan.basis, self.J[h - 1], 1e-9)
        return tuple(coords[i] for i in self.fan.block(h))

    def flipped(self, h: int) -> TorusPoint:
        """The point with ``J_h`` replaced by ``-J_h``."""
        units = list(self.J)
        units[h - 1] = -units[h - 1]
        return TorusPoint(self.fan, tuple(units))

    def __str__(self) -> str:
        return "(" + ", ".join(str(u) for u in self.J) + ")"


@dataclass(frozen=True)
class SlicePoint:
    x0: Element
    betas: tuple[Scalar, ...]
    J: TorusPoint

    @property
    def fan(self) -> TFan:
        return self.J.fan

    @property
    def is_exact(self) -> bool:
        """False when an irrational ``beta_h`` forced a float fallback."""
        return self.x0.is_exact and all(is_exact(b) for b in self.betas) and self.J.is_exact

    def slice_coords(self) -> tuple[Scalar, ...]:
        """``(x_0, ..., x_{t_0}, beta_1, ..., beta_tau)``."""
        mirror = coordinates(self.fan.basis, self.x0, 1e-9)[: self.fan.t0 + 1]
        return (*mirror, *self.betas)


def slice_point(fan: TFan, coords: Sequence[Scalar], J: TorusPoint) -> SlicePoint:
    """Build a slice point from slice coordinates."""
    if len(coords) != fan.slice_dim:
        msg = f"Expected {fan.slice_dim} slice coordinates, got {len(coords)}"
        raise InvalidParameterError(msg, expected=fan.slice_dim, got=len(coords))
    mirror = list(coords[: fan.t0 + 1]) + [0] * (fan.n - fan.t0)
    return SlicePoint(span_element(fan.basis, mirror), tuple(coords[fan.t0 + 1 :]), J)


def decompose(fan: TFan, x: Element, tol: float = DEFAULT_TOLERANCE) -> SlicePoint:
    """Split *x* as ``x^0 + sum beta_h J_h`` with ``beta_h >= 0``.

    When the block part ``x^h`` vanishes, ``beta_h = 0`` and ``J_h`` is the
    first basis vector of the block.

    An exact *x* with an irrational ``beta_h`` yields a float point whose
    ``is_exact`` is False.
    """
    coords = coordinates(fan.basis, x, tol if x.is_exact else 1e-9)
    vectors = fan.basis.vectors
    mirror = list(coords[: fan.t0 + 1]) + [0] * (fan.n - fan.t0)
    x0 = span_element(fan.basis, mirror)
    betas: list[Scalar] = []
    units: list[Element] = []
    for h in range(1, fan.tau + 1):
        block = fan.block(h)
        part = [coords[i] for i in block]
        square = sum((c * c for c in part), start=0)
        if is_zero(square, tol * tol):
            betas.append(0)
            units.append(vectors[block[0]])
            continue
        beta = sqrt(square)
        betas.append(beta)
        unit = fan.algebra.zero()
        for i, c in zip(block, part):
            unit = unit + vectors[i].scale(c / beta)
        units.append(unit)
    point = SlicePoint(x0, tuple(betas), TorusPoint(fan, tuple(units)))
    if x.is_exact and not point.is_exact:
        logger.debug("fan.decompose_inexact", fan=str(fan), x=str(x), betas=point.betas)
    return point


def recompose(point: SlicePoint) -> Element:
    x = point.x0
    for beta, unit in zip(point.betas, point.J.J):
        if beta != 0:
            x = x + unit.scale(beta)
    return x


@dataclass(frozen=True)
class SymmetricOrbit:
    """``S_x = {x^0 + sum beta_h J_h : J in T}`` for a fixed ``(x^0, beta)``."""

    fan: TFan
    x0: Element
    betas: tuple[Scalar, ...]

    def point(self, J: TorusPoint) -> Element:
        return recompose(SlicePoint(self.x0, self.betas, J))

    def contains(self, y: Element, tol: float = DEFAULT_TOLERANCE) -> bool:
        try:
            other = decompose(self.fan, y, tol)
        except OutsideSpanError:
            return False
        if not close(other.x0, self.x0, tol):
            return False
        return all(
            is_zero(a * a - b * b, tol) for a, b in zip(self.betas, other.betas)
        )


def symmetric_orbit(fan: TFan, x: Element) -> SymmetricOrbit:
    point = decompose(fan, x)
    return SymmetricOrbit(fan, point.x0, point.betas)


def slice_basis(fan: TFan, J: TorusPoint) -> HypercomplexBasis:
    """``B_J = (v_0, ..., v_{t_0}, J_1, ..., J_tau)``, a hypercomplex basis of the slice."""
    vectors = (*fan.mirror_vectors, *J.J)
    return make_basis(vectors, name=f"{fan}|J={J}", completion=())


def slice_membership(fan: TFan, J: TorusPoint, x: Element, tol: float = DEFAULT_TOLERANCE) -> bool:
    """Whether *x* lies in ``R_J = Span(B_J)``; invariant under ``J_h -> -J_h``."""
    try:
        coords = coordinates(fan.basis, x, tol if x.is_exact else 1e-9)
    except OutsideSpanError:
        return False
    for h in range(1, fan.tau + 1):
        part = [coords[i] for i in fan.block(h)]
        unit = J.block_coords(h)
        dot = sum((a * b for a, b in zip(part, unit)), start=0)
        if any(not is_zero(a - dot * b, tol) for a, b in zip(part, unit)):
            return False
    return True


def same_slice(J: TorusPoint, other: TorusPoint) -> bool:
    """``R_J = R_J'`` iff ``J'_h = +-J_h`` for every block."""
    return all(a == b or a == -b for a, b in zip(J.J, other.J))


# -- torus sampling ---------------------------------------------------------


@dataclass(frozen=True)
class RationalGrid:
    """Exact unit vectors from inverse stereographic projection of rational tuples."""

    density: int = DEFAULT_GRID_DENSITY
    limit: int = 512


@dataclass(frozen=True)
class RandomSample:
    """Float64 unit vectors from normalized Gaussian draws."""

    seed: int = DEFAULT_SEED
    count: int = 8


Sampler = RationalGrid | RandomSample


def sphere_point(params: Sequence[Scalar]) -> tuple[Scalar, ...]:
    """Inverse stereographic projection ``R^d -> S^d``.

    ``u -> ((1 - |u|^2), 2 u_1, ..., 2 u_d) / (1 + |u|^2)``; on a circle this is
    ``((1 - t^2) / (1 + t^2), 2t / (1 + t^2))``.
    """
    s = sum((Fraction(u) * u if is_exact(u) else u * u for u in params), start=0)
    den = 1 + s
    return ((1 - s) / den, *(2 * u / den for u in params))


def _block_grid(fan: TFan, h: int, grid: RationalGrid) -> list[Element]:
    block = fan.block(h)
    vectors = fan.basis.vectors
    if len(block) == 1:
        unit = vectors[block[0]]
        return [unit, -unit]
    params = rational_parameters(grid.density)
    points: list[Element] = []
    for tup in itertools.islice(itertools.product(params, repeat=len(block) - 1), grid.limit):
        coords = sphere_point(tup)
        unit = fan.algebra.zero()
        for i, c in zip(block, coords):
            if c != 0:
                unit = unit + vectors[i].scale(c)
        points.append(unit)
    return points


def _block_random(fan: TFan, h: int, rng: np.random.Generator) -> Element:
    block = fan.block(h)
    vectors = fan.basis.vectors
    if len(block) == 1:
        sign = 1.0 if rng.random() < 0.5 else -1.0
        return vectors[block[0]].scale(sign)
    draw = rng.standard_normal(len(block))
    draw = draw / np.linalg.norm(draw)
    unit = fan.algebra.zero().to_float()
    for i, c in zip(block, draw):
        unit = unit + vectors[i].scale(float(c))
    return unit


def torus_sample(fan: TFan, strategy: Sampler | None = None) -> list[TorusPoint]:
    """Sample the T-torus; for ``tau = 0`` the single empty point is returned."""
    strategy = strategy if strategy is not None else RationalGrid()
    if fan.tau == 0:
        return [TorusPoint(fan, ())]
    if isinstance(strategy, RandomSample):
        rng = np.random.default_rng(strategy.seed)
        return [
            TorusPoint(fan, tuple(_block_random(fan, h, rng) for h in range(1, fan.tau + 1)))
            for _ in range(strategy.count)
        ]
    blocks = [_block_grid(fan, h, strategy) for h in range(1, fan.tau + 1)]
    points = [
        TorusPoint(fan, combo)
        for combo in itertools.islice(itertools.product(*blocks), strategy.limit)
    ]
    logger.debug("fan.torus_sampled", fan=str(fan), points=len(points))
    return points


def iter_sign_points(fan: TFan) -> Iterator[TorusPoint]:
    """All torus points of a fan whose blocks are single vectors."""
    if any(d != 0 for d in fan.sphere_dims):
        msg = f"Fan {fan} has a positive-dimensional torus"
        raise InvalidParameterError(msg, fan=str(fan))
    yield from torus_sample(fan, RationalGrid(1))


# -- names ----------------------------------------------------------------

_FAN_NAME = re.compile(r"^(?P<alg>[^:]+)(?::(?P<sub>[^:]+))?:\((?P<steps>[0-9,\s]*)\)$")
_CLIFFORD = re.compile(r"^Cl0(\d+)$")


def basis_from_name(alg: str, subspace: str | None = None) -> HypercomplexBasis:
    """Resolve ``H``, ``H-MT``, ``H-kji``, ``O``, ``C`` or ``Cl0<n>[:subspace]``.

    Clifford subspaces are ``paravectors`` (default), ``V<h>`` and ``hat<m>``.
    """
    match = _CLIFFORD.match(alg)
    if match is None:
        if subspace is not None:
            msg = f"Algebra {alg!r} takes no subspace, got {subspace!r}"
            raise InvalidParameterError(msg, algebra=alg, subspace=subspace)
        return named_basis(alg)
    n = int(match.group(1))
    sub = subspace or "paravectors"
    if sub == "paravectors":
        return make_paravectors(n)
    if sub.startswith("V") and sub[1:].isdigit():
        return make_Vh(n, int(sub[1:]))
    if sub.startswith("hat") and sub[3:].isdigit():
        return make_hat_subspace(n, int(sub[3:]))
    msg = f"Unknown subspace {sub!r} for {alg}"
    raise InvalidParameterError(msg, algebra=alg, subspace=sub)


def fan_from_name(name: str) -> TFan:
    """Parse ``"ALGEBRA[:SUBSPACE]:(t_0,...,t_tau)"``, e.g. ``"H:(1,3)"``."""
    match = _FAN_NAME.match(name.strip())
    if match is None:
        msg = f"Malformed fan name {name!r}; expected e.g. 'H:(1,3)'"
        raise InvalidParameterError(msg, name=name)
    steps_text = match.group("steps").strip()
    if not steps_text:
        msg = f"Fan name {name!r} has no steps"
        raise InvalidParameterError(msg, name=name)
    steps = [int(part) for part in steps_text.split(",")]
    basis = basis_from_name(match.group("alg"), match.group("sub"))
    return make_fan(basis, steps, name=name.strip())


# -- T-symmetric domains ----------------------------------------------------------


class SymmetricDomain(ABC):
    """A T-symmetric set ``Omega_D`` given by a predicate on ``(x^0, beta)``."""

    fan: TFan

    @abstractmethod
    def member(self, x0: Element, betas: Sequence[Scalar]) -> bool: ...

    @abstractmethod
    def is_slice_domain(self) -> bool: ...

    def contains(self, x: Element) -> bool:
        try:
            point = decompose(self.fan, x)
        except OutsideSpanError:
            return False
        return self.member(point.x0, point.betas)

    def _distance2(self, x0: Element, center: Element, betas: Sequence[Scalar]) -> Scalar:
        diff = coordinates(self.fan.basis, x0 - center, 1e-9)
        return sum((c * c for c in diff), start=0) + sum((b * b for b in betas), start=0)


def _check_mirror(fan: TFan, center: Element) -> None:
    coords = coordinates(fan.basis, center, 1e-9)
    if any(c != 0 for c in coords[fan.t0 + 1 :]):
        msg = f"Center {center} is not on the mirror of {fan}"
        raise InvalidParameterError(msg, center=str(center))


@dataclass(frozen=True)
class MirrorBall(SymmetricDomain):
    """Open ball centered on the mirror."""

    fan: TFan
    center: Element
    radius: Scalar

    def __post_init__(self) -> None:
        _check_mirror(self.fan, self.center)
        if self.radius <= 0:
            msg = f"Radius must be positive, got {self.radius}"
            raise InvalidParameterError(msg, radius=str(self.radius))

    def member(self, x0: Element, betas: Sequence[Scalar]) -> bool:
        return bool(self._distance2(x0, self.center, betas) < self.radius * self.radius)

    def is_slice_domain(self) -> bool:
        return True


@dataclass(frozen=True)
class MirrorShell(SymmetricDomain):
    """Open spherical shell ``inner < |x - center| < outer`` centered on the mirror."""

    fan: TFan
    center: Element
    inner: Scalar
    outer: Scalar

    def __post_init__(self) -> None:
        _check_mirror(self.fan, self.center)
        if not 0 <= self.inner < self.outer:
            msg = f"Need 0 <= inner < outer, got {self.inner}, {self.outer}"
            raise InvalidParameterError(msg, inner=str(self.inner), outer=str(self.outer))

    def member(self, x0: Element, betas: Sequence[Scalar]) -> bool:
        d2 = self._distance2(x0, self.center, betas)
        return bool(self.inner * self.inner < d2 < self.outer * self.outer)

    def is_slice_domain(self) -> bool:
        # Slice sections are shells of dimension slice_dim, connected from 2 on.
        return self.fan.slice_dim >= 2
