"""Hypercomplex bases and subspaces.

A hypercomplex basis ``(v_0, ..., v_m)`` of a subspace ``M`` has ``v_0 = 1``
and pairwise anticommuting imaginary units ``v_1, ..., v_m`` that are
orthogonal for the trace form: ``t(v_s) = 0``, ``n(v_s) = 1`` and
``t(v_s v_t^c) = 0``.  :func:`verify_basis` checks these conditions exactly
and reports the first violation as a value.
"""

from __future__ import annotations

import itertools
from collections.abc import Sequence
from dataclasses import dataclass, field

import structlog

from fanreg.algebra import (
    AlgebraSpec,
    Element,
    Preset,
    close,
    conj,
    in_quadratic_cone,
    is_real,
    make_algebra,
    mul,
    norm_form,
    trace,
)
from fanreg.errors import (
    InvalidParameterError,
    NotExtendableError,
    OutsideSpanError,
    UnsupportedAlgebraError,
)
from fanreg.scalars import DEFAULT_TOLERANCE, Scalar

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class BasisViolation:
    """First failed condition of :func:`verify_basis`.

    ``condition`` is one of ``"empty"``, ``"algebra-mismatch"``, ``"identity"``,
    ``"too-short"``, ``"trace"``, ``"norm"``, ``"orthogonality"`` or
    ``"anticommutation"``; ``value`` is the offending algebra element when
    there is one.
    """

    condition: str
    indices: tuple[int, ...]
    value: Element | None = None


@dataclass(frozen=True)
class BasisCheck:
    violation: BasisViolation | None = None

    @property
    def ok(self) -> bool:
        return self.violation is None

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class HypercomplexBasis:
    """Ordered vectors ``(v_0, ..., v_m)`` of *algebra*.

    ``completion`` lists the extra vectors of the canonical completion
    ``B'`` to a basis of the whole algebra; for the presets it is the rest of
    the standard basis.
    """

    algebra: AlgebraSpec
    vectors: tuple[Element, ...]
    verified: bool = False
    name: str = ""
    completion: tuple[Element, ...] = field(default=(), compare=False)

    @property
    def m(self) -> int:
        return len(self.vectors) - 1

    @property
    def dim(self) -> int:
        return len(self.vectors)


def _zero_tolerant(value: Element, tol: float) -> bool:
    return value.is_zero(tol)


def verify_basis(vectors: Sequence[Element], tol: float = DEFAULT_TOLERANCE) -> BasisCheck:
    """Check ``v_0 = 1``, ``m >= 1``, sphere membership, orthogonality, anticommutation.

    Conditions are checked in that order and the first failure is returned.
    Exact inputs are compared exactly; float inputs use *tol*.
    """
    if not vectors:
        return BasisCheck(BasisViolation("empty", ()))
    spec = vectors[0].algebra
    for s, v in enumerate(vectors):
        if v.algebra != spec:
            return BasisCheck(BasisViolation("algebra-mismatch", (s,)))
    if not close(vectors[0], spec.one(), tol):
        return BasisCheck(BasisViolation("identity", (0,), vectors[0]))
    if len(vectors) < 2:
        return BasisCheck(BasisViolation("too-short", ()))

    for s in range(1, len(vectors)):
        t = trace(vectors[s])
        if not _zero_tolerant(t, tol):
            return BasisCheck(BasisViolation("trace", (s,), t))
        n = norm_form(vectors[s])
        if not close(n, spec.one(), tol):
            return BasisCheck(BasisViolation("norm", (s,), n))

    for s, t in itertools.combinations(range(1, len(vectors)), 2):
        cross = trace(mul(vectors[s], conj(vectors[t])))
        if not _zero_tolerant(cross, tol):
            return BasisCheck(BasisViolation("orthogonality", (s, t), cross))

    for s, t in itertools.combinations(range(1, len(vectors)), 2):
        anti = mul(vectors[s], vectors[t]) + mul(vectors[t], vectors[s])
        if not _zero_tolerant(anti, tol):
            return BasisCheck(BasisViolation("anticommutation", (s, t), anti))
    return BasisCheck()


def _standard_completion(spec: AlgebraSpec, vectors: Sequence[Element]) -> tuple[Element, ...]:
    used = {v.support()[0] for v in vectors if len(v.support()) == 1}
    return tuple(spec.basis(i) for i in range(spec.dim) if i not in used)


def make_basis(
    vectors: Sequence[Element],
    *,
    name: str = "",
    completion: Sequence[Element] | None = None,
) -> HypercomplexBasis:
    """Verify *vectors* and wrap them; raises when verification fails."""
    check = verify_basis(vectors)
    if not check.ok:
        assert check.violation is not None
        msg = (
            f"Not a hypercomplex basis: condition {check.violation.condition!r} fails "
            f"at {check.violation.indices}"
        )
        raise InvalidParameterError(
            msg, condition=check.violation.condition, indices=list(check.violation.indices)
        )
    spec = vectors[0].algebra
    comp = tuple(completion) if completion is not None else _standard_completion(spec, vectors)
    return HypercomplexBasis(spec, tuple(vectors), True, name, comp)


def hat_extension(basis: HypercomplexBasis) -> HypercomplexBasis:
    """Append ``v_hat = v_1 ... v_m`` (left to right) and re-verify.

    Succeeds exactly when ``m = 2 mod 4``.  Otherwise raises
    :class:`NotExtendableError` naming the first failed requirement among
    ``t(v_hat) = 0``, ``n(v_hat) = 1`` and ``t(v_l v_hat^c) = 0``.
    """
    spec = basis.algebra
    if not spec.associative:
        msg = f"Hat extension needs an associative algebra; {spec.name} is not"
        raise UnsupportedAlgebraError(msg, algebra=spec.name)
    if not basis.verified:
        check = verify_basis(basis.vectors)
        if not check.ok:
            assert check.violation is not None
            msg = f"Input is not a hypercomplex basis ({check.violation.condition})"
            raise InvalidParameterError(msg, condition=check.violation.condition)

    hat = spec.one()
    for v in basis.vectors[1:]:
        hat = mul(hat, v)

    m = basis.m
    if not trace(hat).is_zero():
        msg = f"t(v_hat) != 0 for m = {m}"
        raise NotExtendableError(msg, condition="trace", m=m)
    if norm_form(hat) != spec.one():
        msg = f"n(v_hat) != 1 for m = {m}"
        raise NotExtendableError(msg, condition="norm", m=m)
    for ell, v in enumerate(basis.vectors[1:], start=1):
        if not trace(mul(v, conj(hat))).is_zero():
            msg = f"t(v_{ell} v_hat^c) != 0 for m = {m}"
            raise NotExtendableError(msg, condition="orthogonality", m=m, index=ell)

    vectors = (*basis.vectors, hat)
    check = verify_basis(vectors)
    if not check.ok:
        assert check.violation is not None
        msg = f"Extended family fails {check.violation.condition!r} for m = {m}"
        raise NotExtendableError(msg, condition=check.violation.condition, m=m)
    logger.debug("hypercomplex.hat_extended", algebra=spec.name, m=m)
    name = f"{basis.name}^" if basis.name else ""
    completion = tuple(c for c in basis.completion if c != hat and c != -hat)
    return HypercomplexBasis(spec, vectors, True, name, completion)


def make_paravectors(n: int) -> HypercomplexBasis:
    """The paravector subspace ``R^{n+1} = Span(e_0, e_1, ..., e_n)`` of ``Cl(0,n)``."""
    spec = make_algebra(Preset.CLIFFORD0N, n)
    vectors = [spec.one()] + [spec.basis(i) for i in range(1, n + 1)]
    return make_basis(vectors, name=f"Cl0{n}:paravectors")


def h_of_n(n: int) -> int:
    """The ``h = 1 mod 4`` in ``1..n`` maximising ``dim V_h`` (ties go to the larger h)."""
    return 4 * ((n + 2) // 8) + 1


def make_Vh(n: int, h: int) -> HypercomplexBasis:  # noqa: N802
    """``V_h = Span(e_0, all degree-h blades)`` in ``Cl(0,n)``, for ``h = 1 mod 4``."""
    if not 1 <= h <= n:
        msg = f"Need 1 <= h <= n, got h={h}, n={n}"
        raise InvalidParameterError(msg, n=n, h=h)
    if h % 4 != 1:
        msg = f"V_h is hypercomplex only for h = 1 mod 4, got h={h}"
        raise InvalidParameterError(msg, n=n, h=h)
    spec = make_algebra(Preset.CLIFFORD0N, n)
    vectors = [spec.one()] + [
        spec.basis(i) for i in range(1, spec.dim) if blade_grade(spec.labels[i], n) == h
    ]
    return make_basis(vectors, name=f"Cl0{n}:V{h}")


def blade_grade(label: str, n: int) -> int:
    if label == "1":
        return 0
    return label.count("_") + 1 if n >= 10 else len(label) - 1


def make_hat_subspace(n: int, m: int) -> HypercomplexBasis:
    """``Span(e_0, e_1, ..., e_m, e_1...e_m)`` in ``Cl(0,n)`` for ``m = 2 mod 4``."""
    if not 1 <= m <= n:
        msg = f"Need 1 <= m <= n, got m={m}, n={n}"
        raise InvalidParameterError(msg, n=n, m=m)
    spec = make_algebra(Preset.CLIFFORD0N, n)
    vectors = [spec.one()] + [spec.basis(i) for i in range(1, m + 1)]
    return hat_extension(make_basis(vectors, name=f"Cl0{n}:hat{m}"))


# -- inner products -------------------------------------------------------


def coordinates(
    basis: HypercomplexBasis, x: Element, tol: float = DEFAULT_TOLERANCE
) -> tuple[Scalar, ...]:
    """Coordinates of *x* in *basis*; raises when *x* is outside the span.

    Uses ``<x, v_s> = Re(x v_s^c)``, valid because a hypercomplex basis is
    orthonormal for the standard inner product of each preset.
    """
    coords = tuple(mul(x, conj(v)).real for v in basis.vectors)
    if not close(span_element(basis, coords), x, tol):
        msg = f"{x} is outside the span of basis {basis.name or basis.vectors}"
        raise OutsideSpanError(msg, element=str(x))
    return coords


def span_element(basis: HypercomplexBasis, coords: Sequence[Scalar]) -> Element:
    if len(coords) != basis.dim:
        msg = f"Expected {basis.dim} coordinates, got {len(coords)}"
        raise InvalidParameterError(msg, expected=basis.dim, got=len(coords))
    out = basis.algebra.zero()
    for c, v in zip(coords, basis.vectors):
        if c != 0:
            out = out + v.scale(c)
    return out


def inner_product(basis: HypercomplexBasis, x: Element, y: Element) -> Scalar:
    cx = coordinates(basis, x)
    cy = coordinates(basis, y)
    return sum((a * b for a, b in zip(cx, cy)), start=0)


def inner_product_identity(basis: HypercomplexBasis, x: Element, y: Element) -> bool:
    """Check ``t(x y^c) = t(y x^c) = 2<x,y>`` and ``n(x) = n(x^c) = ||x||^2``."""
    spec = basis.algebra
    two_inner = spec.scalar(2 * inner_product(basis, x, y))
    norm2 = spec.scalar(inner_product(basis, x, x))
    return (
        close(trace(mul(x, conj(y))), two_inner)
        and close(trace(mul(y, conj(x))), two_inner)
        and close(norm_form(x), norm2)
        and close(norm_form(conj(x)), norm2)
    )


def cone_inequality(x: Element) -> bool:
    """Nonreal span elements satisfy ``4 n(x) > t(x)^2`` and lie in the cone."""
    if is_real(x):
        return in_quadratic_cone(x)
    t = trace(x)
    n = norm_form(x)
    return is_real(t) and is_real(n) and 4 * n.real > t.real**2 and in_quadratic_cone(x)


# -- named bases ------------------------------------------------------------


def _quaternion_basis(labels: Sequence[tuple[int, str]], name: str) -> HypercomplexBasis:
    spec = make_algebra(Preset.QUATERNIONS)
    vectors = [spec.basis(spec.index(label), sign) for sign, label in labels]
    return make_basis(vectors, name=name)


def named_basis(name: str) -> HypercomplexBasis:
    """Named hypercomplex bases.

    - ``C``: ``(1, i)``
    - ``H``: ``(1, i, j, k)``
    - ``H-MT``: ``(1, -k, j)`` with completion ``(1, -k, j, i)``
    - ``H-kji``: ``(1, k, -j, i)``
    - ``O``: ``(1, i, j, k, l, li, lj, lk)``
    """
    if name == "C":
        spec = make_algebra(Preset.COMPLEX)
        return make_basis([spec.one(), spec.basis(1)], name="C")
    if name == "H":
        return _quaternion_basis([(1, "1"), (1, "i"), (1, "j"), (1, "k")], "H")
    if name == "H-MT":
        spec = make_algebra(Preset.QUATERNIONS)
        vectors = [spec.one(), spec.basis(3, -1), spec.basis(2)]
        return make_basis(vectors, name="H-MT", completion=[spec.basis(1)])
    if name == "H-kji":
        return _quaternion_basis([(1, "1"), (1, "k"), (-1, "j"), (1, "i")], "H-kji")
    if name == "O":
        spec = make_algebra(Preset.OCTONIONS)
        return make_basis([spec.basis(i) for i in range(spec.dim)], name="O")
    msg = f"Unknown named basis {name!r}"
    raise InvalidParameterError(msg, name=name)
