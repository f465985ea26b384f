"""Shared fixtures for fanreg tests."""

from __future__ import annotations

import logging
import sys
from fractions import Fraction

import pytest
import structlog

from fanreg.algebra import AlgebraSpec, Element, Preset, make_algebra
from fanreg.fan import TFan, TorusPoint, fan_from_name
from fanreg.quat13 import fan13, torus_point


@pytest.fixture(autouse=True)
def _reset_logging() -> None:  # type: ignore[misc]
    """Reset root logger handlers and level after each test."""
    root = logging.getLogger()
    original_handlers = list(root.handlers)
    original_level = root.level
    original_excepthook = sys.excepthook

    yield  # type: ignore[misc]

    root.handlers[:] = original_handlers
    root.setLevel(original_level)
    sys.excepthook = original_excepthook


@pytest.fixture(autouse=True)
def _reset_structlog() -> None:  # type: ignore[misc]
    """Reset structlog configuration after each test."""
    yield  # type: ignore[misc]
    structlog.reset_defaults()


@pytest.fixture
def H() -> AlgebraSpec:
    return make_algebra(Preset.QUATERNIONS)


@pytest.fixture
def octonions() -> AlgebraSpec:
    return make_algebra(Preset.OCTONIONS)


@pytest.fixture
def fan_13() -> TFan:
    return fan13()


@pytest.fixture
def fueter_fan() -> TFan:
    return fan_from_name("H:(3)")


@pytest.fixture
def slice_fan() -> TFan:
    return fan_from_name("H:(0,3)")


@pytest.fixture
def unit_j(H: AlgebraSpec) -> Element:
    return H.basis(2)


@pytest.fixture
def unit_35(H: AlgebraSpec) -> Element:
    """The circle point ``3/5 j + 4/5 k``."""
    return H.element([0, 0, Fraction(3, 5), Fraction(4, 5)])


@pytest.fixture
def point_j(unit_j: Element) -> TorusPoint:
    return torus_point(unit_j)
