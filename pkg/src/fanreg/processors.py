"""Structlog processors used by :mod:`fanreg.config`.

Level handling follows the usual canonical names (``CRITICAL``, ``ERROR``,
``WARN``, ``INFO``, ``DEBUG``) with their RFC 5424 severity codes.
:func:`render_exact_values` makes domain objects (rationals, algebra
elements, polynomial maps, torus points) serializable by orjson.
"""

from __future__ import annotations

from collections.abc import Callable
from enum import Enum
from fractions import Fraction
from typing import Any

from fanreg.algebra import AlgebraSpec, Element
from fanreg.fan import TFan, TorusPoint
from fanreg.polymap import PolyMap
from fanreg.scalars import format_scalar

EventDict = dict[str, Any]

# canonical level name and RFC 5424 severity, keyed by structlog method name
_LEVELS: dict[str, tuple[str, int]] = {
    "debug": ("DEBUG", 7),
    "info": ("INFO", 6),
    "warn": ("WARN", 4),
    "warning": ("WARN", 4),
    "error": ("ERROR", 3),
    "exception": ("ERROR", 3),
    "critical": ("CRITICAL", 2),
    "fatal": ("CRITICAL", 2),
}
_SEVERITY: dict[str, int] = {name: code for name, code in _LEVELS.values()}


def add_service(service_name: str) -> Callable[[Any, str, EventDict], EventDict]:
    """Processor factory stamping ``service`` on records that lack one."""

    def _processor(_logger: Any, _method_name: str, event_dict: EventDict) -> EventDict:
        event_dict.setdefault("service", service_name)
        return event_dict

    return _processor


def normalize_level(_logger: Any, method_name: str, event_dict: EventDict) -> EventDict:
    raw = str(event_dict.get("level", method_name)).lower()
    event_dict["level"] = _LEVELS[raw][0] if raw in _LEVELS else raw.upper()
    return event_dict


def add_syslog_severity(_logger: Any, _method_name: str, event_dict: EventDict) -> EventDict:
    """Add the numeric ``severity``; runs after :func:`normalize_level`, unknown levels get 6."""
    event_dict["severity"] = _SEVERITY.get(event_dict.get("level", "INFO"), 6)
    return event_dict


def ensure_event_is_str(_logger: Any, _method_name: str, event_dict: EventDict) -> EventDict:
    event = event_dict.get("event")
    if event is not None and not isinstance(event, str):
        event_dict["event"] = str(event)
    return event_dict


def exact_value(value: Any) -> Any:
    """JSON-ready form of a domain value; containers are converted recursively."""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, Fraction):
        return format_scalar(value)
    if isinstance(value, (Element, TorusPoint, TFan)):
        return str(value)
    if isinstance(value, PolyMap):
        return value.summary()
    if isinstance(value, AlgebraSpec):
        return value.name
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): exact_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        return [exact_value(v) for v in value]
    return value


def render_exact_values(_logger: Any, _method_name: str, event_dict: EventDict) -> EventDict:
    for key, value in event_dict.items():
        if key != "exc_info":
            event_dict[key] = exact_value(value)
    return event_dict
