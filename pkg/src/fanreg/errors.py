"""Exception hierarchy and structured exception payloads.

Every error raised by :mod:`fanreg` derives from :class:`FanregError` and
carries a machine-readable ``code`` plus keyword ``details``.  The CLI and
the JSON log renderer turn exceptions into dictionaries with
:func:`exception_payload`, which keeps the layout used for ``exception``
fields in log records: type, message, module, traceback frames and an
optional chained cause.
"""

from __future__ import annotations

import sys
import traceback
from typing import Any


class FanregError(Exception):
    """Base class for all domain errors.

    Parameters
    ----------
    message:
        Human-readable description.
    **details:
        JSON-ready context (indices, condition names, positions).
    """

    code = "error"

    def __init__(self, message: str, **details: Any) -> None:
        super().__init__(message)
        self.details: dict[str, Any] = details


class InvalidParameterError(FanregError, ValueError):
    code = "invalid-parameter"


class AlgebraMismatchError(FanregError, ValueError):
    code = "algebra-mismatch"


class ZeroElementError(FanregError, ZeroDivisionError):
    code = "zero-input"


class OutsideConeError(FanregError, ValueError):
    code = "outside-cone"


class NotExtendableError(FanregError):
    """A hat extension failed; ``condition`` names the violated requirement."""

    code = "not-extendable"

    def __init__(self, message: str, *, condition: str, **details: Any) -> None:
        super().__init__(message, condition=condition, **details)
        self.condition = condition


class UnsupportedAlgebraError(FanregError):
    code = "unsupported"


class OutsideSpanError(FanregError, ValueError):
    code = "outside-span"


class VariableCountError(FanregError, ValueError):
    code = "variable-count"


class InvalidStemError(FanregError):
    code = "invalid-stem"


class NotRegularError(FanregError):
    """Raised when an expansion does not reproduce its input."""

    code = "not-in-U_k"

    def __init__(self, message: str, *, residual: Any = None, **details: Any) -> None:
        super().__init__(message, **details)
        self.residual = residual


class SingularPairError(FanregError, ZeroDivisionError):
    code = "singular-pair"


class CoincidentPointsError(FanregError, ZeroDivisionError):
    code = "coincident-points"


class OutsideBallError(FanregError, ValueError):
    code = "outside-ball"


class CodecError(FanregError, ValueError):
    code = "malformed-input"


def _frames(tb: Any, max_frames: int) -> list[dict[str, Any]]:
    return [
        {"filename": fs.filename, "lineno": fs.lineno, "name": fs.name, "line": fs.line}
        for fs in traceback.extract_tb(tb)[-max_frames:]
    ]


def exception_payload(exc: BaseException, *, max_frames: int = 20) -> dict[str, Any]:
    """Return a JSON-ready description of *exc*.

    Domain errors contribute their ``code`` and ``details``; other
    exceptions get ``code`` ``None`` and empty details.
    """
    payload: dict[str, Any] = {
        "type": type(exc).__qualname__,
        "message": str(exc),
        "module": type(exc).__module__,
        "code": getattr(exc, "code", None),
        "details": dict(getattr(exc, "details", {}) or {}),
        "frames": _frames(exc.__traceback__, max_frames),
    }
    cause = exc.__cause__
    if cause is None and not exc.__suppress_context__:
        cause = exc.__context__
    if cause is not None:
        payload["cause"] = {"type": type(cause).__qualname__, "message": str(cause)}
    return payload


class ExceptionPayloadProcessor:
    """Structlog processor replacing ``exc_info`` with an ``exception`` payload.

    Parameters
    ----------
    max_frames:
        Maximum number of traceback frames to keep.
    """

    def __init__(self, *, max_frames: int = 20) -> None:
        self._max_frames = max_frames

    def __call__(
        self,
        _logger: Any,
        _method_name: str,
        event_dict: dict[str, Any],
    ) -> dict[str, Any]:
        exc_info = event_dict.get("exc_info")
        if not exc_info:
            return event_dict

        exc: BaseException | None
        if isinstance(exc_info, BaseException):
            exc = exc_info
        elif exc_info is True:
            exc = sys.exc_info()[1]
        elif isinstance(exc_info, tuple) and len(exc_info) == 3:
            exc = exc_info[1]
        else:
            exc = None

        if exc is None:
            return event_dict

        event_dict["exception"] = exception_payload(exc, max_frames=self._max_frames)
        event_dict.pop("exc_info", None)
        return event_dict
