"""Logging configuration.

Records are rendered through :class:`structlog.stdlib.ProcessorFormatter` on
the root logger, so structlog events and plain :mod:`logging` records share
one pipeline.  JSON records carry:

- ``timestamp``: ISO 8601 in UTC.
- ``service``: defaults to ``"fanreg"``.
- ``level``: ``CRITICAL``, ``ERROR``, ``WARN``, ``INFO`` or ``DEBUG``.
- ``severity``: RFC 5424 code (``2``-``7``).
- ``message``: the event name, e.g. ``"tregular.counterexample"``.

Logs go to stderr by default; stdout is reserved for command output.
"""

from __future__ import annotations

import logging
import os
import sys
import warnings
from collections.abc import Sequence
from logging.handlers import RotatingFileHandler
from typing import Any

import orjson
import structlog
from structlog.contextvars import merge_contextvars

from fanreg.errors import ExceptionPayloadProcessor
from fanreg.processors import (
    add_service,
    add_syslog_severity,
    ensure_event_is_str,
    normalize_level,
    render_exact_values,
)

DEFAULT_SERVICE = "fanreg"
LOG_FILE_MAX_BYTES = 50 * 1024 * 1024
LOG_FILE_BACKUPS = 5


def orjson_serializer(obj: object, **_kw: object) -> str:
    return orjson.dumps(obj).decode()


def _to_logging_level(level_name: str) -> int:
    upper = level_name.upper()
    if upper == "WARN":
        return logging.WARNING
    result = logging.getLevelName(upper)
    if not isinstance(result, int):
        warnings.warn(f"Unknown log level {level_name!r}, falling back to INFO", stacklevel=3)
        return logging.INFO
    return result


def _stream_isatty(stream: Any) -> bool:
    try:
        return bool(stream.isatty())
    except (AttributeError, ValueError):
        return False


def build_shared_processors(service: str = DEFAULT_SERVICE) -> list[structlog.types.Processor]:
    """Processor chain shared by structlog events and foreign stdlib records."""
    return [
        merge_contextvars,
        structlog.stdlib.add_logger_name,
        structlog.stdlib.add_log_level,
        normalize_level,
        add_syslog_severity,
        structlog.stdlib.PositionalArgumentsFormatter(),
        structlog.processors.TimeStamper(fmt="iso", utc=True, key="timestamp"),
        add_service(service),
        structlog.processors.StackInfoRenderer(),
        structlog.processors.UnicodeDecoder(),
        ensure_event_is_str,
        render_exact_values,
        structlog.processors.EventRenamer("message"),
    ]


def build_formatter_processors(
    renderer: structlog.types.Processor, *, json_mode: bool = True
) -> list[structlog.types.Processor]:
    """Final rendering stage; JSON output turns ``exc_info`` into an ``exception`` payload."""
    processors: list[structlog.types.Processor] = [
        structlog.stdlib.ProcessorFormatter.remove_processors_meta,
    ]
    if json_mode:
        processors.append(ExceptionPayloadProcessor())
    processors.append(renderer)
    return processors


def _json_formatter(service: str) -> structlog.stdlib.ProcessorFormatter:
    renderer = structlog.processors.JSONRenderer(serializer=orjson_serializer)
    return structlog.stdlib.ProcessorFormatter(
        processors=build_formatter_processors(renderer),
        foreign_pre_chain=build_shared_processors(service),
    )


def configure_logging(
    *,
    service: str = DEFAULT_SERVICE,
    level: str = "INFO",
    json_logs: bool = True,
    stream: Any = None,
    clear_handlers: bool = True,
) -> None:
    """Install the structlog pipeline on the root logger.

    Parameters
    ----------
    service:
        Value of the ``service`` field.
    level:
        Minimum level name; unknown names warn and fall back to ``INFO``.
    json_logs:
        ``True`` for JSON lines, ``False`` for the console renderer (colored
        only when *stream* is a terminal).
    stream:
        Output stream, ``sys.stderr`` by default.
    clear_handlers:
        Remove existing root handlers first.
    """
    if stream is None:
        stream = sys.stderr
    numeric_level = _to_logging_level(level)

    structlog.configure(
        processors=[
            *build_shared_processors(service),
            structlog.stdlib.ProcessorFormatter.wrap_for_formatter,
        ],
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.make_filtering_bound_logger(numeric_level),
        cache_logger_on_first_use=True,
    )

    if json_logs:
        formatter = _json_formatter(service)
    else:
        console = structlog.dev.ConsoleRenderer(
            colors=_stream_isatty(stream), event_key="message"
        )
        formatter = structlog.stdlib.ProcessorFormatter(
            processors=build_formatter_processors(console, json_mode=False),
            foreign_pre_chain=build_shared_processors(service),
        )

    root = logging.getLogger()
    if clear_handlers:
        for handler in root.handlers[:]:
            handler.close()
            root.removeHandler(handler)
    root.setLevel(numeric_level)
    handler = logging.StreamHandler(stream)
    handler.setFormatter(formatter)
    root.addHandler(handler)


def setup_logging(
    *,
    service: str = DEFAULT_SERVICE,
    suppress_loggers: Sequence[str] = (),
    stream: Any = None,
) -> None:
    """Environment-driven setup used by the command line.

    Reads ``LOG_LEVEL`` (default ``"INFO"``), ``JSON_LOGS`` (``"0"`` for console
    output, JSON otherwise) and ``LOG_PATH`` (optional rotating JSON file,
    50 MB x 5).  Uncaught exceptions are logged with a structured payload.
    """
    level = os.environ.get("LOG_LEVEL", "INFO")
    json_logs = os.environ.get("JSON_LOGS", "1") != "0"
    configure_logging(service=service, level=level, json_logs=json_logs, stream=stream)

    for name in suppress_loggers:
        logging.getLogger(name).setLevel(logging.WARNING)

    log_path = os.environ.get("LOG_PATH")
    if log_path:
        file_handler = RotatingFileHandler(
            log_path, maxBytes=LOG_FILE_MAX_BYTES, backupCount=LOG_FILE_BACKUPS, encoding="utf-8"
        )
        file_handler.setFormatter(_json_formatter(service))
        logging.getLogger().addHandler(file_handler)

    def _log_exception(
        exc_type: type[BaseException], exc_value: BaseException, exc_traceback: Any
    ) -> None:
        if issubclass(exc_type, KeyboardInterrupt):
            sys.__excepthook__(exc_type, exc_value, exc_traceback)
            return
        logging.getLogger("fanreg").error(
            "uncaught_exception", exc_info=(exc_type, exc_value, exc_traceback)
        )

    sys.excepthook = _log_exception
