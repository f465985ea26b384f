"""Tests for fanreg.config."""

from __future__ import annotations

import io
import logging
import sys
from fractions import Fraction
from pathlib import Path
from unittest.mock import patch

import orjson
import pytest
import structlog

from fanreg.algebra import Preset, make_algebra
from fanreg.config import (
    _stream_isatty,
    _to_logging_level,
    build_formatter_processors,
    build_shared_processors,
    configure_logging,
    orjson_serializer,
    setup_logging,
)
from fanreg.errors import OutsideBallError


def _records(buf: io.StringIO) -> list[dict]:
    return [orjson.loads(line) for line in buf.getvalue().splitlines() if line.strip()]


class TestToLoggingLevel:
    def test_standard_levels(self) -> None:
        assert _to_logging_level("DEBUG") == logging.DEBUG
        assert _to_logging_level("INFO") == logging.INFO
        assert _to_logging_level("ERROR") == logging.ERROR

    def test_warn_alias(self) -> None:
        assert _to_logging_level("warn") == logging.WARNING

    def test_unknown_defaults_to_info(self) -> None:
        with pytest.warns(UserWarning, match="Unknown log level"):
            assert _to_logging_level("VERBOSE") == logging.INFO


class TestStreamIsatty:
    def test_string_io_is_not_a_tty(self) -> None:
        assert _stream_isatty(io.StringIO()) is False

    def test_missing_isatty(self) -> None:
        assert _stream_isatty(object()) is False

    def test_closed_stream(self) -> None:
        buf = io.StringIO()
        buf.close()
        assert _stream_isatty(buf) is False


class TestOrjsonSerializer:
    def test_returns_str(self) -> None:
        assert orjson_serializer({"a": 1}) == '{"a":1}'


class TestProcessorChains:
    def test_shared_chain_ends_with_event_renamer(self) -> None:
        chain = build_shared_processors("svc")
        assert isinstance(chain[-1], structlog.processors.EventRenamer)

    def test_console_chain_has_no_exception_payload(self) -> None:
        renderer = structlog.dev.ConsoleRenderer(colors=False)
        chain = build_formatter_processors(renderer, json_mode=False)
        assert len(chain) == 2
        assert chain[-1] is renderer


class TestConfigureLogging:
    def test_json_record_fields(self) -> None:
        buf = io.StringIO()
        configure_logging(service="fanreg-test", level="DEBUG", stream=buf)
        structlog.get_logger("fanreg.test").info("tregular.sample", ok=True)

        (record,) = _records(buf)
        assert record["message"] == "tregular.sample"
        assert record["service"] == "fanreg-test"
        assert record["level"] == "INFO"
        assert record["severity"] == 6
        assert record["ok"] is True
        assert "timestamp" in record

    def test_exact_values_are_rendered(self) -> None:
        buf = io.StringIO()
        configure_logging(stream=buf)
        H = make_algebra(Preset.QUATERNIONS)
        structlog.get_logger("t").warning(
            "cauchy.ill_conditioned", margin=Fraction(1, 3), point=H.basis(2)
        )

        (record,) = _records(buf)
        assert record["margin"] == "1/3"
        assert record["point"] == "j"
        assert record["level"] == "WARN"
        assert record["severity"] == 4

    def test_exception_payload(self) -> None:
        buf = io.StringIO()
        configure_logging(stream=buf)
        try:
            raise OutsideBallError("outside", radius=1.0)
        except OutsideBallError:
            structlog.get_logger("t").exception("cli.failed")

        (record,) = _records(buf)
        assert record["exception"]["type"] == "OutsideBallError"
        assert record["exception"]["code"] == "outside-ball"
        assert record["exception"]["details"] == {"radius": 1.0}

    def test_stdlib_records_share_the_pipeline(self) -> None:
        buf = io.StringIO()
        configure_logging(service="svc", stream=buf)
        logging.getLogger("plain").warning("from %s", "stdlib")

        (record,) = _records(buf)
        assert record["message"] == "from stdlib"
        assert record["service"] == "svc"

    def test_level_filtering(self) -> None:
        buf = io.StringIO()
        configure_logging(level="WARNING", stream=buf)
        log = structlog.get_logger("t")
        log.info("hidden")
        assert buf.getvalue() == ""
        log.warning("shown")
        assert "shown" in buf.getvalue()

    def test_console_output(self) -> None:
        buf = io.StringIO()
        configure_logging(json_logs=False, stream=buf)
        structlog.get_logger("t").info("selftest.check")
        assert "selftest.check" in buf.getvalue()

    def test_defaults_to_stderr(self) -> None:
        configure_logging()
        (handler,) = logging.getLogger().handlers
        assert isinstance(handler, logging.StreamHandler)
        assert handler.stream is sys.stderr

    def test_reconfigure_replaces_handlers(self) -> None:
        configure_logging(stream=io.StringIO())
        old = list(logging.getLogger().handlers)
        configure_logging(stream=io.StringIO())
        assert all(h not in logging.getLogger().handlers for h in old)


class TestSetupLogging:
    def test_env_level(self) -> None:
        with patch.dict("os.environ", {"LOG_LEVEL": "DEBUG"}, clear=True):
            setup_logging(stream=io.StringIO())
        assert logging.getLogger().level == logging.DEBUG

    def test_console_mode(self) -> None:
        buf = io.StringIO()
        with patch.dict("os.environ", {"JSON_LOGS": "0"}, clear=True):
            setup_logging(stream=buf)
        structlog.get_logger("t").info("hello")
        assert not buf.getvalue().startswith("{")

    def test_suppresses_loggers(self) -> None:
        with patch.dict("os.environ", {}, clear=True):
            setup_logging(suppress_loggers=("noisy",), stream=io.StringIO())
        assert logging.getLogger("noisy").level == logging.WARNING

    def test_log_path_adds_rotating_file(self, tmp_path: Path) -> None:
        path = tmp_path / "fanreg.log"
        with patch.dict("os.environ", {"LOG_PATH": str(path)}, clear=True):
            setup_logging(stream=io.StringIO())
        structlog.get_logger("t").info("written")
        for handler in logging.getLogger().handlers:
            handler.flush()
        assert "written" in path.read_text(encoding="utf-8")

    def test_excepthook_logs_uncaught(self) -> None:
        buf = io.StringIO()
        with patch.dict("os.environ", {}, clear=True):
            setup_logging(stream=buf)
        try:
            raise ValueError("uncaught")
        except ValueError:
            sys.excepthook(*sys.exc_info())  # type: ignore[arg-type]
        (record,) = _records(buf)
        assert record["message"] == "uncaught_exception"
        assert record["exception"]["message"] == "uncaught"
