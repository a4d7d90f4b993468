"""Tests for structured errors, logging and optional tracing."""

import json
import logging

import pytest

from runtime.motivic import telemetry
from runtime.motivic.errors import (
    DenominatorNotCleared,
    ErrorCategory,
    ErrorRecord,
    InvalidLagrangian,
    MotivicError,
    ParseError,
    StructuredJSONFormatter,
    TwistedError,
    configure_logging,
)


class TestErrorRecord:
    def test_categories_follow_the_hierarchy(self):
        assert InvalidLagrangian("x").category is ErrorCategory.INPUT_ERROR
        assert DenominatorNotCleared("x").category is ErrorCategory.VERIFICATION_ERROR
        assert TwistedError("x").category is ErrorCategory.ALGEBRA_ERROR

    def test_parse_error_position(self):
        err = ParseError("unexpected token", 3, 7, "a.res")
        assert str(err) == "a.res:3:7: unexpected token"
        assert err.detail == "unexpected token"

    def test_from_exception_keeps_position(self):
        try:
            raise ParseError("bad", 2, 5)
        except ParseError as exc:
            record = ErrorRecord.from_exception(exc, operation="motive", run_id="r1")
        assert record.code is ErrorCategory.PARSE_ERROR
        assert record.context == {"line": 2, "column": 5}
        assert record.operation == "motive"
        assert "ParseError" in record.stack_trace

    def test_plain_exceptions_are_algebra_errors(self):
        record = ErrorRecord.from_exception(ValueError("boom"))
        assert record.code is ErrorCategory.ALGEBRA_ERROR

    def test_round_trip_through_json(self):
        record = ErrorRecord.from_exception(MotivicError("boom"), run_id="r2")
        data = json.loads(record.to_json())
        assert data["code"] == "ALGEBRA_ERROR"
        assert data["severity"] == "error"
        assert data["run_id"] == "r2"


class TestLogging:
    def test_json_formatter_fields(self):
        formatter = StructuredJSONFormatter(run_id="run-9")
        record = logging.LogRecord("runtime.motivic.dt", logging.ERROR, __file__, 10, "failed %s", ("hn",), None)
        record.error_record = ErrorRecord(code=ErrorCategory.INPUT_ERROR, message="bad")
        entry = json.loads(formatter.format(record))
        assert entry["message"] == "failed hn"
        assert entry["run_id"] == "run-9"
        assert entry["error"]["code"] == "INPUT_ERROR"

    def test_configure_logging_installs_one_handler(self):
        logger = configure_logging("debug", "json", "rid")
        configure_logging("debug", "json", "rid")
        assert logger.level == logging.DEBUG
        assert len(logger.handlers) == 1
        assert isinstance(logger.handlers[0].formatter, StructuredJSONFormatter)
        assert not logger.propagate

    def test_unknown_level_falls_back_to_warning(self):
        assert configure_logging("chatty").level == logging.WARNING


class TestTelemetry:
    def test_disabled_tracing_yields_noop_spans(self, monkeypatch):
        monkeypatch.setenv("OTEL_ENABLED", "false")
        monkeypatch.setattr(telemetry, "_tracer", None)
        with telemetry.trace_command("stasheff") as span:
            assert isinstance(span, telemetry.NoOpSpan)
            assert not span.is_recording()
            telemetry.record_error(span, ValueError("ignored"))
            telemetry.record_check(span, True, 3)

    def test_enabled_tracing_uses_the_tracer(self, monkeypatch, mocker):
        tracer = mocker.MagicMock()
        span = tracer.start_as_current_span.return_value.__enter__.return_value
        monkeypatch.setattr(telemetry, "get_tracer", lambda: tracer)
        with telemetry.trace_operation("check_cyclic", {"category": "conifold"}) as active:
            telemetry.record_check(active, False, 7)
        tracer.start_as_current_span.assert_called_once_with("motivic.check_cyclic")
        span.set_attribute.assert_any_call("operation.name", "check_cyclic")
        span.set_attribute.assert_any_call("category", "conifold")
        span.set_attribute.assert_any_call("check.passed", False)

    @pytest.mark.parametrize("value", ["true", "1", "yes"])
    def test_env_flag_spellings(self, monkeypatch, mocker, value):
        if not telemetry.OTEL_AVAILABLE:
            pytest.skip("opentelemetry not installed")
        install = mocker.patch.object(telemetry, "_install_provider")
        monkeypatch.setenv("OTEL_ENABLED", value)
        monkeypatch.setattr(telemetry, "_tracer", None)
        assert telemetry.get_tracer() is not None
        install.assert_called_once()

    def test_provider_uses_http_exporter_by_default(self, monkeypatch, mocker):
        pytest.importorskip("opentelemetry.sdk")
        pytest.importorskip("opentelemetry.exporter.otlp.proto.http.trace_exporter")
        exporter = mocker.patch("opentelemetry.exporter.otlp.proto.http.trace_exporter.OTLPSpanExporter")
        mocker.patch("opentelemetry.sdk.trace.export.BatchSpanProcessor")
        set_provider = mocker.patch.object(telemetry.trace, "set_tracer_provider")
        monkeypatch.setenv("OTEL_EXPORTER_OTLP_ENDPOINT", "http://collector:4318")
        telemetry._install_provider()
        exporter.assert_called_once_with(endpoint="http://collector:4318/v1/traces")
        set_provider.assert_called_once()
