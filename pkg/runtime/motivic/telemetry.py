"""
OpenTelemetry tracing for the workbench.

Spans cover:
- CLI subcommands
- Checker runs (Stasheff, cyclic, parity propagation, series identities)

Tracing is off unless the opentelemetry API imports and ``OTEL_ENABLED`` is set.
When enabled, spans go to an OTLP collector:

    OTEL_EXPORTER_OTLP_ENDPOINT   collector URL (default http://localhost:4318)
    OTEL_EXPORTER_OTLP_PROTOCOL   ``http`` (default) or ``grpc``
    OTEL_CONSOLE_EXPORT           also print spans to stderr
"""

import logging
import os
from contextlib import contextmanager
from typing import Optional

try:
    from opentelemetry import trace
    from opentelemetry.trace import Status, StatusCode

    OTEL_AVAILABLE = True
except ImportError:
    OTEL_AVAILABLE = False

logger = logging.getLogger(__name__)

_tracer: Optional["trace.Tracer"] = None

SERVICE = "motivic-workbench"
VERSION = "0.1.0"


def _flag(name: str) -> bool:
    return os.getenv(name, "false").lower() in ("true", "1", "yes")


def _install_provider() -> None:
    """Register an SDK tracer provider with an OTLP exporter."""
    try:
        from opentelemetry.sdk.resources import SERVICE_NAME, SERVICE_VERSION, Resource
        from opentelemetry.sdk.trace import TracerProvider
        from opentelemetry.sdk.trace.export import BatchSpanProcessor, ConsoleSpanExporter
    except ImportError:
        logger.info("opentelemetry-sdk not installed; spans stay in the API no-op provider")
        return

    provider = TracerProvider(resource=Resource.create({SERVICE_NAME: SERVICE, SERVICE_VERSION: VERSION}))
    endpoint = os.getenv("OTEL_EXPORTER_OTLP_ENDPOINT", "http://localhost:4318")
    console = _flag("OTEL_CONSOLE_EXPORT")
    try:
        if os.getenv("OTEL_EXPORTER_OTLP_PROTOCOL", "http") == "grpc":
            from opentelemetry.exporter.otlp.proto.grpc.trace_exporter import OTLPSpanExporter

            exporter = OTLPSpanExporter(endpoint=endpoint, insecure=not endpoint.startswith("https"))
        else:
            from opentelemetry.exporter.otlp.proto.http.trace_exporter import OTLPSpanExporter

            if not endpoint.endswith("/v1/traces"):
                endpoint = f"{endpoint.rstrip('/')}/v1/traces"
            exporter = OTLPSpanExporter(endpoint=endpoint)
        provider.add_span_processor(BatchSpanProcessor(exporter))
        logger.info("OTLP exporter configured: %s", endpoint)
    except Exception as e:
        logger.warning("Failed to configure OTLP exporter: %s", e)
        console = True

    if console:
        provider.add_span_processor(BatchSpanProcessor(ConsoleSpanExporter()))
    trace.set_tracer_provider(provider)


def get_tracer() -> Optional["trace.Tracer"]:
    """Tracer instance if OpenTelemetry is available and enabled, None otherwise."""
    global _tracer

    if not OTEL_AVAILABLE:
        return None

    if _tracer is not None:
        return _tracer

    if not _flag("OTEL_ENABLED"):
        return None

    _install_provider()
    _tracer = trace.get_tracer(SERVICE, VERSION)
    return _tracer


class NoOpSpan:
    """No-op span for when telemetry is disabled."""

    def set_attribute(self, key: str, value) -> None:
        pass

    def set_attributes(self, attributes: dict) -> None:
        pass

    def add_event(self, name: str, attributes: Optional[dict] = None) -> None:
        pass

    def record_exception(self, exception: Exception) -> None:
        pass

    def set_status(self, status) -> None:
        pass

    def end(self) -> None:
        pass

    @property
    def is_recording(self) -> bool:
        return False


@contextmanager
def _span(span_name: str, base: dict, attributes: Optional[dict]):
    tracer = get_tracer()

    if tracer is None:
        yield NoOpSpan()
        return

    with tracer.start_as_current_span(span_name) as span:
        for key, value in {**base, **(attributes or {})}.items():
            span.set_attribute(key, value)
        yield span


@contextmanager
def trace_operation(operation: str, attributes: Optional[dict] = None):
    """
    Context manager for tracing one algebraic operation.

    Usage:
        with trace_operation("check_stasheff", {"category": cat.name}) as span:
            report = ...
            span.set_attribute("check.passed", report.passed)
    """
    with _span(f"motivic.{operation}", {"operation.name": operation}, attributes) as span:
        yield span


@contextmanager
def trace_command(command: str, attributes: Optional[dict] = None):
    """Context manager for tracing a CLI subcommand."""
    with _span(f"cli.{command}", {"cli.command": command}, attributes) as span:
        yield span


def record_error(span, exception: Exception) -> None:
    """Record an exception on a span."""
    if span is None or isinstance(span, NoOpSpan):
        return

    if OTEL_AVAILABLE:
        span.record_exception(exception)
        span.set_status(Status(StatusCode.ERROR, str(exception)))
        span.set_attribute("error", True)
        span.set_attribute("error.type", type(exception).__name__)


def record_check(span, passed: bool, checked: int) -> None:
    """Record the outcome of a verification on a span."""
    if span is None or isinstance(span, NoOpSpan):
        return

    span.set_attribute("check.passed", passed)
    span.set_attribute("check.count", checked)
