"""Structured error handling for the workbench.

Provides:
- MotivicError base class and the named failures raised by the operations
- Error categories for classification (mapped to CLI exit codes)
- A structured error record for reports and JSON logs
- JSON logging formatter with run correlation IDs
"""

from __future__ import annotations

import json
import logging
import traceback
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Optional


class ErrorCategory(str, Enum):
    """Error categories for classification."""

    PARSE_ERROR = "PARSE_ERROR"
    INPUT_ERROR = "INPUT_ERROR"
    ALGEBRA_ERROR = "ALGEBRA_ERROR"
    VERIFICATION_ERROR = "VERIFICATION_ERROR"
    CONFIG_ERROR = "CONFIG_ERROR"


class ErrorSeverity(str, Enum):
    """Error severity levels."""

    DEBUG = "debug"
    INFO = "info"
    WARNING = "warning"
    ERROR = "error"
    CRITICAL = "critical"


class MotivicError(Exception):
    """Root of every error raised by the workbench."""

    category: ErrorCategory = ErrorCategory.ALGEBRA_ERROR


class ConfigError(MotivicError):
    category = ErrorCategory.CONFIG_ERROR


class ParseError(MotivicError):
    """Malformed text input. Carries a 1-based line and column when known."""

    category = ErrorCategory.PARSE_ERROR

    def __init__(
        self,
        message: str,
        line: Optional[int] = None,
        column: Optional[int] = None,
        source: Optional[str] = None,
    ):
        self.line = line
        self.column = column
        self.source = source
        where = ""
        if source:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
            if column is not None:
                where += f"{column}:"
        super().__init__(f"{where} {message}".strip() if where else message)
        self.detail = message


class InputError(MotivicError):
    category = ErrorCategory.INPUT_ERROR


class LocalizationError(MotivicError):
    """A denominator outside the supported multiplicative set was requested."""


class PoleAtOne(MotivicError):
    """The Euler specialization hit a denominator vanishing at s = 1."""


class NonPolynomial(MotivicError):
    """A realization defined only on the polynomial subring received a fraction."""


class ResolutionError(InputError):
    pass


class QuiverError(InputError):
    pass


class MalformedPotential(QuiverError):
    pass


class MissingPairing(MotivicError):
    pass


class ShapeError(InputError):
    pass


class NotClosed(MotivicError):
    pass


class TwistedError(MotivicError):
    pass


class InvalidSplitting(MotivicError):
    pass


class Degenerate(MotivicError):
    """A quadratic form required to be nondegenerate is not."""


class InvalidLagrangian(InputError):
    pass


class PropagationError(MotivicError):
    """Two splittings of the same twisted object assigned different parities."""

    category = ErrorCategory.VERIFICATION_ERROR


class NonUnitConstant(MotivicError):
    pass


class TruncationError(InputError):
    pass


class DenominatorNotCleared(MotivicError):
    category = ErrorCategory.VERIFICATION_ERROR


@dataclass
class ErrorRecord:
    """Structured error for reports and logs.

    Attributes:
        code: Error category code (e.g. PARSE_ERROR)
        message: User-facing message (no stack trace)
        severity: Error severity level
        operation: Operation or subcommand where the error occurred
        context: Additional context (plain values only)
        stack_trace: Full stack trace for debugging
        timestamp: ISO format timestamp when the error occurred
        run_id: Correlation ID linking to the CLI run
    """

    code: ErrorCategory
    message: str
    severity: ErrorSeverity = ErrorSeverity.ERROR
    operation: Optional[str] = None
    context: dict[str, Any] = field(default_factory=dict)
    stack_trace: Optional[str] = None
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    run_id: Optional[str] = None

    @classmethod
    def from_exception(
        cls,
        exc: Exception,
        *,
        operation: Optional[str] = None,
        context: Optional[dict[str, Any]] = None,
        run_id: Optional[str] = None,
        severity: ErrorSeverity = ErrorSeverity.ERROR,
    ) -> ErrorRecord:
        """Create an ErrorRecord from an exception, classifying by its category."""
        code = getattr(exc, "category", ErrorCategory.ALGEBRA_ERROR)
        ctx = dict(context or {})
        if isinstance(exc, ParseError):
            ctx.setdefault("line", exc.line)
            ctx.setdefault("column", exc.column)
        return cls(
            code=code,
            message=str(exc),
            severity=severity,
            operation=operation,
            context=ctx,
            stack_trace=traceback.format_exc(),
            run_id=run_id,
        )

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        return {
            "code": self.code.value if isinstance(self.code, Enum) else self.code,
            "message": self.message,
            "severity": self.severity.value if isinstance(self.severity, Enum) else self.severity,
            "operation": self.operation,
            "context": self.context,
            "stack_trace": self.stack_trace,
            "timestamp": self.timestamp,
            "run_id": self.run_id,
        }

    def to_json(self) -> str:
        """Serialize to JSON string."""
        return json.dumps(self.to_dict(), default=str)


class StructuredJSONFormatter(logging.Formatter):
    """JSON formatter for structured logging with run correlation IDs."""

    def __init__(self, run_id: Optional[str] = None):
        super().__init__()
        self.run_id = run_id

    def format(self, record: logging.LogRecord) -> str:
        """Format log record as JSON."""
        log_entry = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "module": record.module,
            "function": record.funcName,
            "line": record.lineno,
        }

        run_id = getattr(record, "run_id", None) or self.run_id
        if run_id:
            log_entry["run_id"] = run_id

        error = getattr(record, "error_record", None)
        if isinstance(error, ErrorRecord):
            log_entry["error"] = error.to_dict()
        elif isinstance(error, dict):
            log_entry["error"] = error

        if record.exc_info:
            log_entry["exception"] = self.formatException(record.exc_info)

        return json.dumps(log_entry, default=str)


def configure_logging(
    level: int | str = logging.WARNING,
    fmt: str = "text",
    run_id: Optional[str] = None,
    logger_name: str = "runtime.motivic",
) -> logging.Logger:
    """Configure the package logger with either plain or structured JSON output."""
    logger = logging.getLogger(logger_name)
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            level = logging.WARNING
    logger.setLevel(level)
    logger.handlers.clear()

    handler = logging.StreamHandler()
    handler.setLevel(level)
    if fmt == "json":
        handler.setFormatter(StructuredJSONFormatter(run_id=run_id))
    else:
        handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    logger.addHandler(handler)
    logger.propagate = False
    return logger
