"""
Workbench configuration.

Settings come from the process environment, optionally seeded from a ``.env``
file in the working directory (never overriding variables already set). Every
operation that consumes a setting also takes it as an explicit argument; the
config is only the fallback.

| variable                  | meaning                                   | default   |
|---------------------------|-------------------------------------------|-----------|
| MOTIVIC_FIELD_MODE        | ``rationals`` or ``closed``               | rationals |
| MOTIVIC_ORDER             | truncation order for potentials           | 8         |
| MOTIVIC_STASHEFF_NMAX     | default arity bound of the A∞ checkers    | 8         |
| MOTIVIC_ENUM_SLOTS        | generator slots for parity enumeration    | 3         |
| MOTIVIC_ENUM_COEFFICIENTS | MC entry coefficients for enumeration     | 0,1       |
| MOTIVIC_LOG_FORMAT        | ``text`` or ``json``                      | text      |
| MOTIVIC_LOG_LEVEL         | logging level name                        | WARNING   |
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Mapping, Optional

from dotenv import load_dotenv

from runtime.motivic.errors import ConfigError


class FieldMode(str, Enum):
    """Base field used by the orientation module."""

    RATIONALS = "rationals"
    CLOSED = "closed"


ENV_FIELD_MODE = "MOTIVIC_FIELD_MODE"
ENV_ORDER = "MOTIVIC_ORDER"
ENV_STASHEFF_NMAX = "MOTIVIC_STASHEFF_NMAX"
ENV_ENUM_SLOTS = "MOTIVIC_ENUM_SLOTS"
ENV_ENUM_COEFFICIENTS = "MOTIVIC_ENUM_COEFFICIENTS"
ENV_LOG_FORMAT = "MOTIVIC_LOG_FORMAT"
ENV_LOG_LEVEL = "MOTIVIC_LOG_LEVEL"

DEFAULT_ORDER = 8
DEFAULT_STASHEFF_NMAX = 8
DEFAULT_ENUM_SLOTS = 3


@dataclass(frozen=True)
class WorkbenchConfig:
    field_mode: FieldMode = FieldMode.RATIONALS
    order: int = DEFAULT_ORDER
    stasheff_nmax: int = DEFAULT_STASHEFF_NMAX
    enum_slots: int = DEFAULT_ENUM_SLOTS
    enum_coefficients: tuple[Fraction, ...] = (Fraction(0), Fraction(1))
    log_format: str = "text"
    log_level: str = "WARNING"


_dotenv_loaded = False


def _positive_int(env: Mapping[str, str], name: str, default: int) -> int:
    raw = env.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError as err:
        raise ConfigError(f"{name} must be an integer, got {raw!r}") from err
    if value < 1:
        raise ConfigError(f"{name} must be positive, got {value}")
    return value


def _coefficients(env: Mapping[str, str]) -> tuple[Fraction, ...]:
    raw = env.get(ENV_ENUM_COEFFICIENTS)
    if raw is None or raw.strip() == "":
        return (Fraction(0), Fraction(1))
    try:
        values = tuple(Fraction(part.strip()) for part in raw.split(",") if part.strip())
    except (ValueError, ZeroDivisionError) as err:
        raise ConfigError(f"{ENV_ENUM_COEFFICIENTS} must be a comma list of rationals") from err
    if Fraction(0) not in values:
        # The zero matrix must stay reachable so every generator is enumerated.
        values = (Fraction(0),) + values
    return tuple(dict.fromkeys(values))


def load_config(env: Optional[Mapping[str, str]] = None) -> WorkbenchConfig:
    """Build the configuration from ``env`` (default: ``os.environ`` after ``.env``)."""
    global _dotenv_loaded
    if env is None:
        if not _dotenv_loaded:
            load_dotenv(override=False)
            _dotenv_loaded = True
        env = os.environ

    mode_raw = env.get(ENV_FIELD_MODE, FieldMode.RATIONALS.value).strip().lower()
    try:
        mode = FieldMode(mode_raw)
    except ValueError as err:
        raise ConfigError(
            f"{ENV_FIELD_MODE} must be 'rationals' or 'closed', got {mode_raw!r}"
        ) from err

    log_format = env.get(ENV_LOG_FORMAT, "text").strip().lower()
    if log_format not in ("text", "json"):
        raise ConfigError(f"{ENV_LOG_FORMAT} must be 'text' or 'json', got {log_format!r}")

    return WorkbenchConfig(
        field_mode=mode,
        order=_positive_int(env, ENV_ORDER, DEFAULT_ORDER),
        stasheff_nmax=_positive_int(env, ENV_STASHEFF_NMAX, DEFAULT_STASHEFF_NMAX),
        enum_slots=_positive_int(env, ENV_ENUM_SLOTS, DEFAULT_ENUM_SLOTS),
        enum_coefficients=_coefficients(env),
        log_format=log_format,
        log_level=env.get(ENV_LOG_LEVEL, "WARNING").strip().upper() or "WARNING",
    )


def resolve_field_mode(mode: FieldMode | str | None) -> FieldMode:
    """Return ``mode`` as a FieldMode, falling back to the configured one."""
    if mode is None:
        return load_config().field_mode
    if isinstance(mode, FieldMode):
        return mode
    try:
        return FieldMode(str(mode).lower())
    except ValueError as err:
        raise ConfigError(f"unknown field mode {mode!r}") from err
