"""Unit tests for environment-driven configuration."""

from fractions import Fraction

import pytest

from runtime.motivic.config import (
    DEFAULT_ORDER,
    FieldMode,
    WorkbenchConfig,
    load_config,
    resolve_field_mode,
)
from runtime.motivic.errors import ConfigError


def test_defaults_from_empty_env():
    assert load_config({}) == WorkbenchConfig()
    assert load_config({}).order == DEFAULT_ORDER


def test_reads_every_variable():
    config = load_config(
        {
            "MOTIVIC_FIELD_MODE": "Closed",
            "MOTIVIC_ORDER": "10",
            "MOTIVIC_STASHEFF_NMAX": "6",
            "MOTIVIC_ENUM_SLOTS": "2",
            "MOTIVIC_ENUM_COEFFICIENTS": "1, -1, 1/2",
            "MOTIVIC_LOG_FORMAT": "json",
            "MOTIVIC_LOG_LEVEL": "debug",
        }
    )
    assert config.field_mode is FieldMode.CLOSED
    assert (config.order, config.stasheff_nmax, config.enum_slots) == (10, 6, 2)
    assert config.enum_coefficients == (Fraction(0), Fraction(1), Fraction(-1), Fraction(1, 2))
    assert config.log_format == "json"
    assert config.log_level == "DEBUG"


def test_blank_values_fall_back_to_defaults():
    config = load_config({"MOTIVIC_ORDER": " ", "MOTIVIC_ENUM_COEFFICIENTS": ""})
    assert config.order == DEFAULT_ORDER
    assert config.enum_coefficients == (Fraction(0), Fraction(1))


@pytest.mark.parametrize(
    "env, name",
    [
        ({"MOTIVIC_FIELD_MODE": "complex"}, "MOTIVIC_FIELD_MODE"),
        ({"MOTIVIC_ORDER": "eight"}, "MOTIVIC_ORDER"),
        ({"MOTIVIC_STASHEFF_NMAX": "0"}, "MOTIVIC_STASHEFF_NMAX"),
        ({"MOTIVIC_ENUM_COEFFICIENTS": "1/0"}, "MOTIVIC_ENUM_COEFFICIENTS"),
        ({"MOTIVIC_LOG_FORMAT": "xml"}, "MOTIVIC_LOG_FORMAT"),
    ],
)
def test_invalid_values_name_the_variable(env, name):
    with pytest.raises(ConfigError, match=name):
        load_config(env)


def test_process_environment_is_the_fallback(monkeypatch):
    monkeypatch.setenv("MOTIVIC_ENUM_SLOTS", "4")
    assert load_config().enum_slots == 4


def test_resolve_field_mode(monkeypatch):
    assert resolve_field_mode("closed") is FieldMode.CLOSED
    assert resolve_field_mode(FieldMode.RATIONALS) is FieldMode.RATIONALS
    monkeypatch.setenv("MOTIVIC_FIELD_MODE", "closed")
    assert resolve_field_mode(None) is FieldMode.CLOSED
    with pytest.raises(ConfigError):
        resolve_field_mode("reals")
