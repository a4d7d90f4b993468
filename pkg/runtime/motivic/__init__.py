"""Motivic Workbench: exact motives, A∞ quiver categories, orientation data and DT series."""

from .ainfty import AInftyCategory, check_cyclic, check_stasheff, koszul_dual
from .config import FieldMode, WorkbenchConfig, load_config
from .dt import (
    QTSeries,
    Truncation,
    bridgeland_conjugation_check,
    hall_product_check,
    hn_factorization_check,
    integrate_w0,
)
from .errors import ErrorCategory, ErrorRecord, MotivicError, ParseError
from .formats import load_quiver, load_resolution
from .grammar import format_motive, parse_motive
from .motive import L, MotiveExpr
from .orientation import J2Class, obstruction_at_extension, orientation_parity, propagate_parities
from .twisted import TwistedObject, split_endomorphism_potential
from .vanishing import milnor_fibre_ts, nearby_cycle, quartic_trace_weight, vanishing_cycle

__all__ = [
    "AInftyCategory",
    "check_cyclic",
    "check_stasheff",
    "koszul_dual",
    "FieldMode",
    "WorkbenchConfig",
    "load_config",
    "QTSeries",
    "Truncation",
    "bridgeland_conjugation_check",
    "hall_product_check",
    "hn_factorization_check",
    "integrate_w0",
    "ErrorCategory",
    "ErrorRecord",
    "MotivicError",
    "ParseError",
    "load_quiver",
    "load_resolution",
    "format_motive",
    "parse_motive",
    "L",
    "MotiveExpr",
    "J2Class",
    "obstruction_at_extension",
    "orientation_parity",
    "propagate_parities",
    "TwistedObject",
    "split_endomorphism_potential",
    "milnor_fibre_ts",
    "nearby_cycle",
    "quartic_trace_weight",
    "vanishing_cycle",
]
