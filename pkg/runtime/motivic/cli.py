"""
Command-line interface for the motivic workbench.

Usage:
    python -m runtime.motivic.cli motive eval "GLinv(1)*(L-1)"
    python -m runtime.motivic.cli mf --ts 4 4
    python -m runtime.motivic.cli stasheff --quiver conifold --nmax 8
    python -m runtime.motivic.cli mc --quiver one_loop_a4 --dim 4 --symbolic
    python -m runtime.motivic.cli wmin --quiver one_loop_a4 --tw "1, 1 : 1,2 = a*"
    python -m runtime.motivic.cli j2 --quiver one_loop_a4 --ext "1 | 1 | 1,1 = a*"
    python -m runtime.motivic.cli lagrangian --quiver conifold --arrows x1 --tw "1, 2 : 1,2 = y1*"
    python -m runtime.motivic.cli dtseries --quiver conifold --framed 1 --trunc 1,4,5 --check con1 --n 1

Canonical results go to stdout, one per line, so runs can be diffed against
golden files. Status lines go to stderr. Exit codes: 0 success, 1 a
verification failed, 2 bad input.
"""

import argparse
import logging
import sys
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Optional

from rich.console import Console
from rich.table import Table

from runtime.motivic.ainfty import check_cyclic, check_stasheff, koszul_dual
from runtime.motivic.artifacts import RunInputs, generate_run_id, write_run_artifacts
from runtime.motivic.config import load_config, resolve_field_mode
from runtime.motivic.contracts import CheckReport, J2Report, MotiveReport, SeriesReport
from runtime.motivic.dt import (
    EulerForm,
    QTSeries,
    Truncation,
    bridgeland_conjugation_check,
    format_term,
    framed,
    hall_product_check,
    hn_factorization_check,
    w0_weight,
)
from runtime.motivic.errors import ErrorRecord, InputError, MotivicError, configure_logging
from runtime.motivic.formats import (
    TwLiteral,
    load_quiver,
    load_resolution,
    parse_ext_literal,
    parse_tw_literal,
)
from runtime.motivic.grammar import parse_motive
from runtime.motivic.orientation import (
    cgeq2_class,
    cocycle_check,
    lagrangian_class,
    obstruction_at_extension,
    orientation_parity,
    quad_class,
    quad_form_of,
)
from runtime.motivic.telemetry import record_error, trace_command
from runtime.motivic.twisted import (
    TwistedObject,
    ext_dimensions,
    extension_object,
    mc_system,
    split_endomorphism_potential,
    symbolic_matrix,
    tau_from_dimensions,
    validate,
    zero_matrix,
)
from runtime.motivic.vanishing import milnor_fibre_sum, nearby_cycle, vanishing_cycle

logger = logging.getLogger(__name__)


class CommandStatus(str, Enum):
    OK = "ok"
    VERIFICATION_FAILED = "verification_failed"
    INPUT_ERROR = "input_error"


# Map an explicit command status to a process exit code.
EXIT_CODES = {
    CommandStatus.OK: 0,
    CommandStatus.VERIFICATION_FAILED: 1,
    CommandStatus.INPUT_ERROR: 2,
}


@dataclass
class Outcome:
    status: CommandStatus
    lines: list[str] = field(default_factory=list)
    report: Any = None
    inputs: list[str] = field(default_factory=list)


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"expected a comma list of integers, got {text!r}") from err


def _param(text: str) -> tuple[str, int]:
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    try:
        return name.strip(), int(value)
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"parameter {name!r} needs an integer value") from err


def build_parser() -> argparse.ArgumentParser:
    """Create an argument parser for the CLI."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--report", type=Path, help="Write run.json and result.yaml under DIR/<run_id>/")
    common.add_argument("--log-format", choices=["text", "json"], help="Log format (default from MOTIVIC_LOG_FORMAT)")
    common.add_argument("--verbose", action="store_true", help="Enable debug logging")
    common.add_argument("--field-mode", choices=["rationals", "closed"], help="Base field for J2 classes")

    parser = argparse.ArgumentParser(
        description="Motivic Workbench - exact motives, A-infinity quivers, orientation data and DT series",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    motive = sub.add_parser("motive", parents=[common], help="Evaluate a motive expression")
    motive.add_argument("action", choices=["eval"])
    motive.add_argument("expr", help="Expression in L, s, chi(k/n), GL(n), GLinv(n), [C1], [C2]")
    motive.add_argument("--exotic", action="store_true", help="Read '*' as the exotic product")

    mf = sub.add_parser("mf", parents=[common], help="Milnor fibres and vanishing cycles")
    source = mf.add_mutually_exclusive_group(required=True)
    source.add_argument("--resolution", help="Shipped resolution name or .res path")
    source.add_argument("--ts", type=int, nargs="+", metavar="A", help="Exponents of x1^a1 + ... + xk^ak")
    mf.add_argument("--param", type=_param, action="append", default=[], help="Resolution parameter NAME=VALUE")

    stasheff = sub.add_parser("stasheff", parents=[common], help="Check the A-infinity and cyclic identities of D(Q,W)")
    stasheff.add_argument("--quiver", required=True, help="Shipped quiver name or .qp path")
    stasheff.add_argument("--nmax", type=int, help="Arity bound (default from MOTIVIC_STASHEFF_NMAX)")

    mc = sub.add_parser("mc", parents=[common], help="Maurer-Cartan system for a dimension vector")
    mc.add_argument("--quiver", required=True)
    mc.add_argument("--dim", type=_int_list, required=True, help="Dimension vector d1,d2,...")
    mc.add_argument("--symbolic", action="store_true", help="Print every equation")

    wmin = sub.add_parser("wmin", parents=[common], help="Minimal potential of a twisted object")
    wmin.add_argument("--quiver", required=True)
    wmin.add_argument("--tw", required=True, help="Twisted object literal 'OBJ, OBJ[shift] : r,c = terms ; ...'")
    wmin.add_argument("--order", type=int, help="Truncation order (default from MOTIVIC_ORDER)")

    j2 = sub.add_parser("j2", parents=[common], help="Obstruction class at an extension")
    j2.add_argument("--quiver", required=True)
    j2.add_argument("--ext", required=True, help="Extension literal 'M1 | M2 | alpha'")

    lag = sub.add_parser("lagrangian", parents=[common], help="Lagrangian parity against the degree >= 2 parity")
    lag.add_argument("--quiver", required=True)
    lag.add_argument("--arrows", required=True, help="Comma list of arrows in T (may be empty)")
    group = lag.add_mutually_exclusive_group(required=True)
    group.add_argument("--tw", help="Twisted object literal")
    group.add_argument("--dim", type=_int_list, help="Dimension vector of a direct sum of simples")

    dts = sub.add_parser("dtseries", parents=[common], help="Quantum-torus series and conifold identities")
    dts.add_argument("--quiver", default="conifold")
    dts.add_argument(
        "--framed", nargs="?", const="1", metavar="VERTEX", help="Frame at VERTEX (framing vertex first)"
    )
    dts.add_argument("--trunc", type=_int_list, required=True, help="Componentwise bound a,b[,c]")
    dts.add_argument("--total", type=int, help="Total-dimension bound")
    dts.add_argument("--check", choices=["con1", "hn", "hall"], help="Verify an identity instead of printing")
    dts.add_argument("--n", type=int, default=1, help="Slope index for --check con1")
    return parser


# ============================================================================
# Subcommands
# ============================================================================

def _twisted(literal: TwLiteral) -> TwistedObject:
    return TwistedObject(literal.tau, literal.matrix())


def _quiver_inputs(name: str) -> list[str]:
    path = Path(name)
    return [str(path)] if path.is_file() else []


def cmd_motive(args: argparse.Namespace) -> Outcome:
    value = parse_motive(args.expr, exotic=args.exotic)
    return Outcome(CommandStatus.OK, [value.to_text()], MotiveReport.from_result(value, args.expr))


def cmd_mf(args: argparse.Namespace) -> Outcome:
    if args.ts:
        value = milnor_fibre_sum(args.ts)
        return Outcome(CommandStatus.OK, [value.to_text()], MotiveReport.from_result(value, f"MF{tuple(args.ts)}"))
    data = load_resolution(args.resolution, **dict(args.param))
    psi, phi = nearby_cycle(data), vanishing_cycle(data)
    report = {
        "nearby": MotiveReport.from_result(psi, "psi"),
        "vanishing": MotiveReport.from_result(phi, "phi"),
    }
    return Outcome(
        CommandStatus.OK,
        [f"psi = {psi.to_text()}", f"phi = {phi.to_text()}"],
        report,
        _quiver_inputs(args.resolution),
    )


def cmd_stasheff(args: argparse.Namespace) -> Outcome:
    cat = koszul_dual(load_quiver(args.quiver))
    nmax = args.nmax or load_config().stasheff_nmax
    stasheff = check_stasheff(cat, nmax)
    cyclic = check_cyclic(cat, nmax)
    passed = stasheff.passed and cyclic.passed
    return Outcome(
        CommandStatus.OK if passed else CommandStatus.VERIFICATION_FAILED,
        [f"stasheff: {stasheff.summary()}", f"cyclic: {cyclic.summary()}"],
        [CheckReport.from_result(stasheff), CheckReport.from_result(cyclic)],
        _quiver_inputs(args.quiver),
    )


def cmd_mc(args: argparse.Namespace) -> Outcome:
    cat = koszul_dual(load_quiver(args.quiver))
    tau = tau_from_dimensions(cat, args.dim)
    _, gens, _ = symbolic_matrix(cat, tau)
    equations = mc_system(cat, tau)
    lines = [f"variables: {len(gens)}", f"equations: {len(equations)}"]
    if args.symbolic:
        lines += [f"({i},{j},{g}): {poly} = 0" for (i, j, g), poly in equations]
    report = {
        "variables": [str(g) for g in gens],
        "equations": {f"{i},{j},{g}": str(poly) for (i, j, g), poly in equations},
    }
    return Outcome(CommandStatus.OK, lines, report, _quiver_inputs(args.quiver))


def cmd_wmin(args: argparse.Namespace) -> Outcome:
    cat = koszul_dual(load_quiver(args.quiver))
    m = validate(cat, _twisted(parse_tw_literal(args.tw)))
    dims = ext_dimensions(cat, m)
    split = split_endomorphism_potential(cat, m, args.order)
    lines = [
        "ext: " + " ".join(f"{k}:{v}" for k, v in sorted(dims.items()) if v),
        f"w_min: {split.w_min}",
        f"q: {split.q}",
    ]
    report = {
        "ext": {str(k): v for k, v in sorted(dims.items())},
        "w_min": str(split.w_min),
        "q": str(split.q),
        "order": split.order,
    }
    return Outcome(CommandStatus.OK, lines, report, _quiver_inputs(args.quiver))


def cmd_j2(args: argparse.Namespace) -> Outcome:
    cat = koszul_dual(load_quiver(args.quiver))
    mode = resolve_field_mode(args.field_mode)
    lit1, lit2, entries = parse_ext_literal(args.ext)
    m1 = validate(cat, _twisted(lit1))
    m2 = validate(cat, _twisted(lit2))
    alpha = TwLiteral((), entries).matrix(m1.size, m2.size)
    e = extension_object(cat, m1, m2, alpha)
    l = obstruction_at_extension(cat, m1, m2, alpha, mode)
    pieces = {name: quad_class(quad_form_of(cat, obj), mode) for name, obj in (("E", e), ("M1", m1), ("M2", m2))}
    holds = cocycle_check(cat, m1, m2, alpha, lambda obj: orientation_parity(cat, obj))
    lines = [f"l = {l}"] + [f"q({name}) = {value}" for name, value in pieces.items()]
    lines.append(f"cocycle: {'true' if holds else 'false'}")
    details = {f"q({name})": str(value) for name, value in pieces.items()}
    details["cocycle"] = str(holds).lower()
    return Outcome(
        CommandStatus.OK if holds else CommandStatus.VERIFICATION_FAILED,
        lines,
        J2Report.from_result(l, mode, details),
        _quiver_inputs(args.quiver),
    )


def cmd_lagrangian(args: argparse.Namespace) -> Outcome:
    q = load_quiver(args.quiver)
    cat = koszul_dual(q)
    if args.tw:
        m = validate(cat, _twisted(parse_tw_literal(args.tw)))
    else:
        tau = tau_from_dimensions(cat, args.dim)
        m = TwistedObject(tau, zero_matrix(len(tau), len(tau)))
    arrows = [a.strip() for a in args.arrows.split(",") if a.strip()]
    lag = lagrangian_class(q, arrows, m, cat)
    ref = cgeq2_class(cat, m)
    status = CommandStatus.OK if lag == ref else CommandStatus.VERIFICATION_FAILED
    return Outcome(
        status,
        [f"lagrangian: {lag}", f"cgeq2: {ref}"],
        {"lagrangian": lag, "cgeq2": ref, "arrows": arrows},
        _quiver_inputs(args.quiver),
    )


def cmd_dtseries(args: argparse.Namespace) -> Outcome:
    trunc = Truncation(tuple(args.trunc), args.total)
    if args.check == "con1":
        passed = bridgeland_conjugation_check(args.n, trunc)
        name = f"con1 n={args.n}"
    elif args.check == "hn":
        passed = hn_factorization_check(trunc)
        name = "hn"
    else:
        q = load_quiver(args.quiver)
        if args.framed:
            q = framed(q, args.framed)
        if args.check == "hall":
            passed = hall_product_check(q, trunc)
            name = "hall"
        else:
            if q.has_potential:
                raise InputError(f"dtseries prints the W = 0 series; {q.name} has a potential")
            form = EulerForm.from_quiver(q)
            series = QTSeries(form, trunc, {g: w0_weight(form, g) for g in trunc.points()})
            lines = [format_term(g, c) for g, c in series.terms()]
            return Outcome(CommandStatus.OK, lines, SeriesReport.from_result(series), _quiver_inputs(args.quiver))
    return Outcome(
        CommandStatus.OK if passed else CommandStatus.VERIFICATION_FAILED,
        [f"{name}: {'PASS' if passed else 'FAIL'}"],
        CheckReport.from_result(passed, name),
    )


COMMANDS: dict[str, Callable[[argparse.Namespace], Outcome]] = {
    "motive": cmd_motive,
    "mf": cmd_mf,
    "stasheff": cmd_stasheff,
    "mc": cmd_mc,
    "wmin": cmd_wmin,
    "j2": cmd_j2,
    "lagrangian": cmd_lagrangian,
    "dtseries": cmd_dtseries,
}


def _print_summary(run_dir: Path, command: str, outcome: Outcome, exit_code: int) -> None:
    table = Table(title="Run summary")
    table.add_column("field")
    table.add_column("value")
    table.add_row("command", command)
    table.add_row("status", outcome.status.value)
    table.add_row("exit code", str(exit_code))
    table.add_row("artifacts", str(run_dir))
    Console(stderr=True).print(table)


def main(argv: Optional[list[str]] = None) -> int:
    """CLI entrypoint. Returns an exit code instead of exiting for testability."""
    parser = build_parser()
    args = parser.parse_args(argv)

    run_id = generate_run_id()
    try:
        config = load_config()
    except MotivicError as err:
        print(f"❌ Configuration error: {err}", file=sys.stderr)
        return EXIT_CODES[CommandStatus.INPUT_ERROR]
    level = "DEBUG" if args.verbose else config.log_level
    configure_logging(level, args.log_format or config.log_format, run_id)

    with trace_command(args.command, {"run.id": run_id}) as span:
        try:
            outcome = COMMANDS[args.command](args)
        except (MotivicError, FileNotFoundError, ValueError) as err:
            record_error(span, err)
            record = ErrorRecord.from_exception(err, operation=args.command, run_id=run_id)
            logger.error("%s failed", args.command, extra={"error_record": record})
            print(f"❌ {err}", file=sys.stderr)
            outcome = Outcome(CommandStatus.INPUT_ERROR, report={"error": record.to_dict()})

    for line in outcome.lines:
        print(line)

    exit_code = EXIT_CODES[outcome.status]
    if outcome.status is CommandStatus.OK:
        print(f"✅ {args.command} ok", file=sys.stderr)
    elif outcome.status is CommandStatus.VERIFICATION_FAILED:
        print(f"⚠️  {args.command}: verification failed", file=sys.stderr)

    if args.report:
        field_mode = args.field_mode or config.field_mode
        run_dir = write_run_artifacts(
            args.report,
            args.command,
            outcome.status,
            exit_code,
            field_mode,
            report=outcome.report,
            lines=outcome.lines,
            run_id=run_id,
            inputs=RunInputs(outcome.inputs),
        )
        _print_summary(run_dir, args.command, outcome, exit_code)

    return exit_code


if __name__ == "__main__":
    sys.exit(main())
