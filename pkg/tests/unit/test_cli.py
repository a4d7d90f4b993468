"""
Unit tests for the CLI wrapper.

These cover argument handling, exit codes and the canonical stdout lines. The
heavier identities run through the CLI in tests/integration.
"""

import json

import pytest

from runtime.motivic import cli
from runtime.motivic.ainfty import koszul_dual
from runtime.motivic.formats import load_quiver, parse_tw_literal
from runtime.motivic.motive import ONE
from runtime.motivic.twisted import TwistedObject, mc_system, split_endomorphism_potential, tau_from_dimensions
from runtime.motivic.vanishing import milnor_fibre_sum


def _run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out.splitlines(), err


def test_cli_requires_a_subcommand():
    with pytest.raises(SystemExit) as excinfo:
        cli.main([])

    assert excinfo.value.code != 0


def test_exit_codes_cover_every_status():
    assert {cli.EXIT_CODES[s] for s in cli.CommandStatus} == {0, 1, 2}


class TestMotive:
    def test_eval_prints_canonical_form(self, capsys):
        code, lines, err = _run(capsys, "motive", "eval", "GLinv(1)*(L-1)")
        assert code == 0
        assert lines == [ONE.to_text()]
        assert "✅" in err

    def test_parse_error_is_an_input_error(self, capsys):
        code, lines, err = _run(capsys, "motive", "eval", "L +")
        assert code == 2
        assert lines == []
        assert "❌" in err


class TestMilnorFibre:
    def test_thom_sebastiani(self, capsys):
        code, lines, _ = _run(capsys, "mf", "--ts", "4", "4")
        assert code == 0
        assert lines == [milnor_fibre_sum((4, 4)).to_text()]

    def test_resolution_with_parameter(self, capsys):
        code, lines, _ = _run(capsys, "mf", "--resolution", "x_n", "--param", "n=3")
        assert code == 0
        assert lines[0].startswith("psi = ")
        assert lines[1].startswith("phi = ")

    def test_bad_parameter_is_rejected_by_argparse(self):
        with pytest.raises(SystemExit):
            cli.main(["mf", "--resolution", "x_n", "--param", "n"])


class TestAlgebraCommands:
    def test_stasheff_passes(self, capsys):
        code, lines, _ = _run(capsys, "stasheff", "--quiver", "one_loop_a2", "--nmax", "4")
        assert code == 0
        assert lines == ["stasheff: PASS (arities 1..4)", "cyclic: PASS (arities 1..4)"]

    def test_missing_quiver_file(self, capsys, tmp_path):
        code, _, err = _run(capsys, "stasheff", "--quiver", str(tmp_path / "nope.qp"))
        assert code == 2
        assert "not found" in err

    def test_mc_counts(self, capsys):
        cat = koszul_dual(load_quiver("one_loop_a4"))
        expected = mc_system(cat, tau_from_dimensions(cat, [3]))
        code, lines, _ = _run(capsys, "mc", "--quiver", "one_loop_a4", "--dim", "3", "--symbolic")
        assert code == 0
        assert lines[1] == f"equations: {len(expected)}"
        assert len(lines) == 2 + len(expected)

    def test_mc_dimension_mismatch(self, capsys):
        code, _, _ = _run(capsys, "mc", "--quiver", "conifold", "--dim", "1")
        assert code == 2

    def test_wmin_of_the_nontrivial_extension(self, capsys):
        literal = "1, 1 : 1,2 = a*"
        cat = koszul_dual(load_quiver("one_loop_a4"))
        lit = parse_tw_literal(literal)
        split = split_endomorphism_potential(cat, TwistedObject(lit.tau, lit.matrix()), 8)

        code, lines, _ = _run(capsys, "wmin", "--quiver", "one_loop_a4", "--tw", literal, "--order", "8")
        assert code == 0
        assert lines == ["ext: 0:2 1:1 2:1 3:2", f"w_min: {split.w_min}", f"q: {split.q}"]

    def test_wmin_rejects_unknown_generators(self, capsys):
        code, _, _ = _run(capsys, "wmin", "--quiver", "one_loop_a4", "--tw", "1, 1 : 1,2 = b*")
        assert code == 2


class TestOrientationCommands:
    def test_j2_at_the_nontrivial_extension(self, capsys):
        code, lines, _ = _run(
            capsys, "j2", "--quiver", "one_loop_a4", "--ext", "1 | 1 | 1,1 = a*", "--field-mode", "closed"
        )
        assert code == 0
        assert lines[0] == "l = (1, 1)"
        assert lines[-1] == "cocycle: true"

    def test_j2_malformed_extension(self, capsys):
        code, _, _ = _run(capsys, "j2", "--quiver", "one_loop_a4", "--ext", "1 | 1")
        assert code == 2

    def test_empty_lagrangian(self, capsys):
        code, lines, _ = _run(capsys, "lagrangian", "--quiver", "one_loop_a4", "--arrows", "", "--dim", "1")
        assert code == 0
        lag, ref = (line.split(": ")[1] for line in lines)
        assert lag == ref

    def test_invalid_lagrangian(self, capsys):
        code, _, _ = _run(capsys, "lagrangian", "--quiver", "one_loop_a4", "--arrows", "a", "--dim", "1")
        assert code == 2


class TestSeriesCommands:
    def test_w0_series_lines(self, capsys):
        code, lines, _ = _run(capsys, "dtseries", "--quiver", "p1", "--trunc", "1,1")
        assert code == 0
        assert len(lines) == 4
        assert lines[0] == f"gamma=(0,0) coeff={ONE.to_text()}"
        assert all(line.startswith("gamma=(") for line in lines)

    def test_series_needs_zero_potential(self, capsys):
        code, _, _ = _run(capsys, "dtseries", "--quiver", "conifold", "--trunc", "1,1")
        assert code == 2

    def test_framed_flag_defaults_to_first_vertex(self, capsys):
        code, lines, _ = _run(capsys, "dtseries", "--quiver", "p1", "--framed", "--trunc", "1,1,0")
        assert code == 0
        assert "gamma=(1,1,0)" in " ".join(lines)

    def test_conjugation_identity(self, capsys):
        code, lines, _ = _run(
            capsys, "dtseries", "--check", "con1", "--n", "1", "--trunc", "1,6,7", "--total", "8"
        )
        assert code == 0
        assert lines == ["con1 n=1: PASS"]

    def test_factorization(self, capsys):
        code, lines, _ = _run(capsys, "dtseries", "--check", "hn", "--trunc", "4,4", "--total", "4")
        assert code == 0
        assert lines == ["hn: PASS"]

    def test_hall_product(self, capsys):
        code, lines, _ = _run(capsys, "dtseries", "--quiver", "p1", "--check", "hall", "--trunc", "2,2")
        assert code == 0
        assert lines == ["hall: PASS"]

    def test_failed_identity_exits_one(self, capsys, mocker):
        mocker.patch("runtime.motivic.cli.hn_factorization_check", return_value=False)
        code, lines, err = _run(capsys, "dtseries", "--check", "hn", "--trunc", "2,2")
        assert code == 1
        assert lines == ["hn: FAIL"]
        assert "verification failed" in err

    def test_bad_truncation(self, capsys):
        code, _, _ = _run(capsys, "dtseries", "--check", "hn", "--trunc", "2,-1")
        assert code == 2


class TestReport:
    def test_report_writes_run_scoped_artifacts(self, capsys, tmp_path):
        code, _, err = _run(capsys, "motive", "eval", "L", "--report", str(tmp_path))
        assert code == 0
        (run_dir,) = list(tmp_path.iterdir())
        manifest = json.loads((run_dir / "run.json").read_text())
        assert manifest["command"] == "motive"
        assert manifest["exit_code"] == 0
        assert (run_dir / "result.yaml").exists()
        assert "Run summary" in err

    def test_report_records_input_errors(self, capsys, tmp_path):
        code, _, _ = _run(capsys, "motive", "eval", "L +", "--report", str(tmp_path))
        assert code == 2
        (run_dir,) = list(tmp_path.iterdir())
        manifest = json.loads((run_dir / "run.json").read_text())
        assert manifest["status"] == "input_error"

    def test_bad_environment_is_reported(self, capsys, monkeypatch):
        monkeypatch.setenv("MOTIVIC_FIELD_MODE", "complex")
        code, _, err = _run(capsys, "motive", "eval", "L")
        assert code == 2
        assert "MOTIVIC_FIELD_MODE" in err
