"""
Golden runs of the CLI against the shipped data.

Each test goes through ``cli.main`` exactly as a shell invocation would and
checks the canonical stdout lines and the exit code.
"""

import json

import pytest

from runtime.motivic import cli
from runtime.motivic.grammar import parse_motive
from runtime.motivic.vanishing import milnor_fibre_sum

pytestmark = pytest.mark.integration


def _run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out.splitlines(), err


def test_trivial_motive(capsys):
    assert _run(capsys, "motive", "eval", "GLinv(1)*(L-1)")[:2] == (0, ["1"])


@pytest.mark.parametrize("a, b", [(2, 2), (4, 2), (4, 4), (3, 5)])
def test_printed_milnor_fibres_parse_back(capsys, a, b):
    code, (line,), _ = _run(capsys, "mf", "--ts", str(a), str(b))
    assert code == 0
    assert parse_motive(line) == milnor_fibre_sum((a, b))


def test_eval_is_idempotent_on_its_own_output(capsys):
    _, (line,), _ = _run(capsys, "mf", "--ts", "4", "4")
    _, (again,), _ = _run(capsys, "motive", "eval", line)
    assert again == line


@pytest.mark.parametrize("name, a, b", [("x4y4", 4, 4), ("x4y2", 4, 2), ("x2y2", 2, 2)])
def test_resolution_route_matches_thom_sebastiani(capsys, name, a, b):
    _, lines, _ = _run(capsys, "mf", "--resolution", name)
    _, (ts,), _ = _run(capsys, "mf", "--ts", str(a), str(b))
    assert lines[0] == f"psi = {ts}"


def test_conifold_passes_to_the_default_arity(capsys):
    code, lines, _ = _run(capsys, "stasheff", "--quiver", "conifold")
    assert code == 0
    assert lines == ["stasheff: PASS (arities 1..8)", "cyclic: PASS (arities 1..8)"]


def test_parse_errors_carry_line_numbers(capsys, tmp_path):
    path = tmp_path / "bad.res"
    path.write_text("divisor E mult 2\nstratum {E} class L +\n")
    code, lines, err = _run(capsys, "mf", "--resolution", str(path))
    assert code == 2
    assert lines == []
    assert f"{path}:2:" in err


def test_quiver_file_by_path(capsys, tmp_path):
    path = tmp_path / "cubic.qp"
    path.write_text("vertex 1\narrow a: 1 -> 1\npotential: 1 a a a\n")
    code, lines, _ = _run(capsys, "stasheff", "--quiver", str(path), "--nmax", "4", "--report", str(tmp_path / "out"))
    assert code == 0
    assert lines[0] == "stasheff: PASS (arities 1..4)"
    (run_dir,) = list((tmp_path / "out").iterdir())
    manifest = json.loads((run_dir / "run.json").read_text())
    assert manifest["inputs"][0]["path"] == str(path)


def test_lagrangian_sample_on_the_conifold(capsys):
    code, lines, _ = _run(capsys, "lagrangian", "--quiver", "conifold", "--arrows", "x1", "--tw", "1, 2")
    assert code == 0
    assert lines[0].split(": ")[1] == lines[1].split(": ")[1]


def test_conifold_identities(capsys):
    code, lines, _ = _run(capsys, "dtseries", "--check", "con1", "--n", "2", "--trunc", "1,9,10", "--total", "10")
    assert (code, lines) == (0, ["con1 n=2: PASS"])
    code, lines, _ = _run(capsys, "dtseries", "--check", "hn", "--trunc", "4,4", "--total", "4")
    assert (code, lines) == (0, ["hn: PASS"])


def test_runs_are_deterministic(capsys):
    first = _run(capsys, "dtseries", "--quiver", "p1", "--framed", "2", "--trunc", "1,2,2", "--total", "4")
    second = _run(capsys, "dtseries", "--quiver", "p1", "--framed", "2", "--trunc", "1,2,2", "--total", "4")
    assert first[:2] == second[:2]
    assert first[0] == 0
