"""Unit tests for run artifacts and the run manifest."""

import json

import yaml

from runtime.motivic import artifacts
from runtime.motivic.artifacts import RunInputs, build_manifest, generate_run_id, write_run_artifacts
from runtime.motivic.config import FieldMode
from runtime.motivic.contracts import CheckReport


def test_generate_run_id_is_sortable_and_unique():
    a = generate_run_id()
    b = generate_run_id()
    assert a != b
    # YYYYmmdd-HHMMSS-<8 hex>
    stamp, _, suffix = a.rpartition("-")
    assert len(suffix) == 8
    assert len(stamp) == len("20260101-120000")


def test_build_manifest_records_inputs_by_size_only(tmp_path):
    path = tmp_path / "loop.qp"
    path.write_text("vertex v\narrow a: v -> v\npotential: 1 a a a\n")
    manifest = build_manifest("rid", "stasheff", "ok", 0, FieldMode.CLOSED, RunInputs([str(path)]))

    assert manifest["run_id"] == "rid"
    assert manifest["command"] == "stasheff"
    assert manifest["field_mode"] == "closed"
    assert manifest["inputs"] == [{"path": str(path), "bytes": path.stat().st_size}]
    assert "potential" not in json.dumps(manifest)


def test_missing_inputs_have_no_size():
    assert RunInputs(["nope.qp"]).describe() == [{"path": "nope.qp", "bytes": None}]


def test_write_run_artifacts_creates_run_scoped_dir(tmp_path):
    report = CheckReport(name="stasheff", passed=True, checked=12, arities=[1, 4], summary="PASS (arities 1..4)")
    run_dir = write_run_artifacts(
        tmp_path, "stasheff", "ok", 0, "rationals", report=report, lines=["stasheff: PASS"], run_id="rid-1"
    )

    assert run_dir == tmp_path / "rid-1"
    assert (run_dir / artifacts.OUTPUT_FILE).read_text() == "stasheff: PASS\n"
    result = yaml.safe_load((run_dir / artifacts.RESULT_FILE).read_text())
    assert result["passed"] is True
    assert result["arities"] == [1, 4]

    manifest = json.loads((run_dir / artifacts.MANIFEST_FILE).read_text())
    assert manifest["exit_code"] == 0
    assert manifest["artifacts"] == [artifacts.RESULT_FILE, artifacts.OUTPUT_FILE]


def test_nested_reports_are_flattened(tmp_path):
    report = {"first": CheckReport(name="a", passed=False), 2: [CheckReport(name="b", passed=True)]}
    run_dir = write_run_artifacts(tmp_path, "mf", "ok", 0, "rationals", report=report, run_id="r")

    result = yaml.safe_load((run_dir / artifacts.RESULT_FILE).read_text())
    assert result["first"]["passed"] is False
    assert result["2"][0]["name"] == "b"


def test_write_run_artifacts_two_runs_do_not_clobber(tmp_path):
    write_run_artifacts(tmp_path, "motive", "ok", 0, "rationals", lines=["first"], run_id="r1")
    write_run_artifacts(tmp_path, "motive", "ok", 0, "rationals", lines=["second"], run_id="r2")

    assert (tmp_path / "r1" / artifacts.OUTPUT_FILE).read_text() == "first\n"
    assert (tmp_path / "r2" / artifacts.OUTPUT_FILE).read_text() == "second\n"


def test_empty_run_writes_only_the_manifest(tmp_path):
    run_dir = write_run_artifacts(tmp_path, "mc", "input_error", 2, "rationals", run_id="r")
    manifest = json.loads((run_dir / artifacts.MANIFEST_FILE).read_text())
    assert manifest["artifacts"] == []
    assert manifest["status"] == "input_error"
    assert not (run_dir / artifacts.RESULT_FILE).exists()
