"""Run artifacts: canonical filenames, a run-scoped writer, and a run manifest.

``--report DIR`` writes each invocation into its own ``DIR/<run_id>/`` so
consecutive runs never clobber each other. The manifest records the command,
its status and exit code, the field mode, and input files by path and size
(never their content); ``result.yaml`` holds the structured report.
"""

from __future__ import annotations

import json
import uuid
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Optional

import yaml
from pydantic import BaseModel

MANIFEST_FILE = "run.json"
RESULT_FILE = "result.yaml"
OUTPUT_FILE = "output.txt"


@dataclass
class RunInputs:
    """Input files by path and size."""

    paths: list[str] = field(default_factory=list)

    def describe(self) -> list[dict]:
        out = []
        for raw in self.paths:
            path = Path(raw)
            size = path.stat().st_size if path.is_file() else None
            out.append({"path": str(raw), "bytes": size})
        return out


def generate_run_id(now: Optional[datetime] = None) -> str:
    """Return a sortable, unique run id: ``YYYYmmdd-HHMMSS-<8 hex>``."""
    stamp = (now or datetime.now()).strftime("%Y%m%d-%H%M%S")
    return f"{stamp}-{uuid.uuid4().hex[:8]}"


def build_manifest(
    run_id: str,
    command: str,
    status: Any,
    exit_code: int,
    field_mode: Any,
    inputs: Optional[RunInputs] = None,
) -> dict:
    return {
        "run_id": run_id,
        "command": command,
        "status": getattr(status, "value", status),
        "exit_code": exit_code,
        "field_mode": getattr(field_mode, "value", field_mode),
        "inputs": inputs.describe() if inputs is not None else [],
    }


def _plain(report: Any) -> Any:
    if isinstance(report, BaseModel):
        return report.model_dump(mode="json")
    if isinstance(report, list):
        return [_plain(r) for r in report]
    if isinstance(report, dict):
        return {str(k): _plain(v) for k, v in report.items()}
    return report


def write_run_artifacts(
    base_dir: Path,
    command: str,
    status: Any,
    exit_code: int,
    field_mode: Any,
    report: Any = None,
    lines: Optional[list[str]] = None,
    run_id: Optional[str] = None,
    inputs: Optional[RunInputs] = None,
) -> Path:
    """Write the manifest, the structured report and the printed lines; return the run dir."""
    run_id = run_id or generate_run_id()
    run_dir = Path(base_dir) / run_id
    run_dir.mkdir(parents=True, exist_ok=True)
    artifacts: list[str] = []

    if report is not None:
        (run_dir / RESULT_FILE).write_text(yaml.safe_dump(_plain(report), sort_keys=False, allow_unicode=True))
        artifacts.append(RESULT_FILE)
    if lines:
        (run_dir / OUTPUT_FILE).write_text("\n".join(lines) + "\n")
        artifacts.append(OUTPUT_FILE)

    manifest = build_manifest(run_id, command, status, exit_code, field_mode, inputs)
    manifest["artifacts"] = artifacts
    (run_dir / MANIFEST_FILE).write_text(json.dumps(manifest, indent=2, default=str))
    return run_dir
