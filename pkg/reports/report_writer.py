# ============================================================================
# REPORT WRITER
# ============================================================================

import csv
import hashlib
import io
import json
import logging
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from models.data_models import ARTIFACT_VERSION, RunConfig

logger = logging.getLogger(__name__)


def _plain(value: Any) -> Any:
    """json.dumps fallback for numpy scalars/arrays, Fractions, Paths and enums"""
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, complex):
        return {"real": value.real, "imag": value.imag}
    if hasattr(value, "to_dict"):
        return value.to_dict()
    if hasattr(value, "value"):
        return value.value
    raise TypeError(f"cannot serialize {type(value).__name__}")


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False, sort_keys=True, default=_plain)


def input_hash(config: RunConfig, command: str, inputs: Dict[str, Any]) -> str:
    """sha256 of the canonical JSON of everything that determines a report"""
    payload = {"command": command, "config": config.to_dict(), "inputs": inputs}
    # output_path does not change the content
    payload["config"].pop("output_path", None)
    compact = json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False, default=_plain)
    return hashlib.sha256(compact.encode("utf-8")).hexdigest()


@dataclass
class Report:
    """Everything one CLI command writes: config, inputs, results, checks and tabular rows"""
    command: str
    config: RunConfig
    inputs: Dict[str, Any] = field(default_factory=dict)
    results: List[Dict[str, Any]] = field(default_factory=list)
    checks: List[Dict[str, Any]] = field(default_factory=list)
    rows: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def input_hash(self) -> str:
        return input_hash(self.config, self.command, self.inputs)

    @property
    def passed(self) -> bool:
        return all(check.get("passed", True) for check in self.checks)

    def add_check(self, name: str, passed: bool, **details) -> bool:
        self.checks.append({"name": name, "passed": bool(passed), **details})
        marker = "✓" if passed else "✗"
        logger.info("%s %s", marker, name)
        return bool(passed)

    def to_dict(self) -> dict:
        """Convert Report to dictionary for saving"""
        config = self.config.to_dict()
        config.pop("output_path", None)
        return {
            "version": ARTIFACT_VERSION,
            "command": self.command,
            "config": config,
            "inputs": self.inputs,
            "results": self.results,
            "checks": self.checks,
            "input_hash": self.input_hash,
        }

    def header_lines(self) -> List[str]:
        quad = self.config.quadrature
        return [
            f"# version: {ARTIFACT_VERSION}",
            f"# command: {self.command}",
            f"# d: {self.config.dimension}",
            f"# seed: {self.config.seed}",
            f"# method: {quad.method.value}",
            f"# nodes: n_outer={quad.n_outer} n_inner={quad.n_inner} n_radial={quad.n_radial} "
            f"n_samples={quad.n_samples}",
            f"# input_hash: {self.input_hash}",
        ]


def render_json(report: Report) -> str:
    return canonical_json(report.to_dict()) + "\n"


def render_csv(report: Report) -> str:
    """Header comment lines, then the rows (falling back to results, then checks)"""
    rows = report.rows or report.results or report.checks
    buffer = io.StringIO()
    for line in report.header_lines():
        buffer.write(line + "\n")
    fieldnames: List[str] = []
    for row in rows:
        for key in row:
            if key not in fieldnames:
                fieldnames.append(key)
    writer = csv.DictWriter(buffer, fieldnames=fieldnames, lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow({key: _cell(row.get(key, "")) for key in fieldnames})
    return buffer.getvalue()


def _cell(value: Any) -> Any:
    # numpy float64 subclasses float, so unwrap numpy scalars first
    if isinstance(value, (np.generic, Fraction, Path)):
        return _cell(_plain(value))
    if isinstance(value, (dict, list, tuple, complex)):
        return json.dumps(value, sort_keys=True, default=_plain)
    if isinstance(value, float):
        return repr(value)
    return value


def render(report: Report, output_format: str) -> str:
    return render_csv(report) if output_format == "csv" else render_json(report)


def save_report(report: Report, path: Optional[Path] = None, output_format: Optional[str] = None) -> bool:
    """
    Write the report to `path` (stdout when None), keeping a .backup of an existing file.
    Returns True on success.
    """
    output_format = output_format or report.config.output_format
    text = render(report, output_format)
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return True
    path = Path(path)
    try:
        if path.exists():
            backup_file = path.with_suffix(path.suffix + ".backup")
            path.replace(backup_file)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        logger.info("✓ Report saved: %s", path)
        return True
    except OSError as e:
        logger.error("✗ Save failed: %s", e)
        return False
