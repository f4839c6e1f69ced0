"""
Reports: what a command computed, which contracts it checked, how they fared

Numbers are written with 17 significant digits so that a report read back
reproduces every float exactly and identical runs give identical bytes.
"""
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from config.harness_config import REPORT_TIMING
from utils.errors import DomainError
from utils.logger import setup_logger

logger = setup_logger("report")

FORMATS = ("json", "csv")


@dataclass
class Report:
    command: str
    arguments: dict
    seed: int
    results: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)
    contracts: list = field(default_factory=list)
    rows: list[dict] = field(default_factory=list)
    wall_time: float | None = None

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.contracts)

    def check(self, name: str, measured: float, tolerance: float, relation: str = "<="):
        """Record a contract with its measured value and tolerance"""
        measured = float(measured)
        ok = measured <= tolerance if relation == "<=" else measured >= tolerance
        self.contracts.append({"name": name, "measured": measured, "tolerance": float(tolerance),
                               "relation": relation, "passed": bool(ok)})

    def to_json(self) -> dict:
        data = {
            "command": self.command,
            "arguments": self.arguments,
            "seed": self.seed,
            "passed": self.passed,
            "results": self.results,
            "residuals": self.residuals,
            "diagnostics": self.diagnostics,
            "contracts": self.contracts,
        }
        if REPORT_TIMING and self.wall_time is not None:
            data["wall_time"] = self.wall_time
        return data


def format_number(value: float) -> str:
    if math.isnan(value):
        return "NaN"
    if math.isinf(value):
        return "Infinity" if value > 0 else "-Infinity"
    return "%.17g" % value


def _plain(value):
    if hasattr(value, "to_json"):
        return _plain(value.to_json())
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    return value


def _encode(value, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    close = " " * (indent * level)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{pad}{json.dumps(k, ensure_ascii=False)}: {_encode(v, indent, level + 1)}"
                 for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + close + "}"
    if isinstance(value, list):
        if not value:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in value):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in value) + "]"
        return "[\n" + ",\n".join(pad + _encode(v, indent, level + 1) for v in value) + "\n" + close + "]"
    if isinstance(value, bool) or value is None:
        return json.dumps(value)
    if isinstance(value, float):
        return format_number(value)
    if isinstance(value, int):
        return str(value)
    return json.dumps(value, ensure_ascii=False)


def dumps(data, indent: int = 2) -> str:
    """JSON text with 17-digit floats and keys in insertion order"""
    return _encode(_plain(data), indent, 0) + "\n"


def render_csv(report: Report) -> str:
    """One row per trial when the command produced rows, else one row per result field"""
    rows = report.rows
    if not rows:
        rows = [{"field": key, "value": value} for key, value in _flatten(_plain(report.results))]
        rows += [{"field": f"contract.{c['name']}", "value": c["measured"]} for c in report.contracts]
    columns = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(column, "")) for column in columns])
    return buffer.getvalue()


def _flatten(value, prefix: str = ""):
    if isinstance(value, dict):
        for key, item in value.items():
            yield from _flatten(item, f"{prefix}.{key}" if prefix else key)
    elif isinstance(value, list) and value and isinstance(value[0], (dict, list)):
        for index, item in enumerate(value):
            yield from _flatten(item, f"{prefix}[{index}]")
    elif isinstance(value, list):
        yield prefix, " ".join(_cell(v) for v in value)
    else:
        yield prefix, value


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format_number(float(value))
    if value is None:
        return ""
    return str(value)


def write_report(report: Report, fmt: str = "json", path: str | None = None):
    """
    Write a report as JSON or CSV

    Args:
        report: Report to write
        fmt: "json" or "csv"
        path: Destination file; stdout when None or "-"

    Raises:
        OSError: destination not writable
    """
    if fmt not in FORMATS:
        raise DomainError(f"unknown report format {fmt!r}")
    text = dumps(report.to_json()) if fmt == "json" else render_csv(report)
    if path is None or path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    destination = Path(path)
    if destination.parent and not destination.parent.exists():
        destination.parent.mkdir(parents=True, exist_ok=True)
    destination.write_text(text, encoding="utf-8")
    logger.info(f"wrote {fmt} report to {destination}")


def read_report(path: str) -> dict:
    with open(path, encoding="utf-8") as handle:
        return json.load(handle)
