"""Benchmark report assembly and rendering.

A report is one table per corpus scope: rows keyed by (method, backbone),
six metric columns (SRCC and PLCC for each score dimension). The machine
readable form is line-delimited evaluation records; the rendered form marks
the best value per column with '*' and the second best with '+'.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .. import DIMENSIONS

_COLUMNS = [(dim, metric) for dim in DIMENSIONS for metric in ("srcc", "plcc")]


@dataclass
class BenchmarkReport:
    scope: str
    rows: dict[tuple[str, str], dict[str, dict]] = field(default_factory=dict)
    records: list[dict] = field(default_factory=list)

    def add(self, record: dict) -> None:
        key = (record["method"], record["backbone"])
        self.rows.setdefault(key, {})[record["dimension"]] = record
        self.records.append(record)


def build_reports(records: list[dict]) -> list[BenchmarkReport]:
    if not records:
        raise ValueError("need at least one evaluation record")
    by_scope: dict[str, BenchmarkReport] = {}
    for record in records:
        scope = record["scope"]
        by_scope.setdefault(scope, BenchmarkReport(scope=scope)).add(record)
    return [by_scope[s] for s in sorted(by_scope)]


def _rank_marks(values: list[float | None]) -> list[str]:
    present = sorted({v for v in values if v is not None}, reverse=True)
    marks = []
    for v in values:
        if v is None:
            marks.append("")
        elif v == present[0]:
            marks.append("*")
        elif len(present) > 1 and v == present[1]:
            marks.append("+")
        else:
            marks.append("")
    return marks


def render_report(report: BenchmarkReport) -> str:
    keys = sorted(report.rows)
    cells: dict[tuple, float | None] = {}
    for key in keys:
        for dim, metric in _COLUMNS:
            record = report.rows[key].get(dim)
            cells[(key, dim, metric)] = None if record is None else record[metric]

    col_marks: dict[tuple[str, str], list[str]] = {}
    for dim, metric in _COLUMNS:
        col_marks[(dim, metric)] = _rank_marks([cells[(k, dim, metric)] for k in keys])

    label_width = max([len(f"{m} ({b})") for m, b in keys] + [len("method")])
    header_1 = " " * label_width + "  " + "  ".join(f"{dim:<18}" for dim in DIMENSIONS)
    header_2 = "  ".join(
        [f"{'method':<{label_width}}"]
        + [f"{metric.upper():<8}" for _ in DIMENSIONS for metric in ("srcc", "plcc")]
    )
    lines = [
        f"scope: {report.scope}",
        header_1.rstrip(),
        header_2.rstrip(),
        "-" * len(header_2),
    ]
    for i, key in enumerate(keys):
        method, backbone = key
        row = [f"{f'{method} ({backbone})':<{label_width}}"]
        for dim, metric in _COLUMNS:
            v = cells[(key, dim, metric)]
            mark = col_marks[(dim, metric)][i]
            cell = "-" if v is None else f"{v:.4f}{mark}"
            row.append(f"{cell:<8}")
        lines.append("  ".join(row).rstrip())
    return "\n".join(lines) + "\n"


def render_reports(reports: list[BenchmarkReport]) -> str:
    return "\n".join(render_report(r) for r in reports)


def write_report(records: list[dict], out_dir: str | Path, prefix: str = "report") -> tuple[Path, Path]:
    """Write report.jsonl (machine readable) and report.txt (rendered)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    reports = build_reports(records)
    jsonl_path = out_dir / f"{prefix}.jsonl"
    with open(jsonl_path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record) + "\n")
    txt_path = out_dir / f"{prefix}.txt"
    txt_path.write_text(render_reports(reports), encoding="utf-8")
    return jsonl_path, txt_path
