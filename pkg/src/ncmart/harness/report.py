"""Structured verification reports with JSON and CSV serialization.

The numeric payload of a report is deterministic for a fixed config and
seed; wall-clock timing is kept in a separate top-level key so two runs
can be compared byte for byte after dropping it.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .checks import CheckRecord


@dataclass
class VerificationReport:
    command: str
    config: dict
    records: list[CheckRecord] = field(default_factory=list)
    tables: dict = field(default_factory=dict)
    certificates: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.records)

    def numeric_payload(self) -> dict:
        """Everything except timing; identical across identical seeded runs."""
        return {
            "command": self.command,
            "config": self.config,
            "summary": self.summary,
            "records": [asdict(r) for r in self.records],
            "tables": self.tables,
            "certificates": self.certificates,
        }

    def to_dict(self) -> dict:
        out = self.numeric_payload()
        out["timing"] = self.timing
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def summarize(self) -> None:
        """Aggregate per-check worst residuals and pass counts."""
        per_check: dict[str, dict] = {}
        for r in self.records:
            agg = per_check.setdefault(r.check, {
                "formula": r.formula, "tolerance": r.tolerance,
                "max_residual": 0.0, "count": 0, "failures": 0,
            })
            agg["max_residual"] = max(agg["max_residual"], r.residual)
            agg["count"] += 1
            agg["failures"] += 0 if r.passed else 1
        self.summary["checks"] = per_check
        self.summary["all_passed"] = self.all_passed

    # -- output -----------------------------------------------------------

    def csv_rows(self) -> tuple[list[str], list[dict]]:
        """The command's sweep table as (columns, rows) for CSV output."""
        name = self.tables.get("csv_table")
        if name and name in self.tables:
            rows = self.tables[name]
        else:
            rows = [asdict(r) for r in self.records]
        if not rows:
            return [], []
        return list(rows[0].keys()), rows

    def render_csv(self) -> str:
        columns, rows = self.csv_rows()
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
        return buf.getvalue()

    def write(self, path: str | Path, fmt: str = "json") -> None:
        text = self.to_json() if fmt == "json" else self.render_csv()
        Path(path).write_text(text + "\n" if not text.endswith("\n") else text,
                              encoding="utf-8")
