"""Scenario report containers and their CSV/JSON emission.

Every scenario produces a ScenarioReport: an echo of its configuration, a
list of named checks with pass/fail and margins, and plot-ready tables.
CSV files carry '#'-prefixed header lines echoing the full configuration
(sorted keys) and the claim the scenario exercises, so a table is
self-describing; the JSON report mirrors the same content.  Output is
byte-stable: floats print through repr (shortest round-trip form) and JSON
keys are sorted.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

__all__ = ["CheckResult", "Table", "ScenarioReport", "write_report"]


@dataclass
class CheckResult:
    name: str
    passed: bool
    margin: float = float("nan")
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed,
                "margin": self.margin, "detail": self.detail}


@dataclass
class Table:
    name: str
    columns: list[str]
    rows: list[tuple]
    plot_hint: str = "lines"    # lines | semilogy | density | scatter_fit

    def to_rows_of_dicts(self) -> list[dict]:
        return [dict(zip(self.columns, r)) for r in self.rows]


@dataclass
class ScenarioReport:
    scenario: str
    claim: str
    config: dict
    checks: list[CheckResult] = field(default_factory=list)
    tables: list[Table] = field(default_factory=list)
    files: list[str] = field(default_factory=list)
    wall_clock: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "claim": self.claim,
            "config": self.config,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "tables": {t.name: t.to_rows_of_dicts() for t in self.tables},
            "files": self.files,
            "wall_clock": self.wall_clock,
        }


def _fmt(v: Any) -> str:
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, complex):
        return f"{v.real!r}{'+' if v.imag >= 0 else '-'}{abs(v.imag)!r}j"
    return str(v)


def _csv_text(table: Table, report: ScenarioReport) -> str:
    lines = [f"# scenario={report.scenario}", f"# claim={report.claim}"]
    for k in sorted(report.config):
        lines.append(f"# {k}={_fmt(report.config[k])}")
    lines.append(",".join(table.columns))
    for row in table.rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def write_report(report: ScenarioReport, out_dir: str | Path,
                 figures: bool = True) -> list[Path]:
    """Emit CSV per table, one JSON mirror, and figures (PNG) per table."""
    out = Path(out_dir) / report.scenario
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for table in report.tables:
        path = out / f"{table.name}.csv"
        path.write_text(_csv_text(table, report))
        written.append(path)
    if figures:
        from .figures import render_table
        for table in report.tables:
            try:
                fig_path = out / f"{table.name}.png"
                render_table(table, fig_path, title=f"{report.scenario}: {table.name}")
                written.append(fig_path)
            except Exception as exc:  # a failed plot never blocks the data
                (out / f"{table.name}.plot-failed.txt").write_text(str(exc) + "\n")
    report.files = [str(p) for p in written] + [str(out / "report.json")]
    json_path = out / "report.json"
    json_path.write_text(json.dumps(report.to_dict(), sort_keys=True, indent=1,
                                    default=_fmt) + "\n")
    written.append(json_path)
    return written
