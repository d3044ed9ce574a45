import json
import logging
import os
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import ClassVar

import pandas as pd

from .rational import format_fraction

log = logging.getLogger("trustcheck")


@dataclass
class ResultRow:
    formula: str
    at: str | None
    engine: str
    verdict: bool | None = None
    value: Fraction | None = None
    header: ClassVar[list] = ["formula", "at", "engine", "verdict", "value"]

    def to_dict(self) -> dict:
        out = asdict(self)
        out["value"] = format_fraction(self.value) if self.value is not None else None
        return out

    def outcome(self) -> str:
        if self.value is not None:
            return format_fraction(self.value)
        return "true" if self.verdict else "false"


class RunReport:
    """Everything one CLI invocation produced; deterministic unless timings are included."""

    def __init__(self, command, model_name, version, include_timings=False):
        self.command = command
        self.model_name = model_name
        self.version = version
        self.include_timings = include_timings
        self.results: list[ResultRow] = []
        self.sections: list[tuple[str, str]] = []
        self.tables: dict[str, list[dict]] = {}
        self.timings: dict[str, float] = {}
        self.warnings: list[str] = []

    def add_result(self, row: ResultRow):
        self.results.append(row)

    def add_section(self, title, text):
        self.sections.append((title, text))

    def add_table(self, name, rows):
        self.tables[name] = rows

    def add_timing(self, stage, seconds):
        self.timings[stage] = seconds

    def add_warning(self, message):
        if message not in self.warnings:
            self.warnings.append(message)

    @property
    def exit_code(self) -> int:
        """0 when every Boolean verdict holds, 1 otherwise; query values do not fail a run."""
        return 1 if any(r.value is None and r.verdict is False for r in self.results) else 0

    def to_text(self) -> str:
        lines = []
        for r in self.results:
            where = f" at {r.at}" if r.at else ""
            lines.append(f"{r.outcome()}\t{r.formula}{where} [{r.engine}]")
        for title, text in self.sections:
            lines.append(f"# {title}")
            lines.append(text.rstrip("\n"))
        for w in self.warnings:
            lines.append(f"warning: {w}")
        if self.include_timings:
            for stage, seconds in self.timings.items():
                lines.append(f"time {stage}: {seconds:.3f}s")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        json_out = {
            "trustcheck_version": self.version,
            "command": self.command,
            "model": self.model_name,
            "results": [r.to_dict() for r in self.results],
            "tables": self.tables,
            "sections": {title: text for title, text in self.sections},
            "warnings": self.warnings,
        }
        if self.include_timings:
            json_out["timings"] = self.timings
        return json_out

    def write_report(self, outdir):
        path = os.path.join(outdir, "trustcheck_report.txt")
        with open(path, "w") as f:
            f.write(f"trustcheck v. {self.version} ({self.command} on {self.model_name})\n===================\n")
            f.write(self.to_text())
        log.debug(f"Wrote trustcheck_report.txt to {outdir}, size: {os.path.getsize(path)} bytes")

    def write_json(self, outdir):
        path = os.path.join(outdir, "trustcheck_report.json")
        with open(path, "w") as f:
            f.write(json.dumps(self.to_json(), indent=2, sort_keys=True))
        log.debug(f"Wrote trustcheck_report.json to {outdir}, size: {os.path.getsize(path)} bytes")

    def write_dataframe(self, outdir):
        """Results, or the first table when a command has no verdicts, as csv."""
        if self.results:
            df = pd.DataFrame([r.to_dict() for r in self.results], columns=ResultRow.header)
        elif self.tables:
            df = pd.DataFrame(next(iter(self.tables.values())))
        else:
            return
        path = os.path.join(outdir, "trustcheck_results.csv")
        df.to_csv(path, index=False)
        log.debug(f"Wrote trustcheck_results.csv to {outdir}, size: {os.path.getsize(path)} bytes")
