"""Audit reports and their two output formats.

The machine format is a stable, versioned JSON schema; identical inputs give
byte-identical output (timings live in the human format only, so reports can
be diffed and replayed).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

MACHINE_SCHEMA_VERSION = 1

PASS = "PASS"
FAIL = "FAIL"
INDETERMINATE = "INDETERMINATE"


@dataclass
class AuditResult:
    name: str
    target: str
    verdict: str
    witnesses: tuple[str, ...] = ()
    certified_depth: int | None = None
    details: dict = field(default_factory=dict)
    elapsed_ms: float = 0.0

    def as_json(self) -> dict:
        return {
            "name": self.name,
            "target": self.target,
            "verdict": self.verdict,
            "witnesses": list(self.witnesses),
            "certified_depth": self.certified_depth,
            "details": self.details,
        }


@dataclass
class AuditReport:
    command: str
    seed: int
    depth: int
    results: list[AuditResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.verdict == PASS for r in self.results)

    @property
    def counts(self) -> dict[str, int]:
        out = {PASS: 0, FAIL: 0, INDETERMINATE: 0}
        for r in self.results:
            out[r.verdict] = out.get(r.verdict, 0) + 1
        return out


def emit_report(report: AuditReport, fmt: str) -> str:
    if fmt == "machine-json" or fmt == "json":
        payload = {
            "schema_version": MACHINE_SCHEMA_VERSION,
            "command": report.command,
            "seed": report.seed,
            "depth": report.depth,
            "results": [r.as_json() for r in report.results],
            "summary": report.counts,
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"
    if fmt != "human":
        raise ValueError(f"unknown format {fmt!r}")
    lines = [
        f"forcebench {report.command} seed={report.seed} depth={report.depth}"
    ]
    for r in report.results:
        lines.append(
            f"{r.verdict:13s} {r.name} [{r.target}]"
            + (f" depth={r.certified_depth}" if r.certified_depth is not None else "")
            + f" ({r.elapsed_ms:.1f} ms)"
        )
        for w in r.witnesses:
            lines.append(f"              witness: {w}")
    c = report.counts
    lines.append(
        f"summary: {c[PASS]} pass, {c[FAIL]} fail, {c[INDETERMINATE]} indeterminate"
    )
    return "\n".join(lines) + "\n"


def parse_machine_report(text: str) -> dict:
    """Round-trip check hook: the machine format parses as its own schema."""
    data = json.loads(text)
    for key in ("schema_version", "command", "seed", "depth", "results", "summary"):
        if key not in data:
            raise ValueError(f"missing report key {key!r}")
    return data
