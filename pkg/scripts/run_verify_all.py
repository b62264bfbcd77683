#!/usr/bin/env python3
"""Run every audit declared in the demo workspace, in both output formats."""
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from forcebench.cli import execute
from forcebench.report import emit_report
from forcebench.workspace import parse_workspace


def main() -> int:
    root = pathlib.Path(__file__).resolve().parents[1]
    doc = parse_workspace((root / "workspaces" / "demo.json").read_text())
    report = execute(doc, "verify-all", seed=0, depth=8)
    print(emit_report(report, "human"))
    print(emit_report(report, "machine-json"))
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
