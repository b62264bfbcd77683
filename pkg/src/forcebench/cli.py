"""Command-line entry point: run audits from a workspace document.

Commands: complete, retraction-laws, bvm-audit, twostep-iso, iterate,
sg-audit, gallery, verify-all.  A command runs its audit over the matching
requests in the document's audit list, falling back to every applicable
declared object when none are listed; verify-all runs the whole audit list
(or every default audit when the list is empty).  Exit status: 0 all pass,
1 any fail, 2 usage or parse error.
"""
from __future__ import annotations

import argparse
import random
import sys
import time

from .bvm import forcing_audit, standard_formula_pool, standard_name_pool
from .errors import ForcebenchError, UnknownCommand
from .gallery import build_fresh_tower, sup_gap_audit, wedge_meet_audit
from .iteration import (
    ConstantThread,
    direct_limit_correspondence_audit,
    omega_length_oracle,
    rcs_membership,
    thread_validate,
)
from .morphisms import retraction_laws_audit
from .poset import boolean_completion
from .report import FAIL, PASS, AuditReport, AuditResult, emit_report
from .semigen import disjointify_sg_audit, restriction_audit, semigeneric_sup_audit
from .two_step import two_step_iso_audit
from .workspace import AUDIT_KINDS, WorkspaceDoc, parse_workspace

COMMANDS = AUDIT_KINDS + ("verify-all",)

_DEFAULT_TARGET_KIND = {
    "complete": "poset",
    "retraction-laws": "hom",
    "bvm-audit": "algebra",
    "twostep-iso": "hom",
    "iterate": "system",
    "sg-audit": "trace",
}


def execute(
    doc: WorkspaceDoc,
    command: str,
    seed: int = 0,
    depth: int = 8,
    exhaustive_max_atoms: int = 4,
) -> AuditReport:
    if command not in COMMANDS:
        raise UnknownCommand(f"unknown command {command!r}")
    tasks = _tasks_for(doc, command)
    report = AuditReport(command, seed, depth)
    for index, task in enumerate(tasks):
        rng = random.Random(f"{seed}:{index}:{task['audit']}")
        started = time.perf_counter()
        for result in _run_task(doc, task, rng, depth, exhaustive_max_atoms):
            result.elapsed_ms = (time.perf_counter() - started) * 1000.0
            report.results.append(result)
            started = time.perf_counter()
    return report


def _tasks_for(doc: WorkspaceDoc, command: str) -> list[dict]:
    if command == "verify-all":
        if doc.audits:
            return list(doc.audits)
        out = []
        for kind in AUDIT_KINDS:
            out.extend(_default_tasks(doc, kind))
        return out
    listed = [a for a in doc.audits if a["audit"] == command]
    if listed:
        return listed
    return _default_tasks(doc, command)


def _default_tasks(doc: WorkspaceDoc, command: str) -> list[dict]:
    if command == "gallery":
        return [{"audit": "gallery"}]
    kind = _DEFAULT_TARGET_KIND[command]
    return [{"audit": command, "target": n} for n, _ in doc.of_kind(kind)]


def _run_task(doc, task, rng, depth, exhaustive_max_atoms):
    audit = task["audit"]
    if audit == "gallery":
        d = int(task.get("depth", depth))
        tower = build_fresh_tower(max(d, 3))
        for fn, label in ((sup_gap_audit, "gallery.sup-gap"), (wedge_meet_audit, "gallery.wedge-meet")):
            g = fn(max(d, 3), tower)
            yield AuditResult(
                label,
                f"fresh-tower depth {max(d, 3)}",
                PASS if g.passed else FAIL,
                tuple(
                    f"{k}: {v.witness}" for k, v in g.claims.items() if not v.passed
                ),
                certified_depth=g.depth,
                details={"claims": {k: v.passed for k, v in g.claims.items()}},
            )
        return

    target = task["target"]
    if audit == "complete":
        poset = doc.resolve(target, "poset")
        completion = boolean_completion(poset)
        checks = completion.audit()
        yield AuditResult(
            "complete",
            target,
            PASS if all(checks.values()) else FAIL,
            tuple(k for k, ok in checks.items() if not ok),
            details={"atoms": completion.algebra.atom_count},
        )
    elif audit == "retraction-laws":
        hom = doc.resolve(target, "hom")
        exhaustive = (
            hom.source.atom_count <= exhaustive_max_atoms
            and hom.target.atom_count <= 6
        )
        r = retraction_laws_audit(hom, exhaustive=exhaustive, rng=rng)
        yield AuditResult(
            "retraction-laws",
            target,
            PASS if r.passed else FAIL,
            tuple(f"{law}: {r.witnesses.get(law, '')}" for law in r.failures()),
            details={"laws": len(r.laws), "exhaustive": exhaustive},
        )
    elif audit == "bvm-audit":
        algebra = doc.resolve(target, "algebra")
        max_rank = int(task.get("max_rank", 2))
        pool = standard_name_pool(algebra, max_rank=max_rank)
        cap = int(task.get("pool_cap", 32))
        r = forcing_audit(algebra, pool[:cap], standard_formula_pool())
        yield AuditResult(
            "bvm-audit",
            target,
            PASS if r.passed else FAIL,
            tuple(r.divergences[:5]),
            details={"cases": r.cases, "pool": min(len(pool), cap)},
        )
    elif audit == "twostep-iso":
        hom = doc.resolve(target, "hom")
        iso = two_step_iso_audit(hom, rng)
        yield AuditResult(
            "twostep-iso",
            target,
            PASS if iso.passed else FAIL,
            tuple(iso.failures[:5]),
            details={"sum_atoms": iso.two.algebra.atom_count},
        )
    elif audit == "iterate":
        system = doc.resolve(target, "system")
        r = direct_limit_correspondence_audit(system)
        witnesses = tuple(r.failures[:5])
        verdicts_ok = True
        oracle = omega_length_oracle()
        last = system.algebra(system.length - 1)
        for e in last.nonzero_elements():
            t = ConstantThread(system.length - 1, e)
            thread_validate(system, t)
            v = rcs_membership(system, t, oracle)
            if v.member is not True:
                verdicts_ok = False
        ok = r.passed and verdicts_ok
        yield AuditResult(
            "iterate",
            target,
            PASS if ok else FAIL,
            witnesses if not ok else (),
            details={"length": system.length, **r.details},
        )
    elif audit == "sg-audit":
        trace = doc.resolve(target, "trace")
        dis = disjointify_sg_audit(trace)
        sup = semigeneric_sup_audit(trace)
        restrictions_ok = True
        witnesses = []
        for b in sorted(trace.carrier):
            if b == 0:
                continue
            rr = restriction_audit(trace, b)
            if not rr.equal or not rr.upward_ok:
                restrictions_ok = False
                witnesses.append(f"restriction law fails below element {b}")
        ok = dis.equal and sup.equal and sup.sg_is_semigeneric and restrictions_ok
        if not dis.equal:
            witnesses.append("disjointification degree mismatch")
        if not sup.equal:
            witnesses.append("sup characterization mismatch")
        yield AuditResult(
            "sg-audit",
            target,
            PASS if ok else FAIL,
            tuple(witnesses[:5]),
            details={
                "closure_ok": dis.closure_ok,
                "names_audited": sup.names_audited,
            },
        )
    else:  # pragma: no cover
        raise UnknownCommand(f"unknown audit {audit!r}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="forcebench",
        description="audit workbench for the algebra of forcing at desk scale",
    )
    parser.add_argument("--workspace", help="path to a workspace JSON document")
    parser.add_argument("--command", required=True, choices=COMMANDS)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--depth", type=int, default=8)
    parser.add_argument("--format", default="human", choices=("human", "json"))
    parser.add_argument("--exhaustive-max-atoms", type=int, default=4)
    try:
        args = parser.parse_args(argv)
    except SystemExit:
        return 2
    if args.workspace is None and args.command not in ("gallery",):
        print("a --workspace document is required for this command", file=sys.stderr)
        return 2
    try:
        if args.workspace is not None:
            with open(args.workspace, "r", encoding="utf-8") as fh:
                doc = parse_workspace(fh.read())
        else:
            doc = WorkspaceDoc(1)
        report = execute(
            doc,
            args.command,
            seed=args.seed,
            depth=args.depth,
            exhaustive_max_atoms=args.exhaustive_max_atoms,
        )
    except FileNotFoundError as e:
        print(f"workspace not found: {e.filename}", file=sys.stderr)
        return 2
    except ForcebenchError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    fmt = "machine-json" if args.format == "json" else "human"
    sys.stdout.write(emit_report(report, fmt))
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
