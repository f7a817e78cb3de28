"""Command-line frontend.

Exit codes: 0 clean, 1 diagnostics / distinguished / violations, 2 usage or
internal error. `--format json` emits machine-readable records carrying every
fact the text mode prints.
"""

from __future__ import annotations

import argparse
import json
import sys

from .classtable import Designations, WellFormednessError, build_class_table
from .confine import confine_heap, run_with_monitor, to_dot, ConfinementViolation
from .coupling import load_sim_manifest, run_sim_manifest
from .desugar import parse_and_desugar
from .equivalence import ComparabilityError, load_manifest, run_manifest
from .interp import Bottom, collect, format_state, run
from .parser import ParseError
from .safety import safe_table
from .typecheck import check_table


def _load_table(path, args):
    with open(path, "r", encoding="utf-8") as f:
        src = f.read()
    decls = parse_and_desugar(src)
    des = None
    if getattr(args, "own", None):
        if not getattr(args, "rep", None):
            raise SystemExit2("--own requires --rep")
        des = Designations(args.own, args.rep, getattr(args, "rep2", None))
    return build_class_table(decls, des)


class SystemExit2(Exception):
    pass


def _emit(args, payload, text_lines):
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        for line in text_lines:
            print(line)


def _issue_json(path, issue):
    return {
        "file": path,
        "rule": issue.rule,
        "message": issue.message,
        "class": issue.class_name,
        "method": issue.method_name,
        "span": str(issue.span) if issue.span else None,
    }


def _emit_diagnostics(args, path, ok, records, text_lines):
    """Diagnostics go out as JSON lines: a per-file summary record followed by
    one record per diagnostic."""
    if args.format == "json":
        print(json.dumps({"file": path, "ok": ok}))
        for rec in records:
            print(json.dumps(rec))
    else:
        for line in text_lines:
            print(line)


def cmd_check(args) -> int:
    failed = False
    for path in args.files:
        try:
            ct = _load_table(path, args)
        except (ParseError, WellFormednessError) as exc:
            _emit_diagnostics(args, path, False, [{"file": path, "error": str(exc)}], [f"{path}: {exc}"])
            failed = True
            continue
        report = check_table(ct)
        lines = [f"{path}: ok" if report.ok else f"{path}: {len(report.issues)} issue(s)"]
        lines += [f"  {i.render()}" for i in report.issues]
        _emit_diagnostics(args, path, report.ok, [_issue_json(path, i) for i in report.issues], lines)
        failed = failed or not report.ok
    return 1 if failed else 0


def cmd_analyze(args) -> int:
    failed = False
    for path in args.files:
        try:
            ct = _load_table(path, args)
        except (ParseError, WellFormednessError) as exc:
            _emit_diagnostics(args, path, False, [{"file": path, "error": str(exc)}], [f"{path}: {exc}"])
            failed = True
            continue
        if ct.designations is None:
            raise SystemExit2("analyze requires --own and --rep")
        treport = check_table(ct)
        if not treport.ok:
            lines = [f"{path}: ill-typed"] + [f"  {i.render()}" for i in treport.issues]
            _emit_diagnostics(args, path, False, [_issue_json(path, i) for i in treport.issues], lines)
            failed = True
            continue
        sreport = safe_table(ct)
        lines = [f"{path}: safe" if sreport.ok else f"{path}: {len(sreport.diagnostics)} diagnostic(s)"]
        lines += [f"  {d.render()}" for d in sreport.diagnostics]
        _emit_diagnostics(args, path, sreport.ok, [_issue_json(path, d) for d in sreport.diagnostics], lines)
        failed = failed or not sreport.ok
    return 1 if failed else 0


def _parse_entry(spec: str):
    if "." not in spec:
        raise SystemExit2("--entry must look like Class.method")
    return spec.rsplit(".", 1)


def cmd_run(args) -> int:
    from .confine import ConfinementMonitor
    from .interp import HookChain, TraceHooks

    ct = _load_table(args.file, args)
    entry_class, entry_method = _parse_entry(args.entry)
    tracer = TraceHooks() if args.trace else None
    monitor = None
    if args.monitor != "off":
        if ct.designations is None:
            raise SystemExit2("--monitor requires --own and --rep")
        monitor = ConfinementMonitor(ct, "every" if args.monitor == "every" else "calls")
    hooks = HookChain(monitor, tracer) if (monitor or tracer) else None
    result = run(ct, entry_class, entry_method, max_fuel=args.max_fuel,
                 loop_cap=args.loop_cap, hooks=hooks)
    violations = monitor.violations if monitor else []
    payload = {"file": args.file, "entry": args.entry, "fuel": result.fuel_used,
               "violations": [v.render() for v in violations],
               "trace": tracer.lines if tracer else None}
    lines = []
    if isinstance(result.outcome, Bottom):
        payload["outcome"] = result.outcome.reason
        payload["detail"] = result.outcome.detail
        lines.append(f"bottom: {result.outcome.reason} ({result.outcome.detail}) at fuel {result.fuel_used}")
        if result.outcome.stack:
            lines.append("  in " + " > ".join(result.outcome.stack))
    else:
        h, eta = collect(*result.outcome)
        payload["outcome"] = "ok"
        payload["state"] = format_state(ct, h, eta)
        lines.append(f"ok at fuel {result.fuel_used}")
        lines.append(format_state(ct, h, eta))
    if tracer:
        lines.extend(f"trace: {t}" for t in tracer.lines)
    for v in violations:
        lines.append(f"violation: {v.render()}")
    _emit(args, payload, lines)
    return 1 if violations else 0


def cmd_equiv(args) -> int:
    manifest = load_manifest(args.manifest)
    verdict = run_manifest(manifest)
    payload = verdict.to_json()
    lines = [f"verdict: {verdict.kind} (fuel {verdict.fuel_used})"]
    if verdict.witness:
        lines.append(f"witness: {verdict.witness}")
    if verdict.sigma:
        lines.append("bijection: " + ", ".join(f"{a}->{b}" for a, b in verdict.sigma))
    _emit(args, payload, lines)
    return 0 if verdict.equivalent else 1


def cmd_simtest(args) -> int:
    manifest = load_sim_manifest(args.manifest)
    report = run_sim_manifest(manifest)
    cov = report.method_coverage()
    payload = {
        "coupling": report.coupling,
        "ok": report.ok,
        "note": report.note,
        "vectors": len(report.vectors),
        "failing": len(report.failures()),
        "establishment": [{"class": c, "ok": ok, "message": m} for c, ok, m in report.establishment],
        "methods": {m: {"pass": p, "fail": f} for m, (p, f) in cov.items()},
        "failures": [
            {"fuel": v.fuel, "step": v.failed_at, "message": v.message, "replay": v.replay()}
            for v in report.failures()[:20]
        ],
    }
    lines = [f"coupling {report.coupling}: {'all pass' if report.ok else 'FAILURES'} ({report.note})"]
    for c, ok, m in report.establishment:
        lines.append(f"  establish {c}: {'ok' if ok else 'FAIL ' + m}")
    lines.append(f"  {'method':<16} {'pass':>6} {'fail':>6}")
    for m, (p, f) in cov.items():
        lines.append(f"  {m:<16} {p:>6} {f:>6}")
    for v in report.failures()[:5]:
        lines.append(f"  counterexample at fuel {v.fuel}, step {v.failed_at}: {v.message}")
    _emit(args, payload, lines)
    return 0 if report.ok else 1


def cmd_dot(args) -> int:
    ct = _load_table(args.file, args)
    if ct.designations is None:
        raise SystemExit2("dot requires --own and --rep")
    entry_class, entry_method = _parse_entry(args.entry)
    result = run(ct, entry_class, entry_method, max_fuel=args.max_fuel, loop_cap=args.loop_cap)
    if isinstance(result.outcome, Bottom):
        print(f"cannot render: execution bottomed ({result.outcome.reason})", file=sys.stderr)
        return 1
    h, _ = result.outcome  # uncollected: island structure is the point here
    part = confine_heap(ct, h)
    if isinstance(part, ConfinementViolation):
        print(f"cannot render: final heap is not confined ({part.render()})", file=sys.stderr)
        return 1
    text = to_dot(h, part)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        print(text, end="")
    return 0


def cmd_corpus(args) -> int:
    import glob
    import os

    from . import corpus as corpus_mod
    from .corpus import load_corpus, navigate

    records = load_corpus()
    if args.action == "list":
        lines = [f"{r.name:28s} own={r.own} rep={r.rep} {r.notes}" for r in records]
        extra = []
        if args.extra:
            if not os.path.isdir(args.extra):
                raise SystemExit2(f"extra corpus directory {args.extra} does not exist")
            extra = sorted(glob.glob(os.path.join(args.extra, "*.jcore")))
            lines += [f"{os.path.basename(p)[:-6]:28s} (extra, no expectations)" for p in extra]
        _emit(args, {"programs": [r.name for r in records], "extra": extra}, lines)
        return 0
    # run-all: replay every expectation record
    failures = []
    for r in records:
        try:
            ct = r.build()
        except Exception as exc:
            failures.append(f"{r.name}: build failed: {exc}")
            continue
        treport = check_table(ct)
        if (r.check == "ok") != treport.ok:
            failures.append(f"{r.name}: check expectation mismatch")
        sreport = safe_table(ct)
        if set(r.analyze) != sreport.rules():
            failures.append(f"{r.name}: analyze expected {sorted(r.analyze)}, got {sorted(sreport.rules())}")
        for e in r.entries:
            result, violations = run_with_monitor(ct, e.entry_class, e.entry_method)
            outcome = "ok" if result.ok else result.outcome.reason
            if outcome != e.outcome:
                failures.append(f"{r.name}: outcome {outcome}, expected {e.outcome}")
                continue
            if result.fuel_used != e.min_fuel:
                failures.append(f"{r.name}: fuel {result.fuel_used}, expected {e.min_fuel}")
            kinds = {v.kind for v in violations}
            if e.monitor == "clean":
                if kinds:
                    failures.append(f"{r.name}: unexpected monitor violations {sorted(kinds)}")
            else:
                missing = set(e.monitor) - kinds
                if missing:
                    failures.append(f"{r.name}: missing monitor violations {sorted(missing)}")
            if result.ok:
                h, eta = result.outcome
                for path, expected in e.finals:
                    actual = navigate(h, eta, path)
                    if actual != expected:
                        failures.append(f"{r.name}: {path} = {actual}, expected {expected}")
    from .equivalence import load_manifest as _lm, run_manifest as _rm

    for mpath, verdict in corpus_mod.equiv_expectations():
        got = _rm(_lm(mpath)).kind
        if got != verdict:
            failures.append(f"{mpath}: verdict {got}, expected {verdict}")
    for mpath, expected_ok in corpus_mod.simtest_expectations():
        got_ok = run_sim_manifest(load_sim_manifest(mpath)).ok
        if got_ok != expected_ok:
            failures.append(f"{mpath}: {'clean' if got_ok else 'failing'}, expected the opposite")
    lines = [f"{len(records)} programs, {len(failures)} failures"] + [f"  {f}" for f in failures]
    _emit(args, {"programs": len(records), "failures": failures}, lines)
    return 1 if failures else 0


def _add_designations(p):
    p.add_argument("--own", help="owner class name")
    p.add_argument("--rep", help="rep class name")
    p.add_argument("--rep2", help="second rep class name (comparison mode)")


def _add_budget(p):
    p.add_argument("--max-fuel", type=int, default=1024)
    p.add_argument("--loop-cap", type=int, default=100000)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="jcore", description=__doc__)
    ap.add_argument("--format", choices=["text", "json"], default="text")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="parse, desugar, and type-check source files")
    p.add_argument("files", nargs="+")
    _add_designations(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("analyze", help="static confinement safety analysis")
    p.add_argument("files", nargs="+")
    _add_designations(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("run", help="interpret an entry point")
    p.add_argument("file")
    p.add_argument("--entry", required=True, help="entry point, Class.method")
    p.add_argument("--monitor", choices=["off", "calls", "every"], default="off")
    p.add_argument("--trace", action="store_true", help="print one line per executed command")
    _add_designations(p)
    _add_budget(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("equiv", help="client-program equivalence from a manifest")
    p.add_argument("manifest")
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("simtest", help="bounded simulation harness from a manifest")
    p.add_argument("manifest")
    p.set_defaults(func=cmd_simtest)

    p = sub.add_parser("dot", help="render the final heap's island structure as DOT")
    p.add_argument("file")
    p.add_argument("--entry", required=True)
    p.add_argument("-o", "--output")
    _add_designations(p)
    _add_budget(p)
    p.set_defaults(func=cmd_dot)

    p = sub.add_parser("corpus", help="list or replay the built-in corpus")
    p.add_argument("action", choices=["list", "run-all"])
    p.add_argument("--extra", help="directory of additional .jcore files to list")
    p.set_defaults(func=cmd_corpus)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except SystemExit2 as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (ParseError, WellFormednessError, ComparabilityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # internal error
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
