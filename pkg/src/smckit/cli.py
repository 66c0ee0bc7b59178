"""Command-line front end.

Subcommands: ``check`` (run one engine on one system), ``certify`` (validate
a serialized frame certificate), ``export`` (write the solver queries of an
encoding as DIMACS and SMT-LIB2 files), and ``fuzz`` (the differential
soundness and sequence-lemma suites).

Exit codes: 0 safe, 1 unsafe (or failed certificate/fuzz), 2 unknown,
64 usage error, 65 unreadable or unparsable input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import encoders, harness, pdr, report, sat
from .errors import ParseError, SmcError
from .system import TransitionSystem, load_system

EXIT_SAFE = 0
EXIT_UNSAFE = 1
EXIT_UNKNOWN = 2
EXIT_USAGE = 64
EXIT_PARSE = 65

ENGINE_CHOICES = ("bmc", "forward", "backward", "sheeran1", "kind", "pdr",
                  "oracle")
_ENGINE_ALIASES = {"kind": "kinduction"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="smckit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--budget", type=int, default=sat.DEFAULT_BUDGET,
                       help="conflict budget per solver call")
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--format", choices=("text", "structured"),
                       default="text")
        p.add_argument("--solver-cmd", default=None,
                       help="external solver command template "
                            "({cnf} and optional {out} placeholders); "
                            "falls back to $SMCKIT_SOLVER")
        p.add_argument("--out-dir", default=".")

    p_check = sub.add_parser("check", help="run one engine on a system")
    p_check.add_argument("input")
    p_check.add_argument("--engine", choices=ENGINE_CHOICES, default="forward")
    p_check.add_argument("--k", type=int, default=None,
                         help="fixed depth (bmc only)")
    p_check.add_argument("--k-max", type=int, default=encoders.DEFAULT_K_MAX)
    common(p_check)

    p_cert = sub.add_parser("certify", help="check a frame certificate")
    p_cert.add_argument("input")
    p_cert.add_argument("certificate")
    p_cert.add_argument("--k", type=int, required=True)
    common(p_cert)

    p_exp = sub.add_parser("export", help="write encoder queries to files")
    p_exp.add_argument("input")
    p_exp.add_argument("--engine", choices=ENGINE_CHOICES[:5], default="bmc")
    p_exp.add_argument("--k", type=int, default=0)
    common(p_exp)

    p_fuzz = sub.add_parser("fuzz", help="differential soundness suites")
    p_fuzz.add_argument("--count", type=int, default=50)
    p_fuzz.add_argument("--width-min", type=int, default=2)
    p_fuzz.add_argument("--width-max", type=int, default=6)
    p_fuzz.add_argument("--k-max", type=int, default=12)
    p_fuzz.add_argument("--trials", type=int, default=1000)
    p_fuzz.add_argument("--inject-violation", action="store_true",
                        help="self-test: include an engine that lies")
    common(p_fuzz)
    return parser


def _load(path: str) -> TransitionSystem:
    try:
        return load_system(path)
    except OSError as exc:
        print(f"smckit: cannot read {path}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_PARSE)
    except ParseError as exc:
        print(f"smckit: {path}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_PARSE)


def _configure_solver(args) -> None:
    cmd = args.solver_cmd or os.environ.get("SMCKIT_SOLVER")
    if cmd:
        sat.set_external_solver(cmd)


def cmd_check(args) -> int:
    system = _load(args.input)
    _configure_solver(args)
    engine = _ENGINE_ALIASES.get(args.engine, args.engine)
    doc = None
    if engine == "oracle":
        from . import oracle as oracle_mod
        rep = oracle_mod.reach(system)
        if rep.safe:
            doc = report.check_document(system.name, "oracle", "safe",
                                        k=rep.depth)
        else:
            trace = [system.format_state(s) for s in rep.shortest_cex.states]
            doc = report.check_document(system.name, "oracle", "unsafe",
                                        k=len(trace) - 1, trace=trace)
    elif engine == "bmc":
        k_top = args.k if args.k is not None else args.k_max
        verdict = harness.run_bounded_refuter(system, k_max=k_top,
                                              conflict_budget=args.budget)
        if verdict.is_unsafe:
            trace = [system.format_state(s) for s in verdict.trace.states]
            doc = report.check_document(system.name, "bmc", "unsafe",
                                        k=len(trace) - 1, trace=trace)
        elif verdict.reason == "budget":
            doc = report.check_document(system.name, "bmc", "unknown",
                                        reason="budget")
        else:
            # No counterexample within the bound: a depth-limited claim.
            doc = report.check_document(system.name, "bmc", "safe", k=k_top,
                                        bounded=True)
    elif engine == "pdr":
        verdict = pdr.run_pdr(system, k_max=args.k_max,
                              conflict_budget=args.budget)
        cert_path = None
        if verdict.is_safe:
            out_dir = Path(args.out_dir)
            out_dir.mkdir(parents=True, exist_ok=True)
            cert_path = out_dir / f"{system.name}.k{verdict.k}.frames"
            cert_path.write_text(pdr.format_frames(verdict.certificate),
                                 encoding="utf-8")
        doc = _verdict_document(system, "pdr", verdict,
                                certificate_path=str(cert_path)
                                if cert_path else None)
    else:
        verdict = encoders.run_unbounded(system, engine, k_max=args.k_max,
                                         conflict_budget=args.budget)
        doc = _verdict_document(system, args.engine, verdict)
    return _emit_check(doc, args)


def _verdict_document(system: TransitionSystem, engine: str,
                      verdict: encoders.Verdict, *,
                      certificate_path: str | None = None) -> dict:
    if verdict.is_safe:
        return report.check_document(system.name, engine, "safe", k=verdict.k,
                                     certificate_path=certificate_path)
    if verdict.is_unsafe:
        trace = [system.format_state(s) for s in verdict.trace.states]
        return report.check_document(system.name, engine, "unsafe",
                                     k=len(trace) - 1, trace=trace)
    return report.check_document(system.name, engine, "unknown",
                                 reason=verdict.reason)


def _emit_check(doc: dict, args) -> int:
    if args.format == "structured":
        sys.stdout.write(report.render(doc))
    else:
        if doc["verdict"] == "safe":
            suffix = " (bounded)" if doc.get("bounded") else ""
            print(f"SAFE k={doc['k']}{suffix}")
            if doc.get("certificate"):
                print(f"certificate: {doc['certificate']}")
        elif doc["verdict"] == "unsafe":
            print(f"UNSAFE k={doc['k']}")
            print("trace: " + " ".join(doc["trace"]))
        else:
            print(f"UNKNOWN ({doc['reason']})")
    return {"safe": EXIT_SAFE, "unsafe": EXIT_UNSAFE,
            "unknown": EXIT_UNKNOWN}[doc["verdict"]]


def cmd_certify(args) -> int:
    system = _load(args.input)
    _configure_solver(args)
    try:
        text = Path(args.certificate).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"smckit: cannot read {args.certificate}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        frames = pdr.parse_frames(text, system.width)
        rep = pdr.check_true_postcondition(frames, args.k, system,
                                           conflict_budget=args.budget)
    except (ParseError, ValueError) as exc:
        print(f"smckit: {args.certificate}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    items = {name: {"passed": item.passed, "witnesses": item.witnesses}
             for name, item in rep.items.items()}
    if args.format == "structured":
        sys.stdout.write(report.render(report.certify_document(
            system.name, args.k, items, rep.all_passed, rep.e_exists)))
    else:
        for name in "abcde":
            item = rep.items[name]
            mark = "pass" if item.passed else f"FAIL {item.witnesses}"
            print(f"({name}) {mark}")
    return EXIT_SAFE if rep.all_passed else EXIT_UNSAFE


_EXPORT_BUILDERS = {
    "bmc": encoders.encode_bounded,
    "forward": encoders.encode_forward,
    "backward": encoders.encode_backward,
    "sheeran1": encoders.encode_sheeran1,
    "kind": encoders.encode_kinduction,
}


def cmd_export(args) -> int:
    system = _load(args.input)
    tree = _EXPORT_BUILDERS[args.engine](system, args.k)
    out_dir = Path(args.out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        written = []
        for i, query in enumerate(encoders.leaves_of(tree)):
            stem = f"{system.name}.{args.engine}.k{args.k}.q{i}"
            cnf = sat.query_cnf(query, system.width)
            (out_dir / f"{stem}.cnf").write_text(sat.export_dimacs(cnf),
                                                 encoding="utf-8")
            (out_dir / f"{stem}.smt2").write_text(sat.export_smt2(query),
                                                  encoding="utf-8")
            written.append(stem)
    except OSError as exc:
        print(f"smckit: cannot write to {out_dir}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    if args.format == "structured":
        sys.stdout.write(report.render({
            "schema_version": report.SCHEMA_VERSION, "kind": "export",
            "system": system.name, "engine": args.engine, "k": args.k,
            "queries": written}))
    else:
        for stem in written:
            print(f"{stem}.cnf {stem}.smt2")
    return EXIT_SAFE


def cmd_fuzz(args) -> int:
    spec = harness.CorpusSpec(seed=args.seed, count=args.count,
                              width_min=args.width_min,
                              width_max=args.width_max)
    engines = harness.ENGINE_NAMES
    if args.inject_violation:
        engines = engines + ("liar",)
    diff = harness.differential_soundness(spec, engines=engines,
                                          k_max=args.k_max,
                                          conflict_budget=args.budget,
                                          jobs=args.jobs)
    seq_rep = harness.sequence_suite(seed=args.seed, trials=args.trials)
    ok = diff.ok and seq_rep.ok
    if args.format == "structured":
        sys.stdout.write(report.render({
            "schema_version": report.SCHEMA_VERSION, "kind": "fuzz",
            "differential": json.loads(diff.to_json()),
            "sequence": json.loads(seq_rep.to_json()),
            "ok": ok}))
    else:
        sys.stdout.write(diff.to_text())
        sys.stdout.write(seq_rep.to_text())
        print("RESULT:", "ok" if ok else "VIOLATIONS FOUND")
    return EXIT_SAFE if ok else EXIT_UNSAFE


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "check":
            return cmd_check(args)
        if args.command == "certify":
            return cmd_certify(args)
        if args.command == "export":
            return cmd_export(args)
        return cmd_fuzz(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except SmcError as exc:
        print(f"smckit: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN
    finally:
        # The external-solver routing is per-invocation, never residual.
        sat.set_external_solver(None)


if __name__ == "__main__":
    raise SystemExit(main())
