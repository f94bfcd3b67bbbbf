"""Command line front end: eval, check, replay, fuzz, render."""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from typing import List, Mapping, Optional

from .diagram import DiagramFormatError, diagram_to_doc, parse_diagram, serialize_diagram, to_dot
from .fuzz import FuzzConfig, run_fuzz
from .rules import DEFAULT_MAX_LEGS, RULE_SETS, RewriteRule, UnknownRuleSet
from .semantics import ContractionCapExceeded, InterpretationKind, interpret, render_tensor
from .verifier import (
    BUILTIN_DERIVATIONS,
    Derivation,
    ReplayError,
    builtin_derivation_text,
    lemma_suite,
    replay,
    structural_audits,
    sweep_soundness,
)

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2


@dataclass
class RunArtifact:
    command: str
    inputs: List[str]
    outputs: List[str] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    seed: Optional[int] = None


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write(path: str, text: str) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


def _stamp(command: str, args: dict, payload: str = "") -> str:
    h = hashlib.sha256(_dump({"command": command, "args": args, "payload": payload}).encode()).hexdigest()
    return h[:12]


def _persist(out: str, art: RunArtifact, text: str, stamp: str) -> None:
    """Write text and json reports plus the ``latest.json`` manifest.

    Paths inside reports are relative to ``out`` so reruns are byte-identical.
    """
    name = f"{art.command}-{stamp}"
    base = os.path.join(out, name)
    art.outputs = sorted({os.path.relpath(p, out) for p in art.outputs} | {name + ".txt", name + ".json"})
    _write(base + ".txt", text if text.endswith("\n") else text + "\n")
    _write(base + ".json", _dump(asdict(art)))
    manifest_path = os.path.join(out, "latest.json")
    manifest = {}
    if os.path.exists(manifest_path):
        try:
            with open(manifest_path, encoding="utf-8") as f:
                manifest = json.load(f)
        except (OSError, json.JSONDecodeError):
            manifest = {}
    manifest[art.command] = {"report": name + ".json", "text": name + ".txt"}
    _write(manifest_path, _dump(manifest))


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as f:
        return f.read()


def _err(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


# --- commands -----------------------------------------------------------------------


def cmd_eval(args) -> int:
    try:
        d = parse_diagram(_read(args.path))
        t = interpret(d, args.kind)
    except OSError as e:
        _err(str(e))
        return EXIT_USAGE
    except DiagramFormatError as e:
        _err(f"{args.path}: {e}")
        return EXIT_USAGE
    except ContractionCapExceeded as e:
        _err(str(e))
        return EXIT_USAGE
    print(render_tensor(t).rstrip("\n"))
    return EXIT_OK


def cmd_render(args) -> int:
    try:
        d = parse_diagram(_read(args.path))
    except OSError as e:
        _err(str(e))
        return EXIT_USAGE
    except DiagramFormatError as e:
        _err(f"{args.path}: {e}")
        return EXIT_USAGE
    sys.stdout.write(to_dot(d))
    return EXIT_OK


def cmd_check(args) -> int:
    kind = InterpretationKind.parse(args.kind)
    sweep = sweep_soundness(args.rules, kind, args.max_legs)
    parts = [sweep.render()]
    summary = {"sweep": sweep.summary()}
    ok = sweep.matches_claim
    audits = structural_audits(args.rules, args.max_legs)
    parts.append(audits.render())
    summary["audits"] = audits.summary()
    ok = ok and audits.matches_claim
    lemmas = lemma_suite(kind)
    parts.append(f"lemma suite ({lemmas.kind}): {len(lemmas.results)} cases, {len(lemmas.failures())} unequal"
                 + ("" if kind.value == "standard" else " (no claim)"))
    summary["lemmas"] = lemmas.summary()
    ok = ok and lemmas.matches_claim
    parts.append("overall: " + ("PASS" if ok else "FAIL"))
    text = "\n".join(parts)
    print(text)
    args_doc = {"rules": args.rules, "kind": kind.value, "max_legs": args.max_legs}
    stamp = _stamp("check", args_doc)
    art = RunArtifact("check", [], summary=summary)
    if not ok:
        offenders = [v for v in sweep.verdicts if v.rule in (sweep.unequal_rules() ^ (sweep.claim or frozenset()))
                     or not v.factorization_ok]
        doc = [{"rule": v.rule, "params": dict(v.params), "equal": v.equal,
                "lhs": diagram_to_doc(v.lhs), "rhs": diagram_to_doc(v.rhs)} for v in offenders]
        path = os.path.join(args.out, f"check-{stamp}-offenders.json")
        _write(path, _dump(doc))
        art.outputs.append(path)
        print(f"offending instances written to {path}")
    _persist(args.out, art, text, stamp)
    return EXIT_OK if ok else EXIT_MISMATCH


def _load_script(ref: str):
    if os.path.exists(ref):
        return ref, _read(ref)
    if ref in BUILTIN_DERIVATIONS:
        return f"builtin:{ref}", builtin_derivation_text(ref)
    raise OSError(f"no such script file or bundled derivation: {ref}")


def cmd_replay(args, registry: Optional[Mapping[str, RewriteRule]] = None) -> int:
    try:
        src, text = _load_script(args.script)
        deriv = Derivation.loads(text)
        if args.rules:
            deriv = Derivation(deriv.start, deriv.steps, deriv.goal, args.rules, deriv.name)
    except OSError as e:
        _err(str(e))
        return EXIT_USAGE
    except DiagramFormatError as e:
        _err(f"{args.script}: {e}")
        return EXIT_USAGE
    lines = [f"replay {deriv.name or src} ({deriv.rules}, {len(deriv.steps)} steps)"]
    try:
        res = replay(deriv, registry)
        trace, final, verdict, code = res.trace, res.final, "verified", EXIT_OK
    except UnknownRuleSet as e:
        _err(f"unknown rule set {e}")
        return EXIT_USAGE
    except ReplayError as e:
        trace, final, verdict, code = e.trace, None, f"FAILED at step {e.step}: {type(e).__name__}: {e}", EXIT_MISMATCH
    for t in trace:
        lines.append(f"  step {t['step']:>2}  {t['rule']:<10} {t['dir']}  {t['verdict']}")
    lines.append(verdict)
    text = "\n".join(lines)
    print(text)
    stamp = _stamp("replay", {"rules": deriv.rules}, text + (serialize_diagram(final) if final else ""))
    art = RunArtifact("replay", [src], summary={"verdict": verdict, "steps": len(deriv.steps)})
    if final is not None:
        path = os.path.join(args.out, f"replay-{stamp}-final.json")
        _write(path, _dump(diagram_to_doc(final)))
        art.outputs.append(path)
    _persist(args.out, art, text, stamp)
    return code


def cmd_fuzz(args, registry: Optional[Mapping[str, RewriteRule]] = None) -> int:
    try:
        cfg = FuzzConfig(seed=args.seed, max_wires=args.max_wires, max_spiders=args.max_spiders,
                         steps=args.steps, rule_set=args.rules)
    except ValueError as e:
        _err(str(e))
        return EXIT_USAGE
    rep = run_fuzz(cfg, registry)
    text = rep.render()
    print(text)
    stamp = _stamp("fuzz", asdict(cfg))
    art = RunArtifact("fuzz", [], summary=rep.summary(), seed=cfg.seed)
    if rep.violations:
        path = os.path.join(args.out, f"fuzz-{stamp}-reproducer.json")
        _write(path, _dump(rep.violations[0].to_doc()))
        art.outputs.append(path)
        print(f"reproducer written to {path}")
    _persist(args.out, art, text, stamp)
    return EXIT_MISMATCH if rep.violations else EXIT_OK


# --- parser ---------------------------------------------------------------------------


def _kind(s: str) -> str:
    if s not in ("standard", "flat"):
        raise argparse.ArgumentTypeError("kind must be standard or flat")
    return s


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stabzx", description=__doc__,
                                formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, rules_default: Optional[str] = "simplified"):
        sp.add_argument("--out", default="reports", help="directory for reports")
        sp.add_argument("--rules", default=rules_default, choices=RULE_SETS,
                        help="rule set" if rules_default else "rule set (default: the one named in the script)")

    e = sub.add_parser("eval", help="print the interpretation of a diagram file",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    e.add_argument("path")
    e.add_argument("--kind", type=_kind, default="standard")
    e.set_defaults(func=cmd_eval)

    c = sub.add_parser("check", help="sweep a rule set and compare with the claim table",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    common(c)
    c.add_argument("--kind", type=_kind, default="standard")
    c.add_argument("--max-legs", type=int, default=DEFAULT_MAX_LEGS, help="largest arity parameter")
    c.set_defaults(func=cmd_check)

    r = sub.add_parser("replay", help="replay a derivation script (file or bundled name)",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    r.add_argument("script", help="path, or one of " + ", ".join(BUILTIN_DERIVATIONS))
    common(r, None)
    r.set_defaults(func=cmd_replay)

    f = sub.add_parser("fuzz", help="random rewrites with exact invariance checks",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    common(f, "simplified+S2p")
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--steps", type=int, default=20)
    f.add_argument("--max-wires", type=int, default=6)
    f.add_argument("--max-spiders", type=int, default=10)
    f.set_defaults(func=cmd_fuzz)

    d = sub.add_parser("render", help="print a diagram in dot format",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    d.add_argument("path")
    d.set_defaults(func=cmd_render)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    if args.command == "check" and args.max_legs < 0:
        _err("--max-legs must be non-negative")
        return EXIT_USAGE
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
