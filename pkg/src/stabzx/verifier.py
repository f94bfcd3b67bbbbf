"""Mechanical checks of the rule sets: soundness sweeps, shape audits,
the lemma catalogue and replay of recorded derivations."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .diagram import Diagram, diagram_from_doc, diagram_to_doc, find_isomorphism, DiagramFormatError
from .lemmas import LemmaCase, lemma_cases
from .rules import DEFAULT_MAX_LEGS, LR, PHASES, RL, RewriteRule, registry_map, rule_registry
from .semantics import (
    STANDARD,
    FLAT,
    InterpretationKind,
    Tensor,
    flat_phase_predictor,
    interpret,
    tensors_equal,
)

# Rule sets whose flat-unsound members are known; everything is standard-sound.
FLAT_CLAIMS: Dict[str, frozenset] = {
    "simplified": frozenset({"B2p", "S3p_R"}),
    "modified_3_3": frozenset({"B2p"}),
}

AUDIT_CLAIMS: Dict[str, frozenset] = {
    "empty_side": frozenset({"IVp"}),
    "disconnects_boundaries": frozenset({"B1"}),
    "frees_wire": frozenset({"S3p_L"}),
    "reduces_high_degree": frozenset({"S1"}),
    "matches_red_high_or_phased": frozenset({"H"}),
}


def claimed_unequal(set_name: str, kind: InterpretationKind) -> Optional[frozenset]:
    """Expected set of rules with an unequal instance, or None if unclaimed."""
    kind = InterpretationKind.parse(kind)
    if kind is STANDARD:
        return frozenset()
    return FLAT_CLAIMS.get(set_name)


# --- soundness sweep ------------------------------------------------------------------


@dataclass
class InstanceVerdict:
    rule: str
    params: Tuple[Tuple[str, int], ...]
    kind: str
    equal: bool
    factorization_ok: bool
    lhs: Diagram = field(repr=False)
    rhs: Diagram = field(repr=False)
    counterexample: Optional[Tuple[Tensor, Tensor]] = field(default=None, repr=False)

    @property
    def label(self) -> str:
        ps = ",".join(f"{k}={v}" for k, v in self.params)
        return f"{self.rule}[{ps}]" if ps else self.rule


@dataclass
class SoundnessReport:
    set_name: str
    kind: str
    max_legs: int
    verdicts: List[InstanceVerdict]

    def per_rule(self) -> Dict[str, Dict[str, int]]:
        out: Dict[str, Dict[str, int]] = {}
        for v in self.verdicts:
            c = out.setdefault(v.rule, {"instances": 0, "equal": 0, "unequal": 0})
            c["instances"] += 1
            c["equal" if v.equal else "unequal"] += 1
        return dict(sorted(out.items()))

    def unequal_rules(self) -> frozenset:
        return frozenset(v.rule for v in self.verdicts if not v.equal)

    def failures(self) -> List[InstanceVerdict]:
        return [v for v in self.verdicts if not v.equal]

    def factorization_failures(self) -> List[InstanceVerdict]:
        return [v for v in self.verdicts if not v.factorization_ok]

    @property
    def claim(self) -> Optional[frozenset]:
        return claimed_unequal(self.set_name, self.kind)

    @property
    def matches_claim(self) -> bool:
        if self.factorization_failures():
            return False
        return self.claim is None or self.claim == self.unequal_rules()

    def summary(self) -> dict:
        claim = self.claim
        return {
            "rule_set": self.set_name,
            "kind": self.kind,
            "max_legs": self.max_legs,
            "instances": len(self.verdicts),
            "per_rule": self.per_rule(),
            "unequal_rules": sorted(self.unequal_rules()),
            "claimed_unequal": None if claim is None else sorted(claim),
            "factorization_failures": [v.label for v in self.factorization_failures()],
            "matches_claim": self.matches_claim,
        }

    def render(self) -> str:
        lines = [f"soundness sweep: {self.set_name} ({self.kind}, legs<={self.max_legs})"]
        for name, c in self.per_rule().items():
            lines.append(f"  {name:<14} {c['instances']:>4} instances  {c['unequal']:>4} unequal")
        claim = self.claim
        lines.append(f"  unequal rules: {sorted(self.unequal_rules())}")
        lines.append("  claim: " + ("none" if claim is None else str(sorted(claim))))
        if self.factorization_failures():
            lines.append(f"  flat factorization broken for {[v.label for v in self.factorization_failures()]}")
        lines.append("  verdict: " + ("PASS" if self.matches_claim else "FAIL"))
        return "\n".join(lines)


def sweep_soundness(
    set_name: str,
    kind=STANDARD,
    max_legs: int = DEFAULT_MAX_LEGS,
    phases: Iterable[int] = PHASES,
    rules: Optional[Sequence[RewriteRule]] = None,
) -> SoundnessReport:
    """Interpret both sides of every instance and compare exactly."""
    kind = InterpretationKind.parse(kind)
    rules = list(rules) if rules is not None else rule_registry(set_name)
    verdicts = []
    for rule in sorted(rules, key=lambda r: r.name):
        for inst in rule.instantiate(max_legs, phases):
            tl, tr = interpret(inst.lhs, kind), interpret(inst.rhs, kind)
            eq = tensors_equal(tl, tr)
            fact = True
            if kind is FLAT and not interpret(inst.lhs).is_zero():
                # on zero maps the phase predictor carries no information
                same = flat_phase_predictor(inst.lhs) == flat_phase_predictor(inst.rhs)
                fact = same == eq
            verdicts.append(InstanceVerdict(
                rule.name, inst.params, kind.value, eq, fact, inst.lhs, inst.rhs,
                None if eq else (tl, tr)))
    verdicts.sort(key=lambda v: (v.rule, v.params))
    return SoundnessReport(set_name, kind.value, max_legs, verdicts)


# --- structural audits ------------------------------------------------------------------


def _is_empty(d: Diagram) -> bool:
    return d.is_empty()


def _components(d: Diagram) -> Dict[int, int]:
    parent = {v: v for v in d.vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for u, v in d.edges:
        parent[find(u)] = find(v)
    return {v: find(v) for v in d.vertices}


def _disconnects_boundaries(src: Diagram, dst: Diagram) -> bool:
    cs, cd = _components(src), _components(dst)
    for side_s, side_d in ((src.inputs, dst.inputs), (src.outputs, dst.outputs)):
        for i in range(len(side_s)):
            for j in range(i + 1, len(side_s)):
                a, b = side_s[i], side_s[j]
                c, d = side_d[i], side_d[j]
                if cs[a] == cs[b] and cd[c] != cd[d]:
                    return True
    return False


def _bare_pairs(d: Diagram) -> set:
    pos = {v: i for i, v in enumerate(d.boundary)}
    return {tuple(sorted((pos[u], pos[v]))) for u, v in d.edges if u in pos and v in pos}


def _frees_wire(src: Diagram, dst: Diagram) -> bool:
    return bool(_bare_pairs(dst) - _bare_pairs(src))


def _spider_degrees(d: Diagram) -> List[int]:
    return [d.degree(v) for v in d.internal_vertices() if d.kind(v) in ("Z", "X")]


def _reduces_high_degree(src: Diagram, dst: Diagram) -> bool:
    ds, dd = _spider_degrees(src), _spider_degrees(dst)
    if not ds or not dd or max(ds) < 4:
        return False
    return max(dd) < max(ds)


def _red_high_or_phased(d: Diagram) -> bool:
    return any(d.kind(v) == "X" and (d.degree(v) >= 4 or d.phase(v) != 0) for v in d.internal_vertices())


def _oriented(inst):
    yield inst.lhs, inst.rhs
    yield inst.rhs, inst.lhs


AUDITS = {
    "empty_side": lambda inst: _is_empty(inst.lhs) != _is_empty(inst.rhs),
    "disconnects_boundaries": lambda inst: any(_disconnects_boundaries(s, d) for s, d in _oriented(inst)),
    "frees_wire": lambda inst: any(_frees_wire(s, d) for s, d in _oriented(inst)),
    "reduces_high_degree": lambda inst: any(_reduces_high_degree(s, d) for s, d in _oriented(inst)),
    "matches_red_high_or_phased": lambda inst: _red_high_or_phased(inst.lhs) or _red_high_or_phased(inst.rhs),
}


@dataclass
class AuditReport:
    set_name: str
    found: Dict[str, frozenset]

    def passed(self, name: str) -> Optional[bool]:
        if self.set_name != "simplified":
            return None
        return self.found[name] == AUDIT_CLAIMS[name]

    @property
    def matches_claim(self) -> bool:
        return all(self.passed(n) is not False for n in self.found)

    def summary(self) -> dict:
        return {
            "rule_set": self.set_name,
            "audits": {n: {"rules": sorted(s), "claimed": sorted(AUDIT_CLAIMS[n]) if self.set_name == "simplified" else None,
                           "pass": self.passed(n)} for n, s in self.found.items()},
            "matches_claim": self.matches_claim,
        }

    def render(self) -> str:
        lines = [f"structural audits: {self.set_name}"]
        for n, s in self.found.items():
            p = self.passed(n)
            tag = "n/a" if p is None else ("PASS" if p else "FAIL")
            lines.append(f"  {n:<28} {sorted(s)}  {tag}")
        return "\n".join(lines)


def structural_audits(set_name: str = "simplified", max_legs: int = DEFAULT_MAX_LEGS) -> AuditReport:
    """Evaluate shape predicates over every instance of every rule.

    The claims restate that exactly one rule of the simplified set has each
    property; other sets are evaluated but carry no claim.
    """
    found: Dict[str, set] = {n: set() for n in AUDITS}
    for rule in rule_registry(set_name):
        for inst in rule.instantiate(max_legs):
            for n, pred in AUDITS.items():
                if rule.name not in found[n] and pred(inst):
                    found[n].add(rule.name)
    return AuditReport(set_name, {n: frozenset(s) for n, s in found.items()})


# --- lemma suite ---------------------------------------------------------------------


@dataclass
class LemmaReport:
    kind: str
    results: List[Tuple[LemmaCase, bool]]

    def failures(self) -> List[str]:
        return [c.label for c, ok in self.results if not ok]

    @property
    def matches_claim(self) -> bool:
        # lemma equations are only claimed under the standard interpretation
        return self.kind != STANDARD.value or not self.failures()

    def summary(self) -> dict:
        return {"kind": self.kind, "cases": len(self.results),
                "lemmas": len({c.name for c, _ in self.results}),
                "failures": self.failures(), "matches_claim": self.matches_claim}

    def render(self) -> str:
        lines = [f"lemma suite ({self.kind}): {len(self.results)} cases"]
        for c, ok in self.results:
            lines.append(f"  {c.label:<40} {'equal' if ok else 'UNEQUAL'}")
        return "\n".join(lines)


def lemma_suite(kind=STANDARD) -> LemmaReport:
    kind = InterpretationKind.parse(kind)
    res = []
    for case in lemma_cases():
        if case.lhs.signature != case.rhs.signature:
            raise ValueError(f"lemma {case.label} has mismatched signatures")
        res.append((case, tensors_equal(interpret(case.lhs, kind), interpret(case.rhs, kind))))
    return LemmaReport(kind.value, res)


# --- derivation replay ------------------------------------------------------------------


class ReplayError(RuntimeError):
    def __init__(self, step: int, message: str, trace=None):
        super().__init__(f"step {step}: {message}")
        self.step = step
        self.trace = trace or []


class StepInapplicable(ReplayError):
    pass


class SemanticsChanged(ReplayError):
    pass


class GoalMismatch(ReplayError):
    pass


@dataclass(frozen=True)
class Step:
    rule: str
    direction: str
    match: int
    params: Tuple[Tuple[str, int], ...] = ()
    checkpoint: Optional[Diagram] = None


@dataclass(frozen=True)
class Derivation:
    start: Diagram
    steps: Tuple[Step, ...]
    goal: Diagram
    rules: str = "simplified"
    name: str = ""

    def to_doc(self) -> dict:
        doc = {"name": self.name, "rules": self.rules, "start": diagram_to_doc(self.start), "steps": []}
        for s in self.steps:
            doc["steps"].append({"rule": s.rule, "dir": s.direction, "match": s.match, "params": dict(s.params),
                                 "checkpoint": None if s.checkpoint is None else diagram_to_doc(s.checkpoint)})
        doc["goal"] = diagram_to_doc(self.goal)
        return doc

    @classmethod
    def from_doc(cls, doc) -> "Derivation":
        if not isinstance(doc, dict):
            raise DiagramFormatError("$", "derivation must be an object")
        for key in ("start", "steps", "goal"):
            if key not in doc:
                raise DiagramFormatError("$", f"missing key {key!r}")
        if not isinstance(doc["steps"], list):
            raise DiagramFormatError("$.steps", "must be a list")
        steps = []
        for i, s in enumerate(doc["steps"]):
            loc = f"$.steps[{i}]"
            if not isinstance(s, dict) or not isinstance(s.get("rule"), str):
                raise DiagramFormatError(loc, "step needs a rule name")
            if s.get("dir", LR) not in (LR, RL):
                raise DiagramFormatError(loc + ".dir", "must be LR or RL")
            m = s.get("match", 0)
            if not isinstance(m, int) or isinstance(m, bool) or m < 0:
                raise DiagramFormatError(loc + ".match", "must be a non-negative integer")
            params = s.get("params") or {}
            if not isinstance(params, dict) or not all(isinstance(v, int) for v in params.values()):
                raise DiagramFormatError(loc + ".params", "must map names to integers")
            cp = s.get("checkpoint")
            steps.append(Step(s["rule"], s.get("dir", LR), m, tuple(sorted(params.items())),
                              None if cp is None else diagram_from_doc(cp, loc + ".checkpoint")))
        return cls(diagram_from_doc(doc["start"], "$.start"), tuple(steps), diagram_from_doc(doc["goal"], "$.goal"),
                   doc.get("rules", "simplified"), doc.get("name", ""))

    @classmethod
    def loads(cls, text: str) -> "Derivation":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise DiagramFormatError(f"line {e.lineno}", e.msg) from None
        return cls.from_doc(doc)

    def dumps(self) -> str:
        return json.dumps(self.to_doc(), indent=1, sort_keys=True)


@dataclass
class ReplayResult:
    verified: bool
    trace: List[dict]
    final: Diagram


def replay(derivation: Derivation, registry: Optional[Mapping[str, RewriteRule]] = None) -> ReplayResult:
    """Apply every step and check semantics, checkpoints and the goal."""
    registry = registry if registry is not None else registry_map(derivation.rules)
    for i, s in enumerate(derivation.steps):
        if s.rule not in registry:
            raise StepInapplicable(i, f"rule {s.rule!r} is not in the active registry")
    cur = derivation.start
    ref = interpret(cur)
    trace: List[dict] = []
    for i, s in enumerate(derivation.steps):
        rule = registry[s.rule]
        try:
            matches = rule.find_matches(cur, s.direction, dict(s.params) or None)
        except ValueError as e:
            raise StepInapplicable(i, str(e), trace) from None
        if s.match >= len(matches):
            raise StepInapplicable(i, f"{s.rule} {s.direction} has {len(matches)} matches, index {s.match} requested", trace)
        nxt = matches[s.match].result
        if not tensors_equal(interpret(nxt), ref):
            trace.append({"step": i, "rule": s.rule, "dir": s.direction, "verdict": "semantics changed"})
            raise SemanticsChanged(i, f"{s.rule} {s.direction} changed the interpretation", trace)
        if s.checkpoint is not None and find_isomorphism(nxt, s.checkpoint) is None:
            trace.append({"step": i, "rule": s.rule, "dir": s.direction, "verdict": "checkpoint mismatch"})
            raise GoalMismatch(i, "diagram differs from the recorded checkpoint", trace)
        trace.append({"step": i, "rule": s.rule, "dir": s.direction, "verdict": "ok"})
        cur = nxt
    if find_isomorphism(cur, derivation.goal) is None:
        raise GoalMismatch(len(derivation.steps), "final diagram is not isomorphic to the goal", trace)
    return ReplayResult(True, trace, cur)


BUILTIN_DERIVATIONS = ("green_identity", "hadamard_self_inverse", "h_colour_swap", "hopf", "b1_colour_swap")


def builtin_derivation_text(name: str) -> str:
    return resources.files("stabzx").joinpath("derivations", f"{name}.deriv.json").read_text(encoding="utf-8")


def builtin_derivation(name: str) -> Derivation:
    return Derivation.loads(builtin_derivation_text(name))


# --- necessity summary -----------------------------------------------------------------


def necessity_report(flat: Optional[SoundnessReport] = None, audits: Optional[AuditReport] = None,
                     modified: Optional[SoundnessReport] = None) -> str:
    """Tie each necessity claim about the simplified set to its evidence."""
    flat = flat or sweep_soundness("simplified", FLAT)
    audits = audits or structural_audits("simplified")
    modified = modified or sweep_soundness("modified_3_3", FLAT)

    def witnesses(rep: SoundnessReport, rule: str) -> str:
        ws = [v.label for v in rep.failures() if v.rule == rule]
        return f"{len(ws)} flat counterexample(s), first {ws[0]}" if ws else "no flat counterexample"

    def audit(name: str) -> str:
        ok = audits.passed(name)
        return f"audit {name}: {sorted(audits.found[name])} ({'confirmed' if ok else 'NOT confirmed'})"

    entries = [
        ("S1", audit("reduces_high_degree")),
        ("S3p_L", audit("frees_wire")),
        ("B2p / S3p_R", "disjunction only; " + witnesses(flat, "B2p") + "; " + witnesses(flat, "S3p_R")
         + f"; every other rule flat-sound: {flat.unequal_rules() <= {'B2p', 'S3p_R'}}"),
        ("B1", audit("disconnects_boundaries")),
        ("EUp", "documented, not mechanized: relies on the Euler decomposition underivability argument"),
        ("H", audit("matches_red_high_or_phased")),
        ("IVp", audit("empty_side")),
        ("ZOp", "documented, not mechanized: needs a separate alternative interpretation"),
        ("modified set", "flat-unsound rules " + str(sorted(modified.unequal_rules()))
         + "; " + witnesses(modified, "B2p")),
    ]
    lines = ["necessity evidence (simplified rule set)"]
    lines += [f"  {name:<12} {text}" for name, text in entries]
    return "\n".join(lines)
