"""Random diagrams and randomized rewrite checking."""
from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence

from .diagram import Diagram, compose, diagram_from_doc, diagram_to_doc, identity, make_generator, tensor_all
from .rules import LR, RL, RewriteRule, registry_map
from .semantics import DEFAULT_CAP, ContractionCapExceeded, interpret, tensors_equal

_SPIDER_MAX_DEGREE = 4


@dataclass(frozen=True)
class FuzzConfig:
    seed: int = 0
    max_wires: int = 6
    max_spiders: int = 10
    steps: int = 20
    rule_set: str = "simplified+S2p"
    chain: int = 4

    def __post_init__(self):
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.max_wires > DEFAULT_CAP - 2:
            raise ValueError(f"max_wires must be at most {DEFAULT_CAP - 2}")
        if self.max_wires < 0 or self.max_spiders < 0 or self.steps < 0 or self.chain < 1:
            raise ValueError("sizes must be non-negative and chain positive")


def _layer(rng: random.Random, width: int, max_wires: int) -> Optional[Diagram]:
    """One generator padded with identity wires, or None if it does not fit."""
    choice = rng.choice(("Z", "Z", "X", "X", "H", "swap", "cup", "cap"))
    if choice in ("Z", "X"):
        a = rng.randint(0, min(width, 3))
        b = rng.randint(0, min(_SPIDER_MAX_DEGREE - a, max_wires - width + a))
        if a + b == 0 and rng.random() < 0.7:
            b = 1 if width < max_wires else 0
            a = 1 - b if width else 0
        g = make_generator(choice, a, b, rng.randrange(4))
    elif choice == "H":
        g = make_generator("h")
    else:
        g = make_generator(choice)
    n, m = g.signature
    if n > width or width - n + m > max_wires:
        return None
    off = rng.randint(0, width - n)
    return tensor_all([identity(off), g, identity(width - n - off)])


def random_diagram(config: FuzzConfig, rng: Optional[random.Random] = None) -> Diagram:
    """Compose random generator layers; well-formed by construction.

    With no ``rng`` the diagram depends only on ``config.seed``.
    """
    rng = rng if rng is not None else random.Random(config.seed)
    width = rng.randint(0, min(3, config.max_wires // 2))
    d = identity(width)
    target = rng.randint(1, max(1, config.max_spiders)) if config.max_spiders else 0
    spiders = 0
    attempts = 0
    while spiders < target and attempts < 20 * (target + 1):
        attempts += 1
        layer = _layer(rng, width, config.max_wires)
        if layer is None:
            continue
        d = compose(layer, d)
        width = len(d.outputs)
        spiders += sum(1 for v in layer.internal_vertices() if layer.kind(v) in ("Z", "X"))
    # close off outputs until the whole boundary fits
    while len(d.inputs) + len(d.outputs) > config.max_wires:
        w = len(d.outputs)
        off = rng.randrange(w)
        g = make_generator(rng.choice(("Z", "X")), 1, 0, rng.randrange(4))
        d = compose(tensor_all([identity(off), g, identity(w - off - 1)]), d)
    return d


# --- fuzz run -------------------------------------------------------------------------


@dataclass
class Violation:
    seed: int
    diagram: Diagram
    rule: str
    direction: str
    params: Dict[str, int]
    match: int

    def to_doc(self) -> dict:
        return {"seed": self.seed, "diagram": diagram_to_doc(self.diagram), "rule": self.rule,
                "dir": self.direction, "params": self.params, "match": self.match}


@dataclass
class FuzzReport:
    config: FuzzConfig
    applications: int = 0
    diagrams: int = 0
    skipped_cap: int = 0
    per_rule: Dict[str, int] = field(default_factory=dict)
    violations: List[Violation] = field(default_factory=list)

    def summary(self) -> dict:
        return {"config": asdict(self.config), "diagrams": self.diagrams, "applications": self.applications,
                "skipped_over_cap": self.skipped_cap, "per_rule": dict(sorted(self.per_rule.items())),
                "violations": len(self.violations)}

    def render(self) -> str:
        c = self.config
        lines = [f"fuzz: seed={c.seed} rules={c.rule_set} steps={c.steps} max_wires={c.max_wires}",
                 f"  diagrams {self.diagrams}  applications {self.applications}  skipped (cap) {self.skipped_cap}"]
        for name, k in sorted(self.per_rule.items()):
            lines.append(f"  {name:<16} {k}")
        lines.append(f"  violations {len(self.violations)}")
        for v in self.violations[:5]:
            lines.append(f"    {v.rule} {v.direction} match {v.match} params {v.params}")
        return "\n".join(lines)


def _try_rewrite(rng: random.Random, rules: Sequence[RewriteRule], d: Diagram):
    order = list(rules)
    rng.shuffle(order)
    for rule in order:
        direction = rng.choice((LR, RL))
        for dr in (direction, RL if direction == LR else LR):
            ms = rule.find_matches(d, dr)
            if ms:
                i = rng.randrange(len(ms))
                return rule, dr, i, ms[i]
    return None


def run_fuzz(config: FuzzConfig, rules: Optional[Mapping[str, RewriteRule]] = None) -> FuzzReport:
    """Apply ``config.steps`` random rewrites and check each exactly.

    Rewrites are chained a few times on each random diagram before a fresh
    diagram is drawn.
    """
    reg = dict(rules) if rules is not None else registry_map(config.rule_set)
    ordered = [reg[k] for k in sorted(reg)]
    rng = random.Random(config.seed)
    rep = FuzzReport(config)
    while rep.applications < config.steps:
        d = random_diagram(config, rng)
        rep.diagrams += 1
        try:
            ref = interpret(d)
        except ContractionCapExceeded:
            rep.skipped_cap += 1
            continue
        for _ in range(config.chain):
            if rep.applications >= config.steps:
                break
            got = _try_rewrite(rng, ordered, d)
            if got is None:
                break
            rule, dr, i, m = got
            try:
                t = interpret(m.result)
            except ContractionCapExceeded:
                rep.skipped_cap += 1
                break
            rep.applications += 1
            rep.per_rule[rule.name] = rep.per_rule.get(rule.name, 0) + 1
            if not tensors_equal(t, ref):
                rep.violations.append(Violation(config.seed, d, rule.name, dr, dict(m.params), i))
                break
            d = m.result
    return rep


def load_reproducer(text: str) -> Violation:
    doc = json.loads(text)
    return Violation(doc["seed"], diagram_from_doc(doc["diagram"], "$.diagram"), doc["rule"], doc["dir"],
                     dict(doc["params"]), doc["match"])


def replay_reproducer(v: Violation, rules: Mapping[str, RewriteRule]) -> bool:
    """True if the recorded rewrite still changes the interpretation."""
    rule = rules[v.rule]
    ms = rule.find_matches(v.diagram, v.direction)
    m = ms[v.match]
    return not tensors_equal(interpret(m.result), interpret(v.diagram))
