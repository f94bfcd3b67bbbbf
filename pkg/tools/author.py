"""Helpers for writing derivation scripts step by step.

Each step names a rule, a direction and parameters; the match is chosen by a
predicate on the match (default: the first one) and stored by index.
"""
from stabzx.rules import registry_map
from stabzx.semantics import interpret, tensors_equal
from stabzx.verifier import Derivation, Step, replay


class Author:
    def __init__(self, name, start, rules):
        self.name, self.start, self.rules = name, start, rules
        self.reg = registry_map(rules)
        self.cur = start
        self.steps = []
        self.ref = interpret(start)

    def matches(self, rule, direction="LR", **params):
        return self.reg[rule].find_matches(self.cur, direction, params or None)

    def show(self, rule, direction="LR", **params):
        for i, m in enumerate(self.matches(rule, direction, **params)):
            print(i, m.locus, [self.cur.kind(v) for v in m.locus], m.bare_edges, m.params)

    def step(self, rule, direction="LR", pick=None, checkpoint=False, **params):
        ms = self.matches(rule, direction, **params)
        idx = 0 if pick is None else next(i for i, m in enumerate(ms) if pick(m, self.cur))
        self.cur = ms[idx].result
        assert tensors_equal(interpret(self.cur), self.ref), (rule, direction)
        self.steps.append(Step(rule, direction, idx, tuple(sorted(params.items())),
                               self.cur if checkpoint else None))
        return self

    def locus_kinds(self, m):
        return sorted(self.cur.kind(v) for v in m.locus)

    def finish(self, goal, path):
        d = Derivation(self.start, tuple(self.steps), goal, self.rules, self.name)
        replay(d)
        with open(path, "w", encoding="utf-8") as f:
            f.write(d.dumps() + "\n")
        return d
