import os
from typing import List

import pytest
from hypothesis import strategies as st

from stabzx.exact import ExactAmplitude, ZERO
from stabzx.fuzz import FuzzConfig, random_diagram

DATA = os.path.join(os.path.dirname(__file__), "data")
ROOT_DATA = os.path.join(os.path.dirname(os.path.dirname(__file__)), "data")


def small_diagrams(max_wires: int = 3, max_spiders: int = 4):
    return st.integers(0, 2**63).map(
        lambda s: random_diagram(FuzzConfig(seed=s, max_wires=max_wires, max_spiders=max_spiders)))


def matmul(a: List[List[ExactAmplitude]], b: List[List[ExactAmplitude]]):
    out = []
    for row in a:
        r = []
        for j in range(len(b[0])):
            acc = ZERO
            for t, x in enumerate(row):
                if not x.is_zero():
                    acc = acc + x * b[t][j]
            r.append(acc)
        out.append(r)
    return out


def kron(a, b):
    return [[x * y for x in ra for y in rb] for ra in a for rb in b]


def transpose(a):
    return [list(r) for r in zip(*a)]


@pytest.fixture
def tmp_reports(tmp_path):
    return str(tmp_path / "reports")


def planted_registry(rule_set: str = "simplified+S2p"):
    """Registry whose S1 wraps phase sums modulo 3 instead of 4."""
    from stabzx.rules import RewriteRule, get_rule, registry_map, spider

    good = get_rule("S1")

    def bad(a, b, alpha, beta):
        lhs, _ = good.build(a=a, b=b, alpha=alpha, beta=beta)
        return lhs, spider("Z", a, b, (alpha + beta) % 3)

    reg = registry_map(rule_set)
    reg["S1"] = RewriteRule("S1", "planted bug", good.params, bad)
    return reg


ACCEPTANCE_LINES: List[str] = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion."""
    def record(n: int, ok: bool, detail: str = "") -> None:
        line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}".rstrip()
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
