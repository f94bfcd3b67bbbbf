"""Regenerate the bundled derivation scripts and the replay test fixtures.

Run from the repository root: python3 tools/make_derivations.py
"""
import dataclasses
import os
import sys

sys.path.insert(0, os.path.dirname(__file__))
from author import Author  # noqa: E402

from stabzx.diagram import H, X, Z, colour_swap, compose, compose_all, identity, isomorphic  # noqa: E402
from stabzx.lemmas import _hopf  # noqa: E402
from stabzx.rules import _b1, hadamards  # noqa: E402
from stabzx.verifier import Derivation  # noqa: E402

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
PKG = os.path.join(ROOT, "src", "stabzx", "derivations")
FIX = os.path.join(ROOT, "tests", "data")


def kinds(c, e):
    return sorted(c.kind(v) for v in e)


def between_h(m, c):
    return kinds(c, m.bare_edges[0]) == ["H", "H"]


def newest(m, c):
    return m.locus[0] == max(c.internal_vertices())


def cancel_hh(a):
    a.step("S2p", "RL", pick=between_h)
    a.step("H", "LR", n=1, m=1, alpha=0)
    a.step("S3p_L", "LR")


def insert_hh(a, edge):
    a.step("S3p_L", "RL", pick=lambda m, c: tuple(sorted(m.bare_edges[0])) == edge)
    a.step("H", "RL", pick=newest, n=1, m=1, alpha=0)
    a.step("S2p", "LR", pick=lambda m, c: all(c.kind(w) == "H" for w in c.adjacency[m.locus[0]]))


def green_identity():
    a = Author("green_identity", Z(1, 1), "simplified")
    a.step("S3p_L", "LR")
    return a, identity()


def hadamard_self_inverse():
    a = Author("hadamard_self_inverse", compose(H(), H()), "simplified+S2p")
    cancel_hh(a)
    return a, identity()


def h_colour_swap():
    a = Author("h_colour_swap", compose_all(H(), Z(1, 2, 1), hadamards(2)), "simplified+S2p")
    a.step("H", "RL", checkpoint=True, n=1, m=2, alpha=1)
    for _ in range(3):
        cancel_hh(a)
    return a, X(1, 2, 1)


def hopf():
    a = Author("hopf", compose(X(2, 1), Z(1, 2)), "extended")
    a.step("S2p", "RL", pick=lambda m, c: kinds(c, m.bare_edges[0]) == ["X", "Z"])
    a.step("S3p_L", "RL", pick=lambda m, c: kinds(c, m.bare_edges[0]) == ["X", "X"])
    a.step("S1", "RL", a=2, b=0, alpha=0, beta=0)
    a.step("S1_cs", "RL", pick=lambda m, c: c.degree(m.locus[0]) == 2, a=2, b=0, alpha=0, beta=0)
    a.step("IVp", "RL")

    def rg_red(m, c):
        (w,) = c.adjacency[m.locus[0]]
        return c.kind(w) == "Z" and c.degree(w) == 1

    a.step("H_cs", "RL", pick=rg_red, n=0, m=1, alpha=0)
    a.step("B2p", "RL", checkpoint=True)
    a.step("IVp", "RL")
    a.step("B1_cs", "LR")
    a.step("S1", "LR")
    a.step("S3p_L", "LR")
    return a, _hopf()[1]


def b1_colour_swap():
    lhs, rhs = map(colour_swap, _b1())
    a = Author("b1_colour_swap", lhs, "simplified+S2p")
    x12 = next(v for v in a.cur.internal_vertices() if a.cur.kind(v) == "X" and a.cur.degree(v) == 3)
    for e in [tuple(sorted(e)) for e in a.cur.edges if x12 in e]:
        insert_hh(a, e)
    a.step("H", "LR", checkpoint=True, n=1, m=2, alpha=0)

    def green_state_by_h(m, c):
        v = m.locus[0]
        return c.degree(v) == 1 and c.kind(c.adjacency[v][0]) == "H"

    a.step("H", "RL", pick=green_state_by_h, n=0, m=1, alpha=0)
    cancel_hh(a)
    a.step("B1", "LR")
    a.step("H", "LR", n=0, m=1, alpha=0)
    a.step("H", "LR", n=0, m=1, alpha=0)
    return a, rhs


def fusion():
    a = Author("fusion", compose(Z(1, 1, 2), Z(1, 1, 1)), "simplified")
    a.step("S1", "LR")
    return a, Z(1, 1, 3)


def main():
    os.makedirs(PKG, exist_ok=True)
    os.makedirs(FIX, exist_ok=True)
    for build in (green_identity, hadamard_self_inverse, h_colour_swap, hopf, b1_colour_swap):
        a, goal = build()
        assert isomorphic(a.cur, goal), a.name
        d = a.finish(goal, os.path.join(PKG, f"{a.name}.deriv.json"))
        print(f"{a.name}: {len(d.steps)} steps")
    a, goal = fusion()
    a.finish(goal, os.path.join(FIX, "fusion.deriv.json"))
    # a single-match step whose locator is bumped past the end
    d = hopf()[0]
    steps = list(Derivation(d.start, tuple(d.steps), d.cur, d.rules).steps)
    steps[6] = dataclasses.replace(steps[6], match=steps[6].match + 1)
    bad = Derivation(d.start, tuple(steps), d.cur, d.rules, "hopf_corrupted")
    with open(os.path.join(FIX, "hopf_corrupted.deriv.json"), "w", encoding="utf-8") as f:
        f.write(bad.dumps() + "\n")


if __name__ == "__main__":
    main()
