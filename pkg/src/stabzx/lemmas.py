"""Catalogue of derived equalities of the stabilizer fragment.

Every case is a pair of diagrams that must have the same standard
interpretation.  Phase-parameterised lemmas are expanded over all four
quarter turns, so one lemma contributes several cases.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, List, Tuple

from .diagram import (
    Diagram,
    H,
    X,
    Z,
    adjoint_flip,
    colour_swap,
    compose,
    compose_all,
    empty,
    identity,
    make_generator,
    tensor,
    tensor_all,
)
from .rules import (
    PHASES,
    _b1,
    _b2_legacy,
    _eu_legacy,
    _k1,
    _k2,
    _s1,
    _s1p,
    _self_loop,
    _zo_legacy,
    graph,
    green_h_green,
    hadamards,
    red_green,
    triple_link,
)


@dataclass(frozen=True)
class LemmaCase:
    name: str
    params: Tuple[Tuple[str, int], ...]
    lhs: Diagram
    rhs: Diagram

    @property
    def label(self) -> str:
        if not self.params:
            return self.name
        return self.name + "[" + ",".join(f"{k}={v}" for k, v in self.params) + "]"


def _omega_inv() -> Diagram:
    # green -pi/2 scalar times 1/sqrt2 is (1 - i)/sqrt2
    return tensor(Z(0, 0, 3), triple_link())


def _omega() -> Diagram:
    return tensor(Z(0, 0, 1), triple_link())


def _hopf():
    lhs = compose(X(2, 1), Z(1, 2))
    return lhs, tensor_all([Z(1, 0), X(0, 1), triple_link(), triple_link()])


def _twist():
    cap, cup = make_generator("cap"), make_generator("cup")
    swap = make_generator("swap")
    lhs = compose_all(tensor(identity(), cap), tensor(swap, identity()), tensor(identity(), cup))
    return lhs, identity()


def _h_loop():
    d = graph({"z": ("Z", 0), "h": ("H", 0)}, [("i", "z"), ("z", "o"), ("z", "h"), ("z", "h")], ["i"], ["o"])
    return d, tensor(Z(1, 1, 2), triple_link())


def _euler_two_form():
    arm = compose(X(2, 1), tensor(identity(), Z(0, 1, 1)))
    return compose_all(Z(1, 1, 3), arm, Z(1, 1, 3)), H()


def _one(name, build) -> Callable[[], Iterator[LemmaCase]]:
    def gen():
        lhs, rhs = build()
        yield LemmaCase(name, (), lhs, rhs)
    return gen


def _swept(name, build, **ranges) -> Callable[[], Iterator[LemmaCase]]:
    keys = list(ranges)

    def gen():
        def rec(i, acc):
            if i == len(keys):
                lhs, rhs = build(**acc)
                yield LemmaCase(name, tuple(acc.items()), lhs, rhs)
                return
            for v in ranges[keys[i]]:
                yield from rec(i + 1, {**acc, keys[i]: v})
        yield from rec(0, {})
    return gen


def _mapped(f, build):
    def b(**kw):
        lhs, rhs = build(**kw)
        return f(lhs), f(rhs)
    return b


def _both(d: Diagram) -> Diagram:
    return adjoint_flip(colour_swap(d))


_SPIDER_SHAPES = {"nm": [(1, 1), (1, 2), (2, 1), (0, 2)]}


def _h_cs(shape: int, alpha: int):
    n, m = _SPIDER_SHAPES["nm"][shape]
    return compose_all(hadamards(n), Z(n, m, alpha), hadamards(m)), X(n, m, alpha)


def _s1_small(alpha: int, beta: int):
    return _s1(1, 2, alpha, beta)


LEMMAS: List[Tuple[str, Callable[[], Iterator[LemmaCase]]]] = [
    ("green_identity", _one("green_identity", lambda: (Z(1, 1), identity()))),
    ("hadamard_self_inverse", _one("hadamard_self_inverse", lambda: (compose(H(), H()), identity()))),
    ("hadamard_self_transpose", _one("hadamard_self_transpose", lambda: (
        compose(tensor(H(), identity()), make_generator("cap")),
        compose(tensor(identity(), H()), make_generator("cap"))))),
    ("H_cs", _swept("H_cs", _h_cs, shape=range(4), alpha=PHASES)),
    ("S1_flip", _swept("S1_flip", _mapped(adjoint_flip, _s1_small), alpha=PHASES, beta=PHASES)),
    ("S1_cs", _swept("S1_cs", _mapped(colour_swap, _s1_small), alpha=PHASES, beta=PHASES)),
    ("S3_flip", _one("S3_flip", lambda: (Z(2, 0), make_generator("cup")))),
    ("S3_red", _one("S3_red", lambda: (X(0, 2), make_generator("cap")))),
    ("S3_red_flip", _one("S3_red_flip", lambda: (X(2, 0), make_generator("cup")))),
    ("scalar_flip", _one("scalar_flip", lambda: (compose(Z(1, 0), X(0, 1)), compose(X(1, 0), Z(0, 1))))),
    ("B1_cs", _one("B1_cs", lambda: tuple(map(colour_swap, _b1())))),
    ("B1_flip", _one("B1_flip", lambda: tuple(map(adjoint_flip, _b1())))),
    ("B1_cs_flip", _one("B1_cs_flip", lambda: tuple(map(_both, _b1())))),
    ("twist", _one("twist", _twist)),
    ("hopf", _one("hopf", _hopf)),
    ("dot_decomposition", _one("dot_decomposition", lambda: (X(0, 1), compose(H(), Z(0, 1))))),
    ("IV", _one("IV", lambda: (tensor(green_h_green(), triple_link()), empty()))),
    ("B2", _one("B2", _b2_legacy)),
    ("B2_cs", _one("B2_cs", lambda: tuple(map(colour_swap, _b2_legacy())))),
    ("S1p", _swept("S1p", _s1p, n=(1,), m=(1,), alpha=PHASES)),
    ("S1p_cs", _swept("S1p_cs", _mapped(colour_swap, _s1p), n=(1,), m=(1,), alpha=PHASES)),
    ("piby2_red_to_green", _one("piby2_red_to_green", lambda: (X(0, 1, 3), tensor(Z(0, 1, 1), _omega_inv())))),
    ("piby2_green_to_red", _one("piby2_green_to_red", lambda: (Z(0, 1, 3), tensor(X(0, 1, 1), _omega_inv())))),
    ("piby2_inverse", _one("piby2_inverse", lambda: (Z(0, 1, 1), tensor(X(0, 1, 3), _omega())))),
    ("piby2_multiply", _one("piby2_multiply", lambda: (compose(X(2, 1), tensor(Z(0, 1, 3), Z(0, 1, 1))), X(0, 1)))),
    ("piby2_scalars", _one("piby2_scalars", lambda: (tensor(Z(0, 0, 3), Z(0, 0, 1)), tensor(red_green(), red_green())))),
    ("inner_product", _swept("inner_product", lambda alpha: (compose(X(1, 0), Z(0, 1, alpha)), red_green()), alpha=PHASES)),
    ("angle_delete", _swept("angle_delete", lambda alpha: (
        tensor(Z(0, 0, 2), Z(0, 0, alpha)), Z(0, 0, 2)), alpha=PHASES)),
    ("angle_free_pi", _one("angle_free_pi", _h_loop)),
    ("pi_dot_copy", _one("pi_dot_copy", lambda: (
        compose(X(1, 2), Z(0, 1, 2)), tensor_all([Z(0, 1, 2), Z(0, 1, 2), triple_link()])))),
    ("K1", _swept("K1", _k1, n=(0, 1, 2))),
    ("K1_flip", _swept("K1_flip", _mapped(adjoint_flip, _k1), n=(0, 1, 2))),
    ("K1_cs", _swept("K1_cs", _mapped(colour_swap, _k1), n=(0, 1, 2))),
    ("euler_two_form", _one("euler_two_form", _euler_two_form)),
    ("EU", _one("EU", _eu_legacy)),
    ("EU_cs", _one("EU_cs", lambda: tuple(map(colour_swap, _eu_legacy())))),
    ("K2", _swept("K2", _k2, n=(1, 2), alpha=PHASES)),
    ("K2_flip", _swept("K2_flip", _mapped(adjoint_flip, _k2), n=(1, 2), alpha=PHASES)),
    ("K2_cs", _swept("K2_cs", _mapped(colour_swap, _k2), n=(1, 2), alpha=PHASES)),
    ("ZO", _one("ZO", _zo_legacy)),
    ("ZO_cs", _one("ZO_cs", lambda: tuple(map(colour_swap, _zo_legacy())))),
    ("ZO_flip", _one("ZO_flip", lambda: tuple(map(adjoint_flip, _zo_legacy())))),
    ("green_commute", _one("green_commute", lambda: (compose(Z(2, 1), make_generator("swap")), Z(2, 1)))),
    ("green_cocommute", _one("green_cocommute", lambda: (compose(make_generator("swap"), Z(1, 2)), Z(1, 2)))),
    ("red_commute", _one("red_commute", lambda: (compose(X(2, 1), make_generator("swap")), X(2, 1)))),
    ("spider_bend", _swept("spider_bend", lambda alpha: (
        compose(tensor(Z(2, 1, alpha), identity()), tensor(identity(), make_generator("cap"))), Z(1, 2, alpha)),
        alpha=PHASES)),
    ("self_loop_red", _one("self_loop_red", lambda: (_self_loop(X(1, 1)), X(1, 1)))),
]


def lemma_names() -> List[str]:
    return [n for n, _ in LEMMAS]


def lemma_cases() -> Iterator[LemmaCase]:
    for _, gen in LEMMAS:
        yield from gen()
