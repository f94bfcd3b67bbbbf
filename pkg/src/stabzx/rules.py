"""The rewrite rules: the simplified set, (S2'), the earlier rule set with
its colour-swapped and upside-down variants, and the modified set in which
bialgebra is the only rule that fails under the flat interpretation.

Every rule is a family of concrete instances. Ellipses ("zero or more
wires") become leg-count parameters; phases are quarter turns.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .diagram import (
    Diagram,
    adjoint_flip,
    canonical_order,
    colour_swap,
    compose,
    compose_all,
    empty,
    find_isomorphism,
    identity,
    make_generator,
    tensor,
    tensor_all,
)
from .rewrite import Match, RuleInstance, apply_match, find_instance_matches, host_fingerprint

PHASES = (0, 1, 2, 3)
DEFAULT_MAX_LEGS = 3

LR, RL = "LR", "RL"


class UnknownRuleSet(KeyError):
    pass


# --- small diagram builder -----------------------------------------------------


def graph(
    vertices: Mapping[str, Tuple[str, int]],
    edges: Iterable[Tuple[str, str]],
    inputs: Sequence[str] = (),
    outputs: Sequence[str] = (),
) -> Diagram:
    """Build a diagram from named vertices; names in ``inputs``/``outputs``
    are boundaries and need not be listed in ``vertices``."""
    names = list(inputs) + list(outputs) + [n for n in vertices if n not in inputs and n not in outputs]
    ids = {n: i for i, n in enumerate(names)}
    verts = {ids[n]: ("B", 0) for n in list(inputs) + list(outputs)}
    for n, kp in vertices.items():
        verts[ids[n]] = kp
    return Diagram.build(verts, [(ids[a], ids[b]) for a, b in edges], [ids[n] for n in inputs], [ids[n] for n in outputs])


def red_green() -> Diagram:
    """Green state into red effect; equals sqrt2."""
    return graph({"g": ("Z", 0), "r": ("X", 0)}, [("g", "r")])


def triple_link() -> Diagram:
    """Green and red dot joined by three wires; equals 1/sqrt2."""
    return graph({"g": ("Z", 0), "r": ("X", 0)}, [("g", "r")] * 3)


def green_h_green() -> Diagram:
    """Two green dots through a Hadamard; equals sqrt2."""
    return graph({"a": ("Z", 0), "h": ("H", 0), "b": ("Z", 0)}, [("a", "h"), ("h", "b")])


def red_h_red() -> Diagram:
    """Two red dots through a Hadamard; equals sqrt2."""
    return colour_swap(green_h_green())


def scalar_dot(colour: str, phase: int) -> Diagram:
    return make_generator(colour, 0, 0, phase)


def spider(colour: str, n: int, m: int, phase: int = 0) -> Diagram:
    return make_generator(colour, n, m, phase)


def hadamards(k: int) -> Diagram:
    return tensor_all([make_generator("h")] * k)


def power(d: Diagram, k: int) -> Diagram:
    return tensor_all([d] * k)


# --- rules ------------------------------------------------------------------------


@dataclass(frozen=True)
class Param:
    name: str
    kind: str  # "phase" | "legs"
    values: Optional[Tuple[int, ...]] = None


@dataclass
class RewriteRule:
    name: str
    provenance: str
    params: Tuple[Param, ...]
    build: Callable[..., Tuple[Diagram, Diagram]]
    group: Optional[str] = None
    direction: str = LR
    _cache: Dict = field(default_factory=dict, repr=False, compare=False)

    def instance(self, **kw) -> RuleInstance:
        lhs, rhs = self.build(**kw)
        return RuleInstance(lhs, rhs, tuple(sorted(kw.items())))

    def instantiate(self, max_legs: int = DEFAULT_MAX_LEGS, phases: Iterable[int] = PHASES) -> List[RuleInstance]:
        key = ("inst", max_legs, tuple(sorted(set(phases))))
        if key in self._cache:
            return self._cache[key]
        phases = tuple(sorted(set(phases)))
        if not phases:
            raise ValueError("empty phase set")
        ranges = []
        for p in self.params:
            if p.kind == "phase":
                ranges.append(tuple(v for v in (p.values or PHASES) if v in phases) if p.values else phases)
            else:
                ranges.append(tuple(range(0, max_legs + 1)))
        out = []
        for combo in itertools.product(*ranges):
            out.append(self.instance(**{p.name: v for p, v in zip(self.params, combo)}))
        self._cache[key] = out
        return out

    def reversed(self) -> RewriteRule:
        return RewriteRule(self.name, self.provenance, self.params, self.build, self.group,
                           RL if self.direction == LR else LR)

    # matching -------------------------------------------------------------------

    def _match_instances(self, max_legs: int) -> List[RuleInstance]:
        """Instances with boundary sides forgotten, one per shape."""
        key = ("match", max_legs)
        if key in self._cache:
            return self._cache[key]
        seen = set()
        out = []
        for inst in self.instantiate(max_legs):
            k = (_flat_key(inst.lhs, inst.rhs))
            if k in seen:
                continue
            seen.add(k)
            out.append(inst)
        self._cache[key] = out
        return out

    def find_matches(self, host: Diagram, direction: Optional[str] = None,
                     params: Optional[Mapping[str, int]] = None) -> List[Match]:
        direction = direction or self.direction
        degs = [host.degree(v) for v in host.internal_vertices()]
        max_legs = max(degs, default=0)
        if params:
            insts = [self.instance(**_complete(self, params))]
        else:
            insts = self._match_instances(max(max_legs, 1))
        pcache = self._cache.setdefault("patterns", {})
        out: List[Match] = []
        fp = host_fingerprint(host)
        for inst in insts:
            out.extend(find_instance_matches(self.name, direction, inst, host, pcache, fp))
        out.sort(key=lambda m: (m.locus, m.bare_edges, sorted(m.params.items())))
        return _dedupe(out, host)


def _dedupe(matches: List[Match], host: Diagram) -> List[Match]:
    """Drop matches at the same locus whose results coincide."""
    kept: List[Match] = []
    groups: Dict[tuple, List[Match]] = {}
    for m in matches:
        key = (m.locus, tuple(sorted(m.bare_edges)))
        same = groups.setdefault(key, [])
        if not same:
            same.append(m)
            kept.append(m)
            continue
        locus = set(m.locus)
        fixed = {v: v for v in host.vertices if v not in locus}
        if any(find_isomorphism(m.result, o.result, fixed=fixed) is not None for o in same):
            continue
        same.append(m)
        kept.append(m)
    return kept


def _complete(rule: RewriteRule, params: Mapping[str, int]) -> Dict[str, int]:
    missing = [p.name for p in rule.params if p.name not in params]
    if missing:
        raise ValueError(f"rule {rule.name} needs parameters {missing}")
    return {p.name: int(params[p.name]) for p in rule.params}


def _flat_key(lhs: Diagram, rhs: Diagram):
    def flat(d: Diagram) -> Diagram:
        return Diagram(d.kinds, d.edges, (), d.inputs + d.outputs, d.circles)

    out = []
    for d in (flat(lhs), flat(rhs)):
        order = canonical_order(d)
        idx = {v: i for i, v in enumerate(order)}
        pos = {v: i for i, v in enumerate(d.outputs)}
        labels = tuple((pos.get(v, -1), d.kind(v), d.phase(v)) for v in order)
        es = tuple(sorted(tuple(sorted((idx[u], idx[v]))) for u, v in d.edges))
        out.append((labels, es, d.circles))
    return tuple(out)


def find_matches(rule: RewriteRule, host: Diagram, direction: Optional[str] = None,
                 params: Optional[Mapping[str, int]] = None) -> List[Match]:
    return rule.find_matches(host, direction, params)


def apply(match: Match, host: Diagram) -> Diagram:
    return apply_match(match, host)


def instantiate(rule: RewriteRule, max_legs: int = DEFAULT_MAX_LEGS, phases: Iterable[int] = PHASES) -> List[RuleInstance]:
    return rule.instantiate(max_legs, phases)


# --- transcriptions -------------------------------------------------------------


def _s1(a: int, b: int, alpha: int, beta: int):
    lhs = compose(spider("Z", 1, b, beta), spider("Z", a, 1, alpha))
    return lhs, spider("Z", a, b, alpha + beta)


def _s3p_l():
    return spider("Z", 0, 2), make_generator("cap")


def _s3p_r():
    return spider("Z", 0, 2), spider("X", 0, 2)


def _b1():
    lhs = tensor(compose(spider("Z", 1, 2), spider("X", 0, 1)), red_green())
    return lhs, tensor(spider("X", 0, 1), spider("X", 0, 1))


def _bialgebra_lhs() -> Diagram:
    return compose(spider("X", 1, 2), spider("Z", 2, 1))


def _bialgebra_rhs() -> Diagram:
    return compose_all(
        tensor(spider("X", 1, 2), spider("X", 1, 2)),
        tensor_all([identity(), make_generator("swap"), identity()]),
        tensor(spider("Z", 2, 1), spider("Z", 2, 1)),
    )


def _b2p():
    return _bialgebra_lhs(), tensor(_bialgebra_rhs(), green_h_green())


def _b2_legacy():
    return tensor(_bialgebra_lhs(), triple_link()), _bialgebra_rhs()


def _red_pi2_arm() -> Diagram:
    """Red dot with one input, one output and a third leg to a green -pi/2 state."""
    return compose(spider("X", 2, 1), tensor(identity(), spider("Z", 0, 1, 3)))


def _eup():
    rhs = compose_all(spider("Z", 1, 1, 1), _red_pi2_arm(), spider("Z", 1, 1, 1))
    return make_generator("h"), rhs


def _eu_legacy():
    lhs = tensor_all([make_generator("h"), scalar_dot("Z", 1), triple_link()])
    rhs = compose_all(spider("Z", 1, 1, 1), spider("X", 1, 1, 1), spider("Z", 1, 1, 1))
    return lhs, rhs


def _h(n: int, m: int, alpha: int):
    lhs = compose_all(hadamards(n), spider("X", n, m, alpha), hadamards(m))
    return lhs, spider("Z", n, m, alpha)


def _ivp():
    return tensor(red_green(), triple_link()), empty()


def _zop():
    pi = scalar_dot("Z", 2)
    lhs = tensor(pi, spider("Z", 1, 1))
    rhs = tensor_all([pi, spider("Z", 1, 0), spider("Z", 0, 1)])
    return lhs, rhs


def _s2p():
    return spider("X", 1, 1), identity()


def _s1p(n: int, m: int, alpha: int):
    return _self_loop(spider("Z", n, m, alpha)), spider("Z", n, m, alpha)


def _self_loop(d: Diagram) -> Diagram:
    """Add one plain self-loop on the (unique) spider of ``d``."""
    (s,) = d.internal_vertices()
    return Diagram.build(d.vertices, list(d.edges) + [(s, s)], d.inputs, d.outputs, d.circles)


def _s3_legacy():
    return spider("Z", 0, 2), make_generator("cap")


def _sr():
    return tensor(red_green(), colour_swap(triple_link())), empty()


def _k1(n: int):
    red_pi = spider("X", 0, 1, 2)
    lhs = compose(spider("Z", 1, n), red_pi)
    rhs = power(red_pi, n)
    if n >= 1:
        lhs = tensor(lhs, power(red_green(), n - 1))
    else:
        rhs = tensor(rhs, red_green())
    return lhs, rhs


def _unit_scalar(alpha: int) -> Diagram:
    """Equals e^{i alpha}: red pi state into green alpha effect, times 1/sqrt2."""
    return tensor(compose(spider("Z", 1, 0, alpha), spider("X", 0, 1, 2)), triple_link())


def _k2(n: int, alpha: int):
    red_pi = spider("X", 1, 1, 2)
    lhs = compose(spider("Z", 1, n, alpha), red_pi)
    rhs = compose(power(red_pi, n), spider("Z", 1, n, -alpha))
    return lhs, tensor(rhs, _unit_scalar(alpha))


def _zo_legacy():
    pi = scalar_dot("Z", 2)
    return tensor(pi, identity()), tensor_all([pi, spider("X", 1, 0), spider("X", 0, 1)])


def _zs(alpha: int):
    pi = scalar_dot("Z", 2)
    return tensor(pi, scalar_dot("Z", alpha)), pi


def _iv_legacy():
    return tensor(green_h_green(), triple_link()), empty()


def _s3_tilde():
    lhs = tensor_all([spider("X", 0, 2), green_h_green(), triple_link()])
    return lhs, make_generator("cap")


def _iv_tilde():
    return tensor(red_h_red(), triple_link()), empty()


def _legs(*names) -> Tuple[Param, ...]:
    return tuple(Param(n, "legs") for n in names)


def _phases(*names) -> Tuple[Param, ...]:
    return tuple(Param(n, "phase") for n in names)


def _mk(name, prov, build, params=(), group=None) -> RewriteRule:
    return RewriteRule(name, prov, tuple(params), build, group)


def base_rules() -> Dict[str, RewriteRule]:
    rules = [
        _mk("S1", "simplified set (S1)", _s1, _legs("a", "b") + _phases("alpha", "beta")),
        _mk("S3p_L", "simplified set (S3'), left equality", _s3p_l, group="S3p"),
        _mk("S3p_R", "simplified set (S3'), right equality", _s3p_r, group="S3p"),
        _mk("B1", "simplified set (B1)", _b1),
        _mk("B2p", "simplified set (B2')", _b2p),
        _mk("EUp", "simplified set (EU')", _eup),
        _mk("H", "simplified set (H)", _h, _legs("n", "m") + _phases("alpha")),
        _mk("IVp", "simplified set (IV')", _ivp),
        _mk("ZOp", "simplified set (ZO')", _zop),
        _mk("S2p", "supplementary (S2')", _s2p),
        _mk("S1_legacy", "legacy set (S1)", _s1, _legs("a", "b") + _phases("alpha", "beta")),
        _mk("S1p", "legacy set (S1')", _s1p, _legs("n", "m") + _phases("alpha")),
        _mk("S3", "legacy set (S3)", _s3_legacy),
        _mk("SR", "legacy set (SR)", _sr),
        _mk("B1_legacy", "legacy set (B1)", _b1),
        _mk("B2", "legacy set (B2)", _b2_legacy),
        _mk("K1", "legacy set (K1)", _k1, _legs("n")),
        _mk("K2", "legacy set (K2)", _k2, _legs("n") + _phases("alpha")),
        _mk("EU", "legacy set (EU)", _eu_legacy),
        _mk("H_legacy", "legacy set (H)", _h, _legs("n", "m") + _phases("alpha")),
        _mk("ZO", "legacy set (ZO)", _zo_legacy),
        _mk("ZS", "legacy set (ZS)", _zs, _phases("alpha")),
        _mk("IV", "derived lemma (IV)", _iv_legacy),
        _mk("S3_tilde", "modified set (S3~)", _s3_tilde),
        _mk("IV_tilde", "modified set (IV~)", _iv_tilde),
    ]
    return {r.name: r for r in rules}


_BASE = base_rules()


def get_rule(name: str) -> RewriteRule:
    if name in _BASE:
        return _BASE[name]
    for suffix, tf in (("_cs_flip", "both"), ("_cs", "colour_swap"), ("_flip", "flip")):
        if name.endswith(suffix) and name[: -len(suffix)] in _BASE:
            return _variant_cached(name[: -len(suffix)], tf)
    raise KeyError(f"unknown rule {name!r}")


_VARIANTS: Dict[Tuple[str, str], RewriteRule] = {}


def _variant_cached(name: str, transform: str) -> RewriteRule:
    key = (name, transform)
    if key not in _VARIANTS:
        _VARIANTS[key] = variant(_BASE[name], transform)
    return _VARIANTS[key]


def variant(rule: RewriteRule, transform: str) -> RewriteRule:
    """Colour-swapped and/or upside-down version of a rule."""
    transform = transform.lower()
    if transform in ("colourswap", "colour_swap", "cs"):
        fs, suffix = [colour_swap], "_cs"
    elif transform == "flip":
        fs, suffix = [adjoint_flip], "_flip"
    elif transform == "both":
        fs, suffix = [colour_swap, adjoint_flip], "_cs_flip"
    else:
        raise ValueError(f"unknown transform {transform!r}")

    def build(**kw):
        lhs, rhs = rule.build(**kw)
        for f in fs:
            lhs, rhs = f(lhs), f(rhs)
        return lhs, rhs

    # composing a variant with itself goes back to the plain name stem
    base = rule.name
    for s in ("_cs_flip", "_cs", "_flip"):
        if base.endswith(s):
            base, prev = base[: -len(s)], s
            combined = {("_cs", "_cs"): "", ("_flip", "_flip"): "", ("_cs", "_flip"): "_cs_flip",
                        ("_flip", "_cs"): "_cs_flip", ("_cs_flip", "_cs"): "_flip", ("_cs_flip", "_flip"): "_cs",
                        ("_cs", "_cs_flip"): "_flip", ("_flip", "_cs_flip"): "_cs", ("_cs_flip", "_cs_flip"): ""}
            suffix = combined[(prev, suffix)]
            break
    name = base + suffix
    return RewriteRule(name, f"{rule.provenance} [{transform}]", rule.params, build, rule.group)


SIMPLIFIED = ("S1", "S3p_L", "S3p_R", "B1", "B2p", "EUp", "H", "IVp", "ZOp")
LEGACY_BASE = ("S1_legacy", "S1p", "S3", "SR", "B1_legacy", "B2", "K1", "K2", "EU", "H_legacy", "ZO", "ZS", "IV")
MODIFIED = ("S1", "S3", "S3_tilde", "B1", "B2p", "EUp", "H", "IV_tilde", "ZOp")

RULE_SETS = ("simplified", "simplified+S2p", "legacy", "modified_3_3", "extended")


def rule_registry(set_name: str) -> List[RewriteRule]:
    """Named rule sets.

    ``extended`` is the simplified set with (S2') plus the colour-swapped
    and flipped versions of its rules, i.e. the derived lemmas that the
    longer derivations are allowed to cite.
    """
    if set_name == "simplified":
        names = list(SIMPLIFIED)
    elif set_name == "simplified+S2p":
        names = list(SIMPLIFIED) + ["S2p"]
    elif set_name == "legacy":
        names = [n + s for n in LEGACY_BASE for s in ("", "_cs", "_flip", "_cs_flip")]
    elif set_name == "modified_3_3":
        names = list(MODIFIED)
    elif set_name == "extended":
        names = [n + s for n in list(SIMPLIFIED) + ["S2p"] for s in ("", "_cs", "_flip", "_cs_flip")]
    else:
        raise UnknownRuleSet(set_name)
    return [get_rule(n) for n in names]


def registry_map(set_name: str) -> Dict[str, RewriteRule]:
    return {r.name: r for r in rule_registry(set_name)}
