"""Matching and applying concrete rule instances inside a host diagram.

A rule instance is a pair of open graphs with the same boundary. Matching
the source side means finding its internal vertices in the host with
exactly the same degrees; every host edge leaving the match then plays the
role of one of the pattern's boundary legs. Rewriting splices the target
side into those legs.
"""

from __future__ import annotations

import itertools
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

from .diagram import Diagram, find_isomorphism, smooth, serialize_diagram


class StaleMatch(RuntimeError):
    pass


@dataclass(frozen=True)
class RuleInstance:
    lhs: Diagram
    rhs: Diagram
    params: Tuple[Tuple[str, int], ...] = ()

    def param_dict(self) -> Dict[str, int]:
        return dict(self.params)

    def oriented(self, direction: str) -> Tuple[Diagram, Diagram]:
        return (self.lhs, self.rhs) if direction == "LR" else (self.rhs, self.lhs)


@dataclass
class Match:
    rule: str
    direction: str
    params: Dict[str, int]
    vertex_map: Dict[int, int]
    bare_edges: Tuple[Tuple[int, int], ...]
    host_key: str
    result: Diagram = field(repr=False)

    @property
    def locus(self) -> Tuple[int, ...]:
        return tuple(sorted(self.vertex_map.values()))


def host_fingerprint(d: Diagram) -> str:
    return serialize_diagram(d)


# --- pattern analysis --------------------------------------------------------


class _Pattern:
    """Precomputed structure of one oriented instance."""

    def __init__(self, src: Diagram, dst: Diagram):
        if src.circles:
            raise ValueError("patterns may not contain closed loops")
        self.src = src
        self.dst = dst
        self.internals = src.internal_vertices()
        self.labels = {p: (src.kind(p), src.phase(p), src.degree(p)) for p in self.internals}
        self.label_count = Counter(self.labels.values())
        bset = set(src.boundary)
        # internal-internal edge multiplicities (p <= q)
        self.inner: Counter = Counter()
        self.legs: Dict[int, List[int]] = {p: [] for p in self.internals}
        self.bare: List[Tuple[int, int]] = []
        for u, v in src.edges:
            if u in bset and v in bset:
                self.bare.append((u, v))
            elif u in bset:
                self.legs[v].append(u)
            elif v in bset:
                self.legs[u].append(v)
            else:
                self.inner[(u, v)] += 1
        self.bmap = dict(zip(src.inputs, dst.inputs))
        self.bmap.update(zip(src.outputs, dst.outputs))
        self.leg_classes = {p: self._classes(p) for p in self.internals}

    def _classes(self, p: int) -> List[List[int]]:
        """Group the legs of ``p`` that can be permuted without changing
        the target side."""
        legs = self.legs[p]
        classes: List[List[int]] = []
        for b in legs:
            for cls in classes:
                if self._swappable(cls[0], b):
                    cls.append(b)
                    break
            else:
                classes.append([b])
        return classes

    def _swappable(self, b1: int, b2: int) -> bool:
        r1, r2 = self.bmap[b1], self.bmap[b2]
        dst = self.dst
        sw = {r1: r2, r2: r1}
        swapped = Diagram(
            dst.kinds,
            dst.edges,
            tuple(sw.get(v, v) for v in dst.inputs),
            tuple(sw.get(v, v) for v in dst.outputs),
            dst.circles,
        )
        return find_isomorphism(dst, swapped) is not None


# --- embedding search --------------------------------------------------------


def _embeddings(pat: _Pattern, host: Diagram) -> Iterator[Dict[int, int]]:
    hlabels = {v: (host.kind(v), host.phase(v), host.degree(v)) for v in host.internal_vertices()}
    have = Counter(hlabels.values())
    for lab, n in pat.label_count.items():
        if have[lab] < n:
            return
    cands = {p: [v for v in sorted(hlabels) if hlabels[v] == pat.labels[p]] for p in pat.internals}
    order = sorted(pat.internals, key=lambda p: len(cands[p]))
    hm = host.multiplicity
    mapping: Dict[int, int] = {}
    used = set()

    def fits(p: int, v: int) -> bool:
        if hm.get((v, v), 0) < pat.inner.get((p, p), 0):
            return False
        for q, w in mapping.items():
            a, b = (p, q) if p <= q else (q, p)
            x, y = (v, w) if v <= w else (w, v)
            if hm.get((x, y), 0) < pat.inner.get((a, b), 0):
                return False
        return True

    def go(i: int) -> Iterator[Dict[int, int]]:
        if i == len(order):
            yield dict(mapping)
            return
        p = order[i]
        for v in cands[p]:
            if v in used or not fits(p, v):
                continue
            mapping[p] = v
            used.add(v)
            yield from go(i + 1)
            del mapping[p]
            used.discard(v)

    yield from go(0)


def _distributions(classes: List[List[int]], ends: List[int]) -> Iterator[Dict[int, int]]:
    """Assign the host leg-ends ``ends`` to pattern legs, once per way of
    splitting them among interchangeable classes."""
    if not classes:
        if not ends:
            yield {}
        return
    first, rest = classes[0], classes[1:]
    for chosen in itertools.combinations(range(len(ends)), len(first)):
        remaining = [e for i, e in enumerate(ends) if i not in chosen]
        for sub in _distributions(rest, remaining):
            out = dict(sub)
            for b, i in zip(first, chosen):
                out[b] = ends[i]
            yield out


def _splice(
    host: Diagram,
    pat: _Pattern,
    emb: Dict[int, int],
    cut: List[List],
    kept_edges: List[Tuple[int, int]],
) -> Diagram:
    """Remove the matched part and splice in the target side.

    ``cut`` lists host edges that leave the match; each end is either
    ("v", host_vertex) or ("b", pattern_boundary).
    """
    matched = set(emb.values())
    verts = {v: kp for v, kp in host.vertices.items() if v not in matched}
    nid = host.next_id()
    dst = pat.dst
    fresh: Dict[int, int] = {}
    for r in dst.internal_vertices():
        fresh[r] = nid
        verts[nid] = dst.vertices[r]
        nid += 1
    joint: Dict[int, int] = {}
    for b, r in pat.bmap.items():
        joint[r] = nid
        verts[nid] = ("J", 0)
        nid += 1
    edges = list(kept_edges)
    for a, b in cut:
        ends = []
        for kind, x in (a, b):
            ends.append(x if kind == "v" else joint[pat.bmap[x]])
        edges.append((ends[0], ends[1]))
    for u, v in dst.edges:
        edges.append((fresh.get(u, joint.get(u)), fresh.get(v, joint.get(v))))
    verts2, edges2, circ = smooth(verts, edges, joint.values())
    return Diagram.build(verts2, edges2, host.inputs, host.outputs, host.circles + dst.circles + circ, check=False)


def find_instance_matches(
    rule: str,
    direction: str,
    inst: RuleInstance,
    host: Diagram,
    pattern_cache: Optional[dict] = None,
    fingerprint: Optional[str] = None,
) -> List[Match]:
    src, dst = inst.oriented(direction)
    key = (inst.params, direction)
    pat = pattern_cache.get(key) if pattern_cache is not None else None
    if pat is None:
        pat = _Pattern(src, dst)
        if pattern_cache is not None:
            pattern_cache[key] = pat
    fp = fingerprint if fingerprint is not None else host_fingerprint(host)
    out: List[Match] = []
    for emb in _embeddings(pat, host):
        matched = set(emb.values())
        # consume host edges for pattern-internal edges
        need = Counter()
        for (p, q), m in pat.inner.items():
            a, b = emb[p], emb[q]
            need[(a, b) if a <= b else (b, a)] += m
        avail = Counter(host.edges)
        touching = []
        free_edges = []
        for e in host.edges:
            if need.get(e, 0):
                need[e] -= 1
                continue
            if e[0] in matched or e[1] in matched:
                touching.append(e)
            else:
                free_edges.append(e)
        del avail
        # leg ends at each matched vertex: (edge index in touching, side)
        ends_at: Dict[int, List[Tuple[int, int]]] = defaultdict(list)
        for i, (u, v) in enumerate(touching):
            if u in matched:
                ends_at[u].append((i, 0))
            if v in matched:
                ends_at[v].append((i, 1))
        inv = {v: p for p, v in emb.items()}
        per_vertex = []
        ok = True
        for v, p in sorted(inv.items()):
            ends = ends_at.get(v, [])
            if len(ends) != len(pat.legs[p]):
                ok = False
                break
            per_vertex.append((pat.leg_classes[p], ends))
        if not ok:
            continue
        bare_choices = _bare_choices(pat, free_edges)
        seen: List[Diagram] = []
        fixed = {v: v for v in host.vertices if v not in matched}
        for bare_sel in bare_choices:
            used_idx = {i for i, _ in bare_sel}
            kept = [e for i, e in enumerate(free_edges) if i not in used_idx]
            for assign in itertools.product(*[list(_distributions(c, e)) for c, e in per_vertex]):
                leg_of: Dict[Tuple[int, int], int] = {}
                for part in assign:
                    for b, end in part.items():
                        leg_of[end] = b
                cut = []
                for i, (u, v) in enumerate(touching):
                    ea = ("b", leg_of[(i, 0)]) if (i, 0) in leg_of else ("v", u)
                    eb = ("b", leg_of[(i, 1)]) if (i, 1) in leg_of else ("v", v)
                    cut.append([ea, eb])
                for (i, e), (b1, b2) in zip(bare_sel, pat.bare):
                    cut.append([("v", e[0]), ("b", b1)])
                    cut.append([("b", b2), ("v", e[1])])
                res = _splice(host, pat, emb, cut, kept)
                if any(find_isomorphism(res, s, fixed=fixed) is not None for s in seen):
                    continue
                seen.append(res)
                out.append(
                    Match(
                        rule,
                        direction,
                        inst.param_dict(),
                        {p: emb[p] for p in pat.internals},
                        tuple(e for _, e in bare_sel),
                        fp,
                        res,
                    )
                )
    return out


def _bare_choices(pat: _Pattern, free_edges: List[Tuple[int, int]]) -> List[List[Tuple[int, Tuple[int, int]]]]:
    """Ways to place the pattern's bare wires on distinct free host edges,
    in both orientations."""
    if not pat.bare:
        return [[]]
    options = []
    idx = list(range(len(free_edges)))
    for chosen in itertools.permutations(idx, len(pat.bare)):
        for flips in itertools.product((False, True), repeat=len(chosen)):
            sel = []
            for i, f in zip(chosen, flips):
                u, v = free_edges[i]
                sel.append((i, (v, u) if f else (u, v)))
            options.append(sel)
    # identical parallel edges give identical results; dedup on endpoints
    uniq = {}
    for sel in options:
        uniq.setdefault(tuple(e for _, e in sel), sel)
    return list(uniq.values())


def apply_match(match: Match, host: Diagram) -> Diagram:
    if host_fingerprint(host) != match.host_key:
        raise StaleMatch(f"match for {match.rule} was computed on a different host")
    return match.result
