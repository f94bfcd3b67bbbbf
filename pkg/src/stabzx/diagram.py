"""Open multigraph representation of stabilizer ZX-diagrams.

Spider legs are an unordered multiset and wires carry no direction, so two
diagrams that differ only in how they are drawn are literally the same
object up to vertex renaming. Swaps, cups, caps and identities are not
vertices: they are just edges between boundaries.
"""

from __future__ import annotations

import json
from collections import Counter, defaultdict
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

SPIDERS = ("Z", "X")
KINDS = ("Z", "X", "H", "B")

Edge = Tuple[int, int]


class DiagramError(ValueError):
    """A diagram violates a structural invariant."""


class ArityMismatch(DiagramError):
    pass


class DiagramFormatError(DiagramError):
    def __init__(self, location: str, message: str) -> None:
        super().__init__(f"{location}: {message}")
        self.location = location


def _edge(u: int, v: int) -> Edge:
    return (u, v) if u <= v else (v, u)


@dataclass(frozen=True)
class Diagram:
    """An open graph with ordered boundary lists.

    ``vertices`` maps id -> (kind, phase) where phase counts quarter turns
    and is always 0 for Hadamard and boundary vertices.
    """

    kinds: Tuple[Tuple[int, str, int], ...] = ()
    edges: Tuple[Edge, ...] = ()
    inputs: Tuple[int, ...] = ()
    outputs: Tuple[int, ...] = ()
    circles: int = 0

    @classmethod
    def build(
        cls,
        vertices: Mapping[int, Tuple[str, int]],
        edges: Iterable[Sequence[int]],
        inputs: Sequence[int] = (),
        outputs: Sequence[int] = (),
        circles: int = 0,
        check: bool = True,
    ) -> Diagram:
        kinds = tuple(sorted((int(v), k, int(p) % 4 if k in SPIDERS else 0) for v, (k, p) in vertices.items()))
        es = tuple(sorted(_edge(int(u), int(v)) for u, v in edges))
        d = cls(kinds, es, tuple(inputs), tuple(outputs), int(circles))
        if check:
            d.validate()
        return d

    # --- structure -------------------------------------------------------

    @cached_property
    def vertices(self) -> Dict[int, Tuple[str, int]]:
        return {v: (k, p) for v, k, p in self.kinds}

    @cached_property
    def adjacency(self) -> Dict[int, List[int]]:
        """Neighbour list per vertex; a self-loop contributes the vertex twice."""
        adj: Dict[int, List[int]] = {v: [] for v in self.vertices}
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        for lst in adj.values():
            lst.sort()
        return adj

    @cached_property
    def multiplicity(self) -> Counter:
        return Counter(self.edges)

    @cached_property
    def labels(self) -> Dict[int, Tuple[str, int, int, int]]:
        """Isomorphism-invariant label: kind, phase, degree, self-loops."""
        m, adj = self.multiplicity, self.adjacency
        return {v: (k, p, len(adj[v]), m.get((v, v), 0)) for v, k, p in self.kinds}

    @cached_property
    def invariant(self) -> tuple:
        """Cheap isomorphism invariant used to skip hopeless searches."""
        return (len(self.inputs), len(self.outputs), len(self.edges), self.circles, tuple(sorted(self.labels.values())))

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def kind(self, v: int) -> str:
        return self.vertices[v][0]

    def phase(self, v: int) -> int:
        return self.vertices[v][1]

    @property
    def signature(self) -> Tuple[int, int]:
        return (len(self.inputs), len(self.outputs))

    @property
    def boundary(self) -> Tuple[int, ...]:
        return self.inputs + self.outputs

    def internal_vertices(self) -> List[int]:
        return [v for v, k, _ in self.kinds if k != "B"]

    def next_id(self) -> int:
        return max((v for v, _, _ in self.kinds), default=-1) + 1

    def is_empty(self) -> bool:
        return not self.kinds and not self.edges and self.circles == 0

    def validate(self) -> None:
        ids = self.vertices
        if len(ids) != len(self.kinds):
            raise DiagramError("duplicate vertex id")
        for v, k, p in self.kinds:
            if k not in KINDS:
                raise DiagramError(f"vertex {v}: unknown kind {k!r}")
            if k in SPIDERS and not 0 <= p < 4:
                raise DiagramError(f"vertex {v}: phase out of range")
        for u, v in self.edges:
            if u not in ids or v not in ids:
                raise DiagramError(f"edge {(u, v)} has an undeclared endpoint")
        bnd = [v for v, k, _ in self.kinds if k == "B"]
        listed = list(self.inputs) + list(self.outputs)
        if len(set(listed)) != len(listed):
            raise DiagramError("boundary vertex listed twice")
        if set(listed) != set(bnd):
            raise DiagramError("inputs/outputs must be exactly the boundary vertices")
        for v, k, _ in self.kinds:
            d = self.degree(v)
            if k == "B" and d != 1:
                raise DiagramError(f"boundary vertex {v} has degree {d}, expected 1")
            if k == "H" and d != 2:
                raise DiagramError(f"Hadamard vertex {v} has degree {d}, expected 2")
        if self.circles < 0:
            raise DiagramError("negative circle count")

    def relabel(self, offset: int) -> Diagram:
        return Diagram(
            tuple((v + offset, k, p) for v, k, p in self.kinds),
            tuple((u + offset, v + offset) for u, v in self.edges),
            tuple(v + offset for v in self.inputs),
            tuple(v + offset for v in self.outputs),
            self.circles,
        )

    def renumbered(self) -> Diagram:
        """Compact ids: boundaries first in list order, then internals by id."""
        order = list(self.inputs) + list(self.outputs) + self.internal_vertices()
        m = {v: i for i, v in enumerate(order)}
        return Diagram.build(
            {m[v]: kp for v, kp in self.vertices.items()},
            [(m[u], m[v]) for u, v in self.edges],
            [m[v] for v in self.inputs],
            [m[v] for v in self.outputs],
            self.circles,
            check=False,
        )

    def __str__(self) -> str:
        return serialize_diagram(self)


# --- wire smoothing --------------------------------------------------------


def smooth(
    vertices: Dict[int, Tuple[str, int]],
    edges: List[Edge],
    joints: Iterable[int],
) -> Tuple[Dict[int, Tuple[str, int]], List[Edge], int]:
    """Erase degree-2 joint vertices, splicing their two edges together.

    Returns the surviving vertices, edges and the number of closed loops made
    only of joints.
    """
    joints = set(joints)
    inc: Dict[int, List[int]] = defaultdict(list)
    live: Dict[int, Edge] = {}
    for i, (u, v) in enumerate(edges):
        live[i] = (u, v)
        inc[u].append(i)
        if v != u:
            inc[v].append(i)
    nxt = len(edges)
    circles = 0
    for j in sorted(joints):
        ids = inc.pop(j, [])
        ends: List[int] = []
        loop = False
        for i in ids:
            u, v = live.pop(i)
            if u == v == j:
                loop = True
                continue
            other = v if u == j else u
            ends.append(other)
            inc[other].remove(i)
        if loop and not ends:
            circles += 1
            continue
        if loop or len(ends) != 2:
            raise DiagramError(f"joint {j} is not a plain wire segment")
        a, b = ends
        live[nxt] = (a, b)
        inc[a].append(nxt)
        if b != a:
            inc[b].append(nxt)
        nxt += 1
    out_v = {v: kp for v, kp in vertices.items() if v not in joints}
    return out_v, [_edge(u, v) for u, v in live.values()], circles


# --- generators and composition -------------------------------------------


def make_generator(kind: str, n: int = 0, m: int = 0, phase: int = 0) -> Diagram:
    """Build one of the generators: Z, X (with n inputs, m outputs), H,
    empty, swap, identity, cup, cap."""
    kind = kind.lower()
    if kind in ("z", "x"):
        ins = list(range(n))
        outs = list(range(n, n + m))
        s = n + m
        verts = {v: ("B", 0) for v in ins + outs}
        verts[s] = (kind.upper(), phase)
        return Diagram.build(verts, [(b, s) for b in ins + outs], ins, outs)
    if kind in ("h", "hadamard"):
        return Diagram.build({0: ("B", 0), 1: ("B", 0), 2: ("H", 0)}, [(0, 2), (2, 1)], [0], [1])
    if kind == "empty":
        return Diagram()
    if kind in ("identity", "id", "wire"):
        return Diagram.build({0: ("B", 0), 1: ("B", 0)}, [(0, 1)], [0], [1])
    if kind == "swap":
        verts = {v: ("B", 0) for v in range(4)}
        return Diagram.build(verts, [(0, 3), (1, 2)], [0, 1], [2, 3])
    if kind == "cup":
        return Diagram.build({0: ("B", 0), 1: ("B", 0)}, [(0, 1)], [0, 1], [])
    if kind == "cap":
        return Diagram.build({0: ("B", 0), 1: ("B", 0)}, [(0, 1)], [], [0, 1])
    raise ValueError(f"unknown generator {kind!r}")


def Z(n: int = 0, m: int = 0, phase: int = 0) -> Diagram:
    return make_generator("z", n, m, phase)


def X(n: int = 0, m: int = 0, phase: int = 0) -> Diagram:
    return make_generator("x", n, m, phase)


def H() -> Diagram:
    return make_generator("h")


def identity(k: int = 1) -> Diagram:
    return tensor_all([make_generator("identity")] * k)


def empty() -> Diagram:
    return Diagram()


def tensor(d1: Diagram, d2: Diagram) -> Diagram:
    """Place ``d2`` to the right of ``d1``."""
    d2 = d2.relabel(d1.next_id())
    return Diagram(
        tuple(sorted(d1.kinds + d2.kinds)),
        tuple(sorted(d1.edges + d2.edges)),
        d1.inputs + d2.inputs,
        d1.outputs + d2.outputs,
        d1.circles + d2.circles,
    )


def tensor_all(ds: Iterable[Diagram]) -> Diagram:
    out = Diagram()
    for d in ds:
        out = tensor(out, d)
    return out


def compose(d2: Diagram, d1: Diagram) -> Diagram:
    """``d2 . d1``: plug the outputs of ``d1`` into the inputs of ``d2``."""
    if len(d1.outputs) != len(d2.inputs):
        raise ArityMismatch(f"cannot compose: {len(d1.outputs)} outputs vs {len(d2.inputs)} inputs")
    d2 = d2.relabel(d1.next_id())
    verts = dict(d1.vertices)
    verts.update(d2.vertices)
    merge = {b: a for a, b in zip(d1.outputs, d2.inputs)}
    edges = [(merge.get(u, u), merge.get(v, v)) for u, v in d1.edges + d2.edges]
    for b in d2.inputs:
        verts.pop(b)
    verts_s, edges_s, circ = smooth(verts, edges, d1.outputs)
    return Diagram.build(verts_s, edges_s, d1.inputs, d2.outputs, d1.circles + d2.circles + circ, check=False)


def compose_all(*ds: Diagram) -> Diagram:
    """Compose in reading order: ``compose_all(a, b, c)`` is ``c . b . a``."""
    out = ds[0]
    for d in ds[1:]:
        out = compose(d, out)
    return out


def adjoint_flip(d: Diagram) -> Diagram:
    return Diagram(d.kinds, d.edges, d.outputs, d.inputs, d.circles)


def colour_swap(d: Diagram) -> Diagram:
    sw = {"Z": "X", "X": "Z"}
    return Diagram(tuple((v, sw.get(k, k), p) for v, k, p in d.kinds), d.edges, d.inputs, d.outputs, d.circles)


def scalar_count(d: Diagram, kind: str) -> int:
    return sum(1 for _, k, _ in d.kinds if k == kind)


# --- isomorphism -----------------------------------------------------------


def find_isomorphism(
    d1: Diagram,
    d2: Diagram,
    fixed: Optional[Mapping[int, int]] = None,
    boundary: bool = True,
) -> Optional[Dict[int, int]]:
    """Kind/phase preserving multigraph isomorphism d1 -> d2.

    With ``boundary`` the boundary lists must correspond position by
    position. ``fixed`` pins additional vertices.
    """
    if d1.circles != d2.circles or len(d1.kinds) != len(d2.kinds) or len(d1.edges) != len(d2.edges):
        return None
    if boundary and d1.signature != d2.signature:
        return None
    lab1, lab2 = d1.labels, d2.labels
    if d1.invariant[2:] != d2.invariant[2:]:
        return None
    pinned: Dict[int, int] = {}
    if boundary:
        pinned.update(zip(d1.inputs, d2.inputs))
        pinned.update(zip(d1.outputs, d2.outputs))
    if fixed:
        pinned.update(fixed)
    for a, b in pinned.items():
        if a not in lab1 or b not in lab2 or lab1[a] != lab2[b]:
            return None
    if len(set(pinned.values())) != len(pinned):
        return None

    m1, m2 = d1.multiplicity, d2.multiplicity
    nb1 = {v: set(ws) for v, ws in d1.adjacency.items()}
    nb2 = {v: set(ws) for v, ws in d2.adjacency.items()}
    inverse: Dict[int, int] = {}

    def ok(a: int, b: int, mapping: Dict[int, int]) -> bool:
        # only already-mapped neighbours can disagree
        n = 0
        for x in nb1[a]:
            y = mapping.get(x)
            if y is None:
                continue
            n += 1
            if m1[_edge(a, x)] != m2.get(_edge(b, y), 0):
                return False
        return n == sum(1 for y in nb2[b] if y in inverse)

    mapping: Dict[int, int] = {}
    for a, b in sorted(pinned.items()):
        if not ok(a, b, mapping):
            return None
        mapping[a] = b
        inverse[b] = a

    # BFS order from pinned vertices so adjacency prunes early
    order: List[int] = []
    seen = set(mapping)
    frontier = sorted(mapping)
    while len(seen) < len(lab1):
        nxt: List[int] = []
        for v in frontier:
            for w in d1.adjacency[v]:
                if w not in seen:
                    seen.add(w)
                    order.append(w)
                    nxt.append(w)
        if not nxt:
            rest = sorted(v for v in lab1 if v not in seen)
            if not rest:
                break
            seen.add(rest[0])
            order.append(rest[0])
            nxt = [rest[0]]
        frontier = nxt

    by_label: Dict[tuple, List[int]] = defaultdict(list)
    for v in sorted(lab2):
        by_label[lab2[v]].append(v)

    def search(i: int) -> bool:
        if i == len(order):
            return True
        a = order[i]
        for b in by_label[lab1[a]]:
            if b in inverse or not ok(a, b, mapping):
                continue
            mapping[a] = b
            inverse[b] = a
            if search(i + 1):
                return True
            del mapping[a]
            del inverse[b]
        return False

    return dict(mapping) if search(0) else None


def isomorphic(d1: Diagram, d2: Diagram) -> bool:
    return find_isomorphism(d1, d2) is not None


# --- serialization ---------------------------------------------------------


def serialize_diagram(d: Diagram) -> str:
    doc = diagram_to_doc(d)
    return json.dumps(doc, separators=(",", ":"))


def diagram_to_doc(d: Diagram) -> dict:
    verts = []
    for v, k, p in d.kinds:
        entry = {"id": v, "kind": k}
        if k in SPIDERS:
            entry["phase"] = p
        verts.append(entry)
    return {
        "inputs": list(d.inputs),
        "outputs": list(d.outputs),
        "vertices": verts,
        "edges": [list(e) for e in d.edges],
        "circles": d.circles,
    }


def _need(cond: bool, loc: str, msg: str) -> None:
    if not cond:
        raise DiagramFormatError(loc, msg)


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def diagram_from_doc(doc, where: str = "$") -> Diagram:
    _need(isinstance(doc, dict), where, "expected an object")
    extra = set(doc) - {"inputs", "outputs", "vertices", "edges", "circles"}
    _need(not extra, where, f"unexpected keys {sorted(extra)}")
    for key in ("inputs", "outputs", "vertices", "edges"):
        _need(isinstance(doc.get(key), list), f"{where}.{key}", "expected a list")
    circles = doc.get("circles", 0)
    _need(_is_int(circles) and circles >= 0, f"{where}.circles", "expected a non-negative integer")
    verts: Dict[int, Tuple[str, int]] = {}
    for i, v in enumerate(doc["vertices"]):
        loc = f"{where}.vertices[{i}]"
        _need(isinstance(v, dict), loc, "expected an object")
        _need(set(v) <= {"id", "kind", "phase"}, loc, "unexpected keys")
        _need(_is_int(v.get("id")), f"{loc}.id", "expected an integer")
        _need(v["id"] not in verts, f"{loc}.id", "duplicate id")
        k = v.get("kind")
        _need(k in KINDS, f"{loc}.kind", f"expected one of {KINDS}")
        if k in SPIDERS:
            p = v.get("phase", 0)
            _need(_is_int(p) and 0 <= p <= 3, f"{loc}.phase", "expected an integer in 0..3")
        else:
            _need("phase" not in v, f"{loc}.phase", f"phase is not allowed on kind {k}")
            p = 0
        verts[v["id"]] = (k, p)
    edges = []
    for i, e in enumerate(doc["edges"]):
        loc = f"{where}.edges[{i}]"
        _need(isinstance(e, list) and len(e) == 2 and all(_is_int(x) for x in e), loc, "expected [id, id]")
        _need(e[0] in verts and e[1] in verts, loc, "undeclared endpoint")
        edges.append((e[0], e[1]))
    for key in ("inputs", "outputs"):
        for i, b in enumerate(doc[key]):
            _need(_is_int(b) and b in verts, f"{where}.{key}[{i}]", "undeclared boundary id")
    try:
        return Diagram.build(verts, edges, doc["inputs"], doc["outputs"], circles)
    except DiagramFormatError:
        raise
    except DiagramError as exc:
        raise DiagramFormatError(where, str(exc)) from exc


def parse_diagram(text: str) -> Diagram:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DiagramFormatError(f"line {exc.lineno} col {exc.colno}", exc.msg) from exc
    return diagram_from_doc(doc)


def _refine(d: Diagram, colours: Dict[int, tuple]) -> Dict[int, int]:
    cur = colours
    n_classes = -1
    while True:
        keys = {v: (cur[v], tuple(sorted(cur[w] for w in d.adjacency[v]))) for v in d.vertices}
        ranking = {k: i for i, k in enumerate(sorted(set(keys.values())))}
        new = {v: (ranking[keys[v]],) for v in d.vertices}
        if len(ranking) == n_classes:
            return {v: c[0] for v, c in new.items()}
        n_classes = len(ranking)
        cur = new


def canonical_order(d: Diagram) -> List[int]:
    """A vertex order that depends only on the isomorphism class of ``d``.

    Colour refinement anchored at the boundary positions, then
    individualisation over remaining ties, keeping the smallest encoding.
    """
    pos = {v: ("0", i) for i, v in enumerate(d.inputs)}
    pos.update({v: ("1", i) for i, v in enumerate(d.outputs)})
    start = {v: (pos.get(v, ("2", 0)), d.labels[v]) for v in d.vertices}

    def encode(order: List[int]) -> tuple:
        idx = {v: i for i, v in enumerate(order)}
        labels = tuple(start[v] for v in order)
        es = tuple(sorted(tuple(sorted((idx[u], idx[v]))) for u, v in d.edges))
        return (labels, es)

    best: List[Optional[tuple]] = [None, None]

    def go(colours: Dict[int, tuple]) -> None:
        ref = _refine(d, colours)
        classes: Dict[int, List[int]] = defaultdict(list)
        for v, c in ref.items():
            classes[c].append(v)
        tied = [c for c in sorted(classes) if len(classes[c]) > 1]
        if not tied:
            order = sorted(ref, key=lambda v: ref[v])
            enc = encode(order)
            if best[0] is None or enc < best[0]:
                best[0], best[1] = enc, order
            return
        cls_ = classes[tied[0]]
        for v in sorted(cls_):
            nxt = {w: (ref[w], 0) for w in ref}
            nxt[v] = (ref[v], 1)
            go(nxt)

    go(start)
    return best[1] or []


def to_dot(d: Diagram) -> str:
    """Graphviz text whose content does not depend on the file's vertex ids."""
    order = canonical_order(d)
    name = {v: f"v{i}" for i, v in enumerate(order)}
    pos = {v: f"in_{i}" for i, v in enumerate(d.inputs)}
    pos.update({v: f"out_{i}" for i, v in enumerate(d.outputs)})
    lines = ["graph zx {"]
    for v in order:
        k, p = d.vertices[v]
        label = pos.get(v) or ("H" if k == "H" else f"{k}:{p}")
        lines.append(f'  {name[v]} [label="{label}"];')
    idx = {v: i for i, v in enumerate(order)}
    for u, v in sorted(d.edges, key=lambda e: sorted((idx[e[0]], idx[e[1]]))):
        a, b = sorted((u, v), key=idx.__getitem__)
        lines.append(f"  {name[a]} -- {name[b]};")
    if d.circles:
        lines.append(f"  // circles: {d.circles}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def worked_example() -> Diagram:
    """Two wires through (X(pi/2) (x) X copy) then (Z merge (x) wire)."""
    return compose(tensor(Z(2, 1), identity()), tensor(X(1, 1, 1), X(1, 2)))
