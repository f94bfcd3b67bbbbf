"""Exact evaluation of diagrams under the standard and the flat interpretation.

A tensor is stored as four integer coefficient planes (one per power of w)
sharing a single 1/sqrt2^k denominator. Matrices follow the Kronecker
convention: the first boundary in a list is the most significant bit, rows
are indexed by outputs and columns by inputs.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .diagram import Diagram
from .exact import ExactAmplitude

DEFAULT_CAP = 14
_I64_SAFE = 2**62


class InterpretationKind(enum.Enum):
    STANDARD = "standard"
    FLAT = "flat"

    @classmethod
    def parse(cls, s) -> InterpretationKind:
        if isinstance(s, cls):
            return s
        return cls(str(s).lower())


STANDARD = InterpretationKind.STANDARD
FLAT = InterpretationKind.FLAT


class ContractionCapExceeded(RuntimeError):
    pass


# --- coefficient-plane helpers ---------------------------------------------


def _fit(planes: np.ndarray) -> np.ndarray:
    """Downcast to int64 when every entry comfortably fits."""
    if planes.dtype == object and planes.size:
        m = max(abs(int(x)) for x in planes.flat)
        if m < 2**40:
            return planes.astype(np.int64)
    return planes


def _absmax(p: np.ndarray) -> int:
    if not p.size:
        return 0
    return int(np.max(np.abs(p))) if p.dtype != object else max(abs(int(x)) for x in p.flat)


def _omega_mul(planes: np.ndarray, power: int) -> np.ndarray:
    power %= 8
    out = planes
    for _ in range(power):
        out = np.concatenate([-out[3:4], out[0:3]], axis=0)
    return out


def _mul_sqrt2(p: np.ndarray) -> np.ndarray:
    a, b, c, d = p
    return np.stack([b - d, a + c, b + d, c - a])


def _reduce(planes: np.ndarray, k: int) -> Tuple[np.ndarray, int]:
    """Divide out sqrt2 while every entry allows it."""
    if not planes.any():
        return planes, 0
    while k > 0:
        a, b, c, d = planes
        if ((a - c) % 2).any() or ((b - d) % 2).any():
            break
        planes = np.stack([(b - d) // 2, (a + c) // 2, (b + d) // 2, (c - a) // 2])
        k -= 1
    return planes, k


def _omega_product(A: np.ndarray, B: np.ndarray, subs: str) -> np.ndarray:
    """Contract two plane stacks with einsum ``subs`` (without the plane axis)
    and fold powers of w modulo w^4 = -1."""
    ins, out = subs.split("->")
    sa, sb = ins.split(",")
    inner = len(set(sa) & set(sb) - set(out))
    bound = _absmax(A) * _absmax(B) * 4 * (2**inner)
    if A.dtype == object or B.dtype == object or bound >= _I64_SAFE:
        A = A.astype(object)
        B = B.astype(object)
    full = np.einsum(f"p{sa},q{sb}->pq{out}", A, B)
    res = np.zeros((4,) + full.shape[2:], dtype=full.dtype)
    for i in range(4):
        for j in range(4):
            n = i + j
            if n >= 4:
                res[n - 4] = res[n - 4] - full[i, j]
            else:
                res[n] = res[n] + full[i, j]
    return res


# --- tensors -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Tensor:
    """Exact tensor of a diagram: axes are outputs then inputs."""

    n_in: int
    n_out: int
    planes: np.ndarray
    k: int = 0

    @property
    def signature(self) -> Tuple[int, int]:
        return (self.n_in, self.n_out)

    @classmethod
    def from_planes(cls, n_in: int, n_out: int, planes: np.ndarray, k: int) -> Tensor:
        planes, k = _reduce(_fit(np.asarray(planes)), k)
        return cls(n_in, n_out, planes, k)

    @classmethod
    def from_entries(cls, n_in: int, n_out: int, rows: Sequence[Sequence[ExactAmplitude]]) -> Tensor:
        """Build from a 2^n_out x 2^n_in matrix of exact amplitudes."""
        k = max((e.k for r in rows for e in r), default=0)
        planes = np.zeros((4, 2**n_out, 2**n_in), dtype=object)
        for i, r in enumerate(rows):
            for j, e in enumerate(r):
                c = e.coeffs
                for _ in range(k - e.k):
                    a, b, cc, d = c
                    c = (b - d, a + cc, b + d, cc - a)
                planes[:, i, j] = c
        return cls.from_planes(n_in, n_out, planes.reshape((4,) + (2,) * (n_in + n_out)), k)

    @classmethod
    def scalar(cls, x: ExactAmplitude) -> Tensor:
        return cls.from_entries(0, 0, [[x]])

    def matrix_planes(self) -> np.ndarray:
        return self.planes.reshape(4, 2**self.n_out, 2**self.n_in)

    def entry(self, row: int, col: int) -> ExactAmplitude:
        c = self.matrix_planes()[:, row, col]
        return ExactAmplitude(tuple(int(x) for x in c), self.k)

    def matrix(self) -> List[List[ExactAmplitude]]:
        return [[self.entry(r, c) for c in range(2**self.n_in)] for r in range(2**self.n_out)]

    def to_complex(self) -> np.ndarray:
        w = np.exp(1j * np.pi / 4)
        mp = self.matrix_planes().astype(float)
        return sum(mp[i] * w**i for i in range(4)) / np.sqrt(2) ** self.k

    def is_zero(self) -> bool:
        return not self.planes.any()

    def scaled(self, x: ExactAmplitude) -> Tensor:
        s = np.array(x.coeffs, dtype=object).reshape((4,) + (1,) * (self.n_in + self.n_out))
        r = self.n_in + self.n_out
        letters = "abcdefghijklmnopqrstuvwxyz"[:r]
        prod = _omega_product(s.reshape(4), self.planes, f",{letters}->{letters}")
        return Tensor.from_planes(self.n_in, self.n_out, prod, self.k + x.k)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Tensor):
            return NotImplemented
        return tensors_equal(self, other)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"Tensor({self.n_in}->{self.n_out}, k={self.k})"


def tensors_equal(t1: Tensor, t2: Tensor) -> bool:
    if t1.signature != t2.signature:
        return False
    a, ka = _reduce(t1.planes, t1.k)
    b, kb = _reduce(t2.planes, t2.k)
    if not a.any() and not b.any():
        return True
    return ka == kb and bool(np.array_equal(a.astype(object), b.astype(object)))


# --- generator tensors ------------------------------------------------------


def _hadamard_axis(planes: np.ndarray, axis: int) -> np.ndarray:
    """Apply the integer matrix [[1,1],[1,-1]] along one tensor axis."""
    x0 = np.take(planes, 0, axis=axis)
    x1 = np.take(planes, 1, axis=axis)
    return np.stack([x0 + x1, x0 - x1], axis=axis)


def spider_planes(colour: str, degree: int, phase: int) -> Tuple[np.ndarray, int]:
    planes = np.zeros((4,) + (2,) * degree, dtype=np.int64)
    ones = (1,) * degree
    zeros = (0,) * degree
    # e^{i*phase*pi/2} = w^(2*phase)
    p = (2 * phase) % 8
    sign = 1 if p < 4 else -1
    planes[(0,) + zeros] += 1
    planes[(p % 4,) + ones] += sign
    k = 0
    if colour == "X":
        for ax in range(degree):
            planes = _hadamard_axis(planes, ax + 1)
        k = degree
    return planes, k


def generator_tensor(kind: str, degree: int, phase: int = 0, interp=STANDARD) -> Tensor:
    """Tensor of one vertex with all legs treated as outputs."""
    interp = InterpretationKind.parse(interp)
    if kind in ("Z", "X"):
        planes, k = spider_planes(kind, degree, phase)
        if interp is FLAT and kind == "X":
            planes = _omega_mul(planes, 2 * degree)
    elif kind == "H":
        if degree != 2:
            raise ValueError("Hadamard has exactly two legs")
        planes = np.zeros((4, 2, 2), dtype=np.int64)
        planes[0] = [[1, 1], [1, -1]]
        k = 1
        if interp is FLAT:
            planes = _omega_mul(planes, 6)
    else:
        raise ValueError(f"no generator tensor for kind {kind!r}")
    return Tensor.from_planes(0, degree, planes, k)


# --- contraction -----------------------------------------------------------


class _Node:
    __slots__ = ("planes", "k", "labels")

    def __init__(self, planes, k, labels):
        self.planes = planes
        self.k = k
        self.labels = list(labels)


_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


def _merge(a: _Node, b: _Node) -> _Node:
    shared = set(a.labels) & set(b.labels)
    names: Dict[object, str] = {}
    for lab in a.labels + b.labels:
        if lab not in names:
            names[lab] = _LETTERS[len(names)]
    out_labels = [lab for lab in a.labels if lab not in shared] + [lab for lab in b.labels if lab not in shared]
    subs = "".join(names[x] for x in a.labels) + "," + "".join(names[x] for x in b.labels)
    subs += "->" + "".join(names[x] for x in out_labels)
    planes = _omega_product(a.planes, b.planes, subs)
    planes, k = _reduce(_fit(planes), a.k + b.k)
    return _Node(planes, k, out_labels)


def _trace_loops(n: _Node) -> _Node:
    while True:
        seen: Dict[object, int] = {}
        pair = None
        for i, lab in enumerate(n.labels):
            if lab in seen:
                pair = (seen[lab], i)
                break
            seen[lab] = i
        if pair is None:
            return n
        i, j = pair
        planes = np.trace(n.planes, axis1=i + 1, axis2=j + 1)
        labels = [lab for t, lab in enumerate(n.labels) if t not in pair]
        n = _Node(planes, n.k, labels)


def _nodes(d: Diagram, interp: InterpretationKind) -> List[_Node]:
    label: Dict[int, List[object]] = {v: [] for v in d.vertices}
    nodes: List[_Node] = []
    for idx, (u, v) in enumerate(d.edges):
        ku, kv = d.kind(u), d.kind(v)
        if ku == "B" and kv == "B":
            delta = np.zeros((4, 2, 2), dtype=np.int64)
            delta[0] = np.eye(2, dtype=np.int64)
            nodes.append(_Node(delta, 0, [("b", u), ("b", v)]))
            continue
        if ku == "B":
            lab = ("b", u)
        elif kv == "B":
            lab = ("b", v)
        else:
            lab = ("e", idx)
        if ku != "B":
            label[u].append(lab)
        if kv != "B":
            label[v].append(lab)
    for v in d.internal_vertices():
        k, p = d.vertices[v]
        t = generator_tensor(k, len(label[v]), p, interp)
        nodes.append(_trace_loops(_Node(t.planes, t.k, label[v])))
    return nodes


def interpret(
    d: Diagram,
    kind=STANDARD,
    cap: int = DEFAULT_CAP,
    order_seed: Optional[int] = None,
) -> Tensor:
    """Contract all generator tensors of ``d``.

    The default order is greedy (smallest resulting rank first); passing
    ``order_seed`` picks contractible pairs at random instead, which must
    give the same tensor.
    """
    interp = InterpretationKind.parse(kind)
    nodes = _nodes(d, interp)
    rng = random.Random(order_seed) if order_seed is not None else None
    while len(nodes) > 1:
        pairs = []
        for i in range(len(nodes)):
            li = set(nodes[i].labels)
            for j in range(i + 1, len(nodes)):
                sh = len(li & set(nodes[j].labels))
                if sh:
                    pairs.append((len(nodes[i].labels) + len(nodes[j].labels) - 2 * sh, i, j))
        if not pairs:
            # only disconnected pieces remain: outer products, smallest first
            nodes.sort(key=lambda n: len(n.labels))
            i, j = 0, 1
            rank = len(nodes[0].labels) + len(nodes[1].labels)
        elif rng is not None:
            rank, i, j = rng.choice(pairs)
        else:
            rank, i, j = min(pairs)
        if rank > cap:
            raise ContractionCapExceeded(f"intermediate rank {rank} exceeds cap {cap}")
        merged = _merge(nodes[i], nodes[j])
        nodes = [n for t, n in enumerate(nodes) if t not in (i, j)] + [merged]
    if nodes:
        final = nodes[0]
    else:
        final = _Node(np.array([1, 0, 0, 0], dtype=np.int64), 0, [])
    want = [("b", v) for v in d.outputs] + [("b", v) for v in d.inputs]
    if len(want) > cap:
        raise ContractionCapExceeded(f"{len(want)} boundary wires exceed cap {cap}")
    perm = [final.labels.index(lab) + 1 for lab in want]
    planes = np.transpose(final.planes, [0] + perm)
    if d.circles:
        planes = planes * (2**d.circles)
    return Tensor.from_planes(len(d.inputs), len(d.outputs), planes, final.k)


def flat_phase_predictor(d: Diagram) -> ExactAmplitude:
    """i^q with q = (sum of X-spider degrees - number of Hadamards) mod 4."""
    q = sum(d.degree(v) for v, k, _ in d.kinds if k == "X") - sum(1 for _, k, _ in d.kinds if k == "H")
    return ExactAmplitude.omega_power(2 * (q % 4))


def flat_exponent(d: Diagram) -> int:
    q = sum(d.degree(v) for v, k, _ in d.kinds if k == "X") - sum(1 for _, k, _ in d.kinds if k == "H")
    return q % 4


def render_tensor(t: Tensor) -> str:
    """Exact strings per entry followed by a float rendering."""
    rows = t.matrix()
    if t.n_in == 0 and t.n_out == 0:
        z = rows[0][0]
        f = z.to_complex()
        return f"{z}\n# float: {f.real:.6g}{f.imag:+.6g}j\n"
    lines = [f"# {t.n_in} -> {t.n_out}, rows = outputs, columns = inputs"]
    for r in rows:
        lines.append("[" + ", ".join(str(e) for e in r) + "]")
    lines.append("# float:")
    cm = t.to_complex()
    for r in cm:
        lines.append("[" + ", ".join(f"{z.real:.6g}{z.imag:+.6g}j" for z in r) + "]")
    return "\n".join(lines) + "\n"
