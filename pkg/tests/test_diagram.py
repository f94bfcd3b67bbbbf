import json

import pytest
from hypothesis import given, settings

from stabzx.diagram import (
    ArityMismatch,
    Diagram,
    DiagramError,
    DiagramFormatError,
    H,
    X,
    Z,
    adjoint_flip,
    canonical_order,
    colour_swap,
    compose,
    diagram_to_doc,
    empty,
    find_isomorphism,
    identity,
    isomorphic,
    make_generator,
    parse_diagram,
    serialize_diagram,
    tensor,
    to_dot,
    worked_example,
)
from stabzx.semantics import interpret

from conftest import small_diagrams


def shuffled(d: Diagram, perm_seed: int = 7) -> Diagram:
    """Same diagram with internal ids renamed."""
    import random
    ids = sorted(d.vertices)
    new = ids[:]
    random.Random(perm_seed).shuffle(new)
    m = {a: b + 1000 for a, b in zip(ids, new)}
    return Diagram.build({m[v]: d.vertices[v] for v in d.vertices}, [(m[u], m[v]) for u, v in d.edges],
                         [m[v] for v in d.inputs], [m[v] for v in d.outputs], d.circles)


def test_empty_generator():
    d = empty()
    assert not d.kinds and not d.edges and d.circles == 0


def test_green_scalar_generator():
    d = Z(0, 0, 3)
    assert len(d.kinds) == 1 and not d.edges


def test_cap_is_a_single_edge_between_outputs():
    d = make_generator("cap")
    assert d.signature == (0, 2) and len(d.edges) == 1 and not d.internal_vertices()


def test_swap_and_identity_have_no_vertices():
    assert not make_generator("swap").internal_vertices()
    assert identity(3).signature == (3, 3)


def test_tensor_unit_and_signature():
    d = Z(1, 2, 1)
    assert isomorphic(tensor(empty(), d), d)
    assert isomorphic(tensor(d, empty()), d)
    assert tensor(identity(), identity()).signature == (2, 2)


def test_compose_identities():
    assert isomorphic(compose(identity(), identity()), identity())


def test_circle_from_cup_and_cap():
    d = compose(make_generator("cup"), make_generator("cap"))
    assert not d.kinds and not d.edges and d.circles == 1
    assert str(interpret(d).entry(0, 0)) == "2"


def test_compose_arity_mismatch():
    with pytest.raises(ArityMismatch):
        compose(Z(2, 1), Z(1, 1))


def test_worked_example_shape():
    d = worked_example()
    assert d.signature == (2, 2)
    assert sorted(d.kind(v) for v in d.internal_vertices()) == ["X", "X", "Z"]


def test_isomorphism_basics():
    d = worked_example()
    assert isomorphic(d, shuffled(d))
    assert find_isomorphism(d, shuffled(d)) is not None
    assert not isomorphic(Z(1, 1), X(1, 1))
    assert not isomorphic(Z(1, 1, 1), Z(1, 1, 2))


def test_leg_order_does_not_matter():
    a = Diagram.build({0: ("B", 0), 1: ("B", 0), 2: ("B", 0), 5: ("Z", 0)}, [(0, 5), (5, 1), (5, 2)], [0], [1, 2])
    b = Diagram.build({0: ("B", 0), 1: ("B", 0), 2: ("B", 0), 5: ("Z", 0)}, [(5, 2), (0, 5), (1, 5)], [0], [1, 2])
    assert isomorphic(a, b)


def test_boundary_order_matters():
    d = tensor(Z(1, 1, 1), identity())
    e = tensor(identity(), Z(1, 1, 1))
    assert not isomorphic(d, e)


def test_flip_and_colour_swap():
    assert isomorphic(adjoint_flip(make_generator("cap")), make_generator("cup"))
    assert isomorphic(adjoint_flip(Z(2, 1, 3)), Z(1, 2, 3))
    assert isomorphic(colour_swap(Z(1, 1, 1)), X(1, 1, 1))


def test_degree_constraints():
    with pytest.raises(DiagramError):
        Diagram.build({0: ("B", 0), 1: ("H", 0)}, [(0, 1)], [0], [])
    with pytest.raises(DiagramError):
        Diagram.build({0: ("B", 0), 1: ("B", 0)}, [(0, 1), (0, 1)], [0], [1])
    with pytest.raises(DiagramError):
        Diagram.build({0: ("B", 0)}, [], [0], [])


def test_serialize_empty():
    doc = json.loads(serialize_diagram(empty()))
    assert doc == {"inputs": [], "outputs": [], "vertices": [], "edges": [], "circles": 0}


def test_worked_example_round_trip():
    d = worked_example()
    assert isomorphic(parse_diagram(serialize_diagram(d)), d)


def _doc_h3():
    return {"inputs": [0], "outputs": [1, 2], "circles": 0,
            "vertices": [{"id": 0, "kind": "B"}, {"id": 1, "kind": "B"}, {"id": 2, "kind": "B"}, {"id": 3, "kind": "H"}],
            "edges": [[0, 3], [3, 1], [3, 2]]}


def test_rejects_degree_three_hadamard():
    with pytest.raises(DiagramFormatError):
        parse_diagram(json.dumps(_doc_h3()))


def test_rejects_phase_on_boundary_and_hadamard():
    doc = diagram_to_doc(Z(1, 1))
    doc["vertices"][0]["phase"] = 1
    with pytest.raises(DiagramFormatError) as e:
        parse_diagram(json.dumps(doc))
    assert "vertices[0]" in str(e.value)
    doc = diagram_to_doc(H())
    for v in doc["vertices"]:
        if v["kind"] == "H":
            v["phase"] = 0
    with pytest.raises(DiagramFormatError):
        parse_diagram(json.dumps(doc))


@pytest.mark.parametrize("text", [
    "not json",
    "[]",
    '{"inputs": [0], "outputs": [], "vertices": [], "edges": [], "circles": 0}',
    '{"inputs": [], "outputs": [], "vertices": [{"id": 0, "kind": "Q"}], "edges": [], "circles": 0}',
    '{"inputs": [], "outputs": [], "vertices": [{"id": 0, "kind": "Z", "phase": 5}], "edges": [], "circles": 0}',
    '{"inputs": [], "outputs": [], "vertices": [], "edges": [[0, 1]], "circles": 0}',
    '{"inputs": [], "outputs": [], "vertices": [], "edges": [], "circles": -1}',
])
def test_rejects_malformed(text):
    with pytest.raises(DiagramFormatError):
        parse_diagram(text)


def test_render_empty():
    assert to_dot(empty()) == "graph zx {\n}\n"


def test_render_labels_and_permutation_stability():
    d = worked_example()
    out = to_dot(d)
    for lab in ('"in_0"', '"in_1"', '"out_0"', '"out_1"', '"Z:0"', '"X:1"', '"X:0"'):
        assert lab in out
    assert to_dot(shuffled(d)) == out
    assert to_dot(shuffled(d, 3)) == out


def test_canonical_order_covers_all_vertices():
    d = worked_example()
    assert sorted(canonical_order(d)) == sorted(d.vertices)


@settings(max_examples=60, deadline=None)
@given(small_diagrams(), small_diagrams(), small_diagrams())
def test_tensor_associative(a, b, c):
    assert isomorphic(tensor(tensor(a, b), c), tensor(a, tensor(b, c)))


@settings(max_examples=60, deadline=None)
@given(small_diagrams())
def test_compose_with_identity_and_associativity(d):
    n, m = d.signature
    assert isomorphic(compose(d, identity(n)), d)
    assert isomorphic(compose(identity(m), d), d)
    f = adjoint_flip(d)
    assert isomorphic(compose(compose(d, f), d), compose(d, compose(f, d)))


@settings(max_examples=40, deadline=None)
@given(small_diagrams(2, 3), small_diagrams(2, 3))
def test_interchange(a, b):
    c, e = adjoint_flip(a), adjoint_flip(b)
    lhs = compose(tensor(c, e), tensor(a, b))
    rhs = tensor(compose(c, a), compose(e, b))
    assert isomorphic(lhs, rhs)


@settings(max_examples=60, deadline=None)
@given(small_diagrams(), small_diagrams())
def test_flip_and_colour_swap_commute_with_composition(a, b):
    assert isomorphic(colour_swap(colour_swap(a)), a)
    assert isomorphic(adjoint_flip(adjoint_flip(a)), a)
    assert isomorphic(colour_swap(tensor(a, b)), tensor(colour_swap(a), colour_swap(b)))
    assert isomorphic(adjoint_flip(tensor(a, b)), tensor(adjoint_flip(a), adjoint_flip(b)))
    f = adjoint_flip(a)
    assert isomorphic(adjoint_flip(compose(f, a)), compose(adjoint_flip(a), adjoint_flip(f)))
    assert isomorphic(colour_swap(compose(f, a)), compose(colour_swap(f), colour_swap(a)))


@settings(max_examples=100, deadline=None)
@given(small_diagrams(4, 6))
def test_random_diagrams_are_valid_and_round_trip(d):
    d.validate()
    assert isomorphic(parse_diagram(serialize_diagram(d)), d)
    assert isomorphic(shuffled(d), d)
    assert isomorphic(d, d)
