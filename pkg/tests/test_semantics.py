import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stabzx.diagram import H, X, Z, adjoint_flip, colour_swap, compose, empty, identity, make_generator, tensor, worked_example
from stabzx.exact import ExactAmplitude, ONE, ZERO
from stabzx.rules import hadamards
from stabzx.semantics import (
    FLAT,
    ContractionCapExceeded,
    Tensor,
    flat_phase_predictor,
    generator_tensor,
    interpret,
    render_tensor,
    tensors_equal,
)

from conftest import kron, matmul, small_diagrams, transpose

w = ExactAmplitude.omega_power


def test_worked_example_exact():
    t = interpret(worked_example())
    g = ExactAmplitude((0, 1, 0, 0), 2)  # e^{i pi/4} / 2
    mi = ExactAmplitude.from_int(-1) * w(2)
    pattern = [[1, 0, mi, 0], [0, 1, 0, mi], [0, mi, 0, 1], [mi, 0, 1, 0]]
    want = [[g * (e if isinstance(e, ExactAmplitude) else ExactAmplitude.from_int(e)) for e in r] for r in pattern]
    assert t.matrix() == want
    assert str(t.entry(0, 0)) == "(w)/rt2^2"
    assert str(t.entry(0, 2)) == "(-w^3)/rt2^2"


def test_empty_is_one_and_green_pi_scalar_is_zero():
    assert interpret(empty()).entry(0, 0) == ONE
    assert interpret(Z(0, 0, 2)).is_zero()
    assert interpret(Z(0, 0, 1)).entry(0, 0) == ONE + w(2)


@pytest.mark.parametrize("alpha", range(4))
def test_green_one_one(alpha):
    m = interpret(Z(1, 1, alpha)).matrix()
    assert m == [[ONE, ZERO], [ZERO, w(2 * alpha)]]


@pytest.mark.parametrize("alpha", range(4))
def test_red_one_one_matches_half_angle_form(alpha):
    a = alpha * np.pi / 2
    want = np.exp(1j * a / 2) * np.array([[np.cos(a / 2), -1j * np.sin(a / 2)], [-1j * np.sin(a / 2), np.cos(a / 2)]])
    assert np.allclose(interpret(X(1, 1, alpha)).to_complex(), want, atol=1e-12)


def test_hadamard_standard_and_flat():
    h = interpret(H()).to_complex()
    assert np.allclose(h, np.array([[1, 1], [1, -1]]) / np.sqrt(2))
    assert np.allclose(interpret(H(), FLAT).to_complex(), -1j * h)


def test_cap_interpretation():
    assert np.allclose(interpret(make_generator("cap")).to_complex().ravel(), [1, 0, 0, 1])


def test_swap_permutes_bits():
    t = interpret(make_generator("swap")).to_complex()
    assert np.allclose(t, [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])


def test_generator_tensor_matches_diagrams():
    for kind, d in (("z", Z(1, 2, 1)), ("x", X(1, 2, 3))):
        g = generator_tensor(kind.upper(), 3, d.phase(d.internal_vertices()[0]))
        assert np.allclose(np.sort(g.to_complex().ravel()), np.sort(interpret(d).to_complex().ravel()))


def test_flat_predictor_examples():
    assert flat_phase_predictor(Z(2, 3, 1)) == ONE
    assert flat_phase_predictor(X(1, 1)) == ExactAmplitude.from_int(-1)
    assert flat_phase_predictor(H()) == w(6)


def test_tensors_equal_examples():
    t = interpret(worked_example())
    assert tensors_equal(t, t)
    assert not tensors_equal(t, interpret(tensor(identity(), identity())))
    assert not tensors_equal(interpret(Z(1, 1)), interpret(Z(2, 0)))
    assert tensors_equal(interpret(Z(0, 0, 2)), Tensor.scalar(ZERO))


def test_cap_exceeded():
    d = tensor(Z(0, 8), Z(0, 8))
    with pytest.raises(ContractionCapExceeded):
        interpret(d)


def test_large_coefficients_stay_exact():
    # 2^70: far past int64, forces the object fallback
    d = make_generator("empty")
    for _ in range(70):
        d = tensor(d, Z(0, 0))
    assert interpret(d).entry(0, 0) == ExactAmplitude.from_int(2**70)


def test_render_scalar_and_matrix():
    assert render_tensor(interpret(empty())).splitlines()[0] == "1"
    assert render_tensor(interpret(Z(0, 0, 2))).splitlines()[0] == "0"
    text = render_tensor(interpret(worked_example()))
    assert "(w)/rt2^2" in text and "# float:" in text


@settings(max_examples=50, deadline=None)
@given(small_diagrams(), small_diagrams())
def test_tensor_is_kronecker(a, b):
    assert interpret(tensor(a, b)).matrix() == kron(interpret(a).matrix(), interpret(b).matrix())


@settings(max_examples=50, deadline=None)
@given(small_diagrams())
def test_compose_is_matrix_product(d):
    f = adjoint_flip(d)
    lhs = interpret(compose(f, d)).matrix()
    assert lhs == matmul(interpret(f).matrix(), interpret(d).matrix())


@settings(max_examples=50, deadline=None)
@given(small_diagrams())
def test_flip_is_transpose(d):
    assert interpret(adjoint_flip(d)).matrix() == transpose(interpret(d).matrix())


@settings(max_examples=50, deadline=None)
@given(small_diagrams())
def test_colour_swap_is_hadamard_conjugation(d):
    n, m = d.signature
    want = interpret(compose(hadamards(m), compose(d, hadamards(n))))
    assert tensors_equal(interpret(colour_swap(d)), want)


@settings(max_examples=200, deadline=None)
@given(small_diagrams(5, 8))
def test_flat_factorisation(d):
    assert tensors_equal(interpret(d, FLAT), interpret(d).scaled(flat_phase_predictor(d)))


@settings(max_examples=100, deadline=None)
@given(small_diagrams(5, 8), st.integers(0, 1000))
def test_contraction_order_independent(d, seed):
    assert tensors_equal(interpret(d, order_seed=seed), interpret(d))


@pytest.mark.parametrize("n,m", [(1, 1), (1, 2), (2, 2), (0, 3)])
@pytest.mark.parametrize("alpha", range(4))
def test_red_spider_is_hadamard_conjugated_green(n, m, alpha):
    want = compose(hadamards(m), compose(Z(n, m, alpha), hadamards(n)))
    assert tensors_equal(interpret(X(n, m, alpha)), interpret(want))
