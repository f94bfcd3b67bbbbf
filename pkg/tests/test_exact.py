import cmath
import math

import pytest
from hypothesis import given, settings, strategies as st

from stabzx.exact import (
    I_UNIT,
    OMEGA,
    ONE,
    SQRT2,
    ZERO,
    ExactAmplitude,
    PrecisionError,
    amp_add,
    amp_mul,
    amp_to_float,
)

W = cmath.exp(1j * math.pi / 4)

coeff = st.integers(-50, 50)
amps = st.builds(lambda a, b, c, d, k: ExactAmplitude((a, b, c, d), k), coeff, coeff, coeff, coeff, st.integers(0, 6))


def close(x: ExactAmplitude, z: complex) -> bool:
    return abs(x.to_complex() - z) < 1e-12


def test_additive_inverse():
    assert amp_add(ONE, ExactAmplitude.from_int(-1)) == ZERO


def test_half_plus_half_inverse_sqrt2_is_sqrt2():
    h = ExactAmplitude.inv_sqrt2()
    s = amp_add(h, h)
    assert s == SQRT2
    assert s.coeffs == (0, 1, 0, -1) and s.k == 0
    assert close(s, math.sqrt(2))


def test_green_pi_scalar_vanishes():
    assert ONE + ExactAmplitude.omega_power(4) == ZERO


def test_omega_times_omega_cubed():
    assert amp_mul(OMEGA, ExactAmplitude.omega_power(3)) == ExactAmplitude.from_int(-1)


def test_i_squared():
    assert I_UNIT * I_UNIT == ExactAmplitude.from_int(-1)


def test_inverse_sqrt2_squared_is_half():
    h = ExactAmplitude.inv_sqrt2()
    p = h * h
    assert p.coeffs == (1, 0, 0, 0) and p.k == 2
    assert close(p, 0.5)


def test_sqrt2_squared_is_two():
    assert SQRT2 * SQRT2 == ExactAmplitude.from_int(2)


def test_float_values():
    assert amp_to_float(ZERO) == (0.0, 0.0)
    re, im = amp_to_float(OMEGA)
    assert abs(re - 0.70710678) < 1e-8 and abs(im - 0.70710678) < 1e-8
    re, im = amp_to_float(ExactAmplitude((0, 1, 0, 0), 2))
    assert abs(re - 0.35355339) < 1e-8 and abs(im - 0.35355339) < 1e-8


def test_precision_is_reported():
    big = ExactAmplitude((2**41, 0, 0, 0))
    with pytest.raises(PrecisionError):
        big.to_complex()


def test_canonical_form_divides_out_sqrt2():
    # 2 / sqrt2^2 is just 1
    assert ExactAmplitude((2, 0, 0, 0), 2) == ONE
    x = ExactAmplitude((0, 1, 0, -1), 3)
    assert x.k == 2 and x.coeffs == (1, 0, 0, 0)


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        ExactAmplitude((1, 2, 3), 0)
    with pytest.raises(ValueError):
        ExactAmplitude((1, 0, 0, 0), -1)


def test_rendering():
    assert str(ZERO) == "0"
    assert str(ExactAmplitude((0, 1, 0, 0), 2)) == "(w)/rt2^2"
    assert str(ExactAmplitude((0, 0, 0, -1), 2)) == "(-w^3)/rt2^2"
    assert str(ExactAmplitude.from_int(3)) == "3"


def test_conjugate():
    assert OMEGA.conjugate() == ExactAmplitude.omega_power(7)
    assert close(ExactAmplitude((1, 2, 3, 4), 1).conjugate(), ExactAmplitude((1, 2, 3, 4), 1).to_complex().conjugate())


@settings(max_examples=10_000, deadline=None)
@given(amps, amps, amps)
def test_ring_laws(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x + y == y + x
    assert x * y == y * x
    assert x * (y + z) == x * y + x * z


@settings(max_examples=500, deadline=None)
@given(amps, amps)
def test_float_is_a_homomorphism(x, y):
    assert abs((x + y).to_complex() - (x.to_complex() + y.to_complex())) < 1e-9
    assert abs((x * y).to_complex() - x.to_complex() * y.to_complex()) < 1e-9


@given(amps)
def test_canonicalisation_is_idempotent(x):
    again = ExactAmplitude(x.coeffs, x.k)
    assert again == x and again.coeffs == x.coeffs and again.k == x.k
    if x.k > 0:
        a, b, c, d = x.coeffs
        # numerator must not be divisible by sqrt2
        assert (a - c) % 2 or (b - d) % 2


@given(amps)
def test_value_matches_definition(x):
    a, b, c, d = ExactAmplitude(x.coeffs, 0).coeffs
    assert close(x, (a + b * W + c * W**2 + d * W**3) / math.sqrt(2) ** x.k)
