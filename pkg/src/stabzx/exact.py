"""Exact arithmetic in Z[w][1/sqrt2], w = exp(i*pi/4).

Every entry of a stabilizer ZX tensor lives in this ring, so nothing on the
evaluation path ever touches floating point.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Tuple, Union

Coeffs = Tuple[int, int, int, int]

_FLOAT_SAFE = 2**40


class PrecisionError(ArithmeticError):
    """Raised when a float rendering cannot meet the 1e-12 guarantee."""


def div_sqrt2(c: Coeffs) -> Coeffs | None:
    """Return c / sqrt2 if it stays in Z[w], else None."""
    a, b, cc, d = c
    if (a - cc) % 2 or (b - d) % 2:
        return None
    # sqrt2 = w - w^3; (w - w^3)(p + qw + rw^2 + sw^3) = (q-s) + (p+r)w + (q+s)w^2 + (r-p)w^3
    return ((b - d) // 2, (a + cc) // 2, (b + d) // 2, (cc - a) // 2)


def mul_sqrt2(c: Coeffs) -> Coeffs:
    a, b, cc, d = c
    return (b - d, a + cc, b + d, cc - a)


def mul_coeffs(x: Coeffs, y: Coeffs) -> Coeffs:
    out = [0, 0, 0, 0]
    for i, xi in enumerate(x):
        if not xi:
            continue
        for j, yj in enumerate(y):
            n = i + j
            if n >= 4:
                out[n - 4] -= xi * yj
            else:
                out[n] += xi * yj
    return tuple(out)  # type: ignore[return-value]


def _canonical(c: Coeffs, k: int) -> tuple[Coeffs, int]:
    if c == (0, 0, 0, 0):
        return c, 0
    while k > 0:
        q = div_sqrt2(c)
        if q is None:
            break
        c, k = q, k - 1
    return c, k


@dataclass(frozen=True, init=False)
class ExactAmplitude:
    """(a + b w + c w^2 + d w^3) / sqrt2^k, kept in canonical form."""

    coeffs: Coeffs
    k: int

    def __init__(self, coeffs=(0, 0, 0, 0), k: int = 0) -> None:
        if k < 0:
            raise ValueError("sqrt2 exponent must be non-negative")
        c = tuple(int(v) for v in coeffs)
        if len(c) != 4:
            raise ValueError("need exactly four coefficients")
        c, k = _canonical(c, k)  # type: ignore[arg-type]
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "k", k)

    # constructors
    @classmethod
    def from_int(cls, n: int) -> ExactAmplitude:
        return cls((n, 0, 0, 0))

    @classmethod
    def omega_power(cls, p: int) -> ExactAmplitude:
        p %= 8
        c = [0, 0, 0, 0]
        c[p % 4] = 1 if p < 4 else -1
        return cls(c)

    @classmethod
    def sqrt2(cls) -> ExactAmplitude:
        return cls((0, 1, 0, -1))

    @classmethod
    def inv_sqrt2(cls) -> ExactAmplitude:
        return cls((1, 0, 0, 0), 1)

    # ring operations
    def _aligned(self, other: ExactAmplitude) -> tuple[Coeffs, Coeffs, int]:
        x, y = self.coeffs, other.coeffs
        k = max(self.k, other.k)
        for _ in range(k - self.k):
            x = mul_sqrt2(x)
        for _ in range(k - other.k):
            y = mul_sqrt2(y)
        return x, y, k

    def __add__(self, other: Union[ExactAmplitude, int]) -> ExactAmplitude:
        if isinstance(other, int):
            other = ExactAmplitude.from_int(other)
        if not isinstance(other, ExactAmplitude):
            return NotImplemented
        x, y, k = self._aligned(other)
        return ExactAmplitude(tuple(a + b for a, b in zip(x, y)), k)

    __radd__ = __add__

    def __neg__(self) -> ExactAmplitude:
        return ExactAmplitude(tuple(-a for a in self.coeffs), self.k)

    def __sub__(self, other: Union[ExactAmplitude, int]) -> ExactAmplitude:
        if isinstance(other, int):
            other = ExactAmplitude.from_int(other)
        return self + (-other)

    def __rsub__(self, other: int) -> ExactAmplitude:
        return ExactAmplitude.from_int(other) - self

    def __mul__(self, other: Union[ExactAmplitude, int]) -> ExactAmplitude:
        if isinstance(other, int):
            other = ExactAmplitude.from_int(other)
        if not isinstance(other, ExactAmplitude):
            return NotImplemented
        return ExactAmplitude(mul_coeffs(self.coeffs, other.coeffs), self.k + other.k)

    __rmul__ = __mul__

    def conjugate(self) -> ExactAmplitude:
        # conj(w) = w^-1 = -w^3
        a, b, c, d = self.coeffs
        return ExactAmplitude((a, -d, -c, -b), self.k)

    def is_zero(self) -> bool:
        return self.coeffs == (0, 0, 0, 0)

    def to_complex(self) -> complex:
        if max(abs(v) for v in self.coeffs) >= _FLOAT_SAFE:
            raise PrecisionError(f"coefficients of {self} exceed the float-safe range")
        w = cmath.exp(1j * math.pi / 4)
        num = sum(v * w**i for i, v in enumerate(self.coeffs))
        return num / math.sqrt(2) ** self.k

    def __complex__(self) -> complex:
        return self.to_complex()

    def __str__(self) -> str:
        a, b, c, d = self.coeffs
        if self.is_zero():
            return "0"
        terms = []
        for v, mono in ((a, ""), (b, "w"), (c, "w^2"), (d, "w^3")):
            if v == 0:
                continue
            if mono and abs(v) == 1:
                s = mono if v > 0 else "-" + mono
            else:
                s = f"{v}*{mono}" if mono else str(v)
            terms.append(s)
        num = "+".join(terms).replace("+-", "-")
        return num if self.k == 0 else f"({num})/rt2^{self.k}"


def amp_add(x: ExactAmplitude, y: ExactAmplitude) -> ExactAmplitude:
    return x + y


def amp_mul(x: ExactAmplitude, y: ExactAmplitude) -> ExactAmplitude:
    return x * y


def amp_to_float(x: ExactAmplitude) -> tuple[float, float]:
    z = x.to_complex()
    return (z.real, z.imag)


ZERO = ExactAmplitude()
ONE = ExactAmplitude.from_int(1)
OMEGA = ExactAmplitude.omega_power(1)
I_UNIT = ExactAmplitude.omega_power(2)
SQRT2 = ExactAmplitude.sqrt2()
