"""Univariate polynomials with exact rational coefficients.

Coefficients are stored ascending, ``c[0] + c[1] x + ... + c[n] x^n``, with the
leading coefficient nonzero; the zero polynomial has no coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .lags import parse_rational


def _trim(coeffs) -> tuple[Fraction, ...]:
    c = [Fraction(x) for x in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True, init=False)
class RationalPolynomial:
    coefficients: tuple[Fraction, ...]

    def __init__(self, coefficients: Iterable = ()):
        object.__setattr__(self, "coefficients", _trim(parse_rational(x) for x in coefficients))

    @classmethod
    def monomial(cls, degree: int, c=1) -> "RationalPolynomial":
        return cls([0] * degree + [c])

    @classmethod
    def constant(cls, c) -> "RationalPolynomial":
        return cls([c])

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coefficients) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coefficients

    @property
    def is_constant(self) -> bool:
        return self.degree <= 0

    @property
    def leading(self) -> Fraction:
        return self.coefficients[-1] if self.coefficients else Fraction(0)

    def __getitem__(self, n: int) -> Fraction:
        return self.coefficients[n] if 0 <= n < len(self.coefficients) else Fraction(0)

    def __add__(self, other):
        other = _lift(other)
        n = max(len(self.coefficients), len(other.coefficients))
        return RationalPolynomial(self[i] + other[i] for i in range(n))

    __radd__ = __add__

    def __neg__(self):
        return RationalPolynomial(-c for c in self.coefficients)

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, other):
        other = _lift(other)
        if self.is_zero or other.is_zero:
            return RationalPolynomial()
        out = [Fraction(0)] * (len(self.coefficients) + len(other.coefficients) - 1)
        for i, a in enumerate(self.coefficients):
            if a:
                for j, b in enumerate(other.coefficients):
                    out[i + j] += a * b
        return RationalPolynomial(out)

    __rmul__ = __mul__

    def __divmod__(self, other):
        other = _lift(other)
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coefficients)
        dq = other.degree
        lead = other.leading
        quot = [Fraction(0)] * max(len(rem) - dq, 0)
        for k in range(len(rem) - 1, dq - 1, -1):
            c = rem[k] / lead
            if c:
                quot[k - dq] = c
                for j, b in enumerate(other.coefficients):
                    rem[k - dq + j] -= c * b
        return RationalPolynomial(quot), RationalPolynomial(rem[:dq] if dq > 0 else [])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def monic(self) -> "RationalPolynomial":
        if self.is_zero:
            return self
        return RationalPolynomial(c / self.leading for c in self.coefficients)

    def __call__(self, x):
        """Horner evaluation; exact for Fractions, floating for floats/complex."""
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * x + (c if isinstance(x, (int, Fraction)) else float(c))
        return acc

    def roots(self) -> np.ndarray:
        """Complex roots (floating point), polished by Newton steps on the exact coefficients."""
        if self.degree < 1:
            return np.zeros(0, dtype=complex)
        c = [float(x) for x in reversed(self.coefficients)]
        roots = np.roots(c).astype(complex)
        d = self.derivative()
        out = []
        for z in roots:
            z = complex(z)
            for _ in range(8):
                dz = d(z)
                if dz == 0:
                    break
                step = self(z) / dz
                z -= step
                if abs(step) <= 1e-16 * max(1.0, abs(z)):
                    break
            out.append(z)
        return np.array(out, dtype=complex)

    def derivative(self) -> "RationalPolynomial":
        return RationalPolynomial(i * c for i, c in enumerate(self.coefficients) if i)

    def divides(self, other) -> bool:
        return (_lift(other) % self).is_zero

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for i, c in enumerate(self.coefficients):
            if c == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if mono and abs(c) == 1:
                parts.append(("-" if c < 0 else "") + mono)
            else:
                parts.append(f"{c}" + (f"*{mono}" if mono else ""))
        return " + ".join(parts).replace("+ -", "- ")

    def to_list(self) -> list[str]:
        return [str(c) for c in self.coefficients]


def _lift(x) -> RationalPolynomial:
    return x if isinstance(x, RationalPolynomial) else RationalPolynomial([x])


def poly_xgcd(a: RationalPolynomial, b: RationalPolynomial):
    """Extended Euclid: return ``(g, s, t)`` with ``s a + t b = g`` and ``g`` monic (or zero).

    When neither input is zero the cofactors satisfy ``deg s < deg b`` and ``deg t < deg a``
    (up to the degenerate constant cases).
    """
    r0, r1 = a, b
    s0, s1 = RationalPolynomial([1]), RationalPolynomial()
    t0, t1 = RationalPolynomial(), RationalPolynomial([1])
    while not r1.is_zero:
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if r0.is_zero:
        return r0, s0, t0
    lead = r0.leading
    return r0.monic(), s0 * (1 / lead), t0 * (1 / lead)


def poly_gcd(polys: Iterable[RationalPolynomial]) -> RationalPolynomial:
    g = RationalPolynomial()
    for p in polys:
        g = poly_xgcd(g, p)[0]
    return g

