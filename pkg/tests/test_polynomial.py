from fractions import Fraction as F

import numpy as np
import sympy
from hypothesis import given
from hypothesis import strategies as st

from delaycorona.polynomial import RationalPolynomial as P
from delaycorona.polynomial import poly_gcd, poly_xgcd

X = sympy.Symbol("x")
coeff_lists = st.lists(st.fractions(min_value=-4, max_value=4, max_denominator=4), max_size=6)


def to_sympy(p):
    return sympy.Poly(list(reversed([sympy.Rational(c.numerator, c.denominator) for c in p.coefficients])) or [0], X, domain="QQ")


def test_trim_and_degree():
    assert P([1, 2, 0, 0]).coefficients == (1, 2)
    assert P([0, 0]).is_zero and P([]).degree == -1
    assert P([3]).degree == 0


def test_arithmetic():
    a, b = P([1, 1]), P([-1, 1])
    assert a * b == P([-1, 0, 1])
    assert a + b == P([0, 2])
    assert divmod(P([-1, 0, 1]), a) == (b, P())
    assert str(P([1, -1])) == "1 - x"


@given(coeff_lists, coeff_lists)
def test_divmod_matches_sympy(a, b):
    a, b = P(a), P(b)
    if b.is_zero:
        return
    q, r = divmod(a, b)
    assert q * b + r == a and r.degree < b.degree
    sq, sr = sympy.div(to_sympy(a), to_sympy(b))
    assert to_sympy(q) == sq.set_domain("QQ") and to_sympy(r) == sr.set_domain("QQ")


@given(coeff_lists, coeff_lists)
def test_xgcd(a, b):
    a, b = P(a), P(b)
    g, s, t = poly_xgcd(a, b)
    assert s * a + t * b == g
    if not (a.is_zero and b.is_zero):
        assert g.leading == 1
        assert to_sympy(g) == sympy.gcd(to_sympy(a), to_sympy(b)).monic().set_domain("QQ")


def test_gcd_many():
    x = P([0, 1])
    assert poly_gcd([x * x, x * P([1, 1])]) == x
    assert poly_gcd([P([1, -1]), P([2, -2])]) == P([-1, 1])


def test_roots():
    p = P([2, -3, 1])  # (x-1)(x-2)
    assert np.allclose(sorted(p.roots().real), [1, 2])
    q = P([1, 0, 1])
    assert np.allclose(sorted(q.roots().imag), [-1, 1])


def test_evaluation_and_derivative():
    p = P([F(1, 2), 0, 3])
    assert p(2) == F(25, 2)
    assert p.derivative() == P([0, 6])
    assert P([1, -1]).divides(P([1, 0, -1]))
