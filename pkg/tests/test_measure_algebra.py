import cmath
import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from delaycorona.delay_lattice import build_lattice
from delaycorona.errors import DecompositionError, InvalidInput, MeshMismatch
from delaycorona.measure_algebra import (
    Atom,
    DiracSumMeasure,
    PiecewiseConstantFunction,
    char_eval,
    convolve,
    convolve_measure_function,
    laplace_eval,
    normalize,
    tv_norm,
    truncate,
)

D0 = DiracSumMeasure.delta(0)

fractions = st.fractions(min_value=-5, max_value=5, max_denominator=6)
lags = st.integers(0, 40).map(lambda n: F(n, 4))
measures = st.lists(st.tuples(lags, fractions), max_size=8).map(normalize)
samples = st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False).map(
    lambda z: complex(max(-5.0, min(5.0, z.real)), z.imag)
)


# normalize


def test_normalize_cancels():
    assert normalize([(1, 2), (1, -2)]).is_zero


def test_normalize_delta():
    m = normalize([(0, 1)])
    assert m == D0 and m.atoms == (Atom(F(0), F(1)),)


def test_normalize_merges_and_sorts():
    m = normalize([(1, 1), (0, 3), (1, 2)])
    assert m.atoms == (Atom(F(0), F(3)), Atom(F(1), F(3)))
    assert m.support_bound == 1


def test_normalize_rejects_negative_lag():
    with pytest.raises(InvalidInput):
        normalize([(-1, 1)])


def test_zero_measure_support():
    assert DiracSumMeasure.zero().support_bound == 0


@given(measures)
def test_normalize_idempotent(m):
    assert normalize(m.atoms) == m


# convolve


@given(measures)
def test_delta0_is_unit(m):
    assert convolve(D0, m) == m == convolve(m, D0)


def test_convolve_shifts():
    m = DiracSumMeasure.from_pairs([(1, 1), (2, 1)])
    assert convolve(m, DiracSumMeasure.delta(1)) == DiracSumMeasure.from_pairs([(2, 1), (3, 1)])


@given(measures, measures)
def test_convolve_commutative_and_support(a, b):
    ab = convolve(a, b)
    assert ab == convolve(b, a)
    assert ab.support_bound <= a.support_bound + b.support_bound


@settings(max_examples=50)
@given(measures, measures, measures)
def test_convolve_associative(a, b, c):
    assert convolve(convolve(a, b), c) == convolve(a, convolve(b, c))


@given(measures, measures)
def test_tv_submultiplicative(a, b):
    assert tv_norm(convolve(a, b)) <= tv_norm(a) * tv_norm(b)


@given(measures, measures, samples)
def test_laplace_homomorphism(a, b, s):
    la, lb = laplace_eval(a, s), laplace_eval(b, s)
    err = abs(laplace_eval(convolve(a, b), s) - la * lb)
    assert err <= 1e-12 * (1 + abs(la)) * (1 + abs(lb))


# laplace / tv


@pytest.mark.parametrize("lam,s", [(F(3, 2), 0.3 - 2j), (F(0), 1 + 1j), (F(7), -0.5 + 10j)])
def test_laplace_single_atom(lam, s):
    assert laplace_eval(DiracSumMeasure.delta(lam), s) == pytest.approx(cmath.exp(s * float(lam)), rel=1e-15)


def test_laplace_simple():
    assert laplace_eval(D0, 3 - 7j) == 1
    assert laplace_eval(DiracSumMeasure.from_pairs([(0, 1), (1, -1)]), 0) == 0


def test_laplace_symbolic_lag():
    m = DiracSumMeasure.from_pairs([("sqrt2", 2)], {"sqrt2": math.sqrt(2)})
    assert laplace_eval(m, 1j) == pytest.approx(2 * cmath.exp(1j * math.sqrt(2)), rel=1e-15)


def test_tv_norm():
    assert tv_norm(D0) == 1
    assert tv_norm(DiracSumMeasure.from_pairs([(0, 2), (1, -3)])) == 5
    assert tv_norm(DiracSumMeasure.zero()) == 0


def test_decimal_weights_are_exact():
    m = DiracSumMeasure.from_pairs([("0", 0.1), ("1/2", "0.25")])
    assert m.weight_at(0) == F(1, 10) and m.weight_at(F(1, 2)) == F(1, 4)


# char_eval


def test_char_eval_examples():
    dec = build_lattice([F(1)])
    assert char_eval(D0, 0.7, [0.3], dec) == 1
    assert char_eval(DiracSumMeasure.delta(1), 0.0, [0.5], dec) == pytest.approx(-1, abs=1e-15)


@given(measures, st.floats(-2, 2))
def test_char_eval_zero_phase_is_laplace(m, sigma):
    dec = build_lattice(list(m.lags) or [F(0)])
    ref = laplace_eval(m, sigma)
    assert abs(char_eval(m, sigma, [0.0] * dec.q, dec) - ref) <= 1e-12 * (1 + float(tv_norm(m)) * math.exp(2 * 10))


def test_char_eval_missing_lag():
    dec = build_lattice([F(1)])
    with pytest.raises(DecompositionError):
        char_eval(DiracSumMeasure.delta(F(1, 3)), 0.0, [0.0], dec)


# piecewise constant functions


def test_truncate_examples():
    f = PiecewiseConstantFunction.build(1, 0, [1, 2])
    assert truncate(f) == f
    g = PiecewiseConstantFunction.build(1, -2, [1, 2])
    assert all(v == (0,) for v in truncate(g).values)
    h = PiecewiseConstantFunction.build(1, -1, [1, 1])
    assert truncate(h).values == ((0,), (1,))


def test_convolve_function_examples():
    f = PiecewiseConstantFunction.build(1, 0, [1])
    assert convolve_measure_function(D0, f) == f
    g = convolve_measure_function(DiracSumMeasure.delta(1), f)
    assert g(F(-1, 2)) == (1,) and g(F(1, 2)) == (0,)


def test_convolve_function_mesh_mismatch():
    f = PiecewiseConstantFunction.build(F(1, 2), 0, [1])
    with pytest.raises(MeshMismatch):
        convolve_measure_function(DiracSumMeasure.delta(F(1, 3)), f)


def test_piecewise_start_must_be_on_mesh():
    with pytest.raises(MeshMismatch):
        PiecewiseConstantFunction.build(F(1, 2), F(1, 3), [1])


@given(
    st.lists(st.tuples(st.integers(0, 8).map(lambda n: F(n, 2)), fractions), max_size=5).map(normalize),
    st.lists(fractions, min_size=1, max_size=10),
    st.integers(0, 4),
)
def test_truncation_identity(m, vals, offset):
    # pi(m * f) = pi(m * pi f) with f supported on [0, inf): cells start at a nonnegative mesh point
    f = PiecewiseConstantFunction.build(F(1, 2), F(offset, 2), vals)
    lhs = truncate(convolve_measure_function(m, f))
    rhs = truncate(convolve_measure_function(m, truncate(f)))
    assert lhs == rhs


@given(
    st.lists(st.tuples(st.integers(0, 8).map(lambda n: F(n, 2)), fractions), max_size=5).map(normalize),
    st.lists(fractions, min_size=1, max_size=10),
    st.integers(-6, 4),
)
def test_truncation_identity_any_support(m, vals, offset):
    # the identity pi(a * b) = pi(a * pi b) holds for measures on the nonpositive half-line
    f = PiecewiseConstantFunction.build(F(1, 2), F(offset, 2), vals)
    lhs = truncate(convolve_measure_function(m, truncate(f)))
    for t in range(-12, 12):
        t = F(t, 4)
        if t >= 0:
            direct = sum((a.weight * (f(t + a.lag)[0] if t + a.lag >= 0 else 0) for a in m.atoms), F(0))
            got = lhs(t)[0] if lhs.start <= t < lhs.end else F(0)
            assert got == direct
