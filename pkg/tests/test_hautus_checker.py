import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from delaycorona.errors import InvalidInput
from delaycorona.hautus_checker import (
    FAIL,
    PASS,
    SystemSpec,
    _objective,
    cond_i_scan,
    cond_ii_check,
    default_window,
    h_eval,
    hautus_decide,
    sigma_min,
)

GENS = {"sqrt2": math.sqrt(2)}


def scalar(a, b, delay=1):
    return SystemSpec.build([[[a]]], [[b]], [delay])


def test_h_eval():
    assert np.allclose(h_eval(scalar(0, 1), 0.3 + 2j), [[1]])
    assert abs(h_eval(scalar(1, 0), 0)[0, 0]) < 1e-15
    assert h_eval(scalar(1, 0), 1j * math.pi)[0, 0] == pytest.approx(2)
    spec = SystemSpec.build([[[1, 0], [0, 2]], [[0, 1], [0, 0]]], [[0], [1]], [1, 2])
    s = 0.4 - 1.1j
    ref = np.eye(2) - np.exp(-s) * np.diag([1, 2]) - np.exp(-2 * s) * np.array([[0, 1], [0, 0]])
    assert np.allclose(h_eval(spec, s), ref, atol=1e-14)


def test_sigma_min():
    assert sigma_min(np.zeros((2, 2)), np.zeros((2, 1))) == 0
    assert sigma_min(np.eye(2), np.zeros((2, 1))) == pytest.approx(1)


def test_cond_ii():
    assert cond_ii_check(scalar(0, 0)) == (FAIL, 0)
    assert cond_ii_check(scalar(3, 0)) == (PASS, 1)
    assert cond_ii_check(scalar(0, 1)) == (PASS, 1)


def test_cond_i_scalar():
    # 1 - a e^{-s} vanishes at sigma = ln a, which B = 0 cannot repair
    res = cond_i_scan(scalar(2, 0))
    assert res.verdict == FAIL
    assert res.polished_argmin.sigma == pytest.approx(math.log(2), abs=1e-6)
    assert res.witness_matrix is not None
    assert cond_i_scan(scalar(2, 1)).verdict == PASS
    # A = 0 and B = 0: H = I everywhere, yet the sigma -> -inf limit [A_N, B] = 0 drops rank
    assert cond_i_scan(scalar(0, 0)).verdict != PASS


def test_decide_examples():
    assert hautus_decide(scalar(2, 1)).overall == PASS
    assert hautus_decide(scalar(2, 0)).overall == FAIL
    chain = SystemSpec.build([[[0, 1], [0, 0]]], [[0], [1]], [1])
    assert hautus_decide(chain).overall == PASS
    r = hautus_decide(SystemSpec.build([[[0, 0], [0, 0]]], [[0], [1]], [1]))
    assert r.cond_ii == FAIL and r.overall == FAIL


def test_incommensurable_fail():
    # 1 - a z1 - c z2 has torus zeros whenever |a - c| <= 1 <= a + c
    spec = SystemSpec.build([[[1]], [[1]]], [[0]], [1, "sqrt2"], GENS)
    res = cond_i_scan(spec)
    assert res.verdict == FAIL
    sig = res.polished_argmin.sigma
    a, c = math.exp(-sig), math.exp(-math.sqrt(2) * sig)
    assert abs(a - c) <= 1 + 1e-6 and a + c >= 1 - 1e-6
    assert abs(res.witness_matrix[0, 0]) < res.fail_tol


def test_invalid():
    with pytest.raises(InvalidInput):
        cond_i_scan(scalar(1, 1), window=(1.0, 1.0))
    with pytest.raises(InvalidInput):
        SystemSpec.build([[[1]], [[1]]], [[1]], [2, 1])
    with pytest.raises(InvalidInput):
        SystemSpec.build([[[1, 2]]], [[1]], [1])


def test_default_window_plus_side():
    spec = SystemSpec.build([[[1, 3], [0, -2]], [[0.5, 0], [1, 1]]], [[1], [0]], [1, 3])
    lo, hi = default_window(spec)
    assert lo < 0 < hi and -lo >= hi
    tail = sum(np.exp(-hi * lam) * a for a, lam in zip(spec.A_float, spec.delay_values))
    assert np.linalg.norm(tail, 2) < 0.5


def test_endpoint_consistency():
    spec = SystemSpec.build([[[1, 3], [0, -2]], [[0.5, 0], [1, 1]]], [[1], [0]], [1, 3])
    res = cond_i_scan(spec, n_sigma=16, n_torus=16)
    obj, _ = _objective(spec, spec.lattice())
    far = obj(np.array([60.0]), np.array([[3]]), 16)[0]
    assert far == pytest.approx(res.endpoint_plus, abs=1e-12)
    # renormalized sigma -> -inf limit: e^{sigma Lambda_N} H -> -A_N z^{m_N}
    sig = -40.0
    H = h_eval(spec, sig) * math.exp(sig * 3)
    assert sigma_min(H, spec.B_float * 0) == pytest.approx(sigma_min(spec.A_float[-1], spec.B_float * 0), abs=1e-9)


def test_halved_scan_matches_full():
    spec = SystemSpec.build([[[1, 3], [0, -2]], [[0.5, 0], [1, 1]]], [[1], [0]], [1, 3])
    full = cond_i_scan(spec, n_sigma=32, n_torus=32)
    half = cond_i_scan(spec, n_sigma=32, n_torus=32, halve=True)
    assert full.min_sigma_min == half.min_sigma_min
    assert full.verdict == half.verdict


entries = st.integers(-2, 2)


@settings(max_examples=15, deadline=None)
@given(
    st.lists(entries, min_size=4, max_size=4),
    st.lists(entries, min_size=4, max_size=4),
    st.lists(entries, min_size=2, max_size=2),
    st.sampled_from([[[1, 1], [0, 1]], [[2, 0], [1, 1]], [[0, 1], [1, 0]]]),
)
def test_similarity_invariance(a1, a2, b, P):
    spec = SystemSpec.build([[a1[:2], a1[2:]], [a2[:2], a2[2:]]], [[b[0]], [b[1]]], [1, 2])
    other = spec.similar(P)
    r1 = hautus_decide(spec, n_sigma=16, n_torus=16)
    r2 = hautus_decide(other, n_sigma=16, n_torus=16)
    assert r1.cond_ii == r2.cond_ii
    if PASS in (r1.cond_i.verdict, r2.cond_i.verdict) and FAIL in (r1.cond_i.verdict, r2.cond_i.verdict):
        pytest.fail("similarity changed a decided condition (i) verdict")
    if P == [[0, 1], [1, 0]]:
        # a permutation is orthogonal, so singular values are unchanged
        assert r1.cond_i.min_sigma_min == pytest.approx(r2.cond_i.min_sigma_min, abs=1e-12)
